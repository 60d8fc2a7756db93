//! Random schemas, translations and instances, and brute-force oracles that
//! recompute migrations without sharing code with the engine.
//!
//! Everything here assumes acyclic schemas, where every vertex has finitely
//! many outgoing paths and the path equivalence can be decided by closing
//! the set of all paths under one-step rewrites.

pub mod checks;

use std::collections::HashMap;
use std::sync::Arc;

use catmig::dsl::{self, Document, Item};
use catmig::model::{ArrowId, Graph, Instance, InstanceMorphism, Path, Schema, VertexId};
use catmig::typing::TypedInstance;
use catmig::Translation;
use rand::seq::SliceRandom;
use rand::Rng;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a.max(b)] = a.min(b);
        true
    }
}

/// Every path out of `v`, shortest first. Panics on cycles longer than 64.
pub fn all_paths(schema: &Schema, v: VertexId) -> Vec<Path> {
    let g = schema.graph();
    let mut out = vec![Path::identity(v)];
    let mut k = 0;
    while k < out.len() {
        let p = out[k].clone();
        assert!(p.len() < 64, "schema is not acyclic");
        let end = end_of(schema, &p);
        for &a in g.outgoing(end) {
            let mut q = p.clone();
            q.arrows.push(a);
            out.push(q);
        }
        k += 1;
    }
    out
}

fn end_of(schema: &Schema, p: &Path) -> VertexId {
    p.arrows
        .last()
        .map_or(p.source, |&a| schema.graph().target(a))
}

fn concat(p: &Path, q: &Path) -> Path {
    let mut r = p.clone();
    r.arrows.extend_from_slice(&q.arrows);
    r
}

/// Vertices visited by `p`, including both ends.
fn stops(schema: &Schema, p: &Path) -> Vec<VertexId> {
    let g = schema.graph();
    let mut out = vec![p.source];
    out.extend(p.arrows.iter().map(|&a| g.target(a)));
    out
}

/// All paths obtained from `p` by replacing one occurrence of a side of a
/// declared equation by the other side.
fn rewrites(schema: &Schema, p: &Path) -> Vec<Path> {
    let at = stops(schema, p);
    let mut out = Vec::new();
    for eq in schema.equations() {
        for (from, to) in [(&eq.lhs, &eq.rhs), (&eq.rhs, &eq.lhs)] {
            let n = from.arrows.len();
            for i in 0..=p.arrows.len().saturating_sub(n) {
                if i + n > p.arrows.len() || at[i] != from.source {
                    continue;
                }
                if p.arrows[i..i + n] == from.arrows[..] {
                    let mut arrows = p.arrows[..i].to_vec();
                    arrows.extend_from_slice(&to.arrows);
                    arrows.extend_from_slice(&p.arrows[i + n..]);
                    out.push(Path::new(p.source, arrows));
                }
            }
        }
    }
    out
}

/// Paths out of `v` and, for each, the index of its equivalence class.
pub struct PathClasses {
    pub paths: Vec<Path>,
    pub class: Vec<usize>,
    pub count: usize,
    index: HashMap<Path, usize>,
}

impl PathClasses {
    pub fn of(&self, p: &Path) -> usize {
        self.class[self.index[p]]
    }

    /// One path per class, in class order.
    pub fn representatives(&self) -> Vec<Path> {
        let mut reps: Vec<Option<Path>> = vec![None; self.count];
        for (p, &c) in self.paths.iter().zip(&self.class) {
            reps[c].get_or_insert_with(|| p.clone());
        }
        reps.into_iter().map(Option::unwrap).collect()
    }
}

pub fn path_classes(schema: &Schema, v: VertexId) -> PathClasses {
    let paths = all_paths(schema, v);
    let index: HashMap<Path, usize> = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut uf = UnionFind::new(paths.len());
    for (i, p) in paths.iter().enumerate() {
        for q in rewrites(schema, p) {
            uf.union(i, index[&q]);
        }
    }
    let mut dense = HashMap::new();
    let class = (0..paths.len())
        .map(|i| {
            let r = uf.find(i);
            let n = dense.len();
            *dense.entry(r).or_insert(n)
        })
        .collect();
    PathClasses {
        paths,
        class,
        count: dense.len(),
        index,
    }
}

/// True if `p` and `q` are equal in the category presented by an acyclic schema.
pub fn equivalent(schema: &Schema, p: &Path, q: &Path) -> bool {
    if p.source != q.source {
        return false;
    }
    let pc = path_classes(schema, p.source);
    pc.of(p) == pc.of(q)
}

/// A random acyclic schema whose arrows all go from lower to higher vertices.
pub fn random_schema<R: Rng>(
    rng: &mut R,
    name: &str,
    prefix: (&str, &str),
    vertices: usize,
    arrows: usize,
    equations: usize,
) -> Schema {
    let mut g = Graph::new();
    for k in 0..vertices {
        g.add_vertex(format!("{}{k}", prefix.0)).unwrap();
    }
    if vertices >= 2 {
        for k in 0..arrows {
            let s = rng.gen_range(0..vertices - 1);
            let t = rng.gen_range(s + 1..vertices);
            g.add_arrow(format!("{}{k}", prefix.1), VertexId(s), VertexId(t))
                .unwrap();
        }
    }
    let mut schema = Schema::new(name, g);
    for _ in 0..equations {
        if let Some((p, q)) = parallel_pair(rng, &schema, |_, _| true) {
            schema.add_equation(p, q).unwrap();
        }
    }
    schema
}

/// Two distinct parallel paths accepted by `keep`, if any.
fn parallel_pair<R: Rng>(
    rng: &mut R,
    schema: &Schema,
    keep: impl Fn(&Path, &Path) -> bool,
) -> Option<(Path, Path)> {
    let mut candidates = Vec::new();
    for v in schema.graph().vertices() {
        let paths = all_paths(schema, v);
        for (i, p) in paths.iter().enumerate() {
            for q in &paths[i + 1..] {
                if end_of(schema, p) == end_of(schema, q) && keep(p, q) {
                    candidates.push((p.clone(), q.clone()));
                }
            }
        }
    }
    candidates.choose(rng).cloned()
}

/// A random acyclic source schema `C`, target schema `D` and translation
/// between them, each schema with at most 4 vertices, 5 arrows and 2
/// equations. Equations of `C` are chosen among pairs whose images are
/// equivalent in `D`, so the translation is always valid.
pub fn random_translation<R: Rng>(rng: &mut R) -> Translation {
    let nd = rng.gen_range(1..=4);
    let nad = rng.gen_range(0..=5);
    let ned = rng.gen_range(0..=2);
    let d = Arc::new(random_schema(rng, "D", ("d", "g"), nd, nad, ned));

    let nc = rng.gen_range(1..=4);
    let vmap: Vec<VertexId> = (0..nc).map(|_| VertexId(rng.gen_range(0..nd))).collect();
    let mut g = Graph::new();
    for k in 0..nc {
        g.add_vertex(format!("c{k}")).unwrap();
    }
    let mut amap = Vec::new();
    let reach: Vec<Vec<Path>> = (0..nd).map(|v| all_paths(&d, VertexId(v))).collect();
    for _ in 0..rng.gen_range(0..=5) {
        if nc < 2 {
            break;
        }
        let s = rng.gen_range(0..nc - 1);
        let t = rng.gen_range(s + 1..nc);
        let options: Vec<&Path> = reach[vmap[s].0]
            .iter()
            .filter(|p| end_of(&d, p) == vmap[t])
            .collect();
        if let Some(p) = options.choose(rng) {
            g.add_arrow(format!("f{}", amap.len()), VertexId(s), VertexId(t))
                .unwrap();
            amap.push((*p).clone());
        }
    }
    let mut c = Schema::new("C", g);
    let image = |p: &Path| {
        let mut out = Path::identity(vmap[p.source.0]);
        for a in &p.arrows {
            out = concat(&out, &amap[a.0]);
        }
        out
    };
    for _ in 0..rng.gen_range(0..=2) {
        if let Some((p, q)) = parallel_pair(rng, &c, |p, q| equivalent(&d, &image(p), &image(q))) {
            if !c.equations().iter().any(|e| e.lhs == p && e.rhs == q) {
                c.add_equation(p, q).unwrap();
            }
        }
    }
    Translation::new(Arc::new(c), d, vmap, amap).unwrap()
}

fn topological(schema: &Schema) -> Vec<VertexId> {
    let g = schema.graph();
    let mut indeg = vec![0usize; g.vertex_count()];
    for a in g.arrows() {
        indeg[g.target(a).0] += 1;
    }
    let mut ready: Vec<VertexId> = g.vertices().filter(|v| indeg[v.0] == 0).collect();
    let mut out = Vec::new();
    while let Some(v) = ready.pop() {
        out.push(v);
        for &a in g.outgoing(v) {
            let t = g.target(a);
            indeg[t.0] -= 1;
            if indeg[t.0] == 0 {
                ready.push(t);
            }
        }
    }
    assert_eq!(out.len(), g.vertex_count(), "schema is not acyclic");
    out
}

/// A random instance satisfying every equation, with at most `max_rows`
/// rows per table.
///
/// Tables are filled from the sinks up; each row draws its cells at random
/// until the equations out of its table hold, and is dropped if that fails.
pub fn random_instance<R: Rng>(rng: &mut R, schema: &Arc<Schema>, max_rows: usize) -> Instance {
    let g = schema.graph();
    let mut rows: Vec<usize> = vec![0; g.vertex_count()];
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); g.arrow_count()];
    for v in topological(schema).into_iter().rev() {
        let out = g.outgoing(v);
        if out.iter().any(|&a| rows[g.target(a).0] == 0) {
            continue;
        }
        let want = rng.gen_range(0..=max_rows);
        let eqs: Vec<_> = schema
            .equations()
            .iter()
            .filter(|e| e.lhs.source == v)
            .collect();
        for _ in 0..want {
            for _attempt in 0..50 {
                let cells: Vec<usize> = out
                    .iter()
                    .map(|&a| rng.gen_range(0..rows[g.target(a).0]))
                    .collect();
                let eval = |p: &Path| -> Option<usize> {
                    let (first, rest) = p.arrows.split_first()?;
                    let slot = out.iter().position(|a| a == first).unwrap();
                    Some(rest.iter().fold(cells[slot], |x, a| cols[a.0][x]))
                };
                if eqs.iter().all(|e| eval(&e.lhs) == eval(&e.rhs)) {
                    for (&a, &x) in out.iter().zip(&cells) {
                        cols[a.0].push(x);
                    }
                    rows[v.0] += 1;
                    break;
                }
            }
        }
    }
    let names = rows
        .iter()
        .map(|&n| (0..n).map(|k| format!("r{k}")).collect())
        .collect();
    Instance::from_parts(schema.clone(), names, cols).unwrap()
}

fn instance_from_classes(
    schema: &Arc<Schema>,
    elements: Vec<Vec<String>>,
    action: Vec<Vec<usize>>,
) -> Instance {
    Instance::from_parts(schema.clone(), elements, action).unwrap()
}

/// Left pushforward by term enumeration: all terms `(row, path)` are listed
/// and quotiented by the congruence generated by the source columns and
/// the target equations.
pub fn sigma_oracle(f: &Translation, i: &Instance) -> Instance {
    let c = f.source();
    let d = f.target();
    let dg = d.graph();
    // Terms, grouped by seed.
    let mut seeds: Vec<(VertexId, usize)> = Vec::new();
    let mut seed_of = HashMap::new();
    for v in c.graph().vertices() {
        for r in 0..i.row_count(v) {
            seed_of.insert((v, r), seeds.len());
            seeds.push((v, r));
        }
    }
    let mut terms: Vec<(usize, Path)> = Vec::new();
    let mut term_of: HashMap<(usize, Path), usize> = HashMap::new();
    for (s, &(v, _)) in seeds.iter().enumerate() {
        for p in all_paths(d, f.vertex(v)) {
            term_of.insert((s, p.clone()), terms.len());
            terms.push((s, p));
        }
    }
    let mut uf = UnionFind::new(terms.len());
    for (s, &(v, r)) in seeds.iter().enumerate() {
        for &a in c.graph().outgoing(v) {
            let t = c.graph().target(a);
            let s2 = seed_of[&(t, i.apply(a, r))];
            for q in all_paths(d, f.vertex(t)) {
                let here = term_of[&(s, concat(f.arrow(a), &q))];
                uf.union(here, term_of[&(s2, q)]);
            }
        }
    }
    for (k, (s, p)) in terms.iter().enumerate() {
        for q in rewrites(d, p) {
            uf.union(k, term_of[&(*s, q)]);
        }
    }
    let extend = |k: usize, a: ArrowId| {
        let (s, p) = &terms[k];
        let mut q = p.clone();
        q.arrows.push(a);
        term_of[&(*s, q)]
    };
    loop {
        let mut changed = false;
        let mut rep: HashMap<usize, usize> = HashMap::new();
        for k in 0..terms.len() {
            let root = uf.find(k);
            let r = *rep.entry(root).or_insert(k);
            if r == k {
                continue;
            }
            let end = end_of(d, &terms[k].1);
            for &a in dg.outgoing(end) {
                changed |= uf.union(extend(k, a), extend(r, a));
            }
        }
        if !changed {
            break;
        }
    }
    let mut elements: Vec<Vec<String>> = vec![Vec::new(); dg.vertex_count()];
    let mut element_of: HashMap<usize, usize> = HashMap::new();
    let mut reps: Vec<Vec<usize>> = vec![Vec::new(); dg.vertex_count()];
    for k in 0..terms.len() {
        let root = uf.find(k);
        if element_of.contains_key(&root) {
            continue;
        }
        let end = end_of(d, &terms[k].1);
        element_of.insert(root, elements[end.0].len());
        let (s, p) = &terms[k];
        elements[end.0].push(format!("{s}:{}", d.display_path(p)));
        reps[end.0].push(k);
    }
    let action = dg
        .arrows()
        .map(|a| {
            reps[dg.source(a).0]
                .iter()
                .map(|&k| element_of[&uf.find(extend(k, a))])
                .collect()
        })
        .collect();
    instance_from_classes(d, elements, action)
}

/// Right pushforward by exhaustive search over assignments of rows to the
/// comma objects under each target vertex. Returns `None` when some vertex
/// has more than `limit` candidate assignments.
pub fn pi_oracle(f: &Translation, i: &Instance, limit: usize) -> Option<Instance> {
    let c = f.source();
    let d = f.target();
    let cg = c.graph();
    let dg = d.graph();
    let classes: Vec<PathClasses> = dg.vertices().map(|v| path_classes(d, v)).collect();
    // Comma objects under d: (c, class of a path d -> F c).
    let objects: Vec<Vec<(VertexId, usize)>> = dg
        .vertices()
        .map(|dv| {
            let pc = &classes[dv.0];
            let reps = pc.representatives();
            let mut objs = Vec::new();
            for cv in cg.vertices() {
                for (k, p) in reps.iter().enumerate() {
                    if end_of(d, p) == f.vertex(cv) {
                        objs.push((cv, k));
                    }
                }
            }
            objs
        })
        .collect();
    let mut families: Vec<Vec<Vec<usize>>> = Vec::new();
    for dv in dg.vertices() {
        let objs = &objects[dv.0];
        let pc = &classes[dv.0];
        let reps = pc.representatives();
        let mut total: usize = 1;
        for &(cv, _) in objs {
            total = total.checked_mul(i.row_count(cv))?;
            if total > limit {
                return None;
            }
        }
        let position: HashMap<(VertexId, usize), usize> =
            objs.iter().enumerate().map(|(k, &o)| (o, k)).collect();
        let mut fams = Vec::new();
        let mut digits = vec![0usize; objs.len()];
        for _ in 0..total {
            let ok = objs.iter().enumerate().all(|(k, &(cv, cls))| {
                cg.outgoing(cv).iter().all(|&a| {
                    let to = (cg.target(a), pc.of(&concat(&reps[cls], f.arrow(a))));
                    digits[position[&to]] == i.apply(a, digits[k])
                })
            });
            if ok {
                fams.push(digits.clone());
            }
            for (k, &(cv, _)) in objs.iter().enumerate() {
                digits[k] += 1;
                if digits[k] < i.row_count(cv) {
                    break;
                }
                digits[k] = 0;
            }
        }
        families.push(fams);
    }
    let action = dg
        .arrows()
        .map(|a| {
            let (s, t) = (dg.source(a), dg.target(a));
            let step = Path::new(s, vec![a]);
            let reps_t = classes[t.0].representatives();
            let pos_s: HashMap<(VertexId, usize), usize> = objects[s.0]
                .iter()
                .enumerate()
                .map(|(k, &o)| (o, k))
                .collect();
            families[s.0]
                .iter()
                .map(|fam| {
                    let moved: Vec<usize> = objects[t.0]
                        .iter()
                        .map(|&(cv, cls)| {
                            let p = concat(&step, &reps_t[cls]);
                            fam[pos_s[&(cv, classes[s.0].of(&p))]]
                        })
                        .collect();
                    families[t.0].iter().position(|g| *g == moved).unwrap()
                })
                .collect()
        })
        .collect();
    let elements = families
        .iter()
        .map(|fs| (0..fs.len()).map(|k| format!("p{k}")).collect())
        .collect();
    Some(instance_from_classes(d, elements, action))
}

/// Colours rows of `a` and `b` jointly by repeated refinement on their
/// vertex, their images and the multiset of their preimages, so that an
/// isomorphism can only send a row to a row of the same colour.
fn refine_colours(
    a: &Instance,
    b: &Instance,
    fixed: &dyn Fn(VertexId) -> bool,
) -> [Vec<Vec<usize>>; 2] {
    let g = a.schema().graph();
    let sides = [a, b];
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut colour: [Vec<Vec<usize>>; 2] = [0, 1].map(|k| {
        g.vertices()
            .map(|v| {
                (0..sides[k].row_count(v))
                    .map(|r| {
                        let key = if fixed(v) {
                            format!("{}:{}", v.0, sides[k].row_id(v, r))
                        } else {
                            format!("{}", v.0)
                        };
                        let n = ids.len();
                        *ids.entry(key).or_insert(n)
                    })
                    .collect()
            })
            .collect()
    });
    let mut classes = ids.len();
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let next: [Vec<Vec<usize>>; 2] = [0, 1].map(|k| {
            let inst = sides[k];
            let mut incoming: Vec<Vec<Vec<usize>>> = g
                .vertices()
                .map(|v| vec![Vec::new(); inst.row_count(v)])
                .collect();
            for arr in g.arrows() {
                let (s, t) = (g.source(arr), g.target(arr));
                for r in 0..inst.row_count(s) {
                    incoming[t.0][inst.apply(arr, r)].extend([arr.0, colour[k][s.0][r]]);
                }
            }
            g.vertices()
                .map(|v| {
                    (0..inst.row_count(v))
                        .map(|r| {
                            let mut key = vec![colour[k][v.0][r]];
                            for &arr in g.outgoing(v) {
                                key.push(colour[k][g.target(arr).0][inst.apply(arr, r)]);
                            }
                            let mut pre: Vec<[usize; 2]> = incoming[v.0][r]
                                .chunks(2)
                                .map(|c| [c[0], c[1]])
                                .collect();
                            pre.sort_unstable();
                            key.push(usize::MAX);
                            key.extend(pre.into_iter().flatten());
                            let n = ids.len();
                            *ids.entry(key).or_insert(n)
                        })
                        .collect()
                })
                .collect()
        });
        colour = next;
        if ids.len() == classes {
            return colour;
        }
        classes = ids.len();
    }
}

/// Searches for an isomorphism `a -> b` that is the identity on row ids at
/// every vertex for which `fixed` holds.
pub fn isomorphic_fixing(a: &Instance, b: &Instance, fixed: impl Fn(VertexId) -> bool) -> bool {
    if **a.schema() != **b.schema() {
        return false;
    }
    let schema = a.schema();
    let g = schema.graph();
    if g.vertices().any(|v| a.row_count(v) != b.row_count(v)) {
        return false;
    }
    let [ca, cb] = refine_colours(a, b, &fixed);
    for v in g.vertices() {
        let (mut x, mut y) = (ca[v.0].clone(), cb[v.0].clone());
        x.sort_unstable();
        y.sort_unstable();
        if x != y {
            return false;
        }
    }
    // Sinks first, so a row's images are mapped before the row itself.
    let mut vars = Vec::new();
    for v in topological_or_any(schema).into_iter().rev() {
        for r in 0..a.row_count(v) {
            vars.push((v, r));
        }
    }
    let mut map: Vec<Vec<Option<usize>>> = g.vertices().map(|v| vec![None; a.row_count(v)]).collect();
    let mut used: Vec<Vec<bool>> = g.vertices().map(|v| vec![false; b.row_count(v)]).collect();
    struct Ctx<'a> {
        vars: &'a [(VertexId, usize)],
        a: &'a Instance,
        b: &'a Instance,
        ca: &'a [Vec<usize>],
        cb: &'a [Vec<usize>],
    }
    fn search(
        k: usize,
        cx: &Ctx<'_>,
        map: &mut Vec<Vec<Option<usize>>>,
        used: &mut Vec<Vec<bool>>,
    ) -> bool {
        let Some(&(v, r)) = cx.vars.get(k) else {
            return true;
        };
        let (a, b) = (cx.a, cx.b);
        let g = a.schema().graph();
        for x in 0..b.row_count(v) {
            if used[v.0][x] || cx.ca[v.0][r] != cx.cb[v.0][x] {
                continue;
            }
            let consistent = g.arrows().all(|arr| {
                let (s, t) = (g.source(arr), g.target(arr));
                let mut ok = true;
                if s == v {
                    if let Some(y) = map[t.0][a.apply(arr, r)] {
                        ok &= b.apply(arr, x) == y;
                    }
                }
                if t == v {
                    for (sr, m) in map[s.0].iter().enumerate() {
                        if let Some(sx) = m {
                            if (a.apply(arr, sr) == r) != (b.apply(arr, *sx) == x) {
                                ok = false;
                            }
                        }
                    }
                }
                ok
            });
            if !consistent {
                continue;
            }
            map[v.0][r] = Some(x);
            used[v.0][x] = true;
            if search(k + 1, cx, map, used) {
                return true;
            }
            map[v.0][r] = None;
            used[v.0][x] = false;
        }
        false
    }
    let cx = Ctx {
        vars: &vars,
        a,
        b,
        ca: &ca,
        cb: &cb,
    };
    search(0, &cx, &mut map, &mut used)
}

pub fn isomorphic(a: &Instance, b: &Instance) -> bool {
    isomorphic_fixing(a, b, |_| false)
}

fn topological_or_any(schema: &Schema) -> Vec<VertexId> {
    let g = schema.graph();
    let mut indeg = vec![0usize; g.vertex_count()];
    for a in g.arrows() {
        indeg[g.target(a).0] += 1;
    }
    let mut ready: Vec<VertexId> = g.vertices().filter(|v| indeg[v.0] == 0).collect();
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    while let Some(v) = ready.pop() {
        seen[v.0] = true;
        out.push(v);
        for &a in g.outgoing(v) {
            let t = g.target(a);
            indeg[t.0] -= 1;
            if indeg[t.0] == 0 {
                ready.push(t);
            }
        }
    }
    out.extend(g.vertices().filter(|v| !seen[v.0]));
    out
}

/// Number of natural transformations `a -> b`, by trying every function at
/// every vertex.
pub fn count_homs_brute(a: &Instance, b: &Instance) -> usize {
    let g = a.schema().graph();
    let vars: Vec<(VertexId, usize)> = g
        .vertices()
        .flat_map(|v| (0..a.row_count(v)).map(move |r| (v, r)))
        .collect();
    let mut assign = vec![0usize; vars.len()];
    let slot: HashMap<(VertexId, usize), usize> =
        vars.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    if vars.iter().any(|&(v, _)| b.row_count(v) == 0) {
        return 0;
    }
    let mut count = 0;
    loop {
        let natural = vars.iter().enumerate().all(|(k, &(v, r))| {
            g.outgoing(v).iter().all(|&arr| {
                let t = g.target(arr);
                assign[slot[&(t, a.apply(arr, r))]] == b.apply(arr, assign[k])
            })
        });
        if natural {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == vars.len() {
                return count;
            }
            assign[k] += 1;
            if assign[k] < b.row_count(vars[k].0) {
                break;
            }
            assign[k] = 0;
            k += 1;
        }
    }
}

/// The cells of table `v` as `(row id, [(column, value)])`, in row order.
pub fn table(i: &Instance, vertex: &str) -> Vec<(String, Vec<(String, String)>)> {
    let s = i.schema();
    let g = s.graph();
    let v = s.vertex(vertex).unwrap();
    (0..i.row_count(v))
        .map(|r| {
            let cells = g
                .outgoing(v)
                .iter()
                .map(|&a| {
                    (
                        g.arrow_name(a).to_string(),
                        i.row_id(g.target(a), i.apply(a, r)).to_string(),
                    )
                })
                .collect();
            (i.row_id(v, r).to_string(), cells)
        })
        .collect()
}

/// Row ids of table `vertex`.
pub fn row_ids(i: &Instance, vertex: &str) -> Vec<String> {
    let v = i.schema().vertex(vertex).unwrap();
    i.rows(v).to_vec()
}

/// The value of `column` at row `row` of `vertex`.
pub fn cell(i: &Instance, vertex: &str, row: &str, column: &str) -> String {
    let s = i.schema();
    let v = s.vertex(vertex).unwrap();
    let a = s.arrow(column).unwrap();
    let r = i.row_index(v, row).unwrap();
    i.row_id(s.graph().target(a), i.apply(a, r)).to_string()
}

/// Reads a golden document shipped with the core crate.
pub fn golden(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/examples/");
    std::fs::read_to_string(format!("{path}{name}")).unwrap()
}

/// Parses a golden document.
pub fn golden_doc(name: &str) -> Document {
    dsl::parse(&golden(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn decl<'d>(doc: &'d Document, name: &str, kind: &str) -> &'d Item {
    &doc.get(name, kind)
        .unwrap_or_else(|| panic!("no {kind} `{name}`"))
        .item
}

pub fn schema_of(doc: &Document, name: &str) -> Arc<Schema> {
    match decl(doc, name, "schema") {
        Item::Schema(s) => s.clone(),
        _ => unreachable!(),
    }
}

pub fn instance_of(doc: &Document, name: &str) -> Arc<Instance> {
    match decl(doc, name, "instance") {
        Item::Instance { instance, .. } => instance.clone(),
        _ => unreachable!(),
    }
}

pub fn translation_of(doc: &Document, name: &str) -> Arc<Translation> {
    match decl(doc, name, "translation") {
        Item::Translation { translation, .. } => translation.clone(),
        _ => unreachable!(),
    }
}

pub fn morphism_of(doc: &Document, name: &str) -> Arc<InstanceMorphism> {
    match decl(doc, name, "morphism") {
        Item::Morphism { morphism, .. } => morphism.clone(),
        _ => unreachable!(),
    }
}

pub fn typed_of(doc: &Document, name: &str) -> Arc<TypedInstance> {
    match decl(doc, name, "typedinstance") {
        Item::Typed { typed, .. } => typed.clone(),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use catmig::model::SchemaBuilder;

    #[test]
    fn classes_follow_equations() {
        let s = SchemaBuilder::new("S")
            .vertices(&["A", "B", "C"])
            .unwrap()
            .arrow("f", "A", "B")
            .unwrap()
            .arrow("g", "B", "C")
            .unwrap()
            .arrow("h", "B", "C")
            .unwrap()
            .equation("A", &["f", "g"], &["f", "h"])
            .unwrap()
            .build();
        let pc = path_classes(&s, s.vertex("A").unwrap());
        // id, f, and one class for f.g = f.h
        assert_eq!(pc.count, 3);
        let pb = path_classes(&s, s.vertex("B").unwrap());
        assert_eq!(pb.count, 3);
    }

    #[test]
    fn brute_hom_count_of_a_point() {
        let s = Arc::new(SchemaBuilder::new("S").vertex("A").unwrap().build());
        let two = Instance::from_parts(s.clone(), vec![vec!["a".into(), "b".into()]], vec![]).unwrap();
        let three =
            Instance::from_parts(s, vec![vec!["x".into(), "y".into(), "z".into()]], vec![]).unwrap();
        assert_eq!(count_homs_brute(&two, &three), 9);
        assert!(!isomorphic(&two, &three));
        assert!(isomorphic(&two, &two));
    }
}
