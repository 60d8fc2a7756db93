//! Saturation of a partial model of a schema.
//!
//! Nodes are elements placed at vertices. Each node has at most one image per
//! outgoing arrow. The chase alternates congruence closure (declared
//! equivalences plus functionality, maintained by union-find) with
//! totalization (inventing an image for every missing arrow) until nothing
//! changes. The result is the free model generated by the seeds subject to
//! the asserted equalities.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::schema::{ArrowId, Schema, VertexId};

#[derive(Debug)]
pub(crate) struct Chase<'s> {
    schema: &'s Schema,
    vertex: Vec<VertexId>,
    parent: Vec<usize>,
    edges: Vec<Vec<Option<usize>>>,
    depth: Vec<usize>,
    pending: Vec<(usize, usize)>,
    seeds: Vec<usize>,
    truncated: bool,
    rounds: Vec<Vec<usize>>,
}

/// A seed followed by a path: the canonical name of an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Term {
    pub seed: usize,
    pub path: Vec<ArrowId>,
}

/// A saturated model with canonically ordered elements.
#[derive(Clone, Debug)]
pub(crate) struct Model {
    /// Canonical term of each element, per vertex.
    pub classes: Vec<Vec<Term>>,
    /// Per arrow, the image of each element of its source.
    pub action: Vec<Vec<usize>>,
    /// Position of each seed's element within its vertex.
    pub seed_class: Vec<usize>,
    /// Live element counts per vertex after each closure round.
    pub rounds: Vec<Vec<usize>>,
}

impl Model {
    /// Follows `arrows` from element `x`.
    pub fn follow(&self, arrows: &[ArrowId], x: usize) -> usize {
        arrows.iter().fold(x, |e, a| self.action[a.0][e])
    }
}

impl<'s> Chase<'s> {
    pub fn new(schema: &'s Schema) -> Self {
        Chase {
            schema,
            vertex: Vec::new(),
            parent: Vec::new(),
            edges: Vec::new(),
            depth: Vec::new(),
            pending: Vec::new(),
            seeds: Vec::new(),
            truncated: false,
            rounds: Vec::new(),
        }
    }

    fn node(&mut self, v: VertexId, depth: usize) -> usize {
        let id = self.vertex.len();
        self.vertex.push(v);
        self.parent.push(id);
        self.edges
            .push(vec![None; self.schema.graph().outgoing(v).len()]);
        self.depth.push(depth);
        id
    }

    pub fn seed(&mut self, v: VertexId) -> usize {
        let n = self.node(v, 0);
        self.seeds.push(n);
        n
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let gp = self.parent[self.parent[x]];
            self.parent[x] = gp;
            x = gp;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        self.pending.push((a, b));
        while let Some((a, b)) = self.pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            debug_assert_eq!(self.vertex[ra], self.vertex[rb]);
            let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[child] = root;
            self.depth[root] = self.depth[root].min(self.depth[child]);
            let moved = std::mem::take(&mut self.edges[child]);
            for (k, e) in moved.into_iter().enumerate() {
                if let Some(t) = e {
                    match self.edges[root][k] {
                        Some(s) => self.pending.push((s, t)),
                        None => self.edges[root][k] = Some(t),
                    }
                }
            }
        }
    }

    fn follow(&mut self, x: usize, a: ArrowId) -> Option<usize> {
        let r = self.find(x);
        let slot = self.schema.graph().slot(a);
        self.edges[r][slot].map(|t| self.find(t))
    }

    fn follow_path(&mut self, x: usize, arrows: &[ArrowId]) -> Option<usize> {
        let mut at = self.find(x);
        for &a in arrows {
            at = self.follow(at, a)?;
        }
        Some(at)
    }

    /// Image of `x` under `a`, invented if missing.
    fn step(&mut self, x: usize, a: ArrowId) -> usize {
        if let Some(t) = self.follow(x, a) {
            return t;
        }
        let r = self.find(x);
        let t = self.node(self.schema.graph().target(a), self.depth[r] + 1);
        let slot = self.schema.graph().slot(a);
        self.edges[r][slot] = Some(t);
        t
    }

    /// Asserts that following `arrows` from `x` lands on `y`.
    pub fn assert_path(&mut self, x: usize, arrows: &[ArrowId], y: usize) {
        let Some((&last, init)) = arrows.split_last() else {
            self.union(x, y);
            return;
        };
        let mut at = x;
        for &a in init {
            at = self.step(at, a);
        }
        let r = self.find(at);
        let slot = self.schema.graph().slot(last);
        match self.edges[r][slot] {
            Some(t) => self.union(t, y),
            None => self.edges[r][slot] = Some(y),
        }
    }

    fn close(&mut self) {
        let schema = self.schema;
        loop {
            let mut changed = false;
            for x in 0..self.vertex.len() {
                if self.find(x) != x {
                    continue;
                }
                for eq in schema.equations() {
                    if eq.lhs.source != self.vertex[x] {
                        continue;
                    }
                    let l = self.follow_path(x, &eq.lhs.arrows);
                    let r = self.follow_path(x, &eq.rhs.arrows);
                    if let (Some(l), Some(r)) = (l, r) {
                        if l != r {
                            self.union(l, r);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn totalize(&mut self, max_depth: Option<usize>) -> usize {
        let g = self.schema.graph();
        self.truncated = false;
        let mut created = 0;
        for x in 0..self.vertex.len() {
            if self.find(x) != x {
                continue;
            }
            let v = self.vertex[x];
            for (k, &a) in g.outgoing(v).iter().enumerate() {
                if self.edges[x][k].is_some() {
                    continue;
                }
                if max_depth.is_some_and(|d| self.depth[x] >= d) {
                    self.truncated = true;
                    continue;
                }
                let t = self.node(g.target(a), self.depth[x] + 1);
                self.edges[x][k] = Some(t);
                created += 1;
            }
        }
        created
    }

    fn live_counts(&mut self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.graph().vertex_count()];
        for x in 0..self.vertex.len() {
            if self.find(x) == x {
                counts[self.vertex[x].0] += 1;
            }
        }
        counts
    }

    /// Saturates. Elements deeper than `max_depth` get no new images, and
    /// [`Chase::truncated`] reports whether that cut anything off.
    pub fn run(&mut self, bound: usize, max_depth: Option<usize>) -> Result<()> {
        loop {
            self.close();
            let counts = self.live_counts();
            let total: usize = counts.iter().sum();
            if total > bound {
                let prev = self.rounds.last().cloned().unwrap_or_else(|| vec![0; counts.len()]);
                let worst = (0..counts.len())
                    .max_by_key(|&v| (counts[v].saturating_sub(prev[v]), counts[v]))
                    .unwrap_or(0);
                return Err(Error::SaturationBound {
                    vertex: self.schema.vertex_name(VertexId(worst)).to_string(),
                    bound,
                    elements: total,
                    rounds: self.rounds.len() + 1,
                });
            }
            self.rounds.push(counts);
            if self.totalize(max_depth) == 0 {
                return Ok(());
            }
        }
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Extracts the saturated model. Call only after a complete [`Chase::run`].
    pub fn model(mut self) -> Model {
        let g = self.schema.graph();
        let nv = g.vertex_count();
        let mut class_of: HashMap<usize, (VertexId, usize)> = HashMap::new();
        let mut classes: Vec<Vec<Term>> = vec![Vec::new(); nv];
        let mut level: Vec<(usize, Term)> = Vec::new();
        for (k, &s) in self.seeds.clone().iter().enumerate() {
            let r = self.find(s);
            if let std::collections::hash_map::Entry::Vacant(e) = class_of.entry(r) {
                let v = self.vertex[r];
                let term = Term {
                    seed: k,
                    path: Vec::new(),
                };
                e.insert((v, classes[v.0].len()));
                classes[v.0].push(term.clone());
                level.push((r, term));
            }
        }
        let mut sorted_out: Vec<Vec<ArrowId>> = (0..nv)
            .map(|v| g.outgoing(VertexId(v)).to_vec())
            .collect();
        for out in &mut sorted_out {
            out.sort_by(|a, b| g.arrow_name(*a).cmp(g.arrow_name(*b)));
        }
        while !level.is_empty() {
            let mut next = Vec::new();
            for (x, term) in &level {
                for &a in &sorted_out[self.vertex[*x].0] {
                    let Some(t) = self.follow(*x, a) else { continue };
                    if class_of.contains_key(&t) {
                        continue;
                    }
                    let mut path = term.path.clone();
                    path.push(a);
                    let term = Term {
                        seed: term.seed,
                        path,
                    };
                    let v = self.vertex[t];
                    class_of.insert(t, (v, classes[v.0].len()));
                    classes[v.0].push(term.clone());
                    next.push((t, term));
                }
            }
            level = next;
        }
        let mut action: Vec<Vec<usize>> = g
            .arrows()
            .map(|a| vec![usize::MAX; classes[g.source(a).0].len()])
            .collect();
        let roots: Vec<(usize, VertexId, usize)> = class_of
            .iter()
            .map(|(&r, &(v, i))| (r, v, i))
            .collect();
        for (r, v, i) in roots {
            for &a in g.outgoing(v) {
                if let Some(t) = self.follow(r, a) {
                    action[a.0][i] = class_of[&t].1;
                }
            }
        }
        let seeds = self.seeds.clone();
        let seed_class = seeds
            .iter()
            .map(|&s| {
                let r = self.find(s);
                class_of[&r].1
            })
            .collect();
        Model {
            classes,
            action,
            seed_class,
            rounds: self.rounds,
        }
    }
}

/// Elements of `Hom(d, -)` in the category presented by `schema`, computed
/// exactly from paths of length at most `path_bound`.
///
/// Fails with [`Error::BoundInstability`] when some element at depth
/// `path_bound` still lacks an image, since longer paths might then denote
/// new morphisms.
pub(crate) fn representable(
    schema: &Schema,
    d: VertexId,
    path_bound: usize,
    element_bound: usize,
) -> Result<Model> {
    let mut chase = Chase::new(schema);
    chase.seed(d);
    chase.run(element_bound, Some(path_bound)).map_err(|e| match e {
        Error::SaturationBound { .. } => Error::BoundInstability {
            vertex: schema.vertex_name(d).to_string(),
            bound: path_bound,
        },
        other => other,
    })?;
    if chase.truncated() {
        return Err(Error::BoundInstability {
            vertex: schema.vertex_name(d).to_string(),
            bound: path_bound,
        });
    }
    Ok(chase.model())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::schema::SchemaBuilder;

    fn loop_schema(eq: bool) -> Schema {
        let b = SchemaBuilder::new("L")
            .vertex("A")
            .unwrap()
            .arrow("g", "A", "A")
            .unwrap();
        if eq {
            b.equation("A", &["g", "g"], &[]).unwrap().build()
        } else {
            b.build()
        }
    }

    #[test]
    fn involution_has_two_morphisms() {
        let s = loop_schema(true);
        let m = representable(&s, VertexId(0), 16, 1000).unwrap();
        assert_eq!(m.classes[0].len(), 2);
        assert_eq!(m.action[0], vec![1, 0]);
    }

    #[test]
    fn free_loop_is_unstable() {
        let s = loop_schema(false);
        assert!(matches!(
            representable(&s, VertexId(0), 8, 1000),
            Err(Error::BoundInstability { .. })
        ));
    }

    #[test]
    fn free_loop_exceeds_saturation_bound() {
        let s = loop_schema(false);
        let mut c = Chase::new(&s);
        c.seed(VertexId(0));
        let err = c.run(50, None).unwrap_err();
        assert!(matches!(err, Error::SaturationBound { ref vertex, .. } if vertex == "A"));
    }

    #[test]
    fn asserted_equalities_merge_images() {
        let s = SchemaBuilder::new("S")
            .vertices(&["A", "B"])
            .unwrap()
            .arrow("f", "A", "B")
            .unwrap()
            .build();
        let mut c = Chase::new(&s);
        let a1 = c.seed(VertexId(0));
        let a2 = c.seed(VertexId(0));
        let b = c.seed(VertexId(1));
        c.assert_path(a1, &[ArrowId(0)], b);
        c.union(a1, a2);
        c.run(100, None).unwrap();
        let m = c.model();
        assert_eq!(m.classes[0].len(), 1);
        assert_eq!(m.classes[1].len(), 1);
        assert_eq!(m.seed_class, vec![0, 0, 0]);
    }
}
