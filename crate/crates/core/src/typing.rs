//! Typed instances and the type-change functors.
//!
//! A typed instance is an instance `I` together with a morphism `τ: I -> P`
//! into a fixed typing instance `P`. Given `k: P -> Q`:
//!
//! * [`typechange_sigma`] retypes over `Q` by composing with `k`;
//! * [`typechange_delta`] pulls an instance typed over `Q` back along `k`,
//!   which filters rows when `k` is injective;
//! * [`typechange_pi`] is the right adjoint of pulling back. Over each
//!   `q ∈ Q(v)` its rows are the ways of choosing, for everything typed at
//!   or reachable from `q` through `k`, a row of `I` of that type.

use std::collections::HashMap;
use std::sync::Arc;

use crate::chase::representable;
use crate::error::{Error, Result};
use crate::families::Problem;
use crate::migration::{pi, Bounds, Translation};
use crate::model::instance::Instance;
use crate::model::morphism::{
    build_pullback, count_homs_within, fiber_pairs, InstanceMorphism, NaturalityFailure,
};
use crate::model::schema::{Schema, VertexId};
use crate::naming::disambiguate;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedInstance {
    typing: InstanceMorphism,
}

impl TypedInstance {
    /// Wraps a typing morphism without checking it; see [`validate_typed`].
    pub fn new(typing: InstanceMorphism) -> Self {
        TypedInstance { typing }
    }

    /// Wraps a typing morphism, requiring it to be natural.
    pub fn checked(typing: InstanceMorphism) -> Result<Self> {
        let failures = typing.naturality_failures();
        if let Some(f) = failures.first() {
            return Err(Error::NotNatural(f.to_string()));
        }
        Ok(TypedInstance { typing })
    }

    pub fn instance(&self) -> &Arc<Instance> {
        self.typing.source()
    }

    pub fn over(&self) -> &Arc<Instance> {
        self.typing.target()
    }

    pub fn typing(&self) -> &InstanceMorphism {
        &self.typing
    }

    /// Type of row `i` at `v`.
    pub fn type_of(&self, v: VertexId, i: usize) -> usize {
        self.typing.apply(v, i)
    }
}

/// The data from which a typing instance is derived: a bridge schema, the
/// values of its types given as a bridge instance, and how the bridge
/// attaches to the schema being typed.
#[derive(Clone, Debug)]
pub struct TypingAuxiliary {
    pub values: Instance,
    pub attachment: Translation,
}

/// The typing instance induced by an auxiliary: the right pushforward of the
/// value instance along the attachment.
pub fn implied_typing_instance(aux: &TypingAuxiliary, bounds: &Bounds) -> Result<Instance> {
    Ok(pi(&aux.attachment, &aux.values, bounds)?.instance)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypedReport {
    pub failures: Vec<NaturalityFailure>,
}

impl TypedReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reports every square of the typing morphism that fails to commute.
pub fn validate_typed(t: &TypedInstance) -> TypedReport {
    TypedReport {
        failures: t.typing.naturality_failures(),
    }
}

fn require_over(k_end: &Instance, over: &Instance, what: &str) -> Result<()> {
    if k_end != over {
        return Err(Error::InconsistentTyping(format!(
            "the typing morphism's {what} is not the instance the input is typed over"
        )));
    }
    Ok(())
}

/// Retypes `t` over `Q` by composing with `k: P -> Q`.
pub fn typechange_sigma(k: &InstanceMorphism, t: &TypedInstance) -> Result<TypedInstance> {
    require_over(k.source(), t.over(), "source")?;
    Ok(TypedInstance {
        typing: t.typing.then(k)?,
    })
}

/// Pulls `t`, typed over `Q`, back along `k: P -> Q`.
///
/// Rows are pairs `(x, p)` with `τ(x) = k(p)`. When `k` is injective each row
/// of `t` pairs with at most one `p`, so row ids are kept verbatim and the
/// result is a filtered copy of `t`; otherwise they are written `(x,p)`.
pub fn typechange_delta(k: &InstanceMorphism, t: &TypedInstance) -> Result<TypedInstance> {
    require_over(k.target(), t.over(), "target")?;
    let verbatim = k.is_injective();
    let (pairs, rows) = fiber_pairs(&t.typing, k, |x, p| {
        if verbatim {
            x.to_string()
        } else {
            format!("({x},{p})")
        }
    });
    let fp = build_pullback(&t.typing, k, pairs, rows)?;
    Ok(TypedInstance { typing: fp.right })
}

struct Fiber {
    /// `(w, u, p)`: a vertex, a morphism `v -> w` and a type at `w`.
    index: Vec<(VertexId, usize, usize)>,
    lookup: HashMap<(VertexId, usize, usize), usize>,
    families: Vec<Vec<usize>>,
}

/// Right pushforward of `t`, typed over `P`, along `k: P -> Q`.
///
/// Fails with [`Error::InconsistentTyping`] if the result is not natural,
/// which only happens for inputs whose typing or `k` is not natural.
pub fn typechange_pi(
    k: &InstanceMorphism,
    t: &TypedInstance,
    bounds: &Bounds,
) -> Result<TypedInstance> {
    require_over(k.source(), t.over(), "source")?;
    let x = t.instance();
    let p = k.source();
    let q = k.target();
    let schema: &Schema = x.schema();
    let g = schema.graph();

    let reps = g
        .vertices()
        .map(|v| representable(schema, v, bounds.path, bounds.saturation))
        .collect::<Result<Vec<_>>>()?;

    // rows of X grouped by type
    let by_type: Vec<Vec<Vec<usize>>> = g
        .vertices()
        .map(|w| {
            let mut fib = vec![Vec::new(); p.row_count(w)];
            for i in 0..x.row_count(w) {
                fib[t.type_of(w, i)].push(i);
            }
            fib
        })
        .collect();

    let mut fibers: Vec<Vec<Fiber>> = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let y = &reps[v.0];
        let mut per_q = Vec::with_capacity(q.row_count(v));
        for qi in 0..q.row_count(v) {
            let mut index = Vec::new();
            let mut lookup = HashMap::new();
            for w in g.vertices() {
                for (u, term) in y.classes[w.0].iter().enumerate() {
                    let qu = q.follow(&term.path, qi);
                    for pi in 0..p.row_count(w) {
                        if k.apply(w, pi) == qu {
                            lookup.insert((w, u, pi), index.len());
                            index.push((w, u, pi));
                        }
                    }
                }
            }
            let mut prob = Problem::new();
            for &(w, _, pi) in &index {
                prob.var(x.row_count(w), by_type[w.0][pi].clone());
            }
            for (n, &(w, u, pi)) in index.iter().enumerate() {
                for &a in g.outgoing(w) {
                    let key = (g.target(a), y.action[a.0][u], p.apply(a, pi));
                    let m = *lookup.get(&key).ok_or_else(|| {
                        Error::InconsistentTyping(format!(
                            "arrow `{}` leaves the fiber; the morphism of typing instances is not natural",
                            g.arrow_name(a)
                        ))
                    })?;
                    prob.edge(n, m, x.column(a));
                }
            }
            let mut families = prob.solutions(Some(bounds.saturation)).map_err(|e| match e {
                Error::EnumerationCap { .. } => Error::SaturationBound {
                    vertex: schema.vertex_name(v).to_string(),
                    bound: bounds.saturation,
                    elements: bounds.saturation + 1,
                    rounds: 1,
                },
                other => other,
            })?;
            families.sort();
            per_q.push(Fiber {
                index,
                lookup,
                families,
            });
        }
        fibers.push(per_q);
    }

    // flatten rows: (q, family index)
    let flat: Vec<Vec<(usize, usize)>> = fibers
        .iter()
        .map(|per_q| {
            per_q
                .iter()
                .enumerate()
                .flat_map(|(qi, f)| (0..f.families.len()).map(move |n| (qi, n)))
                .collect()
        })
        .collect();
    let position: Vec<HashMap<(usize, usize), usize>> = flat
        .iter()
        .map(|rows| rows.iter().enumerate().map(|(n, &r)| (r, n)).collect())
        .collect();

    let mut columns = Vec::with_capacity(g.arrow_count());
    for b in g.arrows() {
        let (v, v2) = (g.source(b), g.target(b));
        let y = &reps[v.0];
        let start = y.action[b.0][y.seed_class[0]];
        let mut col = Vec::with_capacity(flat[v.0].len());
        for &(qi, n) in &flat[v.0] {
            let q2 = q.apply(b, qi);
            let src = &fibers[v.0][qi];
            let dst = &fibers[v2.0][q2];
            let fam = &src.families[n];
            let restricted: Vec<usize> = dst
                .index
                .iter()
                .map(|&(w, u2, pi)| {
                    let u = y.follow(&reps[v2.0].classes[w.0][u2].path, start);
                    src.lookup
                        .get(&(w, u, pi))
                        .map(|&m| fam[m])
                        .ok_or_else(|| {
                            Error::InconsistentTyping("restriction leaves the fiber".into())
                        })
                })
                .collect::<Result<_>>()?;
            let target = dst
                .families
                .binary_search(&restricted)
                .map_err(|_| Error::InconsistentTyping("restricted family is not compatible".into()))?;
            col.push(position[v2.0][&(q2, target)]);
        }
        columns.push(col);
    }

    let rows: Vec<Vec<String>> = g
        .vertices()
        .map(|v| name_rows(x, p, q, &reps[v.0].seed_class, v, &fibers[v.0], &flat[v.0], &reps[v.0].classes))
        .collect();
    let instance = Arc::new(Instance::from_parts(x.schema().clone(), rows, columns)?);
    let components = flat
        .iter()
        .map(|rows| rows.iter().map(|&(qi, _)| qi).collect())
        .collect();
    let typing = InstanceMorphism::from_components(instance, q.clone(), components)?;
    if let Some(f) = typing.naturality_failures().first() {
        return Err(Error::InconsistentTyping(f.to_string()));
    }
    Ok(TypedInstance { typing })
}

#[allow(clippy::too_many_arguments)]
fn name_rows(
    x: &Instance,
    p: &Instance,
    q: &Instance,
    seed_class: &[usize],
    v: VertexId,
    fibers: &[Fiber],
    flat: &[(usize, usize)],
    classes: &[Vec<crate::chase::Term>],
) -> Vec<String> {
    let schema = x.schema();
    let id = seed_class[0];
    let render = |full: bool, (qi, n): (usize, usize)| -> String {
        let f = &fibers[qi];
        let fam = &f.families[n];
        let parts: Vec<String> = f
            .index
            .iter()
            .zip(fam)
            .filter(|((w, u, _), _)| full || (*w == v && *u == id))
            .map(|(&(w, u, pi), &r)| {
                if full && !(w == v && u == id) {
                    let path = crate::model::schema::Path::new(v, classes[w.0][u].path.clone());
                    format!("{}:{}={}", schema.display_path(&path), p.row_id(w, pi), x.row_id(w, r))
                } else {
                    format!("{}={}", p.row_id(w, pi), x.row_id(w, r))
                }
            })
            .collect();
        format!("({})", parts.join(","))
    };
    let unique = |names: &[String]| {
        let mut seen = std::collections::HashSet::new();
        names.iter().all(|n| seen.insert(n))
    };
    let mut names: Vec<String> = flat.iter().map(|&r| render(false, r)).collect();
    if !unique(&names) {
        names = flat.iter().map(|&r| render(true, r)).collect();
    }
    if !unique(&names) {
        names = names
            .into_iter()
            .zip(flat)
            .map(|(n, &(qi, _))| format!("{n}@{}", q.row_id(v, qi)))
            .collect();
    }
    disambiguate(names)
}

/// Number of morphisms `a -> b` over a common typing instance.
pub fn count_typed_homs(a: &TypedInstance, b: &TypedInstance, cap: Option<usize>) -> Result<usize> {
    require_over(b.over(), a.over(), "target")?;
    let over = b.over();
    let g = over.schema().graph();
    let fibers: Vec<Vec<Vec<usize>>> = g
        .vertices()
        .map(|v| {
            let mut fib = vec![Vec::new(); over.row_count(v)];
            for j in 0..b.instance().row_count(v) {
                fib[b.type_of(v, j)].push(j);
            }
            fib
        })
        .collect();
    let candidates = |v: VertexId, i: usize| fibers[v.0][a.type_of(v, i)].clone();
    count_homs_within(a.instance(), b.instance(), Some(&candidates), cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::InstanceBuilder;
    use crate::model::schema::SchemaBuilder;

    fn discrete() -> Arc<Schema> {
        Arc::new(SchemaBuilder::new("One").vertex("L").unwrap().build())
    }

    fn set(ids: &[&str]) -> Arc<Instance> {
        Arc::new(
            InstanceBuilder::new(discrete())
                .leaf("L", ids)
                .unwrap()
                .build()
                .unwrap(),
        )
    }

    fn map(from: &Arc<Instance>, to: &Arc<Instance>, f: &[usize]) -> InstanceMorphism {
        InstanceMorphism::new(from.clone(), to.clone(), vec![f.to_vec()]).unwrap()
    }

    #[test]
    fn sigma_along_identity_is_identity() {
        let p = set(&["1", "2"]);
        let i = set(&["a", "b", "c"]);
        let t = TypedInstance::new(map(&i, &p, &[0, 1, 1]));
        let id = InstanceMorphism::identity(p);
        assert_eq!(typechange_sigma(&id, &t).unwrap(), t);
    }

    #[test]
    fn delta_along_inclusion_filters() {
        let q = set(&["1", "2", "3"]);
        let p = set(&["1", "3"]);
        let i = set(&["a", "b", "c"]);
        let t = TypedInstance::new(map(&i, &q, &[0, 1, 2]));
        let k = map(&p, &q, &[0, 2]);
        let out = typechange_delta(&k, &t).unwrap();
        assert_eq!(out.instance().rows(VertexId(0)), &["a".to_string(), "c".to_string()]);
    }

    #[test]
    fn pi_fiber_sizes_multiply() {
        let p = set(&["1", "2", "3"]);
        let q = set(&["x", "y"]);
        let i = set(&["a", "b", "c", "d", "e"]);
        // fibers: 1 -> {a,b}, 2 -> {c,d,e}, 3 -> {}
        let t = TypedInstance::new(map(&i, &p, &[0, 0, 1, 1, 1]));
        let k = map(&p, &q, &[0, 0, 1]);
        let out = typechange_pi(&k, &t, &Bounds::default()).unwrap();
        let over: Vec<usize> = (0..out.instance().row_count(VertexId(0)))
            .map(|r| out.type_of(VertexId(0), r))
            .collect();
        assert_eq!(over.iter().filter(|&&q| q == 0).count(), 6);
        assert_eq!(over.iter().filter(|&&q| q == 1).count(), 0);
        assert_eq!(out.instance().row_id(VertexId(0), 0), "(1=a,2=c)");
    }

    #[test]
    fn validation_reports_broken_squares() {
        let s = Arc::new(
            SchemaBuilder::new("S")
                .vertices(&["A", "B"])
                .unwrap()
                .arrow("f", "A", "B")
                .unwrap()
                .build(),
        );
        let inst = |rows: &[(&str, &str)], leaves: &[&str]| {
            let mut b = InstanceBuilder::new(s.clone());
            for (r, t) in rows {
                b = b.row("A", r, &[("f", t)]).unwrap();
            }
            Arc::new(b.leaf("B", leaves).unwrap().build().unwrap())
        };
        let i = inst(&[("a", "u")], &["u"]);
        let p = inst(&[("pa", "pu"), ("pb", "pv")], &["pu", "pv"]);
        let ok = InstanceMorphism::from_components(i.clone(), p.clone(), vec![vec![0], vec![0]]).unwrap();
        assert!(validate_typed(&TypedInstance::new(ok)).is_valid());
        let bad = InstanceMorphism::from_components(i, p, vec![vec![0], vec![1]]).unwrap();
        let report = validate_typed(&TypedInstance::new(bad));
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].arrow, "f");
        assert_eq!(report.failures[0].row, "a");
    }
}
