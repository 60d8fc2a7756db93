//! Morphisms of instances: natural transformations between two instances on
//! one schema.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::Problem;
use crate::model::instance::Instance;
use crate::model::schema::VertexId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceMorphism {
    source: Arc<Instance>,
    target: Arc<Instance>,
    components: Vec<Vec<usize>>,
}

/// A square that fails to commute: `arrow` applied to `row` then mapped
/// differs from mapped then `arrow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub arrow: String,
    pub row: String,
    pub via_source: String,
    pub via_target: String,
}

impl std::fmt::Display for NaturalityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "arrow `{}` on row `{}`: mapping after the arrow gives `{}`, before gives `{}`",
            self.arrow, self.row, self.via_source, self.via_target
        )
    }
}

fn same_schema(a: &Instance, b: &Instance) -> Result<()> {
    if Arc::ptr_eq(a.schema(), b.schema()) || a.schema() == b.schema() {
        Ok(())
    } else {
        Err(Error::SchemaMismatch {
            expected: a.schema().name().to_string(),
            found: b.schema().name().to_string(),
        })
    }
}

impl InstanceMorphism {
    /// Builds a morphism and checks that it is natural.
    pub fn new(
        source: Arc<Instance>,
        target: Arc<Instance>,
        components: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let m = Self::from_components(source, target, components)?;
        if let Some(f) = m.naturality_failures().into_iter().next() {
            return Err(Error::NotNatural(f.to_string()));
        }
        Ok(m)
    }

    /// Builds a family of functions without checking naturality.
    pub fn from_components(
        source: Arc<Instance>,
        target: Arc<Instance>,
        components: Vec<Vec<usize>>,
    ) -> Result<Self> {
        same_schema(&source, &target)?;
        let g = source.schema().graph();
        if components.len() != g.vertex_count() {
            return Err(Error::MalformedMorphism(format!(
                "expected {} components, got {}",
                g.vertex_count(),
                components.len()
            )));
        }
        for v in g.vertices() {
            let c = &components[v.0];
            if c.len() != source.row_count(v) {
                return Err(Error::MalformedMorphism(format!(
                    "component at `{}` maps {} rows but the table has {}",
                    g.vertex_name(v),
                    c.len(),
                    source.row_count(v)
                )));
            }
            if let Some(i) = c.iter().position(|&x| x >= target.row_count(v)) {
                return Err(Error::MalformedMorphism(format!(
                    "component at `{}` sends `{}` outside the target table",
                    g.vertex_name(v),
                    source.row_id(v, i)
                )));
            }
        }
        Ok(InstanceMorphism {
            source,
            target,
            components,
        })
    }

    pub fn identity(instance: Arc<Instance>) -> Self {
        let components = instance
            .schema()
            .graph()
            .vertices()
            .map(|v| (0..instance.row_count(v)).collect())
            .collect();
        InstanceMorphism {
            source: instance.clone(),
            target: instance,
            components,
        }
    }

    pub fn source(&self) -> &Arc<Instance> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Instance> {
        &self.target
    }

    pub fn component(&self, v: VertexId) -> &[usize] {
        &self.components[v.0]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn apply(&self, v: VertexId, i: usize) -> usize {
        self.components[v.0][i]
    }

    pub fn naturality_failures(&self) -> Vec<NaturalityFailure> {
        let s = &self.source;
        let t = &self.target;
        let g = s.schema().graph();
        let mut out = Vec::new();
        for a in g.arrows() {
            let (v, w) = (g.source(a), g.target(a));
            for i in 0..s.row_count(v) {
                let left = self.components[w.0][s.apply(a, i)];
                let right = t.apply(a, self.components[v.0][i]);
                if left != right {
                    out.push(NaturalityFailure {
                        arrow: g.arrow_name(a).to_string(),
                        row: s.row_id(v, i).to_string(),
                        via_source: t.row_id(w, left).to_string(),
                        via_target: t.row_id(w, right).to_string(),
                    });
                }
            }
        }
        out
    }

    pub fn is_natural(&self) -> bool {
        self.naturality_failures().is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &InstanceMorphism) -> Result<Self> {
        if *self.target != *next.source {
            return Err(Error::InstanceMismatch(
                "composite morphisms must meet at the same instance".into(),
            ));
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(v, c)| c.iter().map(|&i| next.components[v][i]).collect())
            .collect();
        Ok(InstanceMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            components,
        })
    }

    pub fn is_identity(&self) -> bool {
        *self.source == *self.target
            && self
                .components
                .iter()
                .all(|c| c.iter().enumerate().all(|(i, &x)| i == x))
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().enumerate().all(|(v, c)| {
            let mut seen = vec![false; self.target.row_count(VertexId(v))];
            c.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
        })
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective()
            && self
                .components
                .iter()
                .enumerate()
                .all(|(v, c)| c.len() == self.target.row_count(VertexId(v)))
    }
}

/// Rows of `fiber[v]` restrict the candidates for each row of `source` at `v`.
pub(crate) type Fibers<'a> = Option<&'a dyn Fn(VertexId, usize) -> Vec<usize>>;

fn hom_problem<'a>(source: &'a Instance, target: &'a Instance, fibers: Fibers<'_>) -> Problem<'a> {
    let g = source.schema().graph();
    let mut p = Problem::new();
    let mut var = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let n = target.row_count(v);
        let ids: Vec<usize> = (0..source.row_count(v))
            .map(|i| match fibers {
                Some(f) => p.var(n, f(v, i)),
                None => p.full_var(n),
            })
            .collect();
        var.push(ids);
    }
    for a in g.arrows() {
        let (v, w) = (g.source(a), g.target(a));
        for i in 0..source.row_count(v) {
            p.edge(var[v.0][i], var[w.0][source.apply(a, i)], target.column(a));
        }
    }
    p
}

fn unflatten(source: &Instance, flat: &[usize]) -> Vec<Vec<usize>> {
    let g = source.schema().graph();
    let mut out = Vec::with_capacity(g.vertex_count());
    let mut k = 0;
    for v in g.vertices() {
        let n = source.row_count(v);
        out.push(flat[k..k + n].to_vec());
        k += n;
    }
    out
}

/// Number of morphisms `source -> target`, failing beyond `cap`.
pub fn count_homs(source: &Instance, target: &Instance, cap: Option<usize>) -> Result<usize> {
    same_schema(source, target)?;
    hom_problem(source, target, None).count(cap)
}

pub(crate) fn count_homs_within(
    source: &Instance,
    target: &Instance,
    fibers: Fibers<'_>,
    cap: Option<usize>,
) -> Result<usize> {
    same_schema(source, target)?;
    hom_problem(source, target, fibers).count(cap)
}

/// All morphisms `source -> target`, in lexicographic order.
pub fn homs(
    source: &Arc<Instance>,
    target: &Arc<Instance>,
    cap: Option<usize>,
) -> Result<Vec<InstanceMorphism>> {
    same_schema(source, target)?;
    let mut out = Vec::new();
    hom_problem(source, target, None).for_each(cap, |flat| {
        out.push(InstanceMorphism {
            source: source.clone(),
            target: target.clone(),
            components: unflatten(source, flat),
        });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Searches for an isomorphism `a -> b`.
pub fn find_isomorphism(a: &Arc<Instance>, b: &Arc<Instance>) -> Option<InstanceMorphism> {
    same_schema(a, b).ok()?;
    let g = a.schema().graph();
    if g.vertices().any(|v| a.row_count(v) != b.row_count(v)) {
        return None;
    }
    let mut p = hom_problem(a, b, None);
    let mut k = 0;
    for v in g.vertices() {
        let n = a.row_count(v);
        let vars: Vec<usize> = (k..k + n).collect();
        p.distinct(&vars, b.row_count(v));
        k += n;
    }
    let flat = p.first()?;
    Some(InstanceMorphism {
        source: a.clone(),
        target: b.clone(),
        components: unflatten(a, &flat),
    })
}

/// Pointwise pullback of `f: A -> I` and `g: B -> I`.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub instance: Arc<Instance>,
    pub left: InstanceMorphism,
    pub right: InstanceMorphism,
}

/// Rows at each vertex are the pairs `(a, b)` with `f(a) = g(b)`, named
/// `(a,b)` and ordered by `a` then `b`.
pub fn instance_fiber_product(f: &InstanceMorphism, g: &InstanceMorphism) -> Result<FiberProduct> {
    same_schema(&f.target, &g.target)?;
    if *f.target != *g.target {
        return Err(Error::InstanceMismatch(
            "fiber product needs two morphisms into the same instance".into(),
        ));
    }
    let (pairs, rows) = fiber_pairs(f, g, |a, b| format!("({a},{b})"));
    build_pullback(f, g, pairs, rows)
}

pub(crate) type Pairs = Vec<Vec<(usize, usize)>>;

pub(crate) fn fiber_pairs(
    f: &InstanceMorphism,
    g: &InstanceMorphism,
    name: impl Fn(&str, &str) -> String,
) -> (Pairs, Vec<Vec<String>>) {
    let schema = f.target.schema().clone();
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    for v in schema.graph().vertices() {
        let mut by_target: Vec<Vec<usize>> = vec![Vec::new(); f.target.row_count(v)];
        for (j, &t) in g.components[v.0].iter().enumerate() {
            by_target[t].push(j);
        }
        let mut ps = Vec::new();
        let mut names = Vec::new();
        for (i, &t) in f.components[v.0].iter().enumerate() {
            for &j in &by_target[t] {
                ps.push((i, j));
                names.push(name(f.source.row_id(v, i), g.source.row_id(v, j)));
            }
        }
        pairs.push(ps);
        rows.push(crate::naming::disambiguate(names));
    }
    (pairs, rows)
}

pub(crate) fn build_pullback(
    f: &InstanceMorphism,
    g: &InstanceMorphism,
    pairs: Pairs,
    rows: Vec<Vec<String>>,
) -> Result<FiberProduct> {
    let schema = f.target.schema().clone();
    let gr = schema.graph();
    let index: Vec<std::collections::HashMap<(usize, usize), usize>> = pairs
        .iter()
        .map(|ps| ps.iter().enumerate().map(|(k, &p)| (p, k)).collect())
        .collect();
    let columns = gr
        .arrows()
        .map(|a| {
            let (v, w) = (gr.source(a), gr.target(a));
            pairs[v.0]
                .iter()
                .map(|&(i, j)| index[w.0][&(f.source.apply(a, i), g.source.apply(a, j))])
                .collect()
        })
        .collect();
    let instance = Arc::new(Instance::from_parts(schema, rows, columns)?);
    let left = pairs
        .iter()
        .map(|ps| ps.iter().map(|&(i, _)| i).collect())
        .collect();
    let right = pairs
        .iter()
        .map(|ps| ps.iter().map(|&(_, j)| j).collect())
        .collect();
    Ok(FiberProduct {
        left: InstanceMorphism::new(instance.clone(), f.source.clone(), left)?,
        right: InstanceMorphism::new(instance.clone(), g.source.clone(), right)?,
        instance,
    })
}
