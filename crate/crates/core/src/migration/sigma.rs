use std::collections::HashMap;
use std::sync::Arc;

use crate::chase::{Chase, Model};
use crate::error::Result;
use crate::migration::translation::Translation;
use crate::migration::Bounds;
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;
use crate::model::schema::{Path, VertexId};
use crate::naming::disambiguate;

/// Where an element of a left pushforward comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementTerm {
    /// Row `row` of source table `source`, placed at the image vertex.
    Base { source: VertexId, row: usize },
    /// A value invented for a missing cell: a base row followed by a path of
    /// the target schema.
    Skolem {
        source: VertexId,
        row: usize,
        path: Path,
    },
}

#[derive(Clone, Debug)]
pub struct SigmaResult {
    pub instance: Instance,
    /// Canonical term of every row, per target vertex.
    pub terms: Vec<Vec<ElementTerm>>,
    /// For each source vertex and row, the row it became.
    pub base_rows: Vec<Vec<usize>>,
    /// Element counts per target vertex after each saturation round.
    pub rounds: Vec<Vec<usize>>,
}

/// Left pushforward along `f`, computed by a chase.
///
/// Every source row is seeded at its image vertex, every source column is
/// asserted along its image path, and missing cells are filled with fresh
/// values until the declared equivalences of the target close up. Rows are
/// ordered base rows first (in source order), then invented values by path
/// length.
pub fn sigma(f: &Translation, i: &Instance, bounds: &Bounds) -> Result<SigmaResult> {
    f.require_source(i.schema())?;
    let c = f.source();
    let d = f.target();
    let cg = c.graph();
    let mut chase = Chase::new(d);
    let mut seed_of: Vec<(VertexId, usize)> = Vec::new();
    let mut node: Vec<Vec<usize>> = Vec::with_capacity(cg.vertex_count());
    for v in cg.vertices() {
        let mut ids = Vec::with_capacity(i.row_count(v));
        for r in 0..i.row_count(v) {
            ids.push(chase.seed(f.vertex(v)));
            seed_of.push((v, r));
        }
        node.push(ids);
    }
    for a in cg.arrows() {
        let (v, w) = (cg.source(a), cg.target(a));
        let p = &f.arrow(a).arrows;
        for r in 0..i.row_count(v) {
            chase.assert_path(node[v.0][r], p, node[w.0][i.apply(a, r)]);
        }
    }
    chase.run(bounds.saturation, None)?;
    let model = chase.model();
    Ok(assemble(f, i, &seed_of, &node, model))
}

fn assemble(
    f: &Translation,
    i: &Instance,
    seed_of: &[(VertexId, usize)],
    node: &[Vec<usize>],
    model: Model,
) -> SigmaResult {
    let c = f.source();
    let d = f.target();
    let dg = d.graph();

    // Base names are qualified by their source table when two source tables
    // landing on the same vertex share a row id.
    let mut owners: HashMap<(VertexId, &str), Vec<VertexId>> = HashMap::new();
    for &(v, r) in seed_of {
        let e = owners.entry((f.vertex(v), i.row_id(v, r))).or_default();
        if !e.contains(&v) {
            e.push(v);
        }
    }
    let base_name = |k: usize| -> String {
        let (v, r) = seed_of[k];
        let id = i.row_id(v, r);
        if owners[&(f.vertex(v), id)].len() > 1 {
            format!("{}:{}", c.vertex_name(v), id)
        } else {
            id.to_string()
        }
    };

    let mut rows = Vec::with_capacity(dg.vertex_count());
    let mut terms = Vec::with_capacity(dg.vertex_count());
    for (dv, classes) in model.classes.iter().enumerate() {
        let mut names = Vec::with_capacity(classes.len());
        let mut ts = Vec::with_capacity(classes.len());
        for t in classes {
            let (sv, sr) = seed_of[t.seed];
            let mut name = base_name(t.seed);
            if t.path.is_empty() {
                ts.push(ElementTerm::Base {
                    source: sv,
                    row: sr,
                });
            } else {
                for &a in &t.path {
                    name.push('.');
                    name.push_str(dg.arrow_name(a));
                }
                ts.push(ElementTerm::Skolem {
                    source: sv,
                    row: sr,
                    path: Path::new(f.vertex(sv), t.path.clone()),
                });
            }
            names.push(name);
        }
        debug_assert_eq!(ts.len(), model.classes[dv].len());
        rows.push(disambiguate(names));
        terms.push(ts);
    }
    let mut k = 0;
    let base_rows = node
        .iter()
        .map(|ids| {
            ids.iter()
                .map(|_| {
                    let x = model.seed_class[k];
                    k += 1;
                    x
                })
                .collect()
        })
        .collect();
    let instance = Instance::from_parts(d.clone(), rows, model.action)
        .expect("a saturated model is a total instance");
    SigmaResult {
        instance,
        terms,
        base_rows,
        rounds: model.rounds,
    }
}

impl SigmaResult {
    /// The row denoted by `term`, read in this result.
    pub fn locate(&self, term: &ElementTerm) -> usize {
        match term {
            ElementTerm::Base { source, row } => self.base_rows[source.0][*row],
            ElementTerm::Skolem { source, row, path } => self
                .instance
                .follow(&path.arrows, self.base_rows[source.0][*row]),
        }
    }

    /// Human-readable form of a term, `row` or `row.a1.a2`.
    pub fn display_term(&self, source: &Instance, term: &ElementTerm) -> String {
        match term {
            ElementTerm::Base { source: v, row } => source.row_id(*v, *row).to_string(),
            ElementTerm::Skolem {
                source: v,
                row,
                path,
            } => format!(
                "{}.{}",
                source.row_id(*v, *row),
                self.instance.schema().display_path(path)
            ),
        }
    }
}

/// The map `sigma(m.source) -> sigma(m.target)` induced by `m`.
pub fn sigma_on_morphism(
    f: &Translation,
    m: &InstanceMorphism,
    bounds: &Bounds,
) -> Result<InstanceMorphism> {
    let s = sigma(f, m.source(), bounds)?;
    let t = sigma(f, m.target(), bounds)?;
    induced(&s, &t, m)
}

pub(crate) fn induced(
    s: &SigmaResult,
    t: &SigmaResult,
    m: &InstanceMorphism,
) -> Result<InstanceMorphism> {
    let components = s
        .terms
        .iter()
        .map(|ts| {
            ts.iter()
                .map(|term| {
                    let moved = match term {
                        ElementTerm::Base { source, row } => ElementTerm::Base {
                            source: *source,
                            row: m.apply(*source, *row),
                        },
                        ElementTerm::Skolem { source, row, path } => ElementTerm::Skolem {
                            source: *source,
                            row: m.apply(*source, *row),
                            path: path.clone(),
                        },
                    };
                    t.locate(&moved)
                })
                .collect()
        })
        .collect();
    InstanceMorphism::new(
        Arc::new(s.instance.clone()),
        Arc::new(t.instance.clone()),
        components,
    )
}
