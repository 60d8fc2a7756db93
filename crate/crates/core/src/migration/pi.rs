use std::collections::HashMap;
use std::sync::Arc;

use crate::chase::{representable, Model};
use crate::error::{Error, Result};
use crate::families::Problem;
use crate::migration::translation::Translation;
use crate::migration::Bounds;
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;
use crate::model::schema::{Path, Schema, VertexId};
use crate::naming::disambiguate;

/// An object of the comma category under a target vertex `d`: a source vertex
/// together with a morphism from `d` to its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommaObject {
    pub source: VertexId,
    /// Canonical path from `d` to the image of `source`.
    pub path: Path,
    class: usize,
}

#[derive(Clone, Debug)]
pub struct PiResult {
    pub instance: Instance,
    /// Comma objects under each target vertex.
    pub objects: Vec<Vec<CommaObject>>,
    /// Each row as the row it picks at every comma object.
    pub families: Vec<Vec<Vec<usize>>>,
}

pub(crate) struct Comma {
    pub reps: Vec<Model>,
    pub objects: Vec<Vec<CommaObject>>,
    lookup: Vec<HashMap<(VertexId, usize), usize>>,
}

impl Comma {
    pub fn new(f: &Translation, bounds: &Bounds) -> Result<Self> {
        let c = f.source();
        let d = f.target();
        let mut reps = Vec::new();
        let mut objects = Vec::new();
        let mut lookup = Vec::new();
        for dv in d.graph().vertices() {
            let y = representable(d, dv, bounds.path, bounds.saturation)?;
            let mut objs = Vec::new();
            let mut map = HashMap::new();
            for cv in c.graph().vertices() {
                for (x, term) in y.classes[f.vertex(cv).0].iter().enumerate() {
                    map.insert((cv, x), objs.len());
                    objs.push(CommaObject {
                        source: cv,
                        path: Path::new(dv, term.path.clone()),
                        class: x,
                    });
                }
            }
            reps.push(y);
            objects.push(objs);
            lookup.push(map);
        }
        Ok(Comma {
            reps,
            objects,
            lookup,
        })
    }

    /// For a target arrow `g: d -> d'`, the object under `d` reached by
    /// precomposing each object under `d'` with `g`.
    fn precompose(&self, d: &Schema, g: crate::model::schema::ArrowId) -> Vec<usize> {
        let (s, t) = (d.graph().source(g), d.graph().target(g));
        let ys = &self.reps[s.0];
        let start = ys.action[g.0][ys.seed_class[0]];
        self.objects[t.0]
            .iter()
            .map(|o| {
                let x = ys.follow(&o.path.arrows, start);
                self.lookup[s.0][&(o.source, x)]
            })
            .collect()
    }
}

/// Right pushforward along `f`.
///
/// A row at `d` is a family choosing, for every comma object `(c, x: d -> F c)`,
/// a row of `i` at `c`, compatibly with every source arrow. The morphisms out
/// of `d` are computed exactly from paths of length at most `bounds.path`;
/// if that does not exhaust them the call fails with a bound-instability
/// error instead of truncating.
pub fn pi(f: &Translation, i: &Instance, bounds: &Bounds) -> Result<PiResult> {
    f.require_source(i.schema())?;
    let comma = Comma::new(f, bounds)?;
    pi_with(f, i, &comma, bounds)
}

pub(crate) fn pi_with(
    f: &Translation,
    i: &Instance,
    comma: &Comma,
    bounds: &Bounds,
) -> Result<PiResult> {
    let c = f.source();
    let d = f.target();
    let cg = c.graph();
    let dg = d.graph();
    let mut families = Vec::with_capacity(dg.vertex_count());
    for dv in dg.vertices() {
        let objs = &comma.objects[dv.0];
        let y = &comma.reps[dv.0];
        let mut p = Problem::new();
        for o in objs {
            p.full_var(i.row_count(o.source));
        }
        for (k, o) in objs.iter().enumerate() {
            for &a in cg.outgoing(o.source) {
                let x = y.follow(&f.arrow(a).arrows, o.class);
                let to = comma.lookup[dv.0][&(cg.target(a), x)];
                p.edge(k, to, i.column(a));
            }
        }
        let mut fams = p.solutions(Some(bounds.saturation)).map_err(|e| match e {
            Error::EnumerationCap { .. } => Error::SaturationBound {
                vertex: d.vertex_name(dv).to_string(),
                bound: bounds.saturation,
                elements: bounds.saturation + 1,
                rounds: 1,
            },
            other => other,
        })?;
        fams.sort();
        families.push(fams);
    }
    let index: Vec<HashMap<&[usize], usize>> = families
        .iter()
        .map(|fs| fs.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect())
        .collect();
    let columns = dg
        .arrows()
        .map(|g| {
            let (s, t) = (dg.source(g), dg.target(g));
            let pre = comma.precompose(d, g);
            families[s.0]
                .iter()
                .map(|fam| {
                    let restricted: Vec<usize> = pre.iter().map(|&k| fam[k]).collect();
                    index[t.0][restricted.as_slice()]
                })
                .collect()
        })
        .collect();
    let rows = dg
        .vertices()
        .map(|dv| name_families(f, i, comma, dv, &families[dv.0]))
        .collect();
    let instance = Instance::from_parts(d.clone(), rows, columns)?;
    Ok(PiResult {
        instance,
        objects: comma.objects.clone(),
        families,
    })
}

fn name_families(
    f: &Translation,
    i: &Instance,
    comma: &Comma,
    dv: VertexId,
    fams: &[Vec<usize>],
) -> Vec<String> {
    let c = f.source();
    let d = f.target();
    let objs = &comma.objects[dv.0];
    if objs.is_empty() {
        return fams.iter().map(|_| "*".to_string()).collect();
    }
    let seed = comma.reps[dv.0].seed_class[0];
    let mut ident: Vec<usize> = (0..objs.len())
        .filter(|&k| objs[k].class == seed && f.vertex(objs[k].source) == dv)
        .collect();
    ident.sort_by(|&a, &b| c.vertex_name(objs[a].source).cmp(c.vertex_name(objs[b].source)));
    let determined = !ident.is_empty() && {
        let mut seen = std::collections::HashSet::new();
        fams.iter()
            .all(|s| seen.insert(ident.iter().map(|&k| s[k]).collect::<Vec<_>>()))
    };
    let names = fams
        .iter()
        .map(|s| {
            if determined && ident.len() == 1 {
                let k = ident[0];
                i.row_id(objs[k].source, s[k]).to_string()
            } else if determined {
                ident
                    .iter()
                    .map(|&k| format!("{}={}", c.vertex_name(objs[k].source), i.row_id(objs[k].source, s[k])))
                    .collect::<Vec<_>>()
                    .join(";")
            } else {
                let mut parts: Vec<String> = objs
                    .iter()
                    .zip(s)
                    .map(|(o, &r)| {
                        format!(
                            "{}@{}={}",
                            c.vertex_name(o.source),
                            d.display_path(&o.path),
                            i.row_id(o.source, r)
                        )
                    })
                    .collect();
                parts.sort();
                parts.join(";")
            }
        })
        .collect();
    disambiguate(names)
}

/// The map `pi(m.source) -> pi(m.target)` induced by `m`.
pub fn pi_on_morphism(
    f: &Translation,
    m: &InstanceMorphism,
    bounds: &Bounds,
) -> Result<InstanceMorphism> {
    f.require_source(m.source().schema())?;
    let comma = Comma::new(f, bounds)?;
    let s = pi_with(f, m.source(), &comma, bounds)?;
    let t = pi_with(f, m.target(), &comma, bounds)?;
    induced(&s, &t, m)
}

pub(crate) fn induced(s: &PiResult, t: &PiResult, m: &InstanceMorphism) -> Result<InstanceMorphism> {
    let components = s
        .families
        .iter()
        .enumerate()
        .map(|(dv, fams)| {
            let index: HashMap<&[usize], usize> = t.families[dv]
                .iter()
                .enumerate()
                .map(|(k, f)| (f.as_slice(), k))
                .collect();
            fams.iter()
                .map(|fam| {
                    let moved: Vec<usize> = fam
                        .iter()
                        .zip(&s.objects[dv])
                        .map(|(&r, o)| m.apply(o.source, r))
                        .collect();
                    index.get(moved.as_slice()).copied().ok_or_else(|| {
                        Error::NotNatural("input morphism does not preserve families".into())
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    InstanceMorphism::new(
        Arc::new(s.instance.clone()),
        Arc::new(t.instance.clone()),
        components,
    )
}

impl PiResult {
    /// Index of the family with the given components at `d`.
    pub fn find(&self, d: VertexId, family: &[usize]) -> Option<usize> {
        self.families[d.0].iter().position(|f| f == family)
    }
}
