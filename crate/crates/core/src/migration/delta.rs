use std::sync::Arc;

use crate::error::{Error, Result};
use crate::migration::translation::Translation;
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;

/// Pullback along `f`: each table of the result is the table of its image,
/// with row ids kept verbatim.
pub fn delta(f: &Translation, j: &Instance) -> Result<Instance> {
    f.require_target(j.schema())?;
    let c = f.source();
    let g = c.graph();
    let rows = g
        .vertices()
        .map(|v| j.rows(f.vertex(v)).to_vec())
        .collect();
    let columns = g
        .arrows()
        .map(|a| {
            let p = f.arrow(a);
            (0..j.row_count(p.source))
                .map(|i| j.follow(&p.arrows, i))
                .collect()
        })
        .collect();
    Instance::from_parts(c.clone(), rows, columns)
}

/// Whiskers `m` with `f`.
pub fn delta_on_morphism(f: &Translation, m: &InstanceMorphism) -> Result<InstanceMorphism> {
    let source = Arc::new(delta(f, m.source())?);
    let target = Arc::new(delta(f, m.target())?);
    let components = f
        .source()
        .graph()
        .vertices()
        .map(|v| m.component(f.vertex(v)).to_vec())
        .collect();
    InstanceMorphism::new(source, target, components).map_err(|e| match e {
        Error::NotNatural(msg) => Error::NotNatural(format!("input morphism: {msg}")),
        other => other,
    })
}
