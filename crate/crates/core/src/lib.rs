//! Categorical schemas, their instances, and data migration between them.
//!
//! A [`Schema`] is a finite graph with path equations; an [`Instance`] assigns
//! a table to every vertex and a column to every arrow. A [`Translation`]
//! between schemas induces three migration functors: [`delta`] pulls data
//! back, and [`sigma`] and [`pi`] push it forward.

pub mod dsl;
pub mod error;
pub mod migration;
pub mod model;
pub mod rdf;
pub mod typing;

mod chase;
mod families;
mod naming;

pub use error::{Error, Result};
pub use migration::{delta, pi, sigma, Bounds, Translation};
pub use model::{Instance, InstanceMorphism, Path, Schema};
