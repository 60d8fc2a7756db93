pub mod equivalence;
pub mod instance;
pub mod morphism;
pub mod schema;

pub use equivalence::{paths_equivalent, Equivalence, RewriteBudget};
pub use instance::{
    evaluate_path, validate_instance, Instance, InstanceBuilder, ValidationReport, Violation,
};
pub use morphism::{
    count_homs, find_isomorphism, homs, instance_fiber_product, FiberProduct, InstanceMorphism,
    NaturalityFailure,
};
pub use schema::{
    compose_paths, Arrow, ArrowId, Graph, Path, PathEquivalence, Schema, SchemaBuilder, VertexId,
};
