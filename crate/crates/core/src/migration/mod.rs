//! Data migration along translations.
//!
//! For a translation `F: C -> D`, [`delta`] pulls `D`-instances back to `C`,
//! while [`sigma`] and [`pi`] push `C`-instances forward as its left and right
//! adjoints. Both pushforwards may be infinite; they fail with a bound error
//! instead of truncating.

mod adjunction;
mod delta;
mod pi;
mod pipeline;
mod sigma;
mod translation;

pub use adjunction::{
    adjunction_unit_counit, hom_counts, pi_counit, pi_unit, sigma_counit, sigma_unit,
    triangle_identities, Adjunction, HomCounts, Triangles,
};
pub use delta::{delta, delta_on_morphism};
pub use pi::{pi, pi_on_morphism, CommaObject, PiResult};
pub use pipeline::{run_pipeline, PipelineReport, Stage, Step, StepReport};
pub use sigma::{sigma, sigma_on_morphism, ElementTerm, SigmaResult};
pub use translation::{
    check_translation, translations_equal, Translation, TranslationEquality, TranslationIssue,
    TranslationReport,
};

use crate::model::equivalence::RewriteBudget;

/// Limits shared by the pushforwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Maximum number of elements a chase may hold, and maximum number of
    /// rows in one table of a right pushforward.
    pub saturation: usize,
    /// Longest path explored when enumerating morphisms out of a vertex.
    pub path: usize,
    pub rewrite: RewriteBudget,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            saturation: 1000,
            path: 16,
            rewrite: RewriteBudget::default(),
        }
    }
}
