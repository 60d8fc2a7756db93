use std::sync::Arc;

use crate::error::{Error, Result};
use crate::migration::delta::delta;
use crate::migration::pi::pi;
use crate::migration::sigma::sigma;
use crate::migration::translation::Translation;
use crate::migration::Bounds;
use crate::model::instance::Instance;
use crate::model::morphism::InstanceMorphism;
use crate::typing::{typechange_delta, typechange_pi, typechange_sigma, TypedInstance};

/// One migration step.
#[derive(Clone, Debug)]
pub enum Step {
    Delta(Arc<Translation>),
    Sigma(Arc<Translation>),
    Pi(Arc<Translation>),
    SigmaHat(Arc<InstanceMorphism>),
    DeltaHat(Arc<InstanceMorphism>),
    PiHat(Arc<InstanceMorphism>),
}

impl Step {
    pub fn kind(&self) -> &'static str {
        match self {
            Step::Delta(_) => "delta",
            Step::Sigma(_) => "sigma",
            Step::Pi(_) => "pi",
            Step::SigmaHat(_) => "sigma-hat",
            Step::DeltaHat(_) => "delta-hat",
            Step::PiHat(_) => "pi-hat",
        }
    }
}

/// A value flowing through a pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    Plain(Instance),
    Typed(TypedInstance),
}

impl Stage {
    pub fn instance(&self) -> &Instance {
        match self {
            Stage::Plain(i) => i,
            Stage::Typed(t) => t.instance(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepReport {
    pub kind: &'static str,
    pub rows: usize,
    /// Element counts per vertex after each saturation round (left pushforward only).
    pub rounds: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineReport {
    pub steps: Vec<StepReport>,
}

/// Runs `steps` left to right starting from `start`.
///
/// A step whose input does not live where the previous step left off fails
/// with [`Error::Pipeline`] naming the 1-based step; bound errors pass
/// through unchanged.
pub fn run_pipeline(
    steps: &[Step],
    start: Stage,
    bounds: &Bounds,
) -> Result<(Stage, PipelineReport)> {
    let mut report = PipelineReport::default();
    let mut stage = start;
    for (n, step) in steps.iter().enumerate() {
        let at = n + 1;
        let mismatch = |message: String| Error::Pipeline { step: at, message };
        let mut rounds = Vec::new();
        stage = match (step, stage) {
            (Step::Delta(f), Stage::Plain(i)) => {
                f.require_target(i.schema())
                    .map_err(|e| mismatch(e.to_string()))?;
                Stage::Plain(delta(f, &i)?)
            }
            (Step::Sigma(f), Stage::Plain(i)) => {
                f.require_source(i.schema())
                    .map_err(|e| mismatch(e.to_string()))?;
                let s = sigma(f, &i, bounds)?;
                rounds = s.rounds;
                Stage::Plain(s.instance)
            }
            (Step::Pi(f), Stage::Plain(i)) => {
                f.require_source(i.schema())
                    .map_err(|e| mismatch(e.to_string()))?;
                Stage::Plain(pi(f, &i, bounds)?.instance)
            }
            (Step::SigmaHat(k), Stage::Typed(t)) => Stage::Typed(
                typechange_sigma(k, &t).map_err(|e| mismatch(e.to_string()))?,
            ),
            (Step::DeltaHat(k), Stage::Typed(t)) => Stage::Typed(
                typechange_delta(k, &t).map_err(|e| mismatch(e.to_string()))?,
            ),
            (Step::PiHat(k), Stage::Typed(t)) => {
                if **k.source() != **t.over() {
                    return Err(mismatch(
                        "input is not typed over the source of the type change".into(),
                    ));
                }
                Stage::Typed(typechange_pi(k, &t, bounds)?)
            }
            (step, Stage::Plain(_)) => {
                return Err(mismatch(format!(
                    "`{}` needs a typed instance but got a plain one",
                    step.kind()
                )))
            }
            (step, Stage::Typed(_)) => {
                return Err(mismatch(format!(
                    "`{}` needs a plain instance but got a typed one",
                    step.kind()
                )))
            }
        };
        report.steps.push(StepReport {
            kind: step.kind(),
            rows: stage.instance().total_rows(),
            rounds,
        });
    }
    Ok((stage, report))
}
