use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::equivalence::{paths_equivalent, Equivalence, RewriteBudget};
use crate::model::schema::{ArrowId, Path, Schema, VertexId};

/// A functor between schemas, presented by where it sends vertices and arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    source: Arc<Schema>,
    target: Arc<Schema>,
    vertex_map: Vec<VertexId>,
    arrow_map: Vec<Path>,
}

impl Translation {
    /// Builds a translation, requiring sources and targets to be preserved.
    pub fn new(
        source: Arc<Schema>,
        target: Arc<Schema>,
        vertex_map: Vec<VertexId>,
        arrow_map: Vec<Path>,
    ) -> Result<Self> {
        let t = Self::from_parts(source, target, vertex_map, arrow_map)?;
        if let Some(issue) = t.endpoint_issues().into_iter().next() {
            return Err(Error::MalformedTranslation(issue.to_string()));
        }
        Ok(t)
    }

    /// Builds a translation whose images are valid paths but whose endpoints
    /// are not checked. [`check_translation`] reports what is wrong with it.
    pub fn from_parts(
        source: Arc<Schema>,
        target: Arc<Schema>,
        vertex_map: Vec<VertexId>,
        arrow_map: Vec<Path>,
    ) -> Result<Self> {
        let sg = source.graph();
        if vertex_map.len() != sg.vertex_count() || arrow_map.len() != sg.arrow_count() {
            return Err(Error::MalformedTranslation(format!(
                "expected {} vertex and {} arrow images, got {} and {}",
                sg.vertex_count(),
                sg.arrow_count(),
                vertex_map.len(),
                arrow_map.len()
            )));
        }
        if let Some(v) = vertex_map
            .iter()
            .find(|v| v.0 >= target.graph().vertex_count())
        {
            return Err(Error::UnknownVertex(format!("#{}", v.0)));
        }
        for p in &arrow_map {
            target.target(p)?;
        }
        Ok(Translation {
            source,
            target,
            vertex_map,
            arrow_map,
        })
    }

    pub fn identity(schema: Arc<Schema>) -> Self {
        let g = schema.graph();
        let vertex_map = g.vertices().collect();
        let arrow_map = g
            .arrows()
            .map(|a| Path::new(g.source(a), vec![a]))
            .collect();
        Translation {
            source: schema.clone(),
            target: schema,
            vertex_map,
            arrow_map,
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Translation) -> Result<Translation> {
        if *self.target != *next.source {
            return Err(Error::SchemaMismatch {
                expected: self.target.name().to_string(),
                found: next.source.name().to_string(),
            });
        }
        let vertex_map = self.vertex_map.iter().map(|&v| next.vertex(v)).collect();
        let arrow_map = self.arrow_map.iter().map(|p| next.image(p)).collect();
        Ok(Translation {
            source: self.source.clone(),
            target: next.target.clone(),
            vertex_map,
            arrow_map,
        })
    }

    pub fn source(&self) -> &Arc<Schema> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Schema> {
        &self.target
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn arrow(&self, a: ArrowId) -> &Path {
        &self.arrow_map[a.0]
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn arrow_map(&self) -> &[Path] {
        &self.arrow_map
    }

    /// Image of a source path: the concatenation of its arrows' images.
    pub fn image(&self, p: &Path) -> Path {
        let mut arrows = Vec::new();
        for &a in &p.arrows {
            arrows.extend_from_slice(&self.arrow_map[a.0].arrows);
        }
        Path::new(self.vertex(p.source), arrows)
    }

    fn endpoint_issues(&self) -> Vec<TranslationIssue> {
        let sg = self.source.graph();
        let mut out = Vec::new();
        for a in sg.arrows() {
            let p = &self.arrow_map[a.0];
            let want_s = self.vertex(sg.source(a));
            let want_t = self.vertex(sg.target(a));
            let got_t = self.target.path_target(p);
            if p.source != want_s || got_t != want_t {
                out.push(TranslationIssue::Endpoints {
                    arrow: sg.arrow_name(a).to_string(),
                    expected: (
                        self.target.vertex_name(want_s).to_string(),
                        self.target.vertex_name(want_t).to_string(),
                    ),
                    found: (
                        self.target.vertex_name(p.source).to_string(),
                        self.target.vertex_name(got_t).to_string(),
                    ),
                });
            }
        }
        out
    }

    pub fn require_source(&self, schema: &Schema) -> Result<()> {
        if *self.source != *schema {
            return Err(Error::SchemaMismatch {
                expected: self.source.name().to_string(),
                found: schema.name().to_string(),
            });
        }
        Ok(())
    }

    pub fn require_target(&self, schema: &Schema) -> Result<()> {
        if *self.target != *schema {
            return Err(Error::SchemaMismatch {
                expected: self.target.name().to_string(),
                found: schema.name().to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TranslationIssue {
    /// An arrow whose image path does not run between the images of its ends.
    Endpoints {
        arrow: String,
        expected: (String, String),
        found: (String, String),
    },
    /// A declared equivalence whose image could not be proved within budget.
    Unverified {
        equation: String,
        lhs: String,
        rhs: String,
        budget: usize,
    },
}

impl fmt::Display for TranslationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranslationIssue::Endpoints {
                arrow,
                expected,
                found,
            } => write!(
                f,
                "arrow `{arrow}` must map to a path `{}` -> `{}`, but its image runs `{}` -> `{}`",
                expected.0, expected.1, found.0, found.1
            ),
            TranslationIssue::Unverified {
                equation,
                lhs,
                rhs,
                budget,
            } => write!(
                f,
                "equation `{equation}` maps to `{lhs}` and `{rhs}`, not proved equivalent within {budget} steps"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranslationReport {
    pub issues: Vec<TranslationIssue>,
}

impl TranslationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks that sources, targets and declared equivalences are preserved.
///
/// Equivalences are only checked for arrows whose endpoints are right, and an
/// unproved image is reported as unverified rather than as a disproof.
pub fn check_translation(f: &Translation, budget: &RewriteBudget) -> TranslationReport {
    let mut issues = f.endpoint_issues();
    if issues.is_empty() {
        for eq in f.source.equations() {
            let l = f.image(&eq.lhs);
            let r = f.image(&eq.rhs);
            let proved = paths_equivalent(&f.target, &l, &r, budget)
                .map(Equivalence::is_equivalent)
                .unwrap_or(false);
            if !proved {
                issues.push(TranslationIssue::Unverified {
                    equation: f.source.display_equation(eq),
                    lhs: f.target.display_qualified(&l),
                    rhs: f.target.display_qualified(&r),
                    budget: budget.steps,
                });
            }
        }
    }
    TranslationReport { issues }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationEquality {
    Equal,
    NotProvedWithinBudget,
    Different,
}

/// Equality of translations up to path equivalence in the target.
pub fn translations_equal(
    f: &Translation,
    g: &Translation,
    budget: &RewriteBudget,
) -> Result<TranslationEquality> {
    if *f.source != *g.source || *f.target != *g.target {
        return Err(Error::SchemaMismatch {
            expected: format!("{} -> {}", f.source.name(), f.target.name()),
            found: format!("{} -> {}", g.source.name(), g.target.name()),
        });
    }
    if f.vertex_map != g.vertex_map {
        return Ok(TranslationEquality::Different);
    }
    for (p, q) in f.arrow_map.iter().zip(&g.arrow_map) {
        if !paths_equivalent(&f.target, p, q, budget)?.is_equivalent() {
            return Ok(TranslationEquality::NotProvedWithinBudget);
        }
    }
    Ok(TranslationEquality::Equal)
}
