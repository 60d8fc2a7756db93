use std::sync::Arc;

use crate::error::Result;
use crate::migration::delta::{delta, delta_on_morphism};
use crate::migration::pi::{pi, pi_on_morphism, PiResult};
use crate::migration::sigma::{sigma, sigma_on_morphism, ElementTerm};
use crate::migration::translation::Translation;
use crate::migration::Bounds;
use crate::model::instance::Instance;
use crate::model::morphism::{count_homs, InstanceMorphism};
use crate::model::schema::VertexId;

/// Units and counits of both adjunctions at a pair of instances.
#[derive(Clone, Debug)]
pub struct Adjunction {
    /// `I -> Δ Σ I`
    pub sigma_unit: InstanceMorphism,
    /// `Σ Δ J -> J`
    pub sigma_counit: InstanceMorphism,
    /// `J -> Π Δ J`
    pub pi_unit: InstanceMorphism,
    /// `Δ Π I -> I`
    pub pi_counit: InstanceMorphism,
}

/// Sends each row to the element it seeds.
pub fn sigma_unit(f: &Translation, i: &Instance, bounds: &Bounds) -> Result<InstanceMorphism> {
    let s = sigma(f, i, bounds)?;
    let dsi = delta(f, &s.instance)?;
    InstanceMorphism::new(Arc::new(i.clone()), Arc::new(dsi), s.base_rows)
}

/// Evaluates each element's term in `j`.
pub fn sigma_counit(f: &Translation, j: &Instance, bounds: &Bounds) -> Result<InstanceMorphism> {
    let dj = delta(f, j)?;
    let s = sigma(f, &dj, bounds)?;
    let components = s
        .terms
        .iter()
        .map(|ts| {
            ts.iter()
                .map(|t| match t {
                    ElementTerm::Base { row, .. } => *row,
                    ElementTerm::Skolem { row, path, .. } => j.follow(&path.arrows, *row),
                })
                .collect()
        })
        .collect();
    InstanceMorphism::new(Arc::new(s.instance), Arc::new(j.clone()), components)
}

/// Sends a row to the family of its values along every comma object.
pub fn pi_unit(f: &Translation, j: &Instance, bounds: &Bounds) -> Result<InstanceMorphism> {
    let dj = delta(f, j)?;
    let p = pi(f, &dj, bounds)?;
    let components = f
        .target()
        .graph()
        .vertices()
        .map(|d| {
            (0..j.row_count(d))
                .map(|r| {
                    let fam: Vec<usize> = p.objects[d.0]
                        .iter()
                        .map(|o| j.follow(&o.path.arrows, r))
                        .collect();
                    p.find(d, &fam).expect("every row induces a compatible family")
                })
                .collect()
        })
        .collect();
    InstanceMorphism::new(Arc::new(j.clone()), Arc::new(p.instance), components)
}

fn identity_object(p: &PiResult, f: &Translation, c: VertexId) -> usize {
    p.objects[f.vertex(c).0]
        .iter()
        .position(|o| o.source == c && o.path.is_identity())
        .expect("identity comma object")
}

/// Projects each family onto its component at the trivial path.
pub fn pi_counit(f: &Translation, i: &Instance, bounds: &Bounds) -> Result<InstanceMorphism> {
    let p = pi(f, i, bounds)?;
    let dpi = delta(f, &p.instance)?;
    let components = f
        .source()
        .graph()
        .vertices()
        .map(|c| {
            let k = identity_object(&p, f, c);
            p.families[f.vertex(c).0].iter().map(|fam| fam[k]).collect()
        })
        .collect();
    InstanceMorphism::new(Arc::new(dpi), Arc::new(i.clone()), components)
}

pub fn adjunction_unit_counit(
    f: &Translation,
    i: &Instance,
    j: &Instance,
    bounds: &Bounds,
) -> Result<Adjunction> {
    Ok(Adjunction {
        sigma_unit: sigma_unit(f, i, bounds)?,
        sigma_counit: sigma_counit(f, j, bounds)?,
        pi_unit: pi_unit(f, j, bounds)?,
        pi_counit: pi_counit(f, i, bounds)?,
    })
}

/// Outcome of the four triangle identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangles {
    /// `ε_{ΣI} ∘ Σ(η_I) = id`
    pub sigma: bool,
    /// `Δ(ε_J) ∘ η_{ΔJ} = id`
    pub delta_of_sigma: bool,
    /// `Π(ε'_I) ∘ η'_{ΠI} = id`
    pub pi: bool,
    /// `ε'_{ΔJ} ∘ Δ(η'_J) = id`
    pub delta_of_pi: bool,
}

impl Triangles {
    pub fn all(&self) -> bool {
        self.sigma && self.delta_of_sigma && self.pi && self.delta_of_pi
    }
}

/// Checks the triangle identities of both adjunctions componentwise.
pub fn triangle_identities(
    f: &Translation,
    i: &Instance,
    j: &Instance,
    bounds: &Bounds,
) -> Result<Triangles> {
    let holds = |a: &InstanceMorphism, b: &InstanceMorphism| {
        a.then(b).map(|m| m.is_identity()).unwrap_or(false)
    };

    let si = sigma(f, i, bounds)?.instance;
    let eta = sigma_unit(f, i, bounds)?;
    let sigma_tri = holds(&sigma_on_morphism(f, &eta, bounds)?, &sigma_counit(f, &si, bounds)?);

    let dj = delta(f, j)?;
    let delta_sigma_tri = holds(
        &sigma_unit(f, &dj, bounds)?,
        &delta_on_morphism(f, &sigma_counit(f, j, bounds)?)?,
    );

    let pii = pi(f, i, bounds)?.instance;
    let pi_tri = holds(
        &pi_unit(f, &pii, bounds)?,
        &pi_on_morphism(f, &pi_counit(f, i, bounds)?, bounds)?,
    );

    let delta_pi_tri = holds(
        &delta_on_morphism(f, &pi_unit(f, j, bounds)?)?,
        &pi_counit(f, &dj, bounds)?,
    );

    Ok(Triangles {
        sigma: sigma_tri,
        delta_of_sigma: delta_sigma_tri,
        pi: pi_tri,
        delta_of_pi: delta_pi_tri,
    })
}

/// Sizes of the hom-sets on both sides of each adjunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomCounts {
    /// `|Hom(Σ I, J)|`
    pub sigma_to_j: usize,
    /// `|Hom(I, Δ J)|`
    pub i_to_delta: usize,
    /// `|Hom(Δ J, I)|`
    pub delta_to_i: usize,
    /// `|Hom(J, Π I)|`
    pub j_to_pi: usize,
}

impl HomCounts {
    pub fn sigma_holds(&self) -> bool {
        self.sigma_to_j == self.i_to_delta
    }

    pub fn pi_holds(&self) -> bool {
        self.delta_to_i == self.j_to_pi
    }
}

/// Counts morphisms by exhaustive search, failing beyond `cap` per hom-set.
pub fn hom_counts(
    f: &Translation,
    i: &Instance,
    j: &Instance,
    bounds: &Bounds,
    cap: Option<usize>,
) -> Result<HomCounts> {
    let si = sigma(f, i, bounds)?.instance;
    let dj = delta(f, j)?;
    let pii = pi(f, i, bounds)?.instance;
    Ok(HomCounts {
        sigma_to_j: count_homs(&si, j, cap)?,
        i_to_delta: count_homs(i, &dj, cap)?,
        delta_to_i: count_homs(&dj, i, cap)?,
        j_to_pi: count_homs(j, &pii, cap)?,
    })
}
