//! Seeded end-to-end checks shared by the property tests and the acceptance
//! run. Each case builds its own random input from a seed and reports what
//! failed, so a failing seed can be replayed on its own.

use std::sync::Arc;

use catmig::dsl::{self, Decl, Document, Item};
use catmig::migration::{
    delta, hom_counts, pi, sigma, sigma_unit, triangle_identities, Bounds,
};
use catmig::model::{
    paths_equivalent, validate_instance, Equivalence, Instance, Path, RewriteBudget, Schema,
};
use catmig::Translation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    all_paths, concat, end_of, equivalent, isomorphic, pi_oracle, random_instance, random_schema,
    random_translation, sigma_oracle,
};

/// Assignment limit handed to the brute-force right pushforward.
pub const PI_ORACLE_LIMIT: usize = 200_000;
/// Cap on each hom-set counted.
pub const HOM_CAP: usize = 200_000;
/// The triangle identities pass through `Π Δ J` and `Π Σ I`, which can
/// outgrow the default saturation bound on three-row inputs.
pub const TRIANGLE_SATURATION: usize = 200_000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn proved(schema: &Schema, p: &Path, q: &Path, budget: &RewriteBudget) -> Option<usize> {
    match paths_equivalent(schema, p, q, budget).ok()? {
        Equivalence::Equivalent { steps } => Some(steps),
        Equivalence::NotProvedWithinBudget => None,
    }
}

/// Outcome of one random schema run through the path-equivalence engine.
#[derive(Debug, Default)]
pub struct CperCase {
    /// Broken closure conditions, composition steps or algebraic mismatches.
    pub failures: Vec<String>,
    /// Pairs proved equivalent that some valid instance tells apart.
    pub soundness_violations: usize,
    /// Pairs compared against instances.
    pub pairs_checked: usize,
}

/// A random acyclic schema with at most 5 vertices, 7 arrows and 3
/// equations, checked against every closure condition, the composition
/// rule and random valid instances.
pub fn cper_case(seed: u64) -> CperCase {
    let mut rng = rng(seed);
    let nv = rng.gen_range(1..=5);
    let na = rng.gen_range(0..=7);
    let ne = rng.gen_range(0..=3);
    let schema = Arc::new(random_schema(&mut rng, "S", ("v", "a"), nv, na, ne));
    let g = schema.graph();
    let full = RewriteBudget::default();
    let one = RewriteBudget::with_steps(1);
    let mut out = CperCase::default();

    let paths: Vec<Path> = g.vertices().flat_map(|v| all_paths(&schema, v)).collect();
    let mut equal_pairs: Vec<(Path, Path, usize)> = Vec::new();
    for p in &paths {
        for q in &paths {
            let engine = proved(&schema, p, q, &full);
            let parallel = p.source == q.source && end_of(&schema, p) == end_of(&schema, q);
            if engine.is_some() && !parallel {
                out.failures.push(format!(
                    "seed {seed}: {} and {} have different endpoints but were proved equal",
                    schema.display_qualified(p),
                    schema.display_qualified(q)
                ));
            }
            let truth = parallel && equivalent(&schema, p, q);
            if engine.is_some() != truth {
                out.failures.push(format!(
                    "seed {seed}: engine says {:?} for {} and {}, closure says {truth}",
                    engine,
                    schema.display_qualified(p),
                    schema.display_qualified(q)
                ));
            }
            if let Some(steps) = engine {
                equal_pairs.push((p.clone(), q.clone(), steps));
            }
        }
    }

    for eq in schema.equations() {
        let b = eq.lhs.source;
        let c = end_of(&schema, &eq.lhs);
        for m in g.arrows().filter(|&m| g.target(m) == b) {
            let m = Path::new(g.source(m), vec![m]);
            let (mp, mq) = (concat(&m, &eq.lhs), concat(&m, &eq.rhs));
            if proved(&schema, &mp, &mq, &one).is_none() {
                out.failures.push(format!(
                    "seed {seed}: pre-composition {} = {} not proved in one step",
                    schema.display_qualified(&mp),
                    schema.display_qualified(&mq)
                ));
            }
        }
        for n in g.outgoing(c).to_vec() {
            let n = Path::new(c, vec![n]);
            let (pn, qn) = (concat(&eq.lhs, &n), concat(&eq.rhs, &n));
            if proved(&schema, &pn, &qn, &one).is_none() {
                out.failures.push(format!(
                    "seed {seed}: post-composition {} = {} not proved in one step",
                    schema.display_qualified(&pn),
                    schema.display_qualified(&qn)
                ));
            }
        }
    }

    for (p, q, s1) in &equal_pairs {
        let mid = end_of(&schema, p);
        for (r, s, s2) in equal_pairs.iter().filter(|(r, _, _)| r.source == mid) {
            let budget = RewriteBudget::with_steps(2 * (*s1).max(*s2));
            let (pr, qs) = (concat(p, r), concat(q, s));
            if proved(&schema, &pr, &qs, &budget).is_none() {
                out.failures.push(format!(
                    "seed {seed}: {} = {} not proved within {} steps",
                    schema.display_qualified(&pr),
                    schema.display_qualified(&qs),
                    budget.steps
                ));
            }
        }
    }

    for _ in 0..4 {
        let i = random_instance(&mut rng, &schema, 3);
        for (p, q, _) in &equal_pairs {
            for r in 0..i.row_count(p.source) {
                out.pairs_checked += 1;
                if i.follow(&p.arrows, r) != i.follow(&q.arrows, r) {
                    out.soundness_violations += 1;
                }
            }
        }
    }
    out
}

/// Outcome of one random translation run through the pushforwards.
#[derive(Debug, Default)]
pub struct MigrationCase {
    /// Pushforwards that differ from the brute-force oracles.
    pub oracle: Vec<String>,
    /// Hom-set sizes that break an adjunction bijection.
    pub homs: Vec<String>,
    pub triangles: Vec<String>,
    /// Outputs that break an equation of their schema.
    pub validity: Vec<String>,
    pub round_trip: Vec<String>,
}

impl MigrationCase {
    pub fn failures(&self) -> impl Iterator<Item = &String> {
        self.oracle
            .iter()
            .chain(&self.homs)
            .chain(&self.triangles)
            .chain(&self.validity)
            .chain(&self.round_trip)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Random instances of `f`'s source and target with at most 3 rows per
/// table, together with the translation.
pub fn migration_input(seed: u64) -> (Translation, Instance, Instance) {
    let mut rng = rng(seed);
    let f = random_translation(&mut rng);
    let i = random_instance(&mut rng, f.source(), 3);
    let j = random_instance(&mut rng, f.target(), 3);
    (f, i, j)
}

pub fn migration_case(seed: u64) -> MigrationCase {
    let (f, i, j) = migration_input(seed);
    let bounds = Bounds::default();
    let mut out = MigrationCase::default();
    let fail = |list: &mut Vec<String>, what: String| list.push(format!("seed {seed}: {what}"));

    let si = match sigma(&f, &i, &bounds) {
        Ok(r) => r.instance,
        Err(e) => {
            fail(&mut out.oracle, format!("sigma failed: {e}"));
            return out;
        }
    };
    let pii = match pi(&f, &i, &bounds) {
        Ok(r) => r.instance,
        Err(e) => {
            fail(&mut out.oracle, format!("pi failed: {e}"));
            return out;
        }
    };
    let dj = match delta(&f, &j) {
        Ok(d) => d,
        Err(e) => {
            fail(&mut out.validity, format!("delta failed: {e}"));
            return out;
        }
    };

    if !isomorphic(&si, &sigma_oracle(&f, &i)) {
        fail(&mut out.oracle, "sigma differs from the term oracle".into());
    }
    match pi_oracle(&f, &i, PI_ORACLE_LIMIT) {
        Some(o) if isomorphic(&pii, &o) => {}
        Some(_) => fail(&mut out.oracle, "pi differs from the assignment oracle".into()),
        None => fail(&mut out.oracle, "pi oracle ran past its limit".into()),
    }

    match hom_counts(&f, &i, &j, &bounds, Some(HOM_CAP)) {
        Ok(h) if h.sigma_holds() && h.pi_holds() => {}
        Ok(h) => fail(&mut out.homs, format!("{h:?}")),
        Err(e) => fail(&mut out.homs, format!("counting failed: {e}")),
    }

    let wide = Bounds {
        saturation: TRIANGLE_SATURATION,
        ..bounds
    };
    match triangle_identities(&f, &i, &j, &wide) {
        Ok(t) if t.all() => {}
        Ok(t) => fail(&mut out.triangles, format!("{t:?}")),
        Err(e) => fail(&mut out.triangles, format!("{e}")),
    }

    for (name, inst) in [("sigma", &si), ("pi", &pii), ("delta", &dj)] {
        let report = validate_instance(inst);
        if !report.is_valid() {
            fail(&mut out.validity, format!("{name} output: {:?}", report.violations));
        }
    }

    if let Err(e) = round_trip(&f, &i, &j, &si, &pii, &dj, &bounds) {
        fail(&mut out.round_trip, e);
    }
    out
}

fn round_trip(
    f: &Translation,
    i: &Instance,
    j: &Instance,
    si: &Instance,
    pii: &Instance,
    dj: &Instance,
    bounds: &Bounds,
) -> Result<(), String> {
    let eta = sigma_unit(f, i, bounds).map_err(|e| e.to_string())?;
    let dsi = eta.target().clone();
    let decl = |name: &str, item: Item| Decl {
        name: name.into(),
        item,
    };
    let on = |schema: &str, inst: &Instance| Item::Instance {
        schema: schema.into(),
        instance: Arc::new(inst.clone()),
    };
    let doc = Document {
        decls: vec![
            decl("C", Item::Schema(f.source().clone())),
            decl("D", Item::Schema(f.target().clone())),
            decl(
                "F",
                Item::Translation {
                    source: "C".into(),
                    target: "D".into(),
                    translation: Arc::new(f.clone()),
                },
            ),
            decl("I", on("C", i)),
            decl("J", on("D", j)),
            decl("SigmaI", on("D", si)),
            decl("PiI", on("D", pii)),
            decl("DeltaJ", on("C", dj)),
            decl("DeltaSigmaI", on("C", &dsi)),
            decl(
                "unit",
                Item::Morphism {
                    source: "I".into(),
                    target: "DeltaSigmaI".into(),
                    morphism: Arc::new(eta),
                },
            ),
        ],
    };
    let text = dsl::print(&doc);
    let back = dsl::parse(&text).map_err(|e| format!("reparse failed: {e}\n{text}"))?;
    if back != doc {
        return Err(format!("reparsed document differs\n{text}"));
    }
    if dsl::print(&back) != text {
        return Err("second print differs".into());
    }
    Ok(())
}
