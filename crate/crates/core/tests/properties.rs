use std::sync::Arc;

use catmig::dsl::{self, Decl, Document, Item};
use catmig::migration::{delta, delta_on_morphism, Translation};
use catmig::model::{
    count_homs, homs, instance_fiber_product, validate_instance, Instance, InstanceBuilder,
    InstanceMorphism, Schema, SchemaBuilder,
};
use catmig::typing::{
    count_typed_homs, typechange_delta, typechange_pi, typechange_sigma, validate_typed,
    TypedInstance,
};
use catmig::Bounds;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use testkit::checks::{cper_case, migration_case, migration_input};
use testkit::{count_homs_brute, random_instance, random_schema};

#[test]
fn path_equivalence_on_random_schemas() {
    let mut checked = 0;
    for seed in 0..500 {
        let case = cper_case(seed);
        assert!(case.failures.is_empty(), "{:#?}", case.failures);
        assert_eq!(case.soundness_violations, 0, "seed {seed}");
        checked += case.pairs_checked;
    }
    assert!(checked > 1000);
}

#[test]
fn pushforwards_on_random_translations() {
    for seed in 0..200 {
        let case = migration_case(seed);
        assert!(case.passed(), "{:#?}", case.failures().collect::<Vec<_>>());
    }
}

fn random_hom(
    rng: &mut ChaCha8Rng,
    a: &Arc<Instance>,
    b: &Arc<Instance>,
) -> Option<InstanceMorphism> {
    homs(a, b, Some(100_000)).ok()?.choose(rng).cloned()
}

fn small_schema(rng: &mut ChaCha8Rng) -> Arc<Schema> {
    let nv = rng.gen_range(1..=3);
    let na = rng.gen_range(0..=3);
    Arc::new(random_schema(rng, "S", ("v", "a"), nv, na, 1))
}

fn typed_over(rng: &mut ChaCha8Rng, over: &Arc<Instance>) -> Option<TypedInstance> {
    let x = Arc::new(random_instance(rng, over.schema(), 2));
    Some(TypedInstance::new(random_hom(rng, &x, over)?))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_counts_match_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = small_schema(&mut rng);
        let a = random_instance(&mut rng, &s, 2);
        let b = random_instance(&mut rng, &s, 3);
        prop_assert_eq!(count_homs(&a, &b, None).unwrap(), count_homs_brute(&a, &b));
    }

    #[test]
    fn delta_is_functorial(seed in any::<u64>()) {
        let (f, _, j) = migration_input(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let j = Arc::new(j);
        let k = Arc::new(random_instance(&mut rng, f.target(), 2));
        let id = Translation::identity(f.target().clone());
        prop_assert_eq!(&delta(&id, &j).unwrap(), &*j);
        let one = InstanceMorphism::identity(j.clone());
        prop_assert!(delta_on_morphism(&f, &one).unwrap().is_identity());
        if let (Some(m), Some(n)) = (random_hom(&mut rng, &j, &k), random_hom(&mut rng, &k, &k)) {
            let both = delta_on_morphism(&f, &m.then(&n).unwrap()).unwrap();
            let apart = delta_on_morphism(&f, &m)
                .unwrap()
                .then(&delta_on_morphism(&f, &n).unwrap())
                .unwrap();
            prop_assert_eq!(both, apart);
        }
        prop_assert!(validate_instance(&delta(&f, &j).unwrap()).is_valid());
    }

    #[test]
    fn fiber_product_is_universal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = small_schema(&mut rng);
        let base = Arc::new(random_instance(&mut rng, &s, 2));
        let a = Arc::new(random_instance(&mut rng, &s, 2));
        let b = Arc::new(random_instance(&mut rng, &s, 2));
        let x = Arc::new(random_instance(&mut rng, &s, 2));
        let (Some(f), Some(g)) = (random_hom(&mut rng, &a, &base), random_hom(&mut rng, &b, &base)) else {
            return Ok(());
        };
        let fp = instance_fiber_product(&f, &g).unwrap();
        prop_assert!(validate_instance(&fp.instance).is_valid());
        let (lf, rg) = (fp.left.then(&f).unwrap(), fp.right.then(&g).unwrap());
        prop_assert_eq!(lf.components(), rg.components());
        let to_a = homs(&x, &a, None).unwrap();
        let to_b = homs(&x, &b, None).unwrap();
        let mut cones = 0;
        for u in &to_a {
            for v in &to_b {
                if u.then(&f).unwrap().components() == v.then(&g).unwrap().components() {
                    cones += 1;
                }
            }
        }
        prop_assert_eq!(count_homs(&x, &fp.instance, None).unwrap(), cones);
    }

    #[test]
    fn retyping_adjunctions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = small_schema(&mut rng);
        let p = Arc::new(random_instance(&mut rng, &s, 2));
        let q = Arc::new(random_instance(&mut rng, &s, 2));
        let Some(k) = random_hom(&mut rng, &p, &q) else {
            return Ok(());
        };
        let (Some(t), Some(u)) = (typed_over(&mut rng, &p), typed_over(&mut rng, &q)) else {
            return Ok(());
        };
        let bounds = Bounds::default();
        let sigma_t = typechange_sigma(&k, &t).unwrap();
        let delta_u = typechange_delta(&k, &u).unwrap();
        let pi_t = typechange_pi(&k, &t, &bounds).unwrap();
        for out in [&sigma_t, &delta_u, &pi_t] {
            prop_assert!(validate_typed(out).is_valid());
            prop_assert!(validate_instance(out.instance()).is_valid());
        }
        prop_assert_eq!(
            count_typed_homs(&sigma_t, &u, None).unwrap(),
            count_typed_homs(&t, &delta_u, None).unwrap()
        );
        prop_assert_eq!(
            count_typed_homs(&delta_u, &t, None).unwrap(),
            count_typed_homs(&u, &pi_t, None).unwrap()
        );
    }

    #[test]
    fn row_names_survive_printing(names in prop::collection::btree_set("[^\\p{C}]{0,8}", 1..6)) {
        let s = Arc::new(
            SchemaBuilder::new("S")
                .vertex("A")
                .unwrap()
                .arrow("next", "A", "A")
                .unwrap()
                .build(),
        );
        let names: Vec<&String> = names.iter().collect();
        let mut b = InstanceBuilder::new(s.clone());
        for (k, n) in names.iter().enumerate() {
            b = b.row("A", n, &[("next", names[(k + 1) % names.len()])]).unwrap();
        }
        let doc = Document {
            decls: vec![
                Decl { name: "S".into(), item: Item::Schema(s) },
                Decl {
                    name: "on".into(),
                    item: Item::Instance { schema: "S".into(), instance: Arc::new(b.build().unwrap()) },
                },
            ],
        };
        let text = dsl::print(&doc);
        prop_assert_eq!(dsl::parse(&text).unwrap(), doc);
    }
}
