//! Acceptance gate: one PASS or FAIL line per criterion, nonzero exit if
//! any fails.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use catmig::dsl;
use catmig::migration::{delta, sigma, Bounds};
use catmig::model::{find_isomorphism, Instance, InstanceMorphism};
use catmig::rdf::{grothendieck, ungrothendieck};
use catmig::typing::{
    typechange_delta, typechange_pi, typechange_sigma, validate_typed, TypedInstance,
};
use testkit::checks::{cper_case, migration_case};
use testkit::{
    cell, golden_doc, instance_of, isomorphic_fixing, morphism_of, row_ids, table, translation_of,
    typed_of,
};

/// Wall-clock limit for one golden CLI migration.
const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
/// Wall-clock limit for the whole random migration suite.
const SUITE_LIMIT: Duration = Duration::from_secs(60);
const MIGRATION_CASES: u64 = 200;
const SCHEMA_CASES: u64 = 500;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, what: impl Into<String>) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/examples")
        .join(name)
}

fn catmig(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_catmig"))
        .args(args)
        .output()
        .expect("binary runs");
    (out, start.elapsed())
}

/// Runs `migrate` on the two-fact document and reads back the result.
fn migrate(kind: &str, instance: &str) -> Result<(Arc<Instance>, Duration), String> {
    let file = example("two_facts.cat");
    let (out, took) = catmig(&["migrate", kind, "F", instance, file.to_str().unwrap(), "--name", "Out"]);
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let doc = dsl::parse(&text).map_err(|e| format!("output does not parse: {e}"))?;
    Ok((instance_of(&doc, "Out"), took))
}

fn within(took: Duration) -> Check {
    ensure(took < GOLDEN_LIMIT, format!("took {took:?}"))
}

fn fixed_except<'a>(i: &'a Instance, renamed: &'a [&str]) -> impl Fn(catmig::model::VertexId) -> bool + 'a {
    move |v| !renamed.contains(&i.schema().vertex_name(v))
}

fn golden_pullback() -> Check {
    let (out, took) = migrate("delta", "J")?;
    within(took)?;
    ensure(row_ids(&out, "T1").len() == 3, "T1 does not have 3 rows")?;
    ensure(row_ids(&out, "T2").len() == 3, "T2 does not have 3 rows")?;
    let facts = instance_of(&golden_doc("two_facts.cat"), "PullbackFacts");
    ensure(
        isomorphic_fixing(&out, &facts, fixed_except(&out, &["T1", "T2"])),
        "not the pullback tables up to row ids",
    )
}

fn golden_join() -> Check {
    let (out, took) = migrate("pi", "I")?;
    within(took)?;
    let rows: Vec<Vec<String>> = table(&out, "T")
        .into_iter()
        .map(|(_, cells)| cells.into_iter().map(|(_, v)| v).collect())
        .collect();
    ensure(
        rows == [
            ["122-988", "Sue", "Smith", "$300"],
            ["198-877", "Alice", "Jones", "$100"],
        ],
        format!("T is {rows:?}"),
    )?;
    let i = instance_of(&golden_doc("two_facts.cat"), "I");
    for leaf in ["SSN", "First", "Last", "Salary"] {
        ensure(row_ids(&out, leaf) == row_ids(&i, leaf), format!("leaf {leaf} changed"))?;
    }
    Ok(())
}

fn golden_union() -> Check {
    let (out, took) = migrate("sigma", "I")?;
    within(took)?;
    let t = table(&out, "T");
    ensure(t.len() == 7, format!("T has {} rows", t.len()))?;
    let expected = [
        ["T1-001", "115-234", "Bob", "Smith", "T1-001.Salary"],
        ["T1-002", "122-988", "Sue", "Smith", "T1-002.Salary"],
        ["T1-003", "198-877", "Alice", "Jones", "T1-003.Salary"],
        ["T2-A101", "T2-A101.SSN", "Alice", "Jones", "$100"],
        ["T2-A102", "T2-A102.SSN", "Sam", "Miller", "$150"],
        ["T2-A104", "T2-A104.SSN", "Sue", "Smith", "$300"],
        ["T2-A110", "T2-A110.SSN", "Carl", "Pratt", "$200"],
    ];
    for ((id, cells), want) in t.iter().zip(expected) {
        let mut got = vec![id.as_str()];
        got.extend(cells.iter().map(|(_, v)| v.as_str()));
        ensure(got == want, format!("row {got:?}, expected {want:?}"))?;
    }
    Ok(())
}

fn equation_enforcement() -> Check {
    let file = example("employee.cat");
    let (out, _) = catmig(&["validate", file.to_str().unwrap()]);
    ensure(out.status.code() == Some(0), "employee instance does not validate")?;
    let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let mutated = text.replace("101 -> (First = David) (Last = Hilbert) (Mgr = 103)", "101 -> (First = David) (Last = Hilbert) (Mgr = 102)");
    ensure(mutated != text, "mutation did not apply")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bad = dir.path().join("mutated.cat");
    std::fs::write(&bad, mutated).map_err(|e| e.to_string())?;
    let (out, _) = catmig(&["validate", bad.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(1), format!("exit {:?}", out.status.code()))?;
    ensure(
        err.contains("row `101`") && err.contains("`Mgr.isIn = isIn`"),
        format!("diagnostic was {err}"),
    )
}

fn equivalence_round_trip() -> Check {
    let doc = golden_doc("equivalence.cat");
    let f = translation_of(&doc, "F");
    let j = instance_of(&doc, "J");
    let k = instance_of(&doc, "K");
    let b = Bounds::default();
    let err = |e: catmig::Error| e.to_string();
    let dj = Arc::new(delta(&f, &j).map_err(err)?);
    let sdj = Arc::new(sigma(&f, &dj, &b).map_err(err)?.instance);
    ensure(find_isomorphism(&sdj, &j).is_some(), "Sigma Delta J is not isomorphic to J")?;
    let sk = sigma(&f, &k, &b).map_err(err)?.instance;
    let dsk = Arc::new(delta(&f, &sk).map_err(err)?);
    ensure(find_isomorphism(&dsk, &k).is_some(), "Delta Sigma K is not isomorphic to K")?;
    ensure(
        isomorphic_fixing(&dj, &k, fixed_except(&dj, &["T1", "T2"])),
        "i12/i21 columns differ from the equivalence pullback",
    )
}

fn grothendieck_export() -> Check {
    let file = example("employee.cat");
    let (out, _) = catmig(&["export-rdf", "Staff", file.to_str().unwrap(), "--base", "http://example.org/company"]);
    ensure(out.status.success(), "export failed")?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(text.lines().count() == 16, format!("{} triples", text.lines().count()))?;
    ensure(
        text.contains("<http://example.org/company/Employee/101> <http://example.org/company/isIn> <http://example.org/company/Department/q10> ."),
        "no 101 isIn q10 triple",
    )?;
    let i = instance_of(&golden_doc("employee.cat"), "Staff");
    let back = ungrothendieck(&grothendieck(&i)).map_err(|e| e.to_string())?;
    ensure(back == *i, "round trip changed the instance")
}

fn typing_goldens() -> Check {
    let err = |e: catmig::Error| e.to_string();
    let doc = golden_doc("times50.cat");
    let t = typed_of(&doc, "Contracts");
    ensure(validate_typed(&t).is_valid(), "contracts do not validate")?;
    let j = t.instance();
    let s = j.schema();
    let (x, z) = (s.vertex("X").unwrap(), s.vertex("Z").unwrap());
    let mutated = j
        .with_cell(s.arrow("d").unwrap(), j.row_index(x, "CtrX13").unwrap(), j.row_index(z, "$201").unwrap())
        .map_err(err)?;
    let typing = InstanceMorphism::from_components(Arc::new(mutated), t.over().clone(), t.typing().components().to_vec())
        .map_err(err)?;
    let failures = validate_typed(&TypedInstance::new(typing)).failures;
    ensure(
        failures.len() == 1 && failures[0].row == "CtrX13" && failures[0].arrow == "d",
        format!("mutation gave {failures:?}"),
    )?;

    let out = typechange_sigma(&morphism_of(&doc, "threshold"), &t).map_err(err)?;
    let q = out.over();
    let verdicts: Vec<String> = (0..out.instance().row_count(x))
        .map(|r| cell(q, "X", q.row_id(x, out.type_of(x, r)), "d"))
        .collect();
    ensure(verdicts == ["True", "True", "False"], format!("threshold gave {verdicts:?}"))?;

    let doc = golden_doc("filtering.cat");
    let out = typechange_delta(&morphism_of(&doc, "k"), &typed_of(&doc, "Staff")).map_err(err)?;
    let names: Vec<String> = table(out.instance(), "Employee")
        .into_iter()
        .map(|(_, cells)| cells[0].1.clone())
        .collect();
    ensure(names == ["Smith", "Lee", "Carlsson"], format!("filter gave {names:?}"))?;

    let doc = golden_doc("satisfaction.cat");
    let out = typechange_pi(&morphism_of(&doc, "k"), &typed_of(&doc, "Items"), &Bounds::default()).map_err(err)?;
    let l = out.instance().schema().vertex("L").unwrap();
    let mut got: Vec<(String, String)> = (0..out.instance().row_count(l))
        .map(|r| {
            let items: Vec<&str> = out
                .instance()
                .row_id(l, r)
                .trim_matches(|c| c == '(' || c == ')')
                .split(',')
                .filter_map(|part| part.split_once('=').map(|p| p.1))
                .collect();
            (items.join(","), out.over().row_id(l, out.type_of(l, r)).to_string())
        })
        .collect();
    got.sort();
    let want: Vec<(String, String)> = [
        ("a,b", "x"),
        ("a,e", "x"),
        ("a,g", "x"),
        ("c,b", "x"),
        ("c,e", "x"),
        ("c,g", "x"),
        ("d,f", "y"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    ensure(got == want, format!("satisfaction gave {got:?}"))
}

fn property_suite() -> Check {
    let start = Instant::now();
    let mut failed = [0usize; 5];
    let mut first = None;
    for seed in 0..MIGRATION_CASES {
        let case = migration_case(seed);
        for (n, list) in [&case.oracle, &case.homs, &case.triangles, &case.validity, &case.round_trip]
            .iter()
            .enumerate()
        {
            if !list.is_empty() {
                failed[n] += 1;
                first.get_or_insert_with(|| list[0].clone());
            }
        }
    }
    let took = start.elapsed();
    let parts = ["a", "b", "c", "d", "e"]
        .iter()
        .zip(failed)
        .map(|(p, n)| format!("({p}) {n} failing"))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(
        failed.iter().all(|&n| n == 0),
        format!("{parts}; first: {}", first.unwrap_or_default()),
    )?;
    ensure(took < SUITE_LIMIT, format!("took {took:?}"))
}

fn path_equivalence() -> Check {
    let mut violations = 0;
    let mut checked = 0;
    for seed in 0..SCHEMA_CASES {
        let case = cper_case(seed);
        if let Some(f) = case.failures.first() {
            return Err(f.clone());
        }
        violations += case.soundness_violations;
        checked += case.pairs_checked;
    }
    ensure(
        violations == 0,
        format!("{violations} soundness violations in {checked} checks"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden pullback", golden_pullback),
        ("golden join", golden_join),
        ("golden union with Skolem cells", golden_union),
        ("equation enforcement", equation_enforcement),
        ("equivalence translation round trip", equivalence_round_trip),
        ("triple export", grothendieck_export),
        ("typing goldens", typing_goldens),
        ("random migration suite", property_suite),
        ("path equivalence engine", path_equivalence),
    ];
    let mut all = true;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS {} {name} ({:.2?})", n + 1, start.elapsed()),
            Err(e) => {
                all = false;
                println!("FAIL {} {name}: {e}", n + 1);
            }
        }
    }
    if !all {
        std::process::exit(1);
    }
}
