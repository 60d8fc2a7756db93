use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catmig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

// Small instances over the two-fact schemas, so hom-sets stay enumerable.
const SMALL: &str = "
instance I3 on C {
  table T1 { a -> (T1_SSN = s1) (T1_First = Bob) (T1_Last = Smith) }
  table T2 { b -> (T2_First = Bob) (T2_Last = Smith) (T2_Salary = m1) }
  table SSN { s1 }
  table First { Bob }
  table Last { Smith }
  table Salary { m1 }
}

instance J3 on D {
  table T {
    x -> (SSN = s1) (First = Bob) (Last = Smith) (Salary = m1)
    y -> (SSN = s2) (First = Bob) (Last = Smith) (Salary = m1)
  }
  table SSN { s1 s2 }
  table First { Bob }
  table Last { Smith }
  table Salary { m1 }
}
";

#[test]
fn validate_goldens() {
    let files: Vec<String> = [
        "employee.cat",
        "two_facts.cat",
        "equivalence.cat",
        "self_email.cat",
        "satisfaction.cat",
        "filtering.cat",
        "times50.cat",
    ]
    .iter()
    .map(|f| example(f))
    .collect();
    let args: Vec<&str> = std::iter::once("validate")
        .chain(files.iter().map(String::as_str))
        .collect();
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "");
}

#[test]
fn validate_empty_file() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "empty.cat", "");
    assert_eq!(run(&["validate", &f]).status.code(), Some(0));
}

#[test]
fn parse_error_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.cat", "schema S { nodes A; arrows f : A -> B; }");
    let out = run(&["validate", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.cat:1:"), "{}", stderr(&out));
    assert_eq!(stdout(&out), "");
}

#[test]
fn unknown_name_exits_2() {
    let out = run(&["migrate", "sigma", "Nope", "I", &example("two_facts.cat")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no translation named `Nope`"));
    let out = run(&["render", "Nope", &example("employee.cat")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn saturation_bound_exits_3_naming_vertex() {
    let out = run(&[
        "migrate",
        "sigma",
        "F",
        "I",
        &example("two_facts.cat"),
        "--saturation-bound",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("vertex `"), "{}", stderr(&out));
    assert_eq!(stdout(&out), "");
}

#[test]
fn migrate_writes_readable_document() {
    let dir = TempDir::new().unwrap();
    let out_file = dir.path().join("out.cat");
    let out = run(&[
        "migrate",
        "pi",
        "F",
        "I",
        &example("two_facts.cat"),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "");
    assert!(stderr(&out).contains("T: 2 rows"));
    let back = run(&["validate", out_file.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
    let csv = run(&[
        "render",
        "pi_F_I",
        out_file.to_str().unwrap(),
        "--format",
        "csv",
        "--table",
        "T",
    ]);
    let text = stdout(&csv);
    assert!(text.starts_with("ID,SSN,First,Last,Salary\n"), "{text}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn json_report_is_stable() {
    let args = [
        "--json",
        "--stable",
        "migrate",
        "sigma",
        "F",
        "I",
        &example("two_facts.cat"),
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["command"], "migrate sigma");
    assert_eq!(report["bounds"]["saturation"], 1000);
    assert_eq!(report["bounds"]["path"], 16);
    assert_eq!(report["tables"][0]["table"], "T");
    assert_eq!(report["tables"][0]["rows"], 7);
    assert!(report.get("wall_time_ms").is_none());
    assert!(report["output"].as_str().unwrap().contains("instance sigma_F_I on D"));

    let timed = run(&args[..1].iter().chain(&args[2..]).copied().collect::<Vec<_>>());
    let report: serde_json::Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(report["wall_time_ms"].is_number());
}

#[test]
fn render_ascii_and_empty_tables() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "e.cat",
        "schema S { nodes A, B; arrows f : A -> B; } instance Z on S {}",
    );
    let out = run(&["render", "Z", &f]);
    assert_eq!(stdout(&out), "A\nID | f\n---+--\n\nB\nID\n--\n");
    let out = run(&["render", "Z", &f, "--format", "csv", "--table", "A"]);
    assert_eq!(stdout(&out), "ID,f\n");
    let out = run(&["render", "Z", &f, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["render", "Z", &f, "--format", "csv", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("B.csv")).unwrap(), "ID\n");
}

#[test]
fn render_employee_table() {
    let out = run(&["render", "Staff", &example("employee.cat"), "--table", "Employee"]);
    assert_eq!(
        stdout(&out),
        "Employee\n\
         ID  | First    | Last    | Mgr | isIn\n\
         ----+----------+---------+-----+-----\n\
         101 | David    | Hilbert | 103 | q10\n\
         102 | Bertrand | Russell | 102 | x02\n\
         103 | Alan     | Turing  | 103 | q10\n"
    );
}

#[test]
fn export_is_deterministic_and_percent_encoded() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "n.cat",
        "schema S { nodes P, N; arrows name : P -> N; }
         instance I on S { table P { p1 -> (name = \"Bob Smith\") } table N { \"Bob Smith\" } }",
    );
    let a = run(&["export-rdf", "I", &f, "--base", "http://x.org/db/"]);
    let b = run(&["export-rdf", "I", &f, "--base", "http://x.org/db/"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a),
        "<http://x.org/db/P/p1> <http://x.org/db/name> <http://x.org/db/N/Bob%20Smith> .\n"
    );
}

fn adjunction(extra: &[&str]) -> Output {
    let dir = TempDir::new().unwrap();
    let small = write(&dir, "small.cat", SMALL);
    let two = example("two_facts.cat");
    let mut args = vec!["check-adjunction", "F", "I3", "J3", &two, &small];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn adjunction_counts_agree_on_small_instances() {
    let out = adjunction(&[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("left adjunction: equal"), "{text}");
    assert!(text.contains("right adjunction: equal"), "{text}");
    assert!(text.contains("triangle identities: hold"), "{text}");
}

#[test]
fn corrupted_left_pushforward_is_caught() {
    let out = adjunction(&["--mutate-sigma"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("left adjunction: MISMATCH"));
}

#[test]
fn adjunction_cap_exits_3() {
    let out = adjunction(&["--max-homs", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
}

#[test]
fn identity_translation_adjunction() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "id.cat",
        "schema S { nodes A, B; arrows f : A -> B; }
         translation Id : S -> S { nodes A -> A, B -> B; arrows f -> f; }
         instance I on S { table A { a1 -> (f = b1) } table B { b1 b2 } }",
    );
    let out = run(&["check-adjunction", "Id", "I", "I", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn pipeline_of_plain_and_typed_steps() {
    let two = example("two_facts.cat");
    let out = run(&["pipeline", "I", &two, "--step", "sigma:F", "--step", "delta:F"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("T1: 7 rows"));
    assert!(stderr(&out).contains("T2: 7 rows"));

    let times = example("times50.cat");
    let out = run(&["pipeline", "Contracts", &times, "--step", "sigma-hat:threshold", "--name", "R"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.cat", &stdout(&out));
    assert_eq!(run(&["validate", &f]).status.code(), Some(0));

    let out = run(&["pipeline", "I", &two, "--step", "sigma-hat:F"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["pipeline", "I", &two, "--step", "delta:F"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("step 1"), "{}", stderr(&out));
}
