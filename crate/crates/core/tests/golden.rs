use std::collections::BTreeSet;
use std::sync::Arc;

use catmig::dsl;
use catmig::error::Error;
use catmig::migration::{
    check_translation, delta, pi, sigma, translations_equal, Bounds, TranslationEquality,
};
use catmig::model::{evaluate_path, validate_instance, Instance, InstanceMorphism, RewriteBudget};
use catmig::rdf::{export_triples, grothendieck, ungrothendieck};
use catmig::typing::{
    implied_typing_instance, typechange_delta, typechange_pi, typechange_sigma, validate_typed,
    TypedInstance, TypingAuxiliary,
};
use testkit::{
    cell, golden, golden_doc, instance_of, isomorphic, isomorphic_fixing, morphism_of, row_ids,
    schema_of, table, translation_of, typed_of,
};

fn fixed_except<'a>(i: &'a Instance, renamed: &'a [&str]) -> impl Fn(catmig::model::VertexId) -> bool + 'a {
    move |v| !renamed.contains(&i.schema().vertex_name(v))
}

#[test]
fn employee_schema_shape() {
    let doc = golden_doc("employee.cat");
    let s = schema_of(&doc, "Company");
    assert_eq!(s.graph().vertex_count(), 5);
    assert_eq!(s.graph().arrow_count(), 6);
    assert_eq!(s.equations().len(), 2);
    assert_eq!(s.display_equation(&s.equations()[0]), "Mgr.isIn = isIn");
}

#[test]
fn employee_instance_validates_and_evaluates() {
    let doc = golden_doc("employee.cat");
    let i = instance_of(&doc, "Staff");
    assert!(validate_instance(&i).is_valid());
    let s = i.schema();
    let p = s.path("Employee", &["Mgr", "isIn"]).unwrap();
    assert_eq!(evaluate_path(&i, &p, "101").unwrap(), "q10");
}

#[test]
fn employee_mutation_names_witness() {
    let doc = golden_doc("employee.cat");
    let i = instance_of(&doc, "Staff");
    let s = i.schema();
    let e = s.vertex("Employee").unwrap();
    let m = i
        .with_cell(s.arrow("Mgr").unwrap(), i.row_index(e, "101").unwrap(), i.row_index(e, "102").unwrap())
        .unwrap();
    let report = validate_instance(&m);
    assert_eq!(report.violations.len(), 1);
    let v = &report.violations[0];
    assert_eq!((v.row.as_str(), v.display.as_str()), ("101", "Mgr.isIn = isIn"));
    assert_eq!((v.lhs.as_str(), v.rhs.as_str()), ("x02", "q10"));
}

#[test]
fn dangling_leaf_reference_is_a_resolution_error() {
    let text = golden("employee.cat").replace("String2 { Hilbert Russell Turing }", "String2 { Russell Turing }");
    let err = dsl::parse(&text).unwrap_err();
    assert!(err.message.contains("`Last`"), "{err}");
    assert!(err.message.contains("`101`"), "{err}");
    assert!(err.message.contains("`Hilbert`"), "{err}");
}

#[test]
fn employee_triples() {
    let doc = golden_doc("employee.cat");
    let i = instance_of(&doc, "Staff");
    let st = grothendieck(&i);
    assert_eq!(st.len(), 16);
    let shown: BTreeSet<(String, String, String)> = st
        .triples()
        .iter()
        .map(|t| {
            (
                t.subject.row.clone(),
                i.schema().arrow_name(t.predicate).to_string(),
                t.object.row.clone(),
            )
        })
        .collect();
    assert!(shown.contains(&("101".into(), "isIn".into(), "q10".into())));
    assert!(shown.contains(&("102".into(), "Last".into(), "Russell".into())));
    assert_eq!(ungrothendieck(&st).unwrap(), *i);
    let text = export_triples(&st, "http://example.org/company");
    assert_eq!(text.lines().count(), 16);
    assert!(text.contains(
        "<http://example.org/company/Employee/101> <http://example.org/company/isIn> <http://example.org/company/Department/q10> ."
    ));
    let mgr = i.schema().arrow("Mgr").unwrap();
    let broken = st.without(|t| t.predicate == mgr && t.subject.row == "101");
    assert_eq!(
        ungrothendieck(&broken).unwrap_err(),
        Error::MissingTriple {
            node: "Employee/101".into(),
            arrow: "Mgr".into()
        }
    );
}

#[test]
fn employee_document_prints_canonically() {
    let doc = golden_doc("employee.cat");
    let once = dsl::print(&doc);
    let again = dsl::parse(&once).unwrap();
    assert_eq!(again, doc);
    assert_eq!(dsl::print(&again), once);
}

#[test]
fn self_email_paths() {
    let doc = golden_doc("self_email.cat");
    let i = instance_of(&doc, "I");
    assert!(validate_instance(&i).is_valid());
    let p = i.schema().path("A", &["f", "g"]).unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!(evaluate_path(&i, &p, "SEm1207").unwrap(), "Carl");
}

#[test]
fn pullback_splits_columns() {
    let doc = golden_doc("two_facts.cat");
    let f = translation_of(&doc, "F");
    let j = instance_of(&doc, "J");
    let out = delta(&f, &j).unwrap();
    assert_eq!(row_ids(&out, "T1"), ["XF667", "XF891", "XF221"]);
    assert_eq!(row_ids(&out, "T2"), ["XF667", "XF891", "XF221"]);
    assert_eq!(cell(&out, "T1", "XF667", "T1_SSN"), "115-234");
    assert_eq!(cell(&out, "T1", "XF667", "T1_First"), "Bob");
    assert_eq!(cell(&out, "T1", "XF667", "T1_Last"), "Smith");
    let expected = instance_of(&doc, "PullbackFacts");
    assert!(isomorphic_fixing(&out, &expected, fixed_except(&out, &["T1", "T2"])));
    assert!(validate_instance(&out).is_valid());
}

#[test]
fn right_pushforward_is_the_join() {
    let doc = golden_doc("two_facts.cat");
    let f = translation_of(&doc, "F");
    let i = instance_of(&doc, "I");
    let out = pi(&f, &i, &Bounds::default()).unwrap().instance;
    let rows: Vec<Vec<String>> = table(&out, "T")
        .into_iter()
        .map(|(_, cells)| cells.into_iter().map(|(_, v)| v).collect())
        .collect();
    assert_eq!(
        rows,
        [
            ["122-988", "Sue", "Smith", "$300"],
            ["198-877", "Alice", "Jones", "$100"]
        ]
    );
    assert_eq!(row_ids(&out, "T"), ["T1=T1-002;T2=T2-A104", "T1=T1-003;T2=T2-A101"]);
    for leaf in ["SSN", "First", "Last", "Salary"] {
        assert_eq!(row_ids(&out, leaf), row_ids(&i, leaf));
    }
    assert!(validate_instance(&out).is_valid());
}

#[test]
fn left_pushforward_is_the_union_with_skolems() {
    let doc = golden_doc("two_facts.cat");
    let f = translation_of(&doc, "F");
    let i = instance_of(&doc, "I");
    let out = sigma(&f, &i, &Bounds::default()).unwrap().instance;
    let expected = [
        ("T1-001", ["115-234", "Bob", "Smith", "T1-001.Salary"]),
        ("T1-002", ["122-988", "Sue", "Smith", "T1-002.Salary"]),
        ("T1-003", ["198-877", "Alice", "Jones", "T1-003.Salary"]),
        ("T2-A101", ["T2-A101.SSN", "Alice", "Jones", "$100"]),
        ("T2-A102", ["T2-A102.SSN", "Sam", "Miller", "$150"]),
        ("T2-A104", ["T2-A104.SSN", "Sue", "Smith", "$300"]),
        ("T2-A110", ["T2-A110.SSN", "Carl", "Pratt", "$200"]),
    ];
    let got = table(&out, "T");
    assert_eq!(got.len(), 7);
    for ((id, cells), (want_id, want)) in got.iter().zip(expected) {
        assert_eq!(id, want_id);
        let values: Vec<&str> = cells.iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(values, want);
    }
    assert_eq!(row_ids(&out, "Salary").len(), 5 + 3);
    assert_eq!(row_ids(&out, "SSN").len(), 5 + 4);
    assert!(validate_instance(&out).is_valid());
}

#[test]
fn equivalence_round_trips() {
    let doc = golden_doc("equivalence.cat");
    let f = translation_of(&doc, "F");
    let j = instance_of(&doc, "J");
    let k = instance_of(&doc, "K");
    let b = Bounds::default();
    assert!(check_translation(&f, &b.rewrite).is_valid());

    let dj = delta(&f, &j).unwrap();
    assert!(isomorphic_fixing(&dj, &k, fixed_except(&dj, &["T1", "T2"])));
    assert_eq!(cell(&dj, "T1", "XF667", "i12"), "XF667");
    assert_eq!(cell(&dj, "T2", "XF667", "i21"), "XF667");

    let sdj = sigma(&f, &dj, &b).unwrap().instance;
    assert!(isomorphic_fixing(&sdj, &j, fixed_except(&sdj, &["T"])));
    let sk = sigma(&f, &k, &b).unwrap().instance;
    assert_eq!(sk.row_count(sk.schema().vertex("T").unwrap()), 3);
    let dsk = delta(&f, &sk).unwrap();
    assert!(isomorphic_fixing(&dsk, &k, fixed_except(&dsk, &["T1", "T2"])));
}

#[test]
fn translation_equality_up_to_equations() {
    let doc = golden_doc("equivalence.cat");
    let env = doc.env();
    let extra = dsl::parse_with(
        "schema Loop { nodes X; arrows a : X -> X; }
         translation Round : Loop -> C { nodes X -> T1; arrows a -> i12.i21; }
         translation Stay : Loop -> C { nodes X -> T1; arrows a -> id; }
         translation Other : Loop -> C { nodes X -> T2; arrows a -> id; }",
        &env,
    )
    .unwrap();
    let budget = RewriteBudget::default();
    let round = translation_of(&extra, "Round");
    let stay = translation_of(&extra, "Stay");
    let other = translation_of(&extra, "Other");
    assert_eq!(translations_equal(&round, &stay, &budget).unwrap(), TranslationEquality::Equal);
    assert_eq!(translations_equal(&stay, &other, &budget).unwrap(), TranslationEquality::Different);
}

#[test]
fn times_fifty_typing() {
    let doc = golden_doc("times50.cat");
    let b = Bounds::default();
    let t = typed_of(&doc, "Contracts");
    assert!(validate_typed(&t).is_valid());

    let aux = TypingAuxiliary {
        values: (*instance_of(&doc, "Values")).clone(),
        attachment: (*translation_of(&doc, "G")).clone(),
    };
    let implied = implied_typing_instance(&aux, &b).unwrap();
    assert!(isomorphic(&implied, &instance_of(&doc, "P")));

    let j = t.instance();
    let s = j.schema();
    let (x, z) = (s.vertex("X").unwrap(), s.vertex("Z").unwrap());
    let mutated = j
        .with_cell(s.arrow("d").unwrap(), j.row_index(x, "CtrX13").unwrap(), j.row_index(z, "$201").unwrap())
        .unwrap();
    let typing = InstanceMorphism::from_components(
        Arc::new(mutated),
        t.over().clone(),
        t.typing().components().to_vec(),
    )
    .unwrap();
    let report = validate_typed(&TypedInstance::new(typing));
    assert_eq!(report.failures.len(), 1);
    assert_eq!((report.failures[0].row.as_str(), report.failures[0].arrow.as_str()), ("CtrX13", "d"));
}

#[test]
fn threshold_retyping() {
    let doc = golden_doc("times50.cat");
    let t = typed_of(&doc, "Contracts");
    let k = morphism_of(&doc, "threshold");
    let out = typechange_sigma(&k, &t).unwrap();
    assert_eq!(out.instance(), t.instance());
    assert!(validate_typed(&out).is_valid());
    let q = out.over();
    let s = q.schema();
    let x = s.vertex("X").unwrap();
    let rows: Vec<(String, String, String)> = (0..out.instance().row_count(x))
        .map(|r| {
            let ty = q.row_id(x, out.type_of(x, r)).to_string();
            (
                out.instance().row_id(x, r).to_string(),
                cell(q, "X", &ty, "t"),
                cell(q, "X", &ty, "d"),
            )
        })
        .collect();
    let want = [("CtrX13", "4", "True"), ("CtrX14", "7", "True"), ("CtrX15", "2", "False")];
    assert_eq!(
        rows,
        want.map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
    );
}

#[test]
fn salary_filter() {
    let doc = golden_doc("filtering.cat");
    let b = Bounds::default();
    let g = translation_of(&doc, "G");
    let p = instance_of(&doc, "P");
    let q = instance_of(&doc, "Q");
    assert!(isomorphic(&pi(&g, &instance_of(&doc, "Below100"), &b).unwrap().instance, &p));
    assert!(isomorphic(&pi(&g, &instance_of(&doc, "Dollar"), &b).unwrap().instance, &q));

    let k = morphism_of(&doc, "k");
    let out = typechange_delta(&k, &typed_of(&doc, "Staff")).unwrap();
    assert!(validate_typed(&out).is_valid());
    let names: Vec<String> = table(out.instance(), "Employee")
        .into_iter()
        .map(|(id, cells)| format!("{id} {} {}", cells[0].1, cells[1].1))
        .collect();
    assert_eq!(names, ["Em101 Smith $65", "Em104 Lee $90", "Em105 Carlsson $80"]);
}

#[test]
fn group_satisfaction() {
    let doc = golden_doc("satisfaction.cat");
    let b = Bounds::default();
    let g = translation_of(&doc, "G");
    assert!(isomorphic(&pi(&g, &instance_of(&doc, "People"), &b).unwrap().instance, &instance_of(&doc, "P")));
    assert!(isomorphic(&pi(&g, &instance_of(&doc, "Groups"), &b).unwrap().instance, &instance_of(&doc, "Q")));

    let k = morphism_of(&doc, "k");
    let out = typechange_pi(&k, &typed_of(&doc, "Items"), &b).unwrap();
    assert!(validate_typed(&out).is_valid());
    let l = out.instance().schema().vertex("L").unwrap();
    let mut got: Vec<(String, String)> = (0..out.instance().row_count(l))
        .map(|r| {
            let id = out.instance().row_id(l, r);
            let items: Vec<&str> = id
                .trim_matches(|c| c == '(' || c == ')')
                .split(',')
                .map(|part| part.split_once('=').unwrap().1)
                .collect();
            (format!("({})", items.join(",")), out.over().row_id(l, out.type_of(l, r)).to_string())
        })
        .collect();
    got.sort();
    let want = [
        ("(a,b)", "x"),
        ("(a,e)", "x"),
        ("(a,g)", "x"),
        ("(c,b)", "x"),
        ("(c,e)", "x"),
        ("(c,g)", "x"),
        ("(d,f)", "y"),
    ];
    assert_eq!(got, want.map(|(a, b)| (a.to_string(), b.to_string())));
}
