use trianguline_cli::job::{parse_job, serialize, JobError};
use trianguline_cli::{corpus, explain, run_job, Status};

#[test]
fn corpus_round_trips() {
    for (name, text) in corpus::CORPUS {
        let doc = parse_job(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = parse_job(&serialize(&doc)).unwrap();
        assert_eq!(doc, again, "{name}");
    }
}

#[test]
fn unknown_module_is_a_validation_error() {
    let text = "p = 3\nquery s sen {\n    module = nope\n}\n";
    match parse_job(text) {
        Err(JobError::Validation(d)) => assert!(d.iter().any(|x| x.message.contains("unknown module 'nope'"))),
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_errors_are_located() {
    let err = parse_job("p = 3\nmodule m {\n    rank1 1 0\n").unwrap_err();
    assert!(matches!(err, JobError::Parse(_)));
    assert_eq!(err.diagnostics()[0].line, 2);
}

#[test]
fn eigencurve_pattern() {
    let doc = parse_job(corpus::get("eigencurve").unwrap()).unwrap();
    let rep = run_job(&doc);
    assert_eq!(rep.errors(), 0);
    let crit = rep.query("critical").unwrap();
    assert_eq!(crit.status, Status::Certified);
    assert_eq!(crit.get("t_order"), Some("2"));
    assert_eq!(crit.get("saturated"), Some("false"));
    let non = rep.query("noncritical").unwrap();
    assert_eq!(non.get("saturated"), Some("true"));
    assert_eq!(rep.query("family").unwrap().get("is_chain"), Some("false"));
    assert_eq!(rep.query("triangulation").unwrap().get("parameters"), Some("[(1, 0), (5/9, -2)]"));
}

#[test]
fn locus_table_has_a_row_per_point() {
    let doc = parse_job(corpus::get("locus").unwrap()).unwrap();
    let rep = run_job(&doc);
    let t = rep.query("scan").unwrap().table.as_ref().unwrap();
    assert_eq!(t.rows.len(), 5);
    let critical = t.rows.iter().find(|r| r[0] == "critical").unwrap();
    assert_eq!(critical[4], "false");
    assert!(rep.render().contains("# table scan\npoint\tcutoff"));
}

#[test]
fn frobenius_jobs() {
    let rep = run_job(&parse_job(corpus::get("frobenius").unwrap()).unwrap());
    assert_eq!(rep.query("constant").unwrap().get("solution_head"), Some("[(0, 3)]"));
    assert_eq!(rep.query("obstructed").unwrap().get("solvable"), Some("false"));
    assert_eq!(rep.query("mixed").unwrap().status, Status::Certified);
}

#[test]
fn explain_covers_every_query_kind() {
    for a in ["solve", "sen", "period", "finite_slope", "chain", "triangulate", "locus"] {
        assert!(explain::lookup(a).is_some(), "{a}");
    }
}

mod roundtrip {
    use proptest::prelude::*;
    use trianguline_cli::job::{parse_job, serialize};

    fn job(p: u32, n: i64, extra: i64, chars: &[(i64, i64, i64)], k: Option<u8>, digits: u8) -> String {
        let mut s = format!("p = {p}\nN = {n}\nprecision = {}\n", (n + extra).max(8));
        s.push_str(&format!("output {{\n    digits = {digits}\n}}\nmodule m {{\n"));
        for (a, b, w) in chars {
            s.push_str(&format!("    rank1 {a}/{b} {w}\n"));
        }
        s.push_str("}\nquery q sen {\n    module = m\n");
        if let Some(k) = k {
            s.push_str(&format!("    k = {k}\n"));
        }
        s.push_str("}\n");
        s
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn serialize_then_parse_is_identity(
            p in prop::sample::select(vec![3u32, 5, 7]),
            n in 4i64..20,
            // precision must exceed N by 4 and be at least 8
            extra in 4i64..14,
            chars in prop::collection::vec((-50i64..50, 1i64..30, -6i64..6), 1..=3),
            k in prop::option::of(1u8..8),
            digits in 1u8..12,
        ) {
            let text = job(p, n, extra, &chars, k, digits);
            let doc = parse_job(&text).unwrap();
            let out = serialize(&doc);
            prop_assert_eq!(parse_job(&out).unwrap(), doc);
            prop_assert_eq!(serialize(&parse_job(&out).unwrap()), out);
        }
    }
}
