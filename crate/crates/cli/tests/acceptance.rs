//! One PASS/FAIL line per acceptance criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use trianguline_cli::corpus::CORPUS;
use trianguline_cli::suites::{self, DEFAULT_SEED, N, TOL};
use trianguline_cli::{parse_job, run_job, SuiteReport};

/// Wall-clock budget per suite.
const SUITE_BUDGET: Duration = Duration::from_secs(60);

fn line(id: usize, ok: bool, detail: &str) -> bool {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn corpus_reports(threads: usize) -> Vec<String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| CORPUS.iter().map(|(_, text)| run_job(&parse_job(text).unwrap()).render()).collect())
}

fn binary_report(name: &str, threads: usize) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_trianguline"))
        .args(["--jobs", &threads.to_string(), "run", &format!("corpus:{name}")])
        .output()
        .expect("run binary");
    assert!(out.status.success(), "{name}: exit {:?}", out.status);
    out.stdout
}

#[test]
fn acceptance() {
    assert_eq!(N, 12);
    assert_eq!(TOL, 10);
    println!("tolerances: N = {N}, residual floor N - 2 = {TOL}, suite budget {}s", SUITE_BUDGET.as_secs());

    let mut reports: Vec<(SuiteReport, Duration)> = Vec::new();
    for id in 1..=7u8 {
        let start = Instant::now();
        let r = suites::run_suite(id, DEFAULT_SEED);
        reports.push((r, start.elapsed()));
    }
    let mut all = true;
    for (r, took) in &reports {
        let ok = r.passed() && *took <= SUITE_BUDGET;
        let detail = format!("{} checks={} failures={} time={:.1}s", r.name, r.checks, r.failures.len(), took.as_secs_f64());
        for f in r.failures.iter().take(10) {
            println!("    {f}");
        }
        all &= line(r.id as usize, ok, &detail);
    }

    let first = corpus_reports(1);
    let runs = [corpus_reports(1), corpus_reports(8), corpus_reports(8)];
    let library_same = runs.iter().all(|r| *r == first);
    let binary_same = CORPUS.iter().all(|(name, _)| {
        let one = binary_report(name, 1);
        one == binary_report(name, 8) && one == first_for(&first, name).as_bytes()
    });
    let selftest_clean = reports.iter().all(|(r, _)| r.passed());
    let ok8 = library_same && binary_same && selftest_clean;
    all &= line(
        8,
        ok8,
        &format!(
            "corpus={} jobs identical(library)={library_same} identical(binary)={binary_same} selftest_failures={}",
            CORPUS.len(),
            reports.iter().map(|(r, _)| r.failures.len()).sum::<usize>()
        ),
    );
    assert!(all, "acceptance criteria failed");
}

fn first_for<'a>(first: &'a [String], name: &str) -> &'a str {
    let i = CORPUS.iter().position(|(n, _)| *n == name).unwrap();
    &first[i]
}
