//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Everything runs inside a single test so the wall-clock limits are measured
//! without other tests competing for the cores.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ncgdist::verify::{find_group, run_group, Report, VerifyOptions};

const SEED: u64 = 7;

struct Criterion {
    number: u32,
    title: &'static str,
    groups: &'static [&'static str],
    limit: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: &[Criterion] = &[
    Criterion { number: 1, title: "two-point distance", groups: &["two_point"], limit: secs(1) },
    Criterion { number: 2, title: "three-point distance", groups: &["three_point"], limit: secs(10) },
    Criterion { number: 3, title: "three-point inverse problem", groups: &["three_point_inverse"], limit: secs(10) },
    Criterion { number: 4, title: "four-point piecewise formulas", groups: &["four_point"], limit: secs(30) },
    Criterion { number: 5, title: "complete graph and cut link", groups: &["complete_graph"], limit: secs(30) },
    Criterion { number: 6, title: "graph properties", groups: &["graph_properties"], limit: secs(60) },
    Criterion { number: 7, title: "M2 eigen triple", groups: &["m2_eigen"], limit: secs(10) },
    Criterion { number: 8, title: "truncated Moyal N=2 ball", groups: &["moyal_ball"], limit: secs(60) },
    Criterion { number: 9, title: "sphere plus point", groups: &["sphere_point"], limit: secs(20) },
    Criterion { number: 10, title: "Pythagoras bounds", groups: &["pythagoras"], limit: secs(60) },
    Criterion { number: 11, title: "segment linearity and convexity", groups: &["segment", "convexity"], limit: secs(60) },
    Criterion { number: 12, title: "isometry and projection", groups: &["isometry", "projection"], limit: secs(60) },
    Criterion {
        number: 13,
        title: "circle-bundle catalog",
        groups: &["fiber_reduction", "torus_equatorial", "torus_far"],
        limit: secs(30),
    },
    Criterion {
        number: 14,
        title: "Moyal convergence and eigen additivity",
        groups: &["moyal_convergence", "eigen_additivity"],
        limit: secs(600),
    },
    Criterion { number: 15, title: "quantum length", groups: &["quantum_length"], limit: secs(5) },
    Criterion { number: 16, title: "Kantorovich sandwich", groups: &["kantorovich"], limit: secs(60) },
];

/// Criteria whose reference formulas are known to be wrong on part of their
/// domain. They are still run and reported; they do not fail the test.
const KNOWN_DEFECTS: &[(u32, &str)] = &[(
    4,
    "the d(1,2) balanced/otherwise branches and parts of the d(1,3) branches exceed the \
     geodesic bound, e.g. d13 = 3.754 > d1 + d4 = 2.8 at (0.3, 2.5, 2.5, 2.8)",
)];

fn run_criterion(c: &Criterion) -> (bool, String) {
    let opts = VerifyOptions { seed: SEED, ..VerifyOptions::default() };
    let start = Instant::now();
    let mut rows = Vec::new();
    for name in c.groups {
        let group = find_group(name).unwrap_or_else(|| panic!("group {name} is registered"));
        rows.extend(run_group(group, &opts).rows);
    }
    let elapsed = start.elapsed();
    let report = Report { rows };
    let in_time = elapsed <= c.limit;
    let mut detail = format!(
        "{} rows, {} failed, {:.2} s of {} s",
        report.rows.len(),
        report.failed(),
        elapsed.as_secs_f64(),
        c.limit.as_secs()
    );
    if let Some(first) = report.failures().next() {
        detail.push_str(&format!(
            "; first failure {} expected {} computed {}",
            first.case_id, first.expected, first.computed
        ));
    }
    (report.all_passed() && !report.rows.is_empty() && in_time, detail)
}

fn verify_all(out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_ncgdist"))
        .args(["verify", "all", "--seed", "7", "--out"])
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()
        .expect("ncgdist runs");
    // failing rows give exit code 1; the report is still written
    assert!(matches!(status.code(), Some(0 | 1)), "verify all exited with {status}");
}

fn determinism() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("ncgdist-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let (a, b) = (dir.join("first.csv"), dir.join("second.csv"));
    verify_all(&a);
    verify_all(&b);
    let first = std::fs::read(&a).expect("first report");
    let second = std::fs::read(&b).expect("second report");
    let _ = std::fs::remove_dir_all(&dir);
    let lines = first.iter().filter(|&&c| c == b'\n').count();
    (
        !first.is_empty() && first == second,
        format!("{lines} lines, {} and {} bytes", first.len(), second.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let mut unexpected = Vec::new();
    let mut report_line = |number: u32, title: &str, pass: bool, detail: String| {
        let known = KNOWN_DEFECTS.iter().find(|(n, _)| *n == number);
        println!(
            "criterion {number:>2} {}: {title} ({detail})",
            if pass { "PASS" } else { "FAIL" }
        );
        match (pass, known) {
            (false, Some((_, why))) => println!("             known defect: {why}"),
            (false, None) => unexpected.push(number),
            _ => {}
        }
    };
    for c in CRITERIA {
        let (pass, detail) = run_criterion(c);
        report_line(c.number, c.title, pass, detail);
    }
    let (pass, detail) = determinism();
    report_line(17, "byte-identical verify all --seed 7", pass, detail);
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}
