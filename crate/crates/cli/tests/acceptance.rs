//! Acceptance gate: runs the ten acceptance criteria and prints one line per
//! criterion. Exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{data_dir, golden_path, manifests, run_manifest};
use loopcas_core::suites::{self, SuiteOptions, SUITES};

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite(n: usize) -> Outcome {
    match suites::numbered(n, SuiteOptions::default()) {
        Ok(report) => Outcome {
            passed: report.passed(),
            detail: match report.failures().next() {
                Some(r) => format!("{}; first failure {} [{}]", report.summary(), r.id, r.witness.clone().unwrap_or_default()),
                None => report.summary(),
            },
        },
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// The candidate is rejected in the library and by the command line with exit code 1.
fn negative_control() -> Outcome {
    let core = suite(9);
    let mut problems = Vec::new();
    if !core.passed {
        problems.push(core.detail.clone());
    }
    for (name, needle) in [
        ("factorization_non_invariant.toml", "FAIL offdiag"),
        ("invariance_negative_mode.toml", "FAIL infinitesimal.m1"),
    ] {
        let (code, report, stdout) = run_manifest(&data_dir().join(name), &[]);
        if code != 1 || !stdout.contains(needle) || !report.contains("\"witness\"") {
            problems.push(format!("{name}: exit {code}"));
        }
    }
    Outcome {
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{}; command line exits 1 with witnesses", core.detail)
        } else {
            problems.join("; ")
        },
    }
}

/// Repeated runs give byte-identical reports that match the stored goldens.
fn determinism() -> Outcome {
    let mut problems = Vec::new();
    let all = manifests();
    for manifest in &all {
        let (_, first, _) = run_manifest(manifest, &[]);
        let (_, second, _) = run_manifest(manifest, &["--jobs", "1"]);
        let golden = std::fs::read_to_string(golden_path(manifest)).unwrap_or_default();
        if first != second || first != golden {
            problems.push(manifest.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    Outcome {
        passed: problems.is_empty() && !all.is_empty(),
        detail: if problems.is_empty() {
            format!("{} manifests reproduce their goldens byte for byte", all.len())
        } else {
            format!("differing: {problems:?}")
        },
    }
}

fn main() {
    let titles: Vec<&str> = SUITES[..8]
        .iter()
        .copied()
        .chain(["negative control", "determinism and goldens"])
        .collect();
    let mut all_passed = true;
    let mut total = Duration::ZERO;
    for (idx, title) in titles.iter().enumerate() {
        let n = idx + 1;
        let started = Instant::now();
        let outcome = match n {
            9 => negative_control(),
            10 => determinism(),
            _ => suite(n),
        };
        let elapsed = started.elapsed();
        total += elapsed;
        all_passed &= outcome.passed;
        println!(
            "criterion {n:>2} {} {title}: {} ({:.1} s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} in {:.1} s", if all_passed { "PASS" } else { "FAIL" }, total.as_secs_f64());
    if !all_passed {
        std::process::exit(1);
    }
}
