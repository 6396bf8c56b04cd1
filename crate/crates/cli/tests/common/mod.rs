#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Output;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn manifests() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(data_dir())
        .expect("data directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    out.sort();
    out
}

/// The `job = "..."` line of a manifest.
pub fn job_of(manifest: &Path) -> String {
    let text = std::fs::read_to_string(manifest).expect("manifest");
    text.lines()
        .find_map(|l| l.strip_prefix("job = \"").and_then(|r| r.strip_suffix('"')))
        .expect("job line")
        .to_string()
}

pub fn loopcas(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_loopcas"))
        .args(args)
        .output()
        .expect("run loopcas")
}

/// Runs the manifest's job and returns (exit code, machine report, stdout).
pub fn run_manifest(manifest: &Path, extra: &[&str]) -> (i32, String, String) {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("report.json");
    let job = job_of(manifest);
    let mut args = vec![job.as_str(), manifest.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = loopcas(&args);
    let report = std::fs::read_to_string(&out).unwrap_or_default();
    (
        output.status.code().unwrap_or(-1),
        report,
        String::from_utf8_lossy(&output.stdout).into_owned(),
    )
}

pub fn golden_path(manifest: &Path) -> PathBuf {
    manifest.with_extension("golden.json")
}
