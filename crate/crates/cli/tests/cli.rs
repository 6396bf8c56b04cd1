mod common;

use common::{data_dir, loopcas, run_manifest};

fn stdout(args: &[&str]) -> (i32, String, String) {
    let out = loopcas(args);
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_manifest(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("m.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn residue_of_dt_over_t_prints_one() {
    let m = data_dir().join("residue_dt_over_t.toml");
    let (code, out, _) = stdout(&["residue", m.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("result: 1\n"), "{out}");
}

#[test]
fn automorphism_check_passes() {
    let m = data_dir().join("automorphism_db1db2.toml");
    let (code, report, _) = run_manifest(&m, &[]);
    assert_eq!(code, 0);
    assert!(report.contains("\"fail\": 0,"));
}

#[test]
fn non_invariant_candidate_exits_one_with_witness() {
    let m = data_dir().join("factorization_non_invariant.toml");
    let (code, report, out) = run_manifest(&m, &[]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL offdiag.J2"), "{out}");
    assert!(report.contains("\"witness\""));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let m = data_dir().join("factorization_b1db2.toml");
    let (_, first, _) = run_manifest(&m, &["--seed", "11"]);
    let (_, second, _) = run_manifest(&m, &["--seed", "11", "--jobs", "1"]);
    assert_eq!(first, second);
    assert!(first.contains("\"seed\": 11,"));
    let (_, other, _) = run_manifest(&m, &["--seed", "12"]);
    assert_ne!(first, other);
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("dimension = 2\ntruncation = { M = 1, L = 1, epsilon = 2 }\ncolour = 1\n", "unknown field"),
        ("dimension = \n", "syntax"),
        (
            "dimension = 1\ntruncation = { M = 1, L = 1, epsilon = 2 }\n[[form]]\ncoefficient = \"1/0\"\ndifferentials = [\"b[1]\"]\n",
            "invalid rational",
        ),
        (
            "dimension = 1\ntruncation = { M = 1, L = 1, epsilon = 2 }\n[[form]]\ncoefficient = \"1\"\nmonomial = [\"b[1,0,0,0]\"]\ndifferentials = [\"b[1]\"]\n",
            "invalid variable token",
        ),
    ];
    for (text, expected) in cases {
        let path = write_manifest(&dir, text);
        let (code, _, err) = stdout(&["transgress", &path]);
        assert_eq!(code, 2, "{text}");
        assert!(err.contains(expected), "{err}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(stdout(&["frobnicate"]).0, 2);
    assert_eq!(stdout(&["transgress", "/nonexistent/manifest.toml"]).0, 2);
    let m = data_dir().join("residue_dt_over_t.toml");
    assert_eq!(stdout(&["transgress", m.to_str().unwrap()]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let open = write_manifest(
        &dir,
        "dimension = 3\ntruncation = { M = 1, L = 1, epsilon = 2 }\n[[form]]\ncoefficient = \"1\"\nmonomial = [\"b[3]\"]\ndifferentials = [\"b[1]\", \"b[2]\"]\n",
    );
    let (code, _, err) = stdout(&["dinv", &open]);
    assert_eq!(code, 2);
    assert!(err.contains("not closed"), "{err}");
}
