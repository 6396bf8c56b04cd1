//! Every manifest under tests/data has a golden machine report. Set
//! `UPDATE_GOLDEN=1` to rewrite them.

mod common;

use common::{golden_path, manifests, run_manifest};

#[test]
fn reports_match_goldens() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for manifest in manifests() {
        let (code, report, stdout) = run_manifest(&manifest, &[]);
        assert!(code == 0 || code == 1, "{}: exit {code}\n{stdout}", manifest.display());
        let failed = !report.contains("\"fail\": 0,");
        assert_eq!(code, i32::from(failed), "{}: exit code disagrees with the report", manifest.display());
        let golden = golden_path(&manifest);
        if update {
            std::fs::write(&golden, &report).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&golden)
            .unwrap_or_else(|_| panic!("missing golden {}", golden.display()));
        if expected != report {
            mismatches.push(manifest.display().to_string());
        }
    }
    assert!(mismatches.is_empty(), "reports differ from goldens: {mismatches:?}");
}

#[test]
fn every_golden_has_a_manifest() {
    let dir = common::data_dir();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if let Some(stem) = name.strip_suffix(".golden.json") {
            assert!(dir.join(format!("{stem}.toml")).exists(), "orphan golden {name}");
        }
    }
}

fn result_of(name: &str) -> String {
    let text = std::fs::read_to_string(common::data_dir().join(format!("{name}.golden.json"))).unwrap();
    text.lines()
        .find_map(|l| l.trim().strip_prefix("\"result\": \"").and_then(|r| r.strip_suffix("\",")))
        .unwrap_or_else(|| panic!("{name} has no result"))
        .to_string()
}

fn pairing(r: i64) -> loopcas_core::Polynomial {
    use loopcas_core::{exactpoly::int, Polynomial, Variable};
    let mut out = Polynomial::zero();
    for n in -r..=r {
        let term = &Polynomial::var(Variable::b(1, -n)) * &Polynomial::var(Variable::b(2, n));
        out.add_assign_ref(&term.scale(&int(n)));
    }
    out
}

#[test]
fn golden_results_match_hand_values() {
    use loopcas_core::{exactpoly::rat, Polynomial, TruncationContext};
    assert_eq!(result_of("transgress_exact_db1"), "0");
    assert_eq!(result_of("transgress_b1db1"), "0");
    assert_eq!(result_of("transgress_b1db2"), pairing(2).to_string());
    assert_eq!(result_of("residue_dt_over_t"), "1");
    assert_eq!(result_of("residue_pairing"), pairing(2).to_string());
    assert_eq!(result_of("residue_two_slots"), "(-1*aux[2])*daux[1] + (-1*aux[1])*daux[2]");
    assert_eq!(result_of("dinv_db1db2"), pairing(2).to_string());
    assert_eq!(result_of("dinv_zero"), "0");
    assert_eq!(result_of("dinv_exact_b1b2db2"), result_of("transgress_b1b2db2"));
    assert_eq!(result_of("action_zero"), "1");
    let ctx = TruncationContext::new(2, 1, 1, 3);
    let f = pairing(1);
    let mut s = &Polynomial::one() + &f;
    s.add_assign_ref(&f.mul(&f, &ctx).scale(&rat(1, 2)));
    assert_eq!(result_of("action_db1db2"), s.to_string());
    assert_eq!(result_of("invariance_transgression"), pairing(2).to_string());
}
