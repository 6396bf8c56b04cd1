//! Job execution and report rendering.

use loopcas_core::derham::{DifferentialForm, Universe};
use loopcas_core::factorization::{verify_factorizing, FactorOptions};
use loopcas_core::gen;
use loopcas_core::heisenberg::verify_234_with;
use loopcas_core::laurent::LaurentSeries;
use loopcas_core::par::Execution;
use loopcas_core::suites::{self, SuiteOptions};
use loopcas_core::transgression::{
    action_exp, check_reparam_invariance, residue_p, tau_dinv, transgress, transgress_function, CoordChange,
};
use loopcas_core::{Polynomial, Report, Status};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::manifest::{Job, Manifest, ManifestError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] loopcas_core::Error),
}

pub struct Outcome {
    pub result: Option<String>,
    pub report: Report,
}

#[derive(Serialize)]
struct Summary {
    pass: usize,
    fail: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct MachineReport<'a> {
    tool: &'static str,
    version: &'static str,
    job: &'static str,
    manifest_digest: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a str>,
    summary: Summary,
    records: &'a [loopcas_core::Record],
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The machine report: pretty JSON with a trailing newline.
pub fn machine_report(job: Job, manifest_bytes: &[u8], seed: u64, outcome: &Outcome) -> String {
    let report = &outcome.report;
    let machine = MachineReport {
        tool: "loopcas",
        version: VERSION,
        job: job.name(),
        manifest_digest: digest(manifest_bytes),
        seed,
        result: outcome.result.as_deref(),
        summary: Summary {
            pass: report.count(Status::Pass),
            fail: report.count(Status::Fail),
            skipped: report.count(Status::Skipped),
        },
        records: &report.records,
    };
    let mut text = serde_json::to_string_pretty(&machine).expect("report serializes");
    text.push('\n');
    text
}

pub fn human_report(job: Job, outcome: &Outcome) -> String {
    let mut text = format!("loopcas {VERSION} {}\n", job.name());
    if let Some(result) = &outcome.result {
        text.push_str(&format!("result: {result}\n"));
    }
    text.push_str(&outcome.report.to_string());
    text.push('\n');
    text
}

fn need_form(m: &Manifest, degree: usize) -> Result<&loopcas_core::transgression::XForm, RunError> {
    match &m.form {
        Some(f) if f.degree() == degree => Ok(f),
        Some(f) => Err(RunError::Usage(format!("job needs a {degree}-form, manifest has degree {}", f.degree()))),
        None => Err(RunError::Usage(format!("job needs a {degree}-form in [[form]]"))),
    }
}

fn witness(f: &DifferentialForm) -> Option<String> {
    f.first_term()
}

fn residue_commutes_with_d(input: &[(LaurentSeries, Vec<LaurentSeries>)], m: &Manifest) -> Result<Option<String>, RunError> {
    let lifted: Vec<_> = input
        .iter()
        .map(|(a0, slots)| {
            let mut s = vec![a0.clone()];
            s.extend(slots.iter().cloned());
            (LaurentSeries::constant(Polynomial::one()), s)
        })
        .collect();
    let lhs = residue_p(&lifted, &m.ctx)?;
    let rhs = residue_p(input, &m.ctx)?.d(&m.ctx);
    Ok(witness(&lhs.sub(&rhs)))
}

pub fn execute(job: Job, m: &Manifest, exec: Execution) -> Result<Outcome, RunError> {
    let ctx = &m.ctx;
    let mut report = Report::new();
    let result = match job {
        Job::Transgress => {
            let form = m.form.as_ref().ok_or_else(|| RunError::Usage("transgress needs [[form]]".into()))?;
            let tau = transgress(form, ctx)?;
            report.check(
                "relative",
                "the transgression vanishes on arcs",
                (!tau.is_relative()).then(|| tau.to_string()),
            );
            Some(tau.to_string())
        }
        Job::Dinv => {
            let omega = need_form(m, 2)?;
            let f = tau_dinv(omega, ctx)?.poly;
            let df = DifferentialForm::function(f.clone(), Universe::Loop).d(ctx);
            report.check(
                "primitive",
                "d of the symplectic action is the transgression",
                witness(&df.sub(&transgress(omega, ctx)?)),
            );
            Some(f.to_string())
        }
        Job::Action => {
            let omega = need_form(m, 2)?;
            let s = action_exp(omega, ctx)?.poly;
            let inverse = action_exp(&omega.neg(), ctx)?.poly;
            let product = s.mul(&inverse, ctx);
            report.check(
                "inverse",
                "S(w) S(-w) = 1",
                (!product.is_one()).then(|| product.to_string()),
            );
            Some(s.to_string())
        }
        Job::Residue => {
            if m.residue.is_empty() {
                return Err(RunError::Usage("residue needs [[residue]] terms".into()));
            }
            let res = residue_p(&m.residue, ctx)?;
            report.check("d", "the residue commutes with d", residue_commutes_with_d(&m.residue, m)?);
            Some(res.to_string())
        }
        Job::VerifyInvariance => {
            let f = match (&m.candidate, &m.form) {
                (Some(f), _) => f.clone(),
                (None, Some(_)) => transgress_function(need_form(m, 1)?, ctx)?,
                (None, None) => return Err(RunError::Usage("verify-invariance needs [[candidate]] or [[form]]".into())),
            };
            let mut rng = gen::rng(m.seed);
            let samples = (0..m.samples)
                .map(|_| CoordChange::new(gen::coord_change(&mut rng, 3)))
                .collect::<Result<Vec<_>, _>>()?;
            report = check_reparam_invariance(&f, m.m_max, &samples, ctx);
            Some(f.to_string())
        }
        Job::VerifyAutomorphism => {
            let omega = need_form(m, 2)?;
            report = verify_234_with(omega, ctx.weight_bound as i64, ctx, exec)?;
            None
        }
        Job::VerifyFactorization => {
            let eta = need_form(m, 1)?;
            let opts = FactorOptions {
                samples: m.samples,
                j_max: m.points,
                seed: m.seed,
                exec,
            };
            report = verify_factorizing(eta, m.candidate.as_ref(), ctx, &opts)?;
            None
        }
        Job::Selftest => {
            report = suites::selftest(SuiteOptions { seed: m.seed, exec })?;
            None
        }
    };
    Ok(Outcome { result, report })
}
