//! The TOML job manifest: parsing and validation into core values.

use std::str::FromStr;

use loopcas_core::derham::{DifferentialForm, Universe};
use loopcas_core::exactpoly::{parse_variable, Monomial};
use loopcas_core::laurent::{LaurentSeries, Tail};
use loopcas_core::transgression::XForm;
use loopcas_core::{Polynomial, Rational, TruncationContext, Variable};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown field: {0}")]
    UnknownField(String),
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("invalid variable token {0:?}")]
    InvalidVariableToken(String),
    #[error("invalid manifest: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Job {
    Transgress,
    Dinv,
    Action,
    Residue,
    VerifyInvariance,
    VerifyAutomorphism,
    VerifyFactorization,
    Selftest,
}

impl Job {
    pub fn name(self) -> &'static str {
        match self {
            Job::Transgress => "transgress",
            Job::Dinv => "dinv",
            Job::Action => "action",
            Job::Residue => "residue",
            Job::VerifyInvariance => "verify-invariance",
            Job::VerifyAutomorphism => "verify-automorphism",
            Job::VerifyFactorization => "verify-factorization",
            Job::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    dimension: usize,
    job: Option<Job>,
    truncation: RawTruncation,
    seed: Option<u64>,
    samples: Option<usize>,
    m_max: Option<u32>,
    points: Option<usize>,
    #[serde(default)]
    form: Vec<RawTerm>,
    #[serde(default)]
    candidate: Vec<RawTerm>,
    #[serde(default)]
    residue: Vec<RawResidueTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    #[serde(rename = "M")]
    neg: i64,
    #[serde(rename = "L")]
    pos: i64,
    epsilon: u32,
    #[serde(rename = "W", default)]
    weight: u32,
    #[serde(default)]
    b0_cap: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coefficient: String,
    #[serde(default)]
    monomial: Vec<String>,
    #[serde(default)]
    differentials: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeriesTerm {
    power: i64,
    coefficient: String,
    #[serde(default)]
    monomial: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResidueTerm {
    a0: Vec<RawSeriesTerm>,
    slots: Vec<Vec<RawSeriesTerm>>,
}

/// A validated manifest.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub job: Option<Job>,
    pub ctx: TruncationContext,
    pub seed: u64,
    pub samples: usize,
    pub m_max: u32,
    pub points: usize,
    pub form: Option<XForm>,
    pub candidate: Option<Polynomial>,
    pub residue: Vec<(LaurentSeries, Vec<LaurentSeries>)>,
}

pub const DEFAULT_SEED: u64 = 2024;

fn rational(text: &str) -> Result<Rational, ManifestError> {
    Rational::from_str(text.trim()).map_err(|_| ManifestError::InvalidRational(text.to_string()))
}

fn variable(token: &str) -> Result<Variable, ManifestError> {
    parse_variable(token).ok_or_else(|| ManifestError::InvalidVariableToken(token.to_string()))
}

fn monomial(tokens: &[String]) -> Result<Monomial, ManifestError> {
    let factors = tokens.iter().map(|t| variable(t).map(|v| (v, 1))).collect::<Result<Vec<_>, _>>()?;
    Ok(Monomial::from_factors(factors))
}

fn classify(err: toml::de::Error) -> ManifestError {
    let text = err.to_string();
    if text.contains("unknown field") {
        ManifestError::UnknownField(text.trim().to_string())
    } else {
        ManifestError::Syntax(text.trim().to_string())
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let raw: RawManifest = toml::from_str(text).map_err(classify)?;
    if raw.dimension == 0 {
        return Err(ManifestError::Invalid("dimension must be at least 1".into()));
    }
    let t = &raw.truncation;
    if t.neg < 0 || t.pos < 0 || t.epsilon == 0 {
        return Err(ManifestError::Invalid("truncation needs M, L >= 0 and epsilon >= 1".into()));
    }
    let ctx = TruncationContext::new(raw.dimension, t.neg, t.pos, t.epsilon).with_weight(t.weight, t.b0_cap);

    let form = if raw.form.is_empty() {
        None
    } else {
        let degree = raw.form[0].differentials.len();
        let mut out = DifferentialForm::zero(degree, Universe::X);
        for term in &raw.form {
            if term.differentials.len() != degree {
                return Err(ManifestError::Invalid("form terms of different degrees".into()));
            }
            let vars = term.differentials.iter().map(|t| variable(t)).collect::<Result<Vec<_>, _>>()?;
            let coeff = Polynomial::term(rational(&term.coefficient)?, monomial(&term.monomial)?);
            out = out.add(&DifferentialForm::from_term(coeff, vars, Universe::X));
        }
        Some(XForm::new(out).map_err(|e| ManifestError::Invalid(e.to_string()))?)
    };

    let candidate = if raw.candidate.is_empty() {
        None
    } else {
        let mut out = Polynomial::zero();
        for term in &raw.candidate {
            if !term.differentials.is_empty() {
                return Err(ManifestError::Invalid("candidate terms take no differentials".into()));
            }
            let m = monomial(&term.monomial)?;
            if let Some(v) = m.variables().find(|v| !matches!(v, Variable::B { point: 0, .. })) {
                return Err(ManifestError::Invalid(format!("candidate variable {v} is not a loop coordinate")));
            }
            out.add_term(m, rational(&term.coefficient)?);
        }
        Some(out)
    };

    let series = |terms: &[RawSeriesTerm]| -> Result<LaurentSeries, ManifestError> {
        let mut coeffs = std::collections::BTreeMap::<i64, Polynomial>::new();
        for term in terms {
            let c = Polynomial::term(rational(&term.coefficient)?, monomial(&term.monomial)?);
            coeffs.entry(term.power).or_default().add_assign_ref(&c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        let lo = coeffs.keys().next().copied().unwrap_or(0);
        let hi = coeffs.keys().next_back().copied().unwrap_or(0);
        Ok(LaurentSeries::new(coeffs, lo, hi, Tail::Zero))
    };
    let mut residue = Vec::new();
    for term in &raw.residue {
        let slots = term.slots.iter().map(|s| series(s)).collect::<Result<Vec<_>, _>>()?;
        residue.push((series(&term.a0)?, slots));
    }

    Ok(Manifest {
        job: raw.job,
        ctx,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        samples: raw.samples.unwrap_or(5),
        m_max: raw.m_max.unwrap_or(3),
        points: raw.points.unwrap_or(2),
        form,
        candidate,
        residue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
dimension = 2
job = "transgress"
truncation = { M = 2, L = 2, epsilon = 3 }

[[form]]
coefficient = "1"
monomial = ["b[1]"]
differentials = ["b[2]"]
"#;

    #[test]
    fn minimal_manifest_parses() {
        let m = parse_manifest(MINIMAL).unwrap();
        assert_eq!(m.job, Some(Job::Transgress));
        assert_eq!(m.ctx.charts, 2);
        assert_eq!(m.form.unwrap().degree(), 1);
        assert_eq!(m.seed, DEFAULT_SEED);
    }

    #[test]
    fn bad_rational_is_reported() {
        let text = MINIMAL.replace("coefficient = \"1\"", "coefficient = \"1/0\"");
        assert_eq!(parse_manifest(&text).unwrap_err(), ManifestError::InvalidRational("1/0".into()));
    }

    #[test]
    fn bad_variable_token_is_reported() {
        let text = MINIMAL.replace("[\"b[1]\"]", "[\"b[1,0,0,0]\"]");
        assert_eq!(
            parse_manifest(&text).unwrap_err(),
            ManifestError::InvalidVariableToken("b[1,0,0,0]".into())
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = format!("colour = 3\n{MINIMAL}");
        assert!(matches!(parse_manifest(&text), Err(ManifestError::UnknownField(_))));
        assert!(matches!(parse_manifest("dimension = "), Err(ManifestError::Syntax(_))));
    }
}
