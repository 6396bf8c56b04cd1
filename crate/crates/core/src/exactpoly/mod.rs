//! Exact rationals and sparse multivariate polynomials with nilpotent truncation.

mod monomial;
mod poly;
mod variable;

pub use monomial::Monomial;
pub use poly::Polynomial;
pub use variable::{parse_variable, Variable, VariableFamily};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::context::TruncationContext;
use crate::error::Result;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Deletes every monomial lying in the truncation ideal of `ctx`.
pub fn poly_reduce(p: &Polynomial, ctx: &TruncationContext) -> Polynomial {
    p.reduce(ctx)
}

pub fn poly_mul(p: &Polynomial, q: &Polynomial, ctx: &TruncationContext) -> Polynomial {
    p.mul(q, ctx)
}

pub fn poly_derive(p: &Polynomial, v: Variable) -> Polynomial {
    p.derive(v)
}

pub fn poly_subst(
    p: &Polynomial,
    assignment: &BTreeMap<Variable, Polynomial>,
    ctx: &TruncationContext,
) -> Result<Polynomial> {
    p.subst(assignment, ctx)
}
