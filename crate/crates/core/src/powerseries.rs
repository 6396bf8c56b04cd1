//! Truncated power series with rational coefficients, stored as `[c_0, c_1, ...]`.

use num_traits::{One, Zero};

use crate::exactpoly::Rational;

pub fn mul(a: &[Rational], b: &[Rational], order: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); order];
    for (i, x) in a.iter().enumerate().take(order) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Multiplicative inverse; `a[0]` must be nonzero.
pub fn inverse(a: &[Rational], order: usize) -> Vec<Rational> {
    assert!(!a[0].is_zero(), "power series with zero constant term is not invertible");
    let inv0 = a[0].recip();
    let mut out = vec![Rational::zero(); order];
    if order == 0 {
        return out;
    }
    out[0] = inv0.clone();
    for k in 1..order {
        let mut s = Rational::zero();
        for j in 1..=k.min(a.len() - 1) {
            s += &a[j] * &out[k - j];
        }
        out[k] = -s * &inv0;
    }
    out
}

/// Integer power, negative exponents through the inverse.
pub fn powi(a: &[Rational], n: i64, order: usize) -> Vec<Rational> {
    let base = if n < 0 { inverse(a, order) } else { a.to_vec() };
    let mut e = n.unsigned_abs();
    let mut acc = one(order);
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &sq, order);
        }
        e >>= 1;
        if e > 0 {
            sq = mul(&sq, &sq, order);
        }
    }
    acc
}

pub fn one(order: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); order];
    if order > 0 {
        out[0] = Rational::one();
    }
    out
}
