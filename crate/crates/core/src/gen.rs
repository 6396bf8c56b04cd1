//! Seeded random inputs for the randomized suites.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::context::TruncationContext;
use crate::derham::{DifferentialForm, Universe};
use crate::exactpoly::{int, rat, Monomial, Polynomial, Rational, Variable};
use crate::heisenberg::{HeisenbergState, NormalWord, Op};
use crate::laurent::{LaurentSeries, Tail};
use crate::transgression::XForm;

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational.
pub fn coefficient(rng: &mut Rng64) -> Rational {
    loop {
        let num = rng.random_range(-5i64..=5);
        if num != 0 {
            let den = if rng.random_bool(0.8) { 1 } else { rng.random_range(2i64..=3) };
            return rat(num, den);
        }
    }
}

/// A polynomial with at most `terms` terms of degree at most `max_degree` in `vars`.
pub fn polynomial(rng: &mut Rng64, vars: &[Variable], max_degree: u32, terms: usize) -> Polynomial {
    let mut out = Polynomial::zero();
    if vars.is_empty() {
        return Polynomial::constant(coefficient(rng));
    }
    for _ in 0..terms {
        let deg = rng.random_range(0..=max_degree);
        let factors = (0..deg).map(|_| (vars[rng.random_range(0..vars.len())], 1));
        out.add_term(Monomial::from_factors(factors), coefficient(rng));
    }
    out
}

pub fn coords(charts: usize) -> Vec<Variable> {
    (1..=charts).map(Variable::coord).collect()
}

/// Loop coordinates `b^j_n` of every chart with `lo <= n <= hi`.
pub fn modes(charts: usize, lo: i64, hi: i64) -> Vec<Variable> {
    (1..=charts)
        .flat_map(|j| (lo..=hi).map(move |n| Variable::b(j, n)))
        .collect()
}

/// `sum_i f_i db^i` with coefficients of degree at most `max_degree`.
pub fn one_form(rng: &mut Rng64, charts: usize, max_degree: u32) -> XForm {
    let vars = coords(charts);
    let mut terms = Vec::new();
    for i in 1..=charts {
        if rng.random_bool(0.7) {
            terms.push((polynomial(rng, &vars, max_degree, 2), i));
        }
    }
    if terms.is_empty() {
        terms.push((polynomial(rng, &vars, max_degree, 2), 1));
    }
    XForm::one_form(&terms)
}

/// `sum_{i<j} w_ij db^i db^j`, not necessarily closed.
pub fn two_form(rng: &mut Rng64, charts: usize, max_degree: u32) -> XForm {
    let vars = coords(charts);
    let mut form = DifferentialForm::zero(2, Universe::X);
    for i in 1..=charts {
        for j in i + 1..=charts {
            let c = polynomial(rng, &vars, max_degree, 2);
            form = form.add(&DifferentialForm::from_term(c, vec![Variable::coord(i), Variable::coord(j)], Universe::X));
        }
    }
    XForm::new(form).expect("form on affine space")
}

/// A polynomial in the loop coordinates of `ctx` with every monomial containing
/// a negative mode.
pub fn relative_function(rng: &mut Rng64, ctx: &TruncationContext, max_degree: u32, terms: usize) -> Polynomial {
    let neg = modes(ctx.charts, -ctx.neg, -1);
    let all = modes(ctx.charts, -ctx.neg, ctx.pos);
    let mut out = Polynomial::zero();
    for _ in 0..terms {
        let head = Polynomial::var(neg[rng.random_range(0..neg.len())]);
        let rest = polynomial(rng, &all, max_degree.saturating_sub(1), 1);
        out.add_assign_ref(&head.mul(&rest, ctx));
    }
    out
}

/// A relative `p`-form on the loop space.
pub fn relative_form(rng: &mut Rng64, ctx: &TruncationContext, p: usize, terms: usize) -> DifferentialForm {
    let all = modes(ctx.charts, -ctx.neg, ctx.pos);
    let mut out = DifferentialForm::zero(p, Universe::Loop);
    for _ in 0..terms {
        let vars: Vec<Variable> = (0..p).map(|_| all[rng.random_range(0..all.len())]).collect();
        let c = if vars.iter().any(Variable::is_negative_b) {
            polynomial(rng, &all, 2, 1)
        } else {
            relative_function(rng, ctx, 2, 1)
        };
        out = out.add(&DifferentialForm::from_term(c, vars, Universe::Loop));
    }
    out.reduce(ctx)
}

/// A Laurent polynomial with exponents in `[lo, hi]` and coefficients in `vars`.
pub fn laurent(rng: &mut Rng64, vars: &[Variable], lo: i64, hi: i64, max_degree: u32, terms: usize) -> LaurentSeries {
    let mut coeffs: BTreeMap<i64, Polynomial> = BTreeMap::new();
    for _ in 0..terms {
        let k = rng.random_range(lo..=hi);
        coeffs
            .entry(k)
            .or_default()
            .add_assign_ref(&polynomial(rng, vars, max_degree, 1));
    }
    coeffs.retain(|_, c| !c.is_zero());
    LaurentSeries::new(coeffs, lo, hi, Tail::Zero)
}

/// A word in the Heisenberg generators with modes in `[-max_mode, max_mode]`.
pub fn op_word(rng: &mut Rng64, charts: usize, max_mode: i64, len: usize) -> Vec<Op> {
    (0..len)
        .map(|_| {
            let chart = rng.random_range(1..=charts);
            let mode = rng.random_range(-max_mode..=max_mode);
            if rng.random_bool(0.5) {
                Op::A(chart, mode)
            } else {
                Op::B(chart, mode)
            }
        })
        .collect()
}

/// A normal word with at most `max_a` a-letters and `max_b` b-letters.
pub fn normal_word(rng: &mut Rng64, charts: usize, max_mode: i32, max_a: usize, max_b: usize) -> NormalWord {
    let a = (0..rng.random_range(0..=max_a))
        .map(|_| (rng.random_range(1..=charts as u16), rng.random_range(1..=max_mode)))
        .collect();
    let b = (0..rng.random_range(0..=max_b))
        .map(|_| (rng.random_range(1..=charts as u16), rng.random_range(0..=max_mode)))
        .collect();
    NormalWord::new(a, b)
}

pub fn state(rng: &mut Rng64, charts: usize, max_mode: i32, max_a: usize, terms: usize) -> HeisenbergState {
    let mut out = HeisenbergState::zero();
    for _ in 0..terms {
        out.add_term(normal_word(rng, charts, max_mode, max_a, 2), coefficient(rng));
    }
    out
}

/// A loop function whose negative part has weight at most `w` and degree
/// below the nilpotency order, and whose nonnegative modes are at most `w`.
pub fn bounded_function(rng: &mut Rng64, charts: usize, w: i64, nilpotency: u32, terms: usize) -> Polynomial {
    let mut out = Polynomial::zero();
    for _ in 0..terms {
        let mut factors = Vec::new();
        let mut budget = w;
        let neg_count = rng.random_range(0..nilpotency as usize);
        for _ in 0..neg_count {
            if budget == 0 {
                break;
            }
            let m = rng.random_range(1..=budget);
            budget -= m;
            factors.push((Variable::b(rng.random_range(1..=charts), -m), 1));
        }
        for _ in 0..rng.random_range(0..=2) {
            factors.push((Variable::b(rng.random_range(1..=charts), rng.random_range(0..=w)), 1));
        }
        out.add_term(Monomial::from_factors(factors), coefficient(rng));
    }
    out
}

/// A change of parameter `a_1 t + ... + a_D t^D` with `a_1 != 0`.
pub fn coord_change(rng: &mut Rng64, degree: usize) -> Vec<Rational> {
    let mut out = vec![coefficient(rng)];
    for _ in 1..degree {
        out.push(if rng.random_bool(0.3) { int(0) } else { coefficient(rng) });
    }
    out
}
