use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::action::FunctionAction;
use super::ordering::apply_op;
use super::{multiplicities, HeisenbergState, NormalWord, Op};
use crate::context::TruncationContext;
use crate::error::{Error, Result};
use crate::exactpoly::{int, Polynomial, Rational, Variable};
use crate::laurent::{product_coeff, LaurentSeries, Tail};

/// `n (n-1) ... (n-k+1) / k!` for any integer `n`.
pub fn generalized_binomial(n: i64, k: u32) -> Rational {
    let mut out = Rational::one();
    for i in 0..k as i64 {
        out = out * int(n - i) / int(i + 1);
    }
    out
}

/// The translation operator, a derivation with `a_m -> m a_{m+1}` and
/// `b_n -> (n+1) b_{n+1}`.
pub fn translate(v: &HeisenbergState, ctx: &TruncationContext) -> Result<HeisenbergState> {
    let mut out = HeisenbergState::zero();
    for (w, c) in v.terms() {
        let weight = w.weight() + 1;
        if weight > ctx.weight_bound as i64 {
            return Err(Error::WeightOverflow {
                weight: weight as u32,
                bound: ctx.weight_bound,
            });
        }
        for ((i, m), e) in multiplicities(w.a_part()) {
            let (rest, _) = w.without_a((i, m)).expect("letter present");
            out.add_term(rest.with_a((i, m + 1)), c * int(e as i64 * m as i64));
        }
        for ((j, n), e) in multiplicities(w.b_part()) {
            let (rest, _) = w.without_b((j, n)).expect("letter present");
            out.add_term(rest.with_b((j, n + 1)), c * int(e as i64 * (n as i64 + 1)));
        }
    }
    Ok(out)
}

/// The product `x_(k) y` for `x` in the class spanned by `a^i_m 1` and
/// `P(b_0, b_1, ...) 1`.
pub fn field_mode(x: &HeisenbergState, k: i64, y: &HeisenbergState, ctx: &TruncationContext) -> Result<HeisenbergState> {
    let mut out = HeisenbergState::zero();
    for (w, c) in x.terms() {
        let part = match (w.a_part(), w.b_part()) {
            ([], _) => b_word_mode(w, k, y, ctx)?,
            ([(i, m)], []) => {
                let m = *m as i64;
                let coeff = generalized_binomial(m - k - 2, (m - 1) as u32);
                if coeff.is_zero() {
                    continue;
                }
                apply_op(Op::A(*i as usize, m - k - 1), y).scale(&coeff)
            }
            _ => return Err(Error::OutsideClass(w.to_string())),
        };
        out.add_scaled(&part, c);
    }
    Ok(out)
}

/// `(b_{m_1} ... b_{m_r} 1)_(k) y`: the coefficient of `t^{-k-1}` in the product
/// of the commuting fields `sum_n binom(n, m_s) b_n t^{n - m_s}`, acting on `y`.
fn b_word_mode(w: &NormalWord, k: i64, y: &HeisenbergState, ctx: &TruncationContext) -> Result<HeisenbergState> {
    let letters = w.b_part();
    if letters.is_empty() {
        return Ok(if k == -1 { y.clone() } else { HeisenbergState::zero() });
    }
    let depth = y.max_a_mode();
    let r = letters.len() as i64;
    let msum: i64 = letters.iter().map(|&(_, m)| m as i64).sum();
    let top = -k - 1 + msum + (r - 1) * depth;
    if top < -depth {
        return Ok(HeisenbergState::zero());
    }
    let charts = ctx.charts.max(w.max_chart()).max(y.max_chart());
    let local = TruncationContext::new(charts, depth, top.max(0), y.a_degree() as u32 + 1);
    let mut fields = Vec::with_capacity(letters.len());
    for &(j, m) in letters {
        let m = m as i64;
        let mut coeffs = BTreeMap::new();
        for n in -depth..=top {
            let c = generalized_binomial(n, m as u32);
            if !c.is_zero() {
                coeffs.insert(n - m, Polynomial::var(Variable::b(j as usize, n)).scale(&c));
            }
        }
        fields.push(LaurentSeries::new(coeffs, -depth - m, top - m, Tail::Zero));
    }
    let refs: Vec<&LaurentSeries> = fields.iter().collect();
    let q = product_coeff(&refs, -k - 1, &local)?;
    Ok(FunctionAction::new(&q)?.apply(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(a: Vec<(u16, i32)>, b: Vec<(u16, i32)>) -> HeisenbergState {
        HeisenbergState::word(NormalWord::new(a, b))
    }

    #[test]
    fn translate_examples() {
        let ctx = TruncationContext::new(1, 3, 3, 3).with_weight(4, 1);
        assert_eq!(translate(&st(vec![], vec![(1, 0)]), &ctx).unwrap(), st(vec![], vec![(1, 1)]));
        assert_eq!(translate(&st(vec![(1, 1)], vec![]), &ctx).unwrap(), st(vec![(1, 2)], vec![]));
        assert!(translate(&HeisenbergState::vacuum(), &ctx).unwrap().is_zero());
        let heavy = st(vec![(1, 4)], vec![]);
        assert_eq!(
            translate(&heavy, &ctx),
            Err(Error::WeightOverflow { weight: 5, bound: 4 })
        );
    }

    #[test]
    fn field_mode_examples() {
        let ctx = TruncationContext::new(2, 3, 3, 3).with_weight(4, 1);
        let one = HeisenbergState::vacuum();
        let a11 = st(vec![(1, 1)], vec![]);
        let b10 = st(vec![], vec![(1, 0)]);
        assert_eq!(field_mode(&a11, -1, &one, &ctx).unwrap(), a11);
        assert_eq!(field_mode(&b10, -1, &one, &ctx).unwrap(), b10);
        let v = st(vec![(2, 2)], vec![(1, 1)]);
        assert!(field_mode(&one, 0, &v, &ctx).unwrap().is_zero());
        assert_eq!(field_mode(&one, -1, &v, &ctx).unwrap(), v);
        let outside = st(vec![(1, 1), (2, 1)], vec![]);
        assert!(matches!(field_mode(&outside, 0, &one, &ctx), Err(Error::OutsideClass(_))));
    }

    #[test]
    fn modes_of_b0_and_a1_act_as_single_operators() {
        let ctx = TruncationContext::new(2, 3, 3, 3).with_weight(6, 1);
        let y = st(vec![(1, 2), (2, 1)], vec![(1, 0)]);
        let a11 = st(vec![(1, 1)], vec![]);
        let b10 = st(vec![], vec![(1, 0)]);
        for k in -3..=3 {
            assert_eq!(field_mode(&a11, k, &y, &ctx).unwrap(), apply_op(Op::A(1, -k), &y));
            assert_eq!(field_mode(&b10, k, &y, &ctx).unwrap(), apply_op(Op::B(1, -k - 1), &y));
        }
    }

    #[test]
    fn field_of_translate_is_derivative() {
        let ctx = TruncationContext::new(2, 3, 3, 3).with_weight(8, 2);
        let y = st(vec![(1, 2), (2, 1)], vec![(2, 0)]);
        let xs = [
            st(vec![(1, 1)], vec![]),
            st(vec![(2, 2)], vec![]),
            st(vec![], vec![(1, 0), (2, 1)]),
            st(vec![], vec![(1, 0), (1, 0)]),
        ];
        for x in &xs {
            let dx = translate(x, &ctx).unwrap();
            for k in -3..=3 {
                let lhs = field_mode(&dx, k, &y, &ctx).unwrap();
                let rhs = field_mode(x, k - 1, &y, &ctx).unwrap().scale(&int(-k));
                assert_eq!(lhs, rhs, "x = {x}, k = {k}");
            }
        }
    }
}
