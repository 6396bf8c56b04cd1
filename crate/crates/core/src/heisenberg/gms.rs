use std::collections::BTreeMap;

use num_traits::One;

use super::action::{apply_exp, FunctionAction};
use super::basis::basis_upto;
use super::ordering::apply_op;
use super::{factorial, multiplicities, HeisenbergState, Letter, NormalWord, Op};
use crate::context::TruncationContext;
use crate::error::{Error, Result};
use crate::exactpoly::{Monomial, Polynomial, Rational, Variable};
use crate::laurent::{ev_series, series_compose, LaurentSeries};
use crate::par::{self, Execution};
use crate::report::Report;
use crate::transgression::{tau_dinv, XForm};

/// Modes `c_{i,m}` of the shift `c_i(t) = sum_k b^k(t)' h_ki(b(t)) = sum_m c_{i,m} t^{m-1}`.
#[derive(Debug, Clone)]
pub struct FieldShift {
    modes: BTreeMap<(usize, i64), Polynomial>,
}

impl FieldShift {
    pub fn mode(&self, chart: usize, m: i64) -> Polynomial {
        self.modes.get(&(chart, m)).cloned().unwrap_or_default()
    }
}

/// The shift modes `c_{i,m}` for `1 <= m <= m_max`.
pub fn field_shift(omega: &XForm, m_max: i64, ctx: &TruncationContext) -> Result<FieldShift> {
    if omega.degree() != 2 {
        return Err(Error::InvalidArgument("field shift needs a 2-form".into()));
    }
    if !omega.is_closed(ctx) {
        return Err(Error::NotClosed);
    }
    let loops = (1..=ctx.charts).map(|i| ev_series(i, ctx)).collect::<Result<Vec<_>>>()?;
    let mut modes = BTreeMap::new();
    for i in 1..=ctx.charts {
        let mut shift = LaurentSeries::zero();
        for k in 1..=ctx.charts {
            let h = omega.h(k, i);
            if h.is_zero() {
                continue;
            }
            let term = loops[k - 1].derive_t().mul(&series_compose(&h, &loops, ctx)?, ctx)?;
            shift = shift.add(&term);
        }
        for m in 1..=m_max {
            let c = shift.known_coeff(m - 1)?;
            if !c.is_zero() {
                modes.insert((i, m), c);
            }
        }
    }
    Ok(FieldShift { modes })
}

/// The automorphism `a^i(t) -> a^i(t) + c_i(t)`, `b(t) -> b(t)`, applied to each
/// basis word: every `a^i_m` becomes `a^i_m + c_{i,m}`, acting right to left.
pub fn gms_automorphism(omega: &XForm, v: &HeisenbergState, ctx: &TruncationContext) -> Result<HeisenbergState> {
    let shift = field_shift(omega, v.max_a_mode(), ctx)?;
    let actions = shift_actions(&shift)?;
    Ok(apply_shift(&actions, v))
}

type ShiftActions = BTreeMap<Letter, FunctionAction>;

fn shift_actions(shift: &FieldShift) -> Result<ShiftActions> {
    shift
        .modes
        .iter()
        .map(|(&(i, m), c)| Ok(((i as u16, m as i32), FunctionAction::new(c)?)))
        .collect()
}

fn apply_shift(actions: &ShiftActions, v: &HeisenbergState) -> HeisenbergState {
    let mut out = HeisenbergState::zero();
    for (w, c) in v.terms() {
        let mut state = HeisenbergState::word(NormalWord::new(Vec::new(), w.b_part().to_vec()));
        for &(i, m) in w.a_part().iter().rev() {
            let mut next = apply_op(Op::A(i as usize, m as i64), &state);
            if let Some(fa) = actions.get(&(i, m)) {
                next = next.add(&fa.apply(&state));
            }
            state = next;
        }
        out.add_scaled(&state, c);
    }
    out
}

/// True when every a-part in `image` is a sub-multiset of `w`'s a-part and the
/// coefficient of `w` itself is 1.
fn respects_filtration(w: &NormalWord, image: &HeisenbergState) -> bool {
    let source = multiplicities(w.a_part());
    let sub = |other: &NormalWord| {
        multiplicities(other.a_part()).iter().all(|(l, e)| {
            source
                .iter()
                .find(|(s, _)| s == l)
                .is_some_and(|(_, se)| se >= e)
        })
    };
    image.terms().all(|(o, _)| sub(o)) && image.coefficient(w).is_one()
}

pub fn verify_234(omega: &XForm, w: i64, ctx: &TruncationContext) -> Result<Report> {
    verify_234_with(omega, w, ctx, Execution::default())
}

/// Checks, on every basis state of weight at most `w`, that multiplication by
/// the exponentiated action of `omega` equals the field-substitution automorphism.
pub fn verify_234_with(omega: &XForm, w: i64, ctx: &TruncationContext, exec: Execution) -> Result<Report> {
    if !omega.is_closed(ctx) {
        return Err(Error::NotClosed);
    }
    if ctx.neg < w || ctx.pos < w || (ctx.nilpotency as i64) <= w {
        return Err(Error::InsufficientWindow(format!(
            "weight {w} needs M >= {w}, L >= {w} and eps > {w}; have {ctx}"
        )));
    }
    let f = tau_dinv(omega, ctx)?;
    let fa = FunctionAction::new(&f.poly)?;
    let actions = shift_actions(&field_shift(omega, w.max(0), ctx)?)?;
    let basis = basis_upto(w, ctx);
    let outcomes = par::map(exec, &basis, |v| {
        let state = HeisenbergState::word(v.clone());
        let lhs = apply_exp(&fa, &state, ctx);
        let rhs = apply_shift(&actions, &state);
        let filtered = respects_filtration(v, &rhs);
        (lhs.sub(&rhs).first_term(), filtered)
    });
    let mut report = Report::new();
    let mut filtration_witness = None;
    for (v, (diff, filtered)) in basis.iter().zip(outcomes) {
        report.check(
            format!("state.{v}"),
            "multiplication by S(w) equals the field-substitution automorphism",
            diff,
        );
        if !filtered && filtration_witness.is_none() {
            filtration_witness = Some(v.to_string());
        }
    }
    report.check(
        "filtration",
        "the automorphism preserves the a-degree filtration and is the identity on its graded pieces",
        filtration_witness,
    );
    Ok(report)
}

/// Recovers a loop function from its action on the pure-a states of weight at
/// most `w` and a-degree below `eps`: the a-free part of `g . a_nu 1` is
/// `(-1)^|nu| prod e! sum_{pos} g_{nu,pos} b_pos 1`.
pub fn recover_function<F>(action: F, w: i64, ctx: &TruncationContext) -> Polynomial
where
    F: Fn(&HeisenbergState) -> HeisenbergState,
{
    let mut out = Polynomial::zero();
    let basis = basis_upto(w, &ctx.with_weight(w.max(0) as u32, 0));
    for v in basis.iter().filter(|v| v.b_part().is_empty() && v.a_degree() < ctx.nilpotency as usize) {
        let image = action(&HeisenbergState::word(v.clone()));
        let mut norm = Rational::one();
        for (_, e) in multiplicities(v.a_part()) {
            norm *= factorial(e);
        }
        if v.a_degree() % 2 == 1 {
            norm = -norm;
        }
        let neg = Monomial::from_factors(v.a_part().iter().map(|&(i, m)| (Variable::b(i as usize, -(m as i64)), 1)));
        for (word, c) in image.terms() {
            if !word.a_part().is_empty() {
                continue;
            }
            let pos = Monomial::from_factors(word.b_part().iter().map(|&(j, n)| (Variable::b(j as usize, n as i64), 1)));
            out.add_term(neg.mul(&pos), c / &norm);
        }
    }
    out
}
