use std::collections::HashMap;

use num_traits::One;

use super::{factorial, multiplicities, HeisenbergState, Letter, NormalWord};
use crate::context::TruncationContext;
use crate::error::{Error, Result};
use crate::exactpoly::{int, Polynomial, Rational, Variable};

/// A loop function prepared for acting on states.
///
/// Monomials are grouped by their negative-mode part, read as the multiset of
/// a-letters it removes: `b^j_{-m}` acts as `-d/da^j_m`, `b^j_n` (n >= 0) by
/// multiplication.
#[derive(Debug, Clone, Default)]
pub struct FunctionAction {
    by_neg: HashMap<Vec<Letter>, Vec<(Vec<Letter>, Rational)>>,
    max_neg: usize,
}

impl FunctionAction {
    pub fn new(phi: &Polynomial) -> Result<FunctionAction> {
        let mut by_neg: HashMap<Vec<Letter>, Vec<(Vec<Letter>, Rational)>> = HashMap::new();
        let mut max_neg = 0;
        for (m, c) in phi.terms() {
            let mut neg = Vec::new();
            let mut pos = Vec::new();
            for &(v, e) in m.factors() {
                let Variable::B { chart, mode, point: 0 } = v else {
                    return Err(Error::InvalidArgument(format!(
                        "variable {v} does not act on the Heisenberg module"
                    )));
                };
                for _ in 0..e {
                    if mode < 0 {
                        neg.push((chart, -mode));
                    } else {
                        pos.push((chart, mode));
                    }
                }
            }
            neg.sort_unstable();
            pos.sort_unstable();
            max_neg = max_neg.max(neg.len());
            by_neg.entry(neg).or_default().push((pos, c.clone()));
        }
        Ok(FunctionAction { by_neg, max_neg })
    }

    pub fn is_zero(&self) -> bool {
        self.by_neg.is_empty()
    }

    pub fn apply(&self, v: &HeisenbergState) -> HeisenbergState {
        let mut out = HeisenbergState::zero();
        for (w, c) in v.terms() {
            self.apply_word(w, c, &mut out);
        }
        out
    }

    fn apply_word(&self, w: &NormalWord, c: &Rational, out: &mut HeisenbergState) {
        let groups = multiplicities(w.a_part());
        let mut take = vec![0u32; groups.len()];
        loop {
            let size: u32 = take.iter().sum();
            if (size as usize) <= self.max_neg {
                let key: Vec<Letter> = groups
                    .iter()
                    .zip(&take)
                    .flat_map(|((l, _), k)| std::iter::repeat_n(*l, *k as usize))
                    .collect();
                if let Some(entries) = self.by_neg.get(&key) {
                    let mut scale = c.clone();
                    let mut rest_a = Vec::new();
                    for ((l, e), k) in groups.iter().zip(&take) {
                        scale *= factorial(*e) / factorial(e - k);
                        rest_a.extend(std::iter::repeat_n(*l, (e - k) as usize));
                    }
                    if size % 2 == 1 {
                        scale = -scale;
                    }
                    for (pos, coeff) in entries {
                        let mut b = w.b_part().to_vec();
                        b.extend_from_slice(pos);
                        out.add_term(NormalWord::new(rest_a.clone(), b), &scale * coeff);
                    }
                }
            }
            let mut idx = 0;
            loop {
                if idx == groups.len() {
                    return;
                }
                if take[idx] < groups[idx].1 {
                    take[idx] += 1;
                    break;
                }
                take[idx] = 0;
                idx += 1;
            }
        }
    }
}

/// Action of a loop function, reduced in `ctx`, on a state.
pub fn mult_function(phi: &Polynomial, v: &HeisenbergState, ctx: &TruncationContext) -> Result<HeisenbergState> {
    Ok(FunctionAction::new(&phi.reduce(ctx))?.apply(v))
}

/// `exp(f) . v = sum_k f^k v / k!`, evaluated by repeated action; the sum stops
/// once a term vanishes or after `eps - 1` steps.
pub fn apply_exp(f: &FunctionAction, v: &HeisenbergState, ctx: &TruncationContext) -> HeisenbergState {
    let mut out = v.clone();
    let mut term = v.clone();
    for k in 1..ctx.nilpotency {
        term = f.apply(&term).scale(&(Rational::one() / int(k as i64)));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}
