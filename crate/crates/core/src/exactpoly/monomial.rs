use std::fmt;

use crate::context::TruncationContext;

use super::Variable;

/// Power product of variables, sorted strictly by the canonical variable order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Variable, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn pow(v: Variable, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary factors, merging repeats and dropping zero exponents.
    pub fn from_factors<I: IntoIterator<Item = (Variable, u32)>>(factors: I) -> Monomial {
        let mut v: Vec<(Variable, u32)> = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Variable, u32)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some((last, le)) if *last == var => *le += e,
                _ => out.push((var, e)),
            }
        }
        Monomial(out)
    }

    pub fn factors(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Variable) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Degree in negative-mode loop variables.
    pub fn neg_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| v.is_negative_b())
            .map(|(_, e)| e)
            .sum()
    }

    /// Sum of loop modes counted with multiplicity.
    pub fn charge(&self) -> i64 {
        self.0
            .iter()
            .filter_map(|(v, e)| v.b_mode().map(|m| m * *e as i64))
            .sum()
    }

    pub fn window_ok(&self, ctx: &TruncationContext) -> bool {
        self.0
            .iter()
            .all(|(v, _)| v.b_mode().is_none_or(|m| ctx.in_window(m)))
    }

    /// True when the monomial survives the truncation ideal of `ctx`.
    pub fn survives(&self, ctx: &TruncationContext) -> bool {
        self.neg_degree() < ctx.nilpotency && self.window_ok(ctx)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes one factor of `v`, returning the previous exponent (0 if absent).
    pub fn divide_var(&self, v: Variable) -> Option<(Monomial, u32)> {
        let idx = self.0.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
        let e = self.0[idx].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(idx);
        } else {
            out[idx].1 -= 1;
        }
        Some((Monomial(out), e))
    }

    /// Splits off the factors selected by `pred`: returns (selected, rest).
    pub fn split<F: Fn(&Variable) -> bool>(&self, pred: F) -> (Monomial, Monomial) {
        let (sel, rest): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| pred(v));
        (Monomial(sel), Monomial(rest))
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}
