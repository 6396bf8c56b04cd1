//! The Heisenberg vertex module generated by `a^i_m`, `b^j_n` with
//! `[a^j_m, b^i_n] = delta_ij delta_{m,-n}` and vacuum relations
//! `b_{<0} 1 = a_{<=0} 1 = 0`, together with the action of loop functions,
//! the field-substitution automorphism attached to a closed 2-form, and a few
//! vertex operations.

mod action;
mod basis;
mod gms;
mod ordering;
mod vertex;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exactpoly::{int, Rational};

pub use action::{apply_exp, mult_function, FunctionAction};
pub use basis::{basis_count, basis_upto};
pub use gms::{field_shift, gms_automorphism, recover_function, verify_234, verify_234_with, FieldShift};
pub use ordering::{apply_op, normal_order, normal_order_rewrite, Strategy};
pub use vertex::{field_mode, generalized_binomial, translate};

/// A single mode operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    A(usize, i64),
    B(usize, i64),
}

impl Op {
    pub fn is_annihilator(&self) -> bool {
        match *self {
            Op::A(_, m) => m <= 0,
            Op::B(_, n) => n < 0,
        }
    }

    /// The scalar `[self, other]`.
    pub fn commutator(&self, other: &Op) -> i64 {
        match (*self, *other) {
            (Op::A(j, m), Op::B(i, n)) if i == j && m == -n => 1,
            (Op::B(i, n), Op::A(j, m)) if i == j && m == -n => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::A(i, m) => write!(f, "a[{},{}]", i, m),
            Op::B(i, n) => write!(f, "b[{},{}]", i, n),
        }
    }
}

/// A letter `(chart, mode)` of a normal word.
pub type Letter = (u16, i32);

/// A basis monomial `a^{i_1}_{m_1} ... b^{j_1}_{n_1} ... 1` with `m >= 1`, `n >= 0`,
/// both parts kept as sorted multisets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NormalWord {
    a: Vec<Letter>,
    b: Vec<Letter>,
}

impl NormalWord {
    pub fn vacuum() -> NormalWord {
        NormalWord::default()
    }

    pub fn new(mut a: Vec<Letter>, mut b: Vec<Letter>) -> NormalWord {
        assert!(a.iter().all(|&(_, m)| m >= 1), "a-modes of a normal word are positive");
        assert!(b.iter().all(|&(_, n)| n >= 0), "b-modes of a normal word are non-negative");
        a.sort_unstable();
        b.sort_unstable();
        NormalWord { a, b }
    }

    pub fn a_part(&self) -> &[Letter] {
        &self.a
    }

    pub fn b_part(&self) -> &[Letter] {
        &self.b
    }

    pub fn weight(&self) -> i64 {
        self.a.iter().chain(&self.b).map(|&(_, m)| m as i64).sum()
    }

    pub fn a_degree(&self) -> usize {
        self.a.len()
    }

    pub fn b0_degree(&self) -> usize {
        self.b.iter().filter(|&&(_, n)| n == 0).count()
    }

    pub fn with_a(&self, letter: Letter) -> NormalWord {
        let mut out = self.clone();
        let pos = out.a.partition_point(|l| *l <= letter);
        out.a.insert(pos, letter);
        out
    }

    pub fn with_b(&self, letter: Letter) -> NormalWord {
        let mut out = self.clone();
        let pos = out.b.partition_point(|l| *l <= letter);
        out.b.insert(pos, letter);
        out
    }

    /// Removes one copy of an a-letter, returning its multiplicity before removal.
    pub fn without_a(&self, letter: Letter) -> Option<(NormalWord, u32)> {
        remove_one(&self.a, letter).map(|(a, e)| (NormalWord { a, b: self.b.clone() }, e))
    }

    pub fn without_b(&self, letter: Letter) -> Option<(NormalWord, u32)> {
        remove_one(&self.b, letter).map(|(b, e)| (NormalWord { a: self.a.clone(), b }, e))
    }

    pub fn max_a_mode(&self) -> i64 {
        self.a.iter().map(|&(_, m)| m as i64).max().unwrap_or(0)
    }

    pub fn max_chart(&self) -> usize {
        self.a.iter().chain(&self.b).map(|&(c, _)| c as usize).max().unwrap_or(0)
    }
}

fn remove_one(part: &[Letter], letter: Letter) -> Option<(Vec<Letter>, u32)> {
    let lo = part.partition_point(|l| *l < letter);
    let hi = part.partition_point(|l| *l <= letter);
    if lo == hi {
        return None;
    }
    let mut out = part.to_vec();
    out.remove(lo);
    Some((out, (hi - lo) as u32))
}

/// Multiplicities of a sorted multiset.
pub(crate) fn multiplicities(part: &[Letter]) -> Vec<(Letter, u32)> {
    let mut out: Vec<(Letter, u32)> = Vec::new();
    for &l in part {
        match out.last_mut() {
            Some((prev, e)) if *prev == l => *e += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in &self.a {
            write!(f, "a[{},{}]*", i, m)?;
        }
        for (j, n) in &self.b {
            write!(f, "b[{},{}]*", j, n)?;
        }
        write!(f, "1")
    }
}

/// A finite rational combination of normal words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeisenbergState {
    terms: BTreeMap<NormalWord, Rational>,
}

impl HeisenbergState {
    pub fn zero() -> HeisenbergState {
        HeisenbergState::default()
    }

    pub fn vacuum() -> HeisenbergState {
        HeisenbergState::word(NormalWord::vacuum())
    }

    pub fn word(w: NormalWord) -> HeisenbergState {
        let mut out = HeisenbergState::zero();
        out.add_term(w, Rational::one());
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (NormalWord, Rational)>>(iter: I) -> HeisenbergState {
        let mut out = HeisenbergState::zero();
        for (w, c) in iter {
            out.add_term(w, c);
        }
        out
    }

    pub fn add_term(&mut self, w: NormalWord, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &HeisenbergState, s: &Rational) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * s);
        }
    }

    pub fn add(&self, other: &HeisenbergState) -> HeisenbergState {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &HeisenbergState) -> HeisenbergState {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, s: &Rational) -> HeisenbergState {
        let mut out = HeisenbergState::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalWord, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &NormalWord) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Filtration level: the largest a-degree of a term.
    pub fn a_degree(&self) -> usize {
        self.terms.keys().map(|w| w.a_degree()).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> i64 {
        self.terms.keys().map(|w| w.weight()).max().unwrap_or(0)
    }

    pub fn max_a_mode(&self) -> i64 {
        self.terms.keys().map(|w| w.max_a_mode()).max().unwrap_or(0)
    }

    pub fn max_chart(&self) -> usize {
        self.terms.keys().map(|w| w.max_chart()).max().unwrap_or(0)
    }

    /// Rendering of the first term, used as a failure witness.
    pub fn first_term(&self) -> Option<String> {
        let (w, c) = self.terms.iter().next()?;
        Some(HeisenbergState::from_terms([(w.clone(), c.clone())]).to_string())
    }
}

impl fmt::Display for HeisenbergState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (w, c)) in self.terms.iter().enumerate() {
            match (idx, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}*{}", c.abs(), w)?;
        }
        Ok(())
    }
}

pub(crate) fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_are_sorted_multisets() {
        let w = NormalWord::new(vec![(2, 1), (1, 3), (1, 3)], vec![(1, 0)]);
        assert_eq!(w.a_part(), &[(1, 3), (1, 3), (2, 1)]);
        assert_eq!(w.weight(), 7);
        let (rest, e) = w.without_a((1, 3)).unwrap();
        assert_eq!(e, 2);
        assert_eq!(rest.a_part(), &[(1, 3), (2, 1)]);
        assert!(w.without_b((1, 1)).is_none());
        assert_eq!(w.with_b((1, 0)).b0_degree(), 2);
        assert_eq!(w.to_string(), "a[1,3]*a[1,3]*a[2,1]*b[1,0]*1");
    }

    #[test]
    fn state_rendering() {
        let s = HeisenbergState::from_terms([
            (NormalWord::new(vec![(1, 1)], vec![]), Rational::one()),
            (NormalWord::new(vec![], vec![(2, 1)]), -Rational::one()),
        ]);
        assert_eq!(s.to_string(), "-1*b[2,1]*1 + 1*a[1,1]*1");
        assert_eq!(HeisenbergState::zero().to_string(), "0");
    }
}
