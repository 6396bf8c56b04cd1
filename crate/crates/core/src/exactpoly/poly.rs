use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::context::TruncationContext;
use crate::error::{Error, Result};

use super::{int, Monomial, Rational, Variable};

/// Sparse polynomial with exact rational coefficients. No zero coefficient is
/// ever stored, so structural equality is mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Polynomial {
        Polynomial::constant(int(n))
    }

    pub fn var(v: Variable) -> Polynomial {
        Polynomial::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// First term in canonical order, used as a failure witness.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Polynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.terms.keys().flat_map(|m| m.variables()).collect()
    }

    pub fn retain<F: FnMut(&Monomial, &Rational) -> bool>(&self, mut keep: F) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn reduce(&self, ctx: &TruncationContext) -> Polynomial {
        self.retain(|m, _| m.survives(ctx))
    }

    /// Product without truncation.
    pub fn mul_exact(&self, other: &Polynomial) -> Polynomial {
        self.mul_filtered(other, |_| true)
    }

    pub fn mul(&self, other: &Polynomial, ctx: &TruncationContext) -> Polynomial {
        self.mul_filtered(other, |m| m.survives(ctx))
    }

    /// Product keeping only monomials accepted by `keep`.
    pub fn mul_filtered<F: Fn(&Monomial) -> bool>(&self, other: &Polynomial, keep: F) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if !keep(&m) {
                    continue;
                }
                let c = c1 * c2;
                *acc.entry(m).or_insert_with(Rational::zero) += c;
            }
        }
        Polynomial {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, k: u32, ctx: &TruncationContext) -> Polynomial {
        let mut out = Polynomial::one().reduce(ctx);
        for _ in 0..k {
            out = out.mul(self, ctx);
        }
        out
    }

    pub fn derive(&self, v: Variable) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if let Some((rest, e)) = m.divide_var(v) {
                out.add_term(rest, c * int(e as i64));
            }
        }
        out
    }

    /// Simultaneous substitution; every variable of `self` must have an image.
    pub fn subst(
        &self,
        assignment: &BTreeMap<Variable, Polynomial>,
        ctx: &TruncationContext,
    ) -> Result<Polynomial> {
        for v in self.variables() {
            if !assignment.contains_key(&v) {
                return Err(Error::MissingAssignment(v));
            }
        }
        Ok(self.subst_with(|v| assignment.get(&v).cloned(), ctx))
    }

    /// Substitution where unassigned variables are left in place.
    pub fn partial_subst(
        &self,
        assignment: &BTreeMap<Variable, Polynomial>,
        ctx: &TruncationContext,
    ) -> Polynomial {
        self.subst_with(|v| assignment.get(&v).cloned(), ctx)
    }

    pub fn subst_with<F: Fn(Variable) -> Option<Polynomial>>(
        &self,
        image: F,
        ctx: &TruncationContext,
    ) -> Polynomial {
        let mut powers: HashMap<(Variable, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            for &(v, e) in m.factors() {
                let factor = powers.entry((v, e)).or_insert_with(|| {
                    let base = image(v).unwrap_or_else(|| Polynomial::var(v));
                    base.pow(e, ctx)
                });
                acc = acc.mul(factor, ctx);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&acc);
        }
        out.reduce(ctx)
    }

    /// Highest total degree in the given family selector.
    pub fn max_degree_in<F: Fn(&Variable) -> bool>(&self, pred: F) -> u32 {
        self.terms
            .keys()
            .map(|m| {
                m.factors()
                    .iter()
                    .filter(|(v, _)| pred(v))
                    .map(|(_, e)| e)
                    .sum::<u32>()
            })
            .max()
            .unwrap_or(0)
    }

    /// Groups terms by the part selected by `pred`: returns map selected-part -> coefficient polynomial.
    pub fn collect_by<F: Fn(&Variable) -> bool>(&self, pred: F) -> BTreeMap<Monomial, Polynomial> {
        let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest) = m.split(&pred);
            out.entry(sel).or_default().add_term(rest, c.clone());
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

/// Untruncated product; use [`Polynomial::mul`] inside a quotient.
impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.mul_exact(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{poly_derive, poly_mul, poly_reduce, poly_subst, rat};
    use super::*;

    fn b(i: usize, n: i64) -> Polynomial {
        Polynomial::var(Variable::b(i, n))
    }

    fn ctx(m: i64, l: i64, eps: u32) -> TruncationContext {
        TruncationContext::new(2, m, l, eps)
    }

    #[test]
    fn reduce_kills_high_negative_degree() {
        let p = &b(1, -1) * &b(2, -1);
        assert!(poly_reduce(&p, &ctx(3, 3, 2)).is_zero());
        let q = &b(1, -1) * &b(2, 0);
        assert_eq!(poly_reduce(&q, &ctx(3, 3, 2)), q);
    }

    #[test]
    fn reduce_kills_modes_outside_window() {
        let p = b(1, -5).scale(&int(3));
        assert!(poly_reduce(&p, &ctx(4, 4, 3)).is_zero());
    }

    #[test]
    fn mul_examples() {
        let c = ctx(3, 3, 2);
        let p = &b(1, 0) + &Polynomial::one();
        let q = &b(1, 0) - &Polynomial::one();
        let expect = &(&b(1, 0) * &b(1, 0)) - &Polynomial::one();
        assert_eq!(poly_mul(&p, &q, &c), expect);
        assert!(poly_mul(&b(1, -1), &b(1, -1), &c).is_zero());
        let lhs = b(2, 1).scale(&rat(1, 2));
        let rhs = b(1, 0).scale(&rat(1, 3));
        assert_eq!(
            poly_mul(&lhs, &rhs, &c),
            (&b(1, 0) * &b(2, 1)).scale(&rat(1, 6))
        );
    }

    #[test]
    fn derive_examples() {
        let p = &b(1, -1) * &b(2, 1);
        assert_eq!(poly_derive(&p, Variable::b(1, -1)), b(2, 1));
        assert!(poly_derive(&Polynomial::int(5), Variable::b(1, 0)).is_zero());
        let sq = &b(2, 3) * &b(2, 3);
        assert_eq!(poly_derive(&sq, Variable::b(2, 3)), b(2, 3).scale(&int(2)));
    }

    #[test]
    fn subst_examples() {
        let c = ctx(3, 3, 2);
        let l1 = Variable::lam(1);
        let l2 = Variable::lam(2);
        let p = &Polynomial::var(l2) - &Polynomial::var(l1);
        let asg: BTreeMap<_, _> = [(l1, Polynomial::zero()), (l2, Polynomial::one())].into();
        assert_eq!(poly_subst(&p, &asg, &c).unwrap(), Polynomial::one());

        let id: BTreeMap<_, _> = [(Variable::b(1, 0), b(1, 0))].into();
        assert_eq!(poly_subst(&b(1, 0), &id, &c).unwrap(), b(1, 0));

        let p = &b(1, -1) * &b(2, 1);
        let asg: BTreeMap<_, _> = [
            (Variable::b(1, -1), &b(1, -1) + &b(2, -1)),
            (Variable::b(2, 1), b(2, 1)),
        ]
        .into();
        let expect = &(&b(1, -1) * &b(2, 1)) + &(&b(2, -1) * &b(2, 1));
        assert_eq!(poly_subst(&p, &asg, &c).unwrap(), expect);
    }

    #[test]
    fn subst_reports_missing_variable() {
        let p = &b(1, 0) * &b(2, 0);
        let asg: BTreeMap<_, _> = [(Variable::b(1, 0), Polynomial::one())].into();
        assert_eq!(
            poly_subst(&p, &asg, &ctx(2, 2, 2)),
            Err(Error::MissingAssignment(Variable::b(2, 0)))
        );
    }

    #[test]
    fn rendering_is_canonical() {
        let p = &(&b(2, 1).scale(&rat(1, 6)) * &b(1, 0)) - &Polynomial::int(1);
        assert_eq!(p.to_string(), "-1 + 1/6*b[1,0]*b[2,1]");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
