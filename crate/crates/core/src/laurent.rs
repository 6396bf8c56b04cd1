//! Finite-window Laurent series in `t` with polynomial coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::context::TruncationContext;
use crate::error::{Error, Result};
use crate::exactpoly::{int, Polynomial, Variable};

/// What is known about coefficients above the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Every coefficient above `hi` is zero: the series is a Laurent polynomial.
    Zero,
    /// Coefficients above `hi` were truncated away and are not known.
    Unknown,
}

/// A Laurent series exact on the window `[lo, hi]` and zero below `lo`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Polynomial>,
    lo: i64,
    hi: i64,
    tail: Tail,
}

impl LaurentSeries {
    pub fn new(coeffs: BTreeMap<i64, Polynomial>, lo: i64, hi: i64, tail: Tail) -> LaurentSeries {
        assert!(lo <= hi, "empty window");
        let coeffs = coeffs
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && (lo..=hi).contains(k))
            .collect();
        LaurentSeries {
            coeffs,
            lo,
            hi,
            tail,
        }
    }

    /// Laurent polynomial whose window is the hull of its support (or `[0, 0]`).
    pub fn from_coeffs<I: IntoIterator<Item = (i64, Polynomial)>>(iter: I) -> LaurentSeries {
        let mut coeffs: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for (k, c) in iter {
            coeffs.entry(k).or_default().add_assign_ref(&c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        let lo = coeffs.keys().next().copied().unwrap_or(0);
        let hi = coeffs.keys().next_back().copied().unwrap_or(0);
        LaurentSeries {
            coeffs,
            lo,
            hi,
            tail: Tail::Zero,
        }
    }

    pub fn constant(c: Polynomial) -> LaurentSeries {
        LaurentSeries::monomial(c, 0)
    }

    pub fn monomial(c: Polynomial, k: i64) -> LaurentSeries {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        LaurentSeries {
            coeffs,
            lo: k,
            hi: k,
            tail: Tail::Zero,
        }
    }

    pub fn zero() -> LaurentSeries {
        LaurentSeries::from_coeffs(std::iter::empty())
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &Polynomial)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient at `t^k`, refusing exponents outside the window.
    pub fn coeff(&self, k: i64) -> Result<Polynomial> {
        if k < self.lo || k > self.hi {
            return Err(Error::OutsideWindow {
                k,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_default())
    }

    /// Coefficient at `t^k` wherever it is determined: zero below the window and,
    /// for Laurent polynomials, above it.
    pub fn known_coeff(&self, k: i64) -> Result<Polynomial> {
        if k > self.hi && self.tail == Tail::Unknown {
            return Err(Error::WindowUnderflow {
                needed: k,
                known: self.hi,
            });
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_default())
    }

    /// Highest exponent at which a coefficient is known, `None` if unbounded.
    fn known_limit(&self) -> Option<i64> {
        match self.tail {
            Tail::Zero => None,
            Tail::Unknown => Some(self.hi),
        }
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let lo = self.lo.min(other.lo);
        let (hi, tail) = match (self.known_limit(), other.known_limit()) {
            (None, None) => (self.hi.max(other.hi), Tail::Zero),
            (Some(a), None) | (None, Some(a)) => (a, Tail::Unknown),
            (Some(a), Some(b)) => (a.min(b), Tail::Unknown),
        };
        let mut coeffs: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for s in [self, other] {
            for (k, c) in s.coeffs.range(..=hi) {
                coeffs.entry(*k).or_default().add_assign_ref(c);
            }
        }
        LaurentSeries::new(coeffs, lo, hi.max(lo), tail)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by a polynomial.
    pub fn scale(&self, p: &Polynomial, ctx: &TruncationContext) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (*k, c.mul(p, ctx)))
            .collect();
        LaurentSeries::new(coeffs, self.lo, self.hi, self.tail)
    }

    pub fn shift(&self, by: i64) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(k, c)| (k + by, c.clone())).collect(),
            lo: self.lo + by,
            hi: self.hi + by,
            tail: self.tail,
        }
    }

    /// Window of a product: exact up to the first exponent that could see an
    /// unknown coefficient of either factor.
    fn product_window(&self, other: &LaurentSeries) -> (i64, i64, Tail) {
        let lo = self.lo + other.lo;
        let limits: Vec<i64> = [
            self.known_limit().map(|h| h + other.lo),
            other.known_limit().map(|h| h + self.lo),
        ]
        .into_iter()
        .flatten()
        .collect();
        match limits.iter().min() {
            None => (lo, self.hi + other.hi, Tail::Zero),
            Some(&h) => (lo, h, Tail::Unknown),
        }
    }

    pub fn mul(&self, other: &LaurentSeries, ctx: &TruncationContext) -> Result<LaurentSeries> {
        let (lo, hi, tail) = self.product_window(other);
        if hi < lo {
            return Err(Error::WindowUnderflow {
                needed: lo,
                known: hi,
            });
        }
        let mut coeffs: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in other.coeffs.range(..=hi - k1) {
                let prod = c1.mul(c2, ctx);
                if !prod.is_zero() {
                    coeffs.entry(k1 + k2).or_default().add_assign_ref(&prod);
                }
            }
        }
        Ok(LaurentSeries::new(coeffs, lo, hi, tail))
    }

    /// Termwise `d/dt`.
    pub fn derive_t(&self) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, c)| (k - 1, c.scale(&int(*k))))
            .collect();
        LaurentSeries::new(coeffs, self.lo - 1, self.hi - 1, self.tail)
    }

    /// Coefficientwise polynomial substitution (used for restrictions and
    /// coordinate changes of the coefficient ring).
    pub fn map_coeffs<F: Fn(&Polynomial) -> Polynomial>(&self, f: F) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, f(c))).collect();
        LaurentSeries::new(coeffs, self.lo, self.hi, self.tail)
    }

    pub fn reduce(&self, ctx: &TruncationContext) -> LaurentSeries {
        self.map_coeffs(|c| c.reduce(ctx))
    }

    /// Drops everything above `hi`, marking the tail unknown.
    pub fn truncate_above(&self, hi: i64) -> LaurentSeries {
        if hi >= self.hi && self.tail == Tail::Zero {
            return self.clone();
        }
        let hi = hi.min(self.hi).max(self.lo);
        LaurentSeries::new(self.coeffs.clone(), self.lo, hi, Tail::Unknown)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (idx, (k, c)) in self.coeffs.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*t^{}", c, k)?;
        }
        if self.tail == Tail::Unknown {
            write!(f, " + O(t^{})", self.hi + 1)?;
        }
        Ok(())
    }
}

/// The evaluation series `sum_{n=-M}^{L} b^i_n t^n` of chart `i`.
pub fn ev_series(chart: usize, ctx: &TruncationContext) -> Result<LaurentSeries> {
    if chart == 0 || chart > ctx.charts {
        return Err(Error::ChartOutOfRange {
            chart,
            charts: ctx.charts,
        });
    }
    let coeffs = (-ctx.neg..=ctx.pos)
        .map(|n| (n, Polynomial::var(Variable::b(chart, n)).reduce(ctx)))
        .collect();
    Ok(LaurentSeries::new(coeffs, -ctx.neg, ctx.pos, Tail::Zero))
}

/// Substitutes `loops[i-1]` for the chart coordinate `b^i` in `f`. Variables of
/// other families are treated as scalars.
pub fn series_compose(
    f: &Polynomial,
    loops: &[LaurentSeries],
    ctx: &TruncationContext,
) -> Result<LaurentSeries> {
    let mut powers: HashMap<(usize, u32), LaurentSeries> = HashMap::new();
    let mut total = LaurentSeries::zero();
    let mut first = true;
    for (m, c) in f.terms() {
        let (chart_part, scalar_part) = m.split(|v| matches!(v, Variable::Coord(_)));
        let scalar = Polynomial::term(c.clone(), scalar_part).reduce(ctx);
        let mut acc = LaurentSeries::constant(scalar);
        for &(v, e) in chart_part.factors() {
            let chart = v.chart().expect("coordinate variable");
            if chart == 0 || chart > loops.len() {
                return Err(Error::ChartOutOfRange {
                    chart,
                    charts: loops.len(),
                });
            }
            if !powers.contains_key(&(chart, e)) {
                let base = &loops[chart - 1];
                let mut p = LaurentSeries::constant(Polynomial::one());
                for _ in 0..e {
                    p = p.mul(base, ctx)?;
                }
                powers.insert((chart, e), p);
            }
            acc = acc.mul(&powers[&(chart, e)], ctx)?;
        }
        total = if first { acc } else { total.add(&acc) };
        first = false;
    }
    Ok(total)
}

pub fn series_derive_t(s: &LaurentSeries) -> LaurentSeries {
    s.derive_t()
}

pub fn series_coeff(s: &LaurentSeries, k: i64) -> Result<Polynomial> {
    s.coeff(k)
}

/// Coefficient of `t^-1` in a product of series, computed without forming the
/// full product.
pub fn product_residue(factors: &[&LaurentSeries], ctx: &TruncationContext) -> Result<Polynomial> {
    product_coeff(factors, -1, ctx)
}

pub fn product_coeff(
    factors: &[&LaurentSeries],
    target: i64,
    ctx: &TruncationContext,
) -> Result<Polynomial> {
    if factors.is_empty() {
        return Ok(if target == 0 {
            Polynomial::one()
        } else {
            Polynomial::zero()
        });
    }
    let lo_sum: i64 = factors.iter().map(|s| s.lo).sum();
    for s in factors {
        if let Some(h) = s.known_limit() {
            let needed = target - (lo_sum - s.lo);
            if needed > h {
                return Err(Error::WindowUnderflow {
                    needed,
                    known: h,
                });
            }
        }
    }
    let n = factors.len();
    let mut suffix_lo = vec![0i64; n + 1];
    let mut suffix_hi = vec![0i64; n + 1];
    for j in (0..n).rev() {
        let hi_j = factors[j].coeffs.keys().next_back().copied().unwrap_or(factors[j].lo);
        let lo_j = factors[j].coeffs.keys().next().copied().unwrap_or(factors[j].lo);
        suffix_lo[j] = suffix_lo[j + 1] + lo_j;
        suffix_hi[j] = suffix_hi[j + 1] + hi_j;
    }
    let mut partial: BTreeMap<i64, Polynomial> = BTreeMap::new();
    partial.insert(0, Polynomial::one());
    for (j, s) in factors.iter().enumerate() {
        let mut next: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for (k, acc) in &partial {
            for (e, c) in &s.coeffs {
                let reach = k + e;
                if reach + suffix_lo[j + 1] > target || reach + suffix_hi[j + 1] < target {
                    continue;
                }
                let prod = acc.mul(c, ctx);
                if !prod.is_zero() {
                    next.entry(reach).or_default().add_assign_ref(&prod);
                }
            }
        }
        next.retain(|_, p| !p.is_zero());
        partial = next;
        if partial.is_empty() {
            return Ok(Polynomial::zero());
        }
    }
    Ok(partial.remove(&target).unwrap_or_default())
}

impl Default for LaurentSeries {
    fn default() -> Self {
        LaurentSeries::zero()
    }
}
