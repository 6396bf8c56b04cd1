//! Residues of forms with Laurent series coefficients, the transgression of
//! forms on affine space to the loop space, the symplectic action and its
//! exponential, and reparametrization-invariance checks.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::context::TruncationContext;
use crate::derham::{self, DifferentialForm, Universe};
use crate::error::{Error, Result};
use crate::exactpoly::{int, Polynomial, Rational, Variable};
use crate::laurent::{ev_series, series_compose, LaurentSeries, Tail};
use crate::powerseries;
use crate::report::Report;

/// A form of degree at most 2 on affine space, in the chart coordinates `b[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XForm {
    form: DifferentialForm,
}

impl XForm {
    pub fn new(form: DifferentialForm) -> Result<XForm> {
        if form.universe() != Universe::X {
            return Err(Error::InvalidArgument("form is not on affine space".into()));
        }
        if form.degree() > 2 {
            return Err(Error::InvalidArgument(format!("degree {} form, at most 2 supported", form.degree())));
        }
        for (vars, c) in form.terms() {
            let bad = vars
                .iter()
                .copied()
                .chain(c.variables())
                .find(|v| !matches!(v, Variable::Coord(_)));
            if let Some(v) = bad {
                return Err(Error::InvalidArgument(format!("variable {v} is not a chart coordinate")));
            }
        }
        Ok(XForm { form })
    }

    pub fn zero(degree: usize) -> XForm {
        XForm {
            form: DifferentialForm::zero(degree, Universe::X),
        }
    }

    /// `f db^i` for a polynomial `f` in the chart coordinates.
    pub fn one_form(terms: &[(Polynomial, usize)]) -> XForm {
        let mut form = DifferentialForm::zero(1, Universe::X);
        for (f, i) in terms {
            form = form.add(&DifferentialForm::from_term(f.clone(), vec![Variable::coord(*i)], Universe::X));
        }
        XForm { form }
    }

    pub fn form(&self) -> &DifferentialForm {
        &self.form
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn d(&self, ctx: &TruncationContext) -> XForm {
        XForm {
            form: self.form.d(ctx),
        }
    }

    pub fn neg(&self) -> XForm {
        XForm { form: self.form.neg() }
    }

    pub fn is_closed(&self, ctx: &TruncationContext) -> bool {
        self.form.d(ctx).is_zero()
    }

    /// Antisymmetric coefficient matrix of a 2-form: `h_ij = w_ij` for `i < j`, `h_ji = -w_ij`.
    pub fn h(&self, i: usize, j: usize) -> Polynomial {
        if self.degree() != 2 || i == j {
            return Polynomial::zero();
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let c = self.form.coefficient(&[Variable::coord(lo), Variable::coord(hi)]);
        if i < j {
            c
        } else {
            -&c
        }
    }

    /// Largest chart index appearing in the form.
    pub fn max_chart(&self) -> usize {
        self.form
            .terms()
            .flat_map(|(vars, c)| vars.iter().copied().chain(c.variables()).collect::<Vec<_>>())
            .filter_map(|v| v.chart())
            .max()
            .unwrap_or(0)
    }
}

impl std::fmt::Display for XForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.form.fmt(f)
    }
}

/// A function on the loop space, with the flag recording whether it lies in
/// the ideal of functions vanishing on arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopFunction {
    pub poly: Polynomial,
    pub relative: bool,
}

impl LoopFunction {
    pub fn new(poly: Polynomial) -> LoopFunction {
        let relative = poly.terms().all(|(m, _)| m.neg_degree() > 0);
        LoopFunction { poly, relative }
    }
}

/// The jet `t -> a_1 t + a_2 t^2 + ... ` of a change of the loop parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordChange {
    coeffs: Vec<Rational>,
}

impl CoordChange {
    pub fn new(coeffs: Vec<Rational>) -> Result<CoordChange> {
        match coeffs.first() {
            Some(a1) if !a1.is_zero() => Ok(CoordChange { coeffs }),
            _ => Err(Error::InvalidArgument("coordinate change needs a nonzero linear coefficient".into())),
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Images of the mode variables of one chart under `b(t) -> b(phi(t))`:
    /// `b_k -> sum_n [t^k] phi^n b_n`.
    pub fn mode_images(&self, chart: usize, ctx: &TruncationContext) -> BTreeMap<Variable, Polynomial> {
        let a1 = &self.coeffs[0];
        let order = (ctx.neg + ctx.pos + 1) as usize;
        let mut q = vec![Rational::zero(); order];
        q[0] = Rational::one();
        for (j, a) in self.coeffs.iter().enumerate().skip(1) {
            if j < order {
                q[j] = a / a1;
            }
        }
        let mut out: BTreeMap<Variable, Polynomial> = BTreeMap::new();
        for n in -ctx.neg..=ctx.pos {
            let qn = powerseries::powi(&q, n, order);
            let scale = pow_rational(a1, n);
            for k in n..=ctx.pos {
                let c = &qn[(k - n) as usize] * &scale;
                if c.is_zero() {
                    continue;
                }
                out.entry(Variable::b(chart, k))
                    .or_default()
                    .add_assign_ref(&Polynomial::var(Variable::b(chart, n)).scale(&c));
            }
        }
        out
    }
}

fn pow_rational(a: &Rational, n: i64) -> Rational {
    let base = if n < 0 { a.recip() } else { a.clone() };
    let mut out = Rational::one();
    for _ in 0..n.unsigned_abs() {
        out *= &base;
    }
    out
}

/// A Laurent series with differential-form coefficients.
#[derive(Debug, Clone)]
struct FormSeries {
    coeffs: BTreeMap<i64, DifferentialForm>,
    limit: Option<i64>,
}

impl FormSeries {
    fn functions(s: &LaurentSeries) -> FormSeries {
        let (_, hi) = s.window();
        FormSeries {
            coeffs: s
                .coeffs()
                .map(|(k, c)| (k, DifferentialForm::function(c.clone(), Universe::Loop)))
                .collect(),
            limit: (s.tail() == Tail::Unknown).then_some(hi),
        }
    }

    fn differential(s: &LaurentSeries, ctx: &TruncationContext) -> FormSeries {
        let mut out = FormSeries::functions(s);
        out.coeffs = out
            .coeffs
            .into_iter()
            .map(|(k, c)| (k, c.d(ctx)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    fn support_lo(&self) -> Option<i64> {
        let first = self.coeffs.keys().next().copied();
        match (first, self.limit) {
            (Some(k), _) => Some(k),
            (None, Some(h)) => Some(h + 1),
            (None, None) => None,
        }
    }

    fn support_hi(&self) -> Option<i64> {
        match self.limit {
            Some(_) => None,
            None => self.coeffs.keys().next_back().copied(),
        }
    }
}

/// Coefficient of `t^target` in the ordered wedge product of the factors.
fn product_coeff(factors: &[FormSeries], target: i64, degree: usize, ctx: &TruncationContext) -> Result<DifferentialForm> {
    let zero = DifferentialForm::zero(degree, Universe::Loop);
    let mut los = Vec::with_capacity(factors.len());
    for f in factors {
        match f.support_lo() {
            Some(lo) => los.push(lo),
            None => return Ok(zero),
        }
    }
    let lo_sum: i64 = los.iter().sum();
    for (j, f) in factors.iter().enumerate() {
        if let Some(h) = f.limit {
            let needed = target - (lo_sum - los[j]);
            if needed > h {
                return Err(Error::WindowUnderflow { needed, known: h });
            }
        }
    }
    let n = factors.len();
    let mut suffix_lo = vec![0i64; n + 1];
    let mut suffix_hi: Vec<Option<i64>> = vec![Some(0); n + 1];
    for j in (0..n).rev() {
        suffix_lo[j] = suffix_lo[j + 1] + los[j];
        suffix_hi[j] = match (suffix_hi[j + 1], factors[j].support_hi()) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
    let mut partial: BTreeMap<i64, DifferentialForm> = BTreeMap::new();
    partial.insert(0, DifferentialForm::function(Polynomial::one(), Universe::Loop));
    for (j, f) in factors.iter().enumerate() {
        let mut next: BTreeMap<i64, DifferentialForm> = BTreeMap::new();
        for (k, acc) in &partial {
            for (e, c) in &f.coeffs {
                let reach = k + e;
                if reach + suffix_lo[j + 1] > target {
                    break;
                }
                if suffix_hi[j + 1].is_some_and(|h| reach + h < target) {
                    continue;
                }
                let prod = acc.wedge(c, ctx);
                if prod.is_zero() {
                    continue;
                }
                match next.get_mut(&reach) {
                    Some(slot) => *slot = slot.add(&prod),
                    None => {
                        next.insert(reach, prod);
                    }
                }
            }
        }
        next.retain(|_, p| !p.is_zero());
        if next.is_empty() {
            return Ok(zero);
        }
        partial = next;
    }
    Ok(partial.remove(&target).unwrap_or(zero))
}

/// `Res^p` of `sum a_0 da_1 ... da_p`:
/// `(a_0 sum_i (-1)^(p-i) d_R a_1 ... a_i' ... d_R a_p)_{-1}`.
pub fn residue_p(terms: &[(LaurentSeries, Vec<LaurentSeries>)], ctx: &TruncationContext) -> Result<DifferentialForm> {
    let Some(p) = terms.first().map(|(_, a)| a.len()) else {
        return Err(Error::InvalidArgument("empty residue input".into()));
    };
    if p == 0 || terms.iter().any(|(_, a)| a.len() != p) {
        return Err(Error::InvalidArgument("residue needs p >= 1 series slots, equal in every term".into()));
    }
    let mut out = DifferentialForm::zero(p - 1, Universe::Loop);
    for (a0, slots) in terms {
        let head = FormSeries::functions(a0);
        let diffs: Vec<FormSeries> = slots.iter().map(|s| FormSeries::differential(s, ctx)).collect();
        for i in 0..p {
            let mut factors = Vec::with_capacity(p + 1);
            factors.push(head.clone());
            for (j, s) in slots.iter().enumerate() {
                if j == i {
                    factors.push(FormSeries::functions(&s.derive_t()));
                } else {
                    factors.push(diffs[j].clone());
                }
            }
            let c = product_coeff(&factors, -1, p - 1, ctx)?;
            let sign = (p - 1 - i) % 2 == 1;
            out = if sign { out.sub(&c) } else { out.add(&c) };
        }
    }
    Ok(out.reduce(ctx))
}

/// The transgression `Res o ev^*` of a 1- or 2-form on affine space.
pub fn transgress(omega: &XForm, ctx: &TruncationContext) -> Result<DifferentialForm> {
    let p = omega.degree();
    if !(1..=2).contains(&p) {
        return Err(Error::InvalidArgument(format!("transgression of a degree {p} form")));
    }
    let loops = (1..=ctx.charts).map(|i| ev_series(i, ctx)).collect::<Result<Vec<_>>>()?;
    let mut terms = Vec::new();
    for (vars, f) in omega.form().terms() {
        let mut slots = Vec::with_capacity(p);
        for v in vars {
            let chart = v.chart().expect("chart coordinate");
            if chart == 0 || chart > ctx.charts {
                return Err(Error::ChartOutOfRange {
                    chart,
                    charts: ctx.charts,
                });
            }
            slots.push(loops[chart - 1].clone());
        }
        terms.push((series_compose(f, &loops, ctx)?, slots));
    }
    if terms.is_empty() {
        return Ok(DifferentialForm::zero(p - 1, Universe::Loop));
    }
    residue_p(&terms, ctx)
}

/// Transgression of a 1-form as a function on the loop space.
pub fn transgress_function(eta: &XForm, ctx: &TruncationContext) -> Result<Polynomial> {
    if eta.degree() != 1 {
        return Err(Error::InvalidArgument("expected a 1-form".into()));
    }
    Ok(transgress(eta, ctx)?.to_function().expect("degree 0"))
}

/// The unique relative primitive of the transgression of a closed 2-form.
pub fn tau_dinv(omega: &XForm, ctx: &TruncationContext) -> Result<LoopFunction> {
    if omega.degree() != 2 {
        return Err(Error::InvalidArgument("symplectic action needs a 2-form".into()));
    }
    if !omega.is_closed(ctx) {
        return Err(Error::NotClosed);
    }
    let tau = transgress(omega, ctx)?;
    if tau.is_zero() {
        return Ok(LoopFunction::new(Polynomial::zero()));
    }
    let beta = derham::poincare_inverse(&tau, ctx)?;
    Ok(LoopFunction::new(beta.to_function().expect("degree 0")))
}

/// `sum_{k < eps} f^k / k!`, which is `exp(f)` for relative `f` in the quotient.
pub fn exp_truncated(f: &Polynomial, ctx: &TruncationContext) -> Polynomial {
    let mut out = Polynomial::one();
    let mut power = Polynomial::one();
    let mut factorial = Rational::one();
    for k in 1..ctx.nilpotency {
        power = power.mul(f, ctx);
        if power.is_zero() {
            break;
        }
        factorial *= int(k as i64);
        out.add_scaled(&power, &factorial.recip());
    }
    out.reduce(ctx)
}

/// The exponentiated action `S(w) = exp(tau d^-1 w)`.
pub fn action_exp(omega: &XForm, ctx: &TruncationContext) -> Result<LoopFunction> {
    let f = tau_dinv(omega, ctx)?;
    Ok(LoopFunction::new(exp_truncated(&f.poly, ctx)))
}

/// Sum of modes when every monomial has the same one.
pub fn homogeneous_charge(f: &Polynomial) -> Option<i64> {
    let mut charges = f.terms().map(|(m, _)| m.charge());
    let first = charges.next().unwrap_or(0);
    charges.all(|c| c == first).then_some(first)
}

/// Checks `D_m f = 0` for `m <= m_max` on the sound sub-window and
/// `f(b(phi(t))) = f(b(t))` for each sampled change of parameter where the
/// truncation makes that comparison exact.
pub fn check_reparam_invariance(f: &Polynomial, m_max: u32, samples: &[CoordChange], ctx: &TruncationContext) -> Report {
    let f = f.reduce(ctx);
    let mut report = Report::new();
    for m in 0..=m_max as i64 {
        let image = derham::reparam_sound_part(&derham::reparam_derive_poly(&f, m, ctx), m, ctx);
        report.check(
            format!("infinitesimal.m{m}"),
            format!("the derivation t^{m} d/dt annihilates f on the sound sub-window"),
            image.leading().map(|(mono, c)| format!("{}", Polynomial::term(c.clone(), mono.clone()))),
        );
    }
    let bound = (ctx.nilpotency as i64 - 1) * ctx.neg;
    let sound = homogeneous_charge(&f).filter(|c| ctx.pos + 1 - c > bound);
    for (idx, phi) in samples.iter().enumerate() {
        let id = format!("finite.{idx}");
        let property = "f is unchanged by the sampled change of loop parameter";
        let Some(_) = sound else {
            report.skip(
                id,
                property,
                format!("exact only for charge-homogeneous f with L + 1 - charge > (eps - 1) * M = {bound}"),
            );
            continue;
        };
        let mut assignment: HashMap<Variable, Polynomial> = HashMap::new();
        for chart in 1..=ctx.charts {
            assignment.extend(phi.mode_images(chart, ctx));
        }
        let moved = f.subst_with(|v| assignment.get(&v).cloned(), ctx);
        let diff = &moved - &f;
        report.check(
            id,
            property,
            diff.leading().map(|(mono, c)| format!("{}", Polynomial::term(c.clone(), mono.clone()))),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(Variable::coord(i))
    }

    fn b(i: usize, n: i64) -> Polynomial {
        Polynomial::var(Variable::b(i, n))
    }

    fn xform2(f: Polynomial, i: usize, j: usize) -> XForm {
        XForm::new(DifferentialForm::from_term(f, vec![Variable::coord(i), Variable::coord(j)], Universe::X)).unwrap()
    }

    fn pairing(ctx: &TruncationContext) -> Polynomial {
        let r = ctx.neg.min(ctx.pos);
        let mut out = Polynomial::zero();
        for n in -r..=r {
            out.add_assign_ref(&(&b(1, -n) * &b(2, n)).scale(&int(n)));
        }
        out.reduce(ctx)
    }

    #[test]
    fn residue_examples() {
        let ctx = TruncationContext::new(2, 3, 3, 4);
        let tinv = LaurentSeries::monomial(Polynomial::one(), -1);
        let t = LaurentSeries::monomial(Polynomial::one(), 1);
        let r = residue_p(&[(tinv, vec![t])], &ctx).unwrap();
        assert_eq!(r.to_function().unwrap(), Polynomial::one());

        let r = residue_p(&[(ev_series(1, &ctx).unwrap(), vec![ev_series(2, &ctx).unwrap()])], &ctx).unwrap();
        assert_eq!(r.to_function().unwrap(), pairing(&ctx));

        let xa = Variable::aux(1);
        let ya = Variable::aux(2);
        let one = LaurentSeries::constant(Polynomial::one());
        let a1 = LaurentSeries::monomial(Polynomial::var(xa), 1);
        let a2 = LaurentSeries::monomial(Polynomial::var(ya), -1);
        let r2 = residue_p(&[(one, vec![a1.clone(), a2.clone()])], &ctx).unwrap();
        let expect = DifferentialForm::from_term(-&Polynomial::var(xa), vec![ya], Universe::Loop)
            .sub(&DifferentialForm::from_term(Polynomial::var(ya), vec![xa], Universe::Loop));
        assert_eq!(r2, expect);
        let r1 = residue_p(&[(a1, vec![a2])], &ctx).unwrap();
        assert_eq!(r1.d(&ctx), r2);
    }

    #[test]
    fn residue_needs_known_coefficients() {
        let ctx = TruncationContext::new(1, 2, 2, 3);
        let known = LaurentSeries::new([(0, Polynomial::one())].into(), 0, 0, Tail::Unknown);
        let pole = LaurentSeries::monomial(Polynomial::one(), -3);
        let err = residue_p(&[(pole, vec![known])], &ctx).unwrap_err();
        assert!(matches!(err, Error::WindowUnderflow { .. }));
    }

    #[test]
    fn transgress_examples() {
        let ctx = TruncationContext::new(2, 3, 2, 4);
        let db1 = XForm::one_form(&[(Polynomial::one(), 1)]);
        assert!(transgress(&db1, &ctx).unwrap().is_zero());
        let b1db1 = XForm::one_form(&[(x(1), 1)]);
        assert!(transgress(&b1db1, &ctx).unwrap().is_zero());
        let b1db2 = XForm::one_form(&[(x(1), 2)]);
        assert_eq!(transgress_function(&b1db2, &ctx).unwrap(), pairing(&ctx));
    }

    #[test]
    fn tau_dinv_examples() {
        let ctx = TruncationContext::new(2, 3, 3, 4);
        let w = xform2(Polynomial::one(), 1, 2);
        assert_eq!(tau_dinv(&w, &ctx).unwrap().poly, pairing(&ctx));
        assert!(tau_dinv(&XForm::zero(2), &ctx).unwrap().poly.is_zero());
        let eta = XForm::one_form(&[(&x(1) * &x(2), 2)]);
        assert_eq!(tau_dinv(&eta.d(&ctx), &ctx).unwrap().poly, transgress_function(&eta, &ctx).unwrap());
        let not_closed = XForm::new(DifferentialForm::from_term(x(3), vec![Variable::coord(1), Variable::coord(2)], Universe::X)).unwrap();
        assert_eq!(tau_dinv(&not_closed, &TruncationContext::new(3, 1, 1, 2)), Err(Error::NotClosed));
    }

    #[test]
    fn action_examples() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        assert!(action_exp(&XForm::zero(2), &ctx).unwrap().poly.is_one());
        let w = xform2(Polynomial::one(), 1, 2);
        let f = pairing(&ctx);
        let expect = &(&Polynomial::one() + &f) + &f.mul(&f, &ctx).scale(&rat(1, 2));
        let s = action_exp(&w, &ctx).unwrap().poly;
        assert_eq!(s, expect);
        let s_neg = action_exp(&w.neg(), &ctx).unwrap().poly;
        assert!(s.mul(&s_neg, &ctx).is_one());
    }

    #[test]
    fn h_accessor_is_antisymmetric() {
        let w = xform2(Polynomial::int(3), 1, 2);
        assert_eq!(w.h(1, 2), Polynomial::int(3));
        assert_eq!(w.h(2, 1), Polynomial::int(-3));
        assert!(w.h(1, 1).is_zero());
    }

    #[test]
    fn invariance_examples() {
        let ctx = TruncationContext::new(2, 2, 6, 3);
        let f = transgress_function(&XForm::one_form(&[(x(1), 2)]), &ctx).unwrap();
        let phi = CoordChange::new(vec![int(2), int(1), rat(-1, 3)]).unwrap();
        let report = check_reparam_invariance(&f, 3, std::slice::from_ref(&phi), &ctx);
        assert!(report.passed(), "{report}");
        assert_eq!(report.count(crate::report::Status::Skipped), 0);

        let bad = check_reparam_invariance(&b(1, -1), 1, &[phi], &ctx);
        assert!(!bad.passed());
        let fail = bad.failures().find(|r| r.id == "infinitesimal.m1").unwrap();
        assert_eq!(fail.witness.as_deref(), Some("-1*b[1,-1]"));

        assert!(check_reparam_invariance(&Polynomial::zero(), 3, &[], &ctx).passed());
    }

    #[test]
    fn coordinate_change_identity() {
        let ctx = TruncationContext::new(1, 2, 2, 3);
        let id = CoordChange::new(vec![int(1)]).unwrap();
        let images = id.mode_images(1, &ctx);
        for n in -2..=2 {
            assert_eq!(images[&Variable::b(1, n)], b(1, n));
        }
    }
}
