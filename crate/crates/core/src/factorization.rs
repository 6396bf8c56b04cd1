//! Multi-point loop coordinates over the affine line and the factorization
//! property of transgressed functions.
//!
//! For points `lambda_1..lambda_k` with `P(t) = prod (t - lambda_i)` the global
//! loop is `b^j(t) = sum_{n, nu} b^j_{n,nu} t^{nu-1} P(t)^n`. Functions are
//! kept as finite sums `c t^a P^e` with coefficients polynomial in the
//! `lambda_i` and the `b^j_{n,nu}`, so everything stays polynomial.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::context::TruncationContext;
use crate::error::{Error, Result};
use crate::exactpoly::{int, rat, Polynomial, Rational, Variable};
use crate::heisenberg::generalized_binomial;
use crate::par::{self, Execution};
use crate::powerseries;
use crate::report::Report;
use crate::transgression::{transgress_function, XForm};

/// Points of the affine line, symbolic (`lam[i]`) or exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfig {
    lambdas: Vec<Polynomial>,
    values: Option<Vec<Rational>>,
    distinct: bool,
}

impl PointConfig {
    pub fn symbolic(k: usize) -> PointConfig {
        PointConfig {
            lambdas: (1..=k).map(|i| Polynomial::var(Variable::lam(i))).collect(),
            values: None,
            distinct: true,
        }
    }

    pub fn rational(values: Vec<Rational>) -> PointConfig {
        let distinct = values
            .iter()
            .enumerate()
            .all(|(i, x)| values[..i].iter().all(|y| y != x));
        PointConfig {
            lambdas: values.iter().cloned().map(Polynomial::constant).collect(),
            values: Some(values),
            distinct,
        }
    }

    pub fn size(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_distinct(&self) -> bool {
        self.distinct
    }

    pub fn values(&self) -> Option<&[Rational]> {
        self.values.as_deref()
    }

    pub fn lambda(&self, i: usize) -> &Polynomial {
        &self.lambdas[i]
    }

    /// Coefficients of `P(t)`, lowest degree first.
    pub fn p_coeffs(&self) -> UPoly {
        let mut p = vec![Polynomial::one()];
        for l in &self.lambdas {
            p = upoly_mul(&p, &[-l, Polynomial::one()]);
        }
        p
    }
}

/// A polynomial in `t`, lowest degree first.
pub type UPoly = Vec<Polynomial>;

fn upoly_mul(a: &[Polynomial], b: &[Polynomial]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Polynomial::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j].add_assign_ref(&x.mul_exact(y));
        }
    }
    out
}

fn upoly_pow(a: &[Polynomial], e: u32) -> UPoly {
    (0..e).fold(vec![Polynomial::one()], |acc, _| upoly_mul(&acc, a))
}

fn upoly_trim(mut a: UPoly) -> UPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

/// Division with remainder by a monic polynomial.
fn upoly_divmod_monic(a: &[Polynomial], m: &[Polynomial]) -> (UPoly, UPoly) {
    let dm = m.len() - 1;
    let mut rem = upoly_trim(a.to_vec());
    if rem.len() <= dm {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Polynomial::zero(); rem.len() - dm];
    while rem.len() > dm {
        let top = rem.len() - 1;
        let lead = rem[top].clone();
        let shift = top - dm;
        for (i, c) in m.iter().enumerate() {
            let prod = lead.mul_exact(c);
            rem[shift + i] = &rem[shift + i] - &prod;
        }
        quot[shift] = lead;
        rem = upoly_trim(rem);
    }
    (quot, rem)
}

/// A finite sum `sum c_{a,e} t^a P(t)^e`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TExpr {
    terms: BTreeMap<(u32, i64), Polynomial>,
}

impl TExpr {
    pub fn zero() -> TExpr {
        TExpr::default()
    }

    pub fn one() -> TExpr {
        let mut out = TExpr::zero();
        out.add_term(0, 0, &Polynomial::one());
        out
    }

    pub fn add_term(&mut self, a: u32, e: i64, c: &Polynomial) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, e)).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero() {
            self.terms.remove(&(a, e));
        }
    }

    pub fn add(&self, other: &TExpr) -> TExpr {
        let mut out = self.clone();
        for (&(a, e), c) in &other.terms {
            out.add_term(a, e, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, i64), &Polynomial)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn mul(&self, other: &TExpr, ctx: &TruncationContext) -> TExpr {
        let mut out = TExpr::zero();
        for (&(a1, e1), c1) in &self.terms {
            for (&(a2, e2), c2) in &other.terms {
                out.add_term(a1 + a2, e1 + e2, &c1.mul(c2, ctx));
            }
        }
        out
    }

    pub fn scale(&self, p: &Polynomial, ctx: &TruncationContext) -> TExpr {
        let mut out = TExpr::zero();
        for (&(a, e), c) in &self.terms {
            out.add_term(a, e, &c.mul(p, ctx));
        }
        out
    }

    /// `d/dt`, using `P'` with coefficients `dp`.
    pub fn derive(&self, dp: &[Polynomial], ctx: &TruncationContext) -> TExpr {
        let mut out = TExpr::zero();
        for (&(a, e), c) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, e, &c.scale(&int(a as i64)));
            }
            if e != 0 {
                for (r, d) in dp.iter().enumerate() {
                    if !d.is_zero() {
                        out.add_term(a + r as u32, e - 1, &c.mul(d, ctx).scale(&int(e)));
                    }
                }
            }
        }
        out
    }

    pub fn map_coeffs<F: Fn(&Polynomial) -> Polynomial>(&self, f: F) -> TExpr {
        let mut out = TExpr::zero();
        for (&(a, e), c) in &self.terms {
            out.add_term(a, e, &f(c));
        }
        out
    }
}

fn derivative(p: &[Polynomial]) -> UPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(r, c)| c.scale(&int(r as i64)))
        .collect()
}

/// The global loop `b^j(t) = sum_{n,nu} b^j_{n,nu} t^{nu-1} P(t)^n` of every chart.
#[derive(Debug, Clone)]
pub struct GlobalLoop {
    cfg: PointConfig,
    charts: Vec<TExpr>,
}

impl GlobalLoop {
    pub fn new(cfg: &PointConfig, ctx: &TruncationContext) -> GlobalLoop {
        let k = cfg.size();
        let charts = (1..=ctx.charts)
            .map(|j| {
                let mut s = TExpr::zero();
                for n in -ctx.neg..=ctx.pos {
                    for nu in 1..=k {
                        s.add_term(nu as u32 - 1, n, &Polynomial::var(Variable::b_at(j, n, nu)).reduce(ctx));
                    }
                }
                s
            })
            .collect();
        GlobalLoop {
            cfg: cfg.clone(),
            charts,
        }
    }

    pub fn chart(&self, j: usize) -> &TExpr {
        &self.charts[j - 1]
    }

    pub fn config(&self) -> &PointConfig {
        &self.cfg
    }

    /// Substitutes the loop series for the chart coordinates of `f`.
    pub fn compose(&self, f: &Polynomial, ctx: &TruncationContext) -> Result<TExpr> {
        let mut powers: HashMap<(usize, u32), TExpr> = HashMap::new();
        let mut out = TExpr::zero();
        for (m, c) in f.terms() {
            let mut acc = TExpr::one().scale(&Polynomial::constant(c.clone()), ctx);
            for &(v, e) in m.factors() {
                let Variable::Coord(j) = v else {
                    return Err(Error::InvalidArgument(format!("{v} is not a chart coordinate")));
                };
                let j = j as usize;
                if j == 0 || j > self.charts.len() {
                    return Err(Error::ChartOutOfRange {
                        chart: j,
                        charts: self.charts.len(),
                    });
                }
                if !powers.contains_key(&(j, e)) {
                    let p = (0..e).fold(TExpr::one(), |acc, _| acc.mul(&self.charts[j - 1], ctx));
                    powers.insert((j, e), p);
                }
                acc = acc.mul(&powers[&(j, e)], ctx);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }
}

/// `g(t)` with `phi^* eta = g(t) dt` for the global loop of `cfg`.
pub fn global_pullback(eta: &XForm, cfg: &PointConfig, ctx: &TruncationContext) -> Result<TExpr> {
    if eta.degree() != 1 {
        return Err(Error::InvalidArgument("global pullback of a non-1-form".into()));
    }
    let gl = GlobalLoop::new(cfg, ctx);
    let dp = derivative(&cfg.p_coeffs());
    let mut out = TExpr::zero();
    for (vars, f) in eta.form().terms() {
        let chart = vars[0].chart().expect("chart coordinate");
        if chart == 0 || chart > ctx.charts {
            return Err(Error::ChartOutOfRange {
                chart,
                charts: ctx.charts,
            });
        }
        let db = gl.chart(chart).derive(&dp, ctx);
        out = out.add(&gl.compose(f, ctx)?.mul(&db, ctx));
    }
    Ok(out)
}

/// Sum of the residues of `g dt` at the roots of `P`, computed at infinity:
/// `t^a P^{-d}` contributes `[x^r] prod_i (1 - lambda_i x)^{-d}` with `r = a + 1 - k d`.
pub fn total_residue(g: &TExpr, cfg: &PointConfig, ctx: &TruncationContext) -> Result<Polynomial> {
    let k = cfg.size() as i64;
    let mut needed: BTreeMap<i64, i64> = BTreeMap::new();
    for ((a, e), _) in g.terms() {
        if e < 0 {
            let r = a as i64 + 1 + k * e;
            if r >= 0 {
                let slot = needed.entry(-e).or_insert(0);
                *slot = (*slot).max(r);
            }
        }
    }
    let mut expansions: HashMap<i64, Vec<Polynomial>> = HashMap::new();
    for (&d, &rmax) in &needed {
        let order = rmax as usize + 1;
        let mut acc = vec![Polynomial::zero(); order];
        acc[0] = Polynomial::one();
        for i in 0..cfg.size() {
            let lam = cfg.lambda(i);
            let mut factor = Vec::with_capacity(order);
            let mut power = Polynomial::one();
            for s in 0..order as i64 {
                factor.push(power.scale(&generalized_binomial(d + s - 1, s as u32)));
                power = power.mul_exact(lam);
            }
            acc = upoly_mul(&acc, &factor);
            acc.truncate(order);
        }
        expansions.insert(d, acc);
    }
    let mut out = Polynomial::zero();
    for ((a, e), c) in g.terms() {
        if e >= 0 {
            continue;
        }
        let r = a as i64 + 1 + k * e;
        if r < 0 {
            continue;
        }
        let h = expansions[&-e].get(r as usize).ok_or_else(|| {
            Error::ExpansionOrderExceeded(format!("needed order {r} of the expansion of P^{e} at infinity"))
        })?;
        out.add_assign_ref(&c.mul(h, ctx));
    }
    Ok(out.reduce(ctx))
}

fn require_distinct(cfg: &PointConfig) -> Result<&[Rational]> {
    match cfg.values() {
        Some(v) if cfg.is_distinct() => Ok(v),
        Some(_) => Err(Error::PointsNotDistinct),
        None => Err(Error::InvalidArgument("rational points required".into())),
    }
}

/// Power series in `s = t - lambda_i` of `(s + lambda_i)^a prod_{i' != i} (s + lambda_i - lambda_i')^e`.
fn local_factor(values: &[Rational], i: usize, a: u32, e: i64, order: usize) -> Vec<Rational> {
    let mut out = powerseries::one(order);
    let shifted = vec![values[i].clone(), Rational::one()];
    out = powerseries::mul(&out, &powerseries::powi(&shifted, a as i64, order), order);
    for (i2, l2) in values.iter().enumerate() {
        if i2 != i {
            let base = vec![&values[i] - l2, Rational::one()];
            out = powerseries::mul(&out, &powerseries::powi(&base, e, order), order);
        }
    }
    out
}

/// Sum over the points of the residue of `g dt` computed from local expansions.
pub fn local_residues(g: &TExpr, cfg: &PointConfig, ctx: &TruncationContext) -> Result<Polynomial> {
    let values = require_distinct(cfg)?;
    let mut out = Polynomial::zero();
    for i in 0..values.len() {
        for ((a, e), c) in g.terms() {
            if e >= 0 {
                continue;
            }
            let q = (-1 - e) as usize;
            let series = local_factor(values, i, a, e, q + 1);
            if !series[q].is_zero() {
                out.add_scaled(c, &series[q]);
            }
        }
    }
    Ok(out.reduce(ctx))
}

/// Single-point mode coordinates `b^j_p`, `-M <= p <= p_max`, of the global loop
/// re-expanded at each point, as polynomials in the `b^j_{n,nu}`.
pub fn expand_at_points(cfg: &PointConfig, ctx: &TruncationContext, p_max: i64) -> Result<Vec<BTreeMap<Variable, Polynomial>>> {
    let values = require_distinct(cfg)?;
    let k = values.len();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut coords: BTreeMap<Variable, Polynomial> = BTreeMap::new();
        for n in -ctx.neg..=ctx.pos {
            let order = (p_max - n + 1).max(0) as usize;
            if order == 0 {
                continue;
            }
            for nu in 1..=k {
                let series = local_factor(values, i, nu as u32 - 1, n, order);
                for (idx, c) in series.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let p = n + idx as i64;
                    for j in 1..=ctx.charts {
                        coords
                            .entry(Variable::b(j, p))
                            .or_default()
                            .add_assign_ref(&Polynomial::var(Variable::b_at(j, n, nu)).scale(c));
                    }
                }
            }
        }
        out.push(coords);
    }
    Ok(out)
}

/// `f_{C^J}` for `k` symbolic points: the total residue of the global pullback.
pub fn family_value(eta: &XForm, k: usize, ctx: &TruncationContext) -> Result<Polynomial> {
    let cfg = PointConfig::symbolic(k);
    total_residue(&global_pullback(eta, &cfg, ctx)?, &cfg, ctx)
}

/// Sets `lambda_j := lambda_{merge[j]}` (merge is 0-based onto `0..|I|`).
pub fn restrict_diagonal(f: &Polynomial, merge: &[usize], ctx: &TruncationContext) -> Polynomial {
    f.subst_with(
        |v| match v {
            Variable::Lambda(j) if (j as usize) >= 1 && (j as usize) <= merge.len() => {
                Some(Polynomial::var(Variable::lam(merge[j as usize - 1] + 1)))
            }
            _ => None,
        },
        ctx,
    )
}

/// Expression of the `|I|`-point coordinates through the `|J|`-point ones on
/// the diagonal given by `merge`, obtained by matching `t^{mu-1} P_I^n` expansions.
#[derive(Debug, Clone)]
pub struct Reindexing {
    images: HashMap<Variable, Polynomial>,
    neg: i64,
    pos: i64,
}

impl Reindexing {
    /// Window of `|I|`-point modes that receive a nonzero image.
    pub fn window(&self) -> (i64, i64) {
        (self.neg, self.pos)
    }

    /// Substitutes the images into a function of the `|I|`-point coordinates;
    /// coordinates without an image vanish on the diagonal.
    pub fn apply(&self, f: &Polynomial, ctx: &TruncationContext) -> Polynomial {
        f.subst_with(
            |v| match v {
                Variable::B { point, .. } if point >= 1 => {
                    Some(self.images.get(&v).cloned().unwrap_or_default())
                }
                _ => None,
            },
            ctx,
        )
    }
}

pub fn reindex_map(merge: &[usize], ctx: &TruncationContext) -> Reindexing {
    let size_i = merge.iter().max().map_or(0, |m| m + 1);
    let size_j = merge.len();
    let s = (size_j - size_i) as i64;
    let mut mult = vec![0u32; size_i];
    for &m in merge {
        mult[m] += 1;
    }
    let cfg = PointConfig::symbolic(size_i);
    let p_i = cfg.p_coeffs();
    let linear = |i: usize| vec![-cfg.lambda(i), Polynomial::one()];
    let mut q = vec![Polynomial::one()];
    let mut u = vec![Polynomial::one()];
    for i in 0..size_i {
        q = upoly_mul(&q, &upoly_pow(&linear(i), mult[i] - 1));
        for i2 in 0..size_i {
            if i2 != i {
                u = upoly_mul(&u, &upoly_pow(&linear(i2), mult[i] - 1));
            }
        }
    }
    let mut images: HashMap<Variable, Polynomial> = HashMap::new();
    let (mut neg, mut pos) = (0i64, 0i64);
    for n in -ctx.neg..=ctx.pos {
        let (factor, base) = if n >= 0 {
            (upoly_pow(&q, n as u32), n)
        } else {
            (upoly_pow(&u, (-n) as u32), n * (1 + s))
        };
        for nu in 1..=size_j {
            let mut shifted = vec![Polynomial::zero(); nu - 1];
            shifted.extend(factor.iter().cloned());
            let mut rest = upoly_trim(shifted);
            let mut digit = 0i64;
            while !rest.is_empty() {
                let (quot, rem) = upoly_divmod_monic(&rest, &p_i);
                for (mu0, c) in rem.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mode = base + digit;
                    neg = neg.max(-mode);
                    pos = pos.max(mode);
                    for j in 1..=ctx.charts {
                        images
                            .entry(Variable::b_at(j, mode, mu0 + 1))
                            .or_default()
                            .add_assign_ref(&Polynomial::var(Variable::b_at(j, n, nu)).mul_exact(c));
                    }
                }
                rest = upoly_trim(quot);
                digit += 1;
            }
        }
    }
    Reindexing { images, neg, pos }
}

/// Renames single-point coordinates `b[j,n]` to the point-1 coordinates `b[j,n,1]`.
pub fn at_point_one(f: &Polynomial) -> Polynomial {
    f.subst_with(
        |v| match v {
            Variable::B { chart, mode, point: 0 } => {
                Some(Polynomial::var(Variable::b_at(chart as usize, mode as i64, 1)))
            }
            _ => None,
        },
        &TruncationContext::new(1, i64::from(i32::MAX), i64::from(i32::MAX), u32::MAX),
    )
}

/// Surjections `J -> I` up to relabeling of `I`, as 0-based label vectors.
pub fn merges(size_j: usize, size_i: usize) -> Vec<Vec<usize>> {
    fn go(j: usize, size_j: usize, size_i: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == size_j {
            if used == size_i {
                out.push(cur.clone());
            }
            return;
        }
        for label in 0..=used.min(size_i - 1) {
            cur.push(label);
            go(j + 1, size_j, size_i, used.max(label + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size_i >= 1 && size_i <= size_j {
        go(0, size_j, size_i, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn merge_label(merge: &[usize]) -> String {
    merge.iter().map(|m| (m + 1).to_string()).collect::<Vec<_>>().join("")
}

fn witness(p: &Polynomial) -> Option<String> {
    p.leading().map(|(m, c)| Polynomial::term(c.clone(), m.clone()).to_string())
}

fn lambda_degree(f: &Polynomial) -> u32 {
    f.max_degree_in(|v| matches!(v, Variable::Lambda(_)))
}

fn sample_points(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(k);
    while out.len() < k {
        let num = rng.random_range(-9i64..=9);
        let den = rng.random_range(1i64..=3);
        let x = rat(num, den);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Options of [`verify_factorizing`].
#[derive(Debug, Clone)]
pub struct FactorOptions {
    pub samples: usize,
    pub j_max: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            samples: 5,
            j_max: 3,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// Checks that the single-point function `f` (default: the transgression of
/// `eta`) extends to the multi-point family defined by `eta`: agreement at one
/// point, on every diagonal, additivity at distinct points, and consistency of
/// iterated merges.
pub fn verify_factorizing(eta: &XForm, candidate: Option<&Polynomial>, ctx: &TruncationContext, opts: &FactorOptions) -> Result<Report> {
    if !(1..=3).contains(&opts.j_max) {
        return Err(Error::InvalidArgument(format!("J_max = {} outside 1..=3", opts.j_max)));
    }
    let mut report = Report::new();
    let deep = ctx.pos.max((ctx.nilpotency as i64 - 1) * ctx.neg);
    let single = |window: &TruncationContext| -> Result<Polynomial> {
        match candidate {
            Some(f) => Ok(f.clone()),
            None => transgress_function(eta, window),
        }
    };
    let family: Vec<Polynomial> = (1..=opts.j_max).map(|k| family_value(eta, k, ctx)).collect::<Result<_>>()?;

    let f_base = single(ctx)?;
    report.check(
        "base",
        "the one-point family member equals the single-point function",
        witness(&(&family[0] - &at_point_one(&f_base.reduce(ctx)))),
    );
    report.check(
        "translation",
        "the one-point family member does not depend on the point",
        (lambda_degree(&family[0]) > 0).then(|| "depends on lam[1]".to_string()),
    );
    for (idx, fj) in family.iter().enumerate() {
        let bad = fj.terms().find(|(m, _)| m.neg_degree() == 0);
        report.check(
            format!("relative.J{}", idx + 1),
            "the family member vanishes on arcs",
            bad.map(|(m, c)| Polynomial::term(c.clone(), m.clone()).to_string()),
        );
    }

    for size_j in 2..=opts.j_max {
        let fj = &family[size_j - 1];
        for size_i in 1..size_j {
            for merge in merges(size_j, size_i) {
                let re = reindex_map(&merge, ctx);
                let (neg, pos) = re.window();
                let wide = ctx.with_window(neg.max(ctx.neg), pos.max(ctx.pos));
                let fi = if size_i == 1 {
                    at_point_one(&single(&wide)?)
                } else {
                    family_value(eta, size_i, &wide)?
                };
                let lhs = restrict_diagonal(fj, &merge, ctx);
                let rhs = re.apply(&fi, ctx);
                report.check(
                    format!("diagonal.J{size_j}.{}", merge_label(&merge)),
                    "restricting to the diagonal gives the merged family member",
                    witness(&(&lhs - &rhs)),
                );
            }
        }
    }

    if opts.j_max == 3 {
        let f_deep_ctx = |neg: i64, pos: i64| ctx.with_window(neg.max(ctx.neg), pos.max(ctx.pos));
        let direct = reindex_map(&[0, 0, 0], ctx);
        for first in merges(3, 2) {
            let r1 = reindex_map(&first, ctx);
            let (n1, p1) = r1.window();
            let mid = f_deep_ctx(n1, p1);
            let r2 = reindex_map(&[0, 0], &mid);
            let (n2, p2) = r2.window();
            let (nd, pd) = direct.window();
            let big = f_deep_ctx(n2.max(nd), p2.max(pd));
            let f1 = at_point_one(&single(&big)?);
            let two_step = r1.apply(&r2.apply(&f1, &mid), ctx);
            let two_step = restrict_diagonal(&two_step, &[0, 0, 0], ctx);
            let one_step = direct.apply(&f1, ctx);
            report.check(
                format!("merge.{}", merge_label(&first)),
                "merging three points in two steps agrees with merging them at once",
                witness(&(&two_step - &one_step)),
            );
        }
    }

    let deep_ctx = ctx.with_window(ctx.neg, deep);
    let f_local = single(&deep_ctx)?.reduce(&deep_ctx);
    let p_max = f_local
        .variables()
        .iter()
        .filter_map(|v| v.b_mode())
        .max()
        .unwrap_or(0)
        .max(ctx.pos);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for size_j in 2..=opts.j_max {
        let fj = &family[size_j - 1];
        let cfg_sym = PointConfig::symbolic(size_j);
        let g = global_pullback(eta, &cfg_sym, ctx)?;
        let count = opts.samples.max(5).max(lambda_degree(fj) as usize + 1);
        let configs: Vec<Vec<Rational>> = (0..count).map(|_| sample_points(&mut rng, size_j)).collect();
        let outcomes = par::map(opts.exec, &configs, |values| -> Result<(Option<String>, Option<String>)> {
            let cfg = PointConfig::rational(values.clone());
            let at = |p: &Polynomial| {
                p.subst_with(
                    |v| match v {
                        Variable::Lambda(i) => Some(cfg.lambda(i as usize - 1).clone()),
                        _ => None,
                    },
                    ctx,
                )
            };
            let fj_at = at(fj);
            let local = expand_at_points(&cfg, ctx, p_max)?;
            let mut sum = Polynomial::zero();
            for coords in &local {
                let value = f_local.subst_with(
                    |v| match v {
                        Variable::B { point: 0, .. } => Some(coords.get(&v).cloned().unwrap_or_default()),
                        _ => None,
                    },
                    ctx,
                );
                sum.add_assign_ref(&value);
            }
            let split = witness(&(&fj_at - &sum));
            let residues = local_residues(&g.map_coeffs(&at), &cfg, ctx)?;
            let pipeline = witness(&(&fj_at - &residues));
            Ok((split, pipeline))
        });
        for (idx, (values, outcome)) in configs.iter().zip(outcomes).enumerate() {
            let (split, pipeline) = outcome?;
            let at = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            report.check(
                format!("offdiag.J{size_j}.s{idx}"),
                format!("at distinct points ({at}) the family member is the sum of the local values"),
                split,
            );
            report.check(
                format!("pipeline.J{size_j}.s{idx}"),
                format!("at ({at}) the residue at infinity equals the sum of local residues"),
                pipeline,
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(Variable::coord(i))
    }

    fn b1db2() -> XForm {
        XForm::one_form(&[(x(1), 2)])
    }

    #[test]
    fn divmod_by_monic() {
        let lam = Polynomial::var(Variable::lam(1));
        let p = vec![-&lam, Polynomial::one()];
        let a = upoly_pow(&p, 2);
        let (q, r) = upoly_divmod_monic(&a, &p);
        assert_eq!(upoly_trim(q), upoly_trim(p.clone()));
        assert!(r.is_empty());
    }

    #[test]
    fn pullback_examples() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        let cfg = PointConfig::symbolic(2);
        let db1 = XForm::one_form(&[(Polynomial::one(), 1)]);
        let g = global_pullback(&db1, &cfg, &ctx).unwrap();
        assert!(!g.is_zero());
        assert!(total_residue(&g, &cfg, &ctx).unwrap().is_zero());
        assert!(global_pullback(&XForm::zero(1), &cfg, &ctx).unwrap().is_zero());
    }

    #[test]
    fn one_point_reduces_to_the_transgression() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        let tau = at_point_one(&transgress_function(&b1db2(), &ctx).unwrap());
        let origin = PointConfig::rational(vec![int(0)]);
        let g = global_pullback(&b1db2(), &origin, &ctx).unwrap();
        assert_eq!(total_residue(&g, &origin, &ctx).unwrap(), tau);
        assert_eq!(family_value(&b1db2(), 1, &ctx).unwrap(), tau);
    }

    #[test]
    fn residue_at_infinity_matches_local_residues() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        let cfg = PointConfig::rational(vec![int(0), int(1)]);
        let eta = XForm::one_form(&[(&x(1) * &x(1), 2), (x(2), 1)]);
        let g = global_pullback(&eta, &cfg, &ctx).unwrap();
        assert_eq!(total_residue(&g, &cfg, &ctx).unwrap(), local_residues(&g, &cfg, &ctx).unwrap());
    }

    #[test]
    fn local_expansion_example() {
        let ctx = TruncationContext::new(1, 1, 0, 2);
        let cfg = PointConfig::rational(vec![int(0), int(1)]);
        let local = expand_at_points(&cfg, &ctx, 1).unwrap();
        let b = Polynomial::var(Variable::b_at(1, -1, 1));
        let at0 = &local[0];
        assert_eq!(at0[&Variable::b(1, -1)].coefficient(b.leading().unwrap().0), int(-1));
        assert_eq!(at0[&Variable::b(1, 0)].coefficient(b.leading().unwrap().0), int(-1));
        assert_eq!(at0[&Variable::b(1, 1)].coefficient(b.leading().unwrap().0), int(-1));
        assert_eq!(
            expand_at_points(&PointConfig::rational(vec![int(2), int(2)]), &ctx, 1).unwrap_err(),
            Error::PointsNotDistinct
        );
    }

    #[test]
    fn arcs_expand_to_arcs() {
        let ctx = TruncationContext::new(1, 0, 2, 2);
        let cfg = PointConfig::rational(vec![int(0), rat(1, 2)]);
        for coords in expand_at_points(&cfg, &ctx, 3).unwrap() {
            assert!(coords.keys().all(|v| v.b_mode().unwrap() >= 0));
        }
    }

    #[test]
    fn restriction_examples() {
        let ctx = TruncationContext::new(1, 1, 1, 2);
        let diff = &Polynomial::var(Variable::lam(2)) - &Polynomial::var(Variable::lam(1));
        assert!(restrict_diagonal(&diff, &[0, 0], &ctx).is_zero());
        let f = Polynomial::var(Variable::b_at(1, 0, 1));
        assert_eq!(restrict_diagonal(&f, &[0], &ctx), f);
    }

    #[test]
    fn two_points_merge_to_one() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        let f2 = family_value(&b1db2(), 2, &ctx).unwrap();
        let re = reindex_map(&[0, 0], &ctx);
        let (neg, pos) = re.window();
        let wide = ctx.with_window(neg, pos);
        let f1 = at_point_one(&transgress_function(&b1db2(), &wide).unwrap());
        assert_eq!(restrict_diagonal(&f2, &[0, 0], &ctx), re.apply(&f1, &ctx));
    }

    #[test]
    fn merge_enumeration() {
        assert_eq!(merges(2, 1), vec![vec![0, 0]]);
        assert_eq!(merges(3, 2).len(), 3);
        assert_eq!(merges(3, 1), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn transgression_is_factorizing() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        let opts = FactorOptions {
            j_max: 2,
            ..FactorOptions::default()
        };
        let report = verify_factorizing(&b1db2(), None, &ctx, &opts).unwrap();
        assert!(report.passed(), "{report}");
        let exact = verify_factorizing(&XForm::one_form(&[(Polynomial::one(), 1)]), None, &ctx, &opts).unwrap();
        assert!(exact.passed(), "{exact}");
    }

    #[test]
    fn non_invariant_candidate_fails() {
        let ctx = TruncationContext::new(2, 2, 2, 3);
        let b = |i: usize, n: i64| Polynomial::var(Variable::b(i, n));
        let candidate = &(&b(1, -1) * &b(2, 1)) + &(&b(1, -2) * &b(2, 2));
        let opts = FactorOptions {
            j_max: 2,
            ..FactorOptions::default()
        };
        let report = verify_factorizing(&b1db2(), Some(&candidate), &ctx, &opts).unwrap();
        assert!(!report.passed());
        assert!(report.failures().any(|r| r.id.starts_with("offdiag") && r.witness.is_some()));
    }
}
