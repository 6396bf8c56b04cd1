//! Algebraic differential forms, the de Rham differential, contraction,
//! reparametrization derivations and the fiberwise Poincaré homotopy.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::context::TruncationContext;
use crate::error::{Error, Result};
use crate::exactpoly::{int, Monomial, Polynomial, Rational, Variable};

/// Which variables count as coordinates for `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Universe {
    /// Forms on affine space: chart coordinates `b[i]` (and auxiliary parameters).
    X,
    /// Forms on the loop space: mode variables `b[i,n]` (and auxiliary parameters).
    Loop,
}

impl Universe {
    pub fn is_coordinate(&self, v: &Variable) -> bool {
        match self {
            Universe::X => matches!(v, Variable::Coord(_) | Variable::Aux(_)),
            Universe::Loop => matches!(v, Variable::B { .. } | Variable::Aux(_)),
        }
    }
}

/// A p-form `sum f_I dv_I` with strictly increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialForm {
    degree: usize,
    terms: BTreeMap<Vec<Variable>, Polynomial>,
    universe: Universe,
}

/// Sorts `vars`, returning the permutation sign, or `None` on a repeated variable.
fn normalize(mut vars: Vec<Variable>) -> Option<(Vec<Variable>, bool)> {
    let mut odd = false;
    for i in 1..vars.len() {
        let mut j = i;
        while j > 0 && vars[j - 1] > vars[j] {
            vars.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if vars.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((vars, odd))
}

fn neg_count(vars: &[Variable]) -> u32 {
    vars.iter().filter(|v| v.is_negative_b()).count() as u32
}

fn tuple_in_window(vars: &[Variable], ctx: &TruncationContext) -> bool {
    vars.iter()
        .all(|v| v.b_mode().is_none_or(|m| ctx.in_window(m)))
}

impl DifferentialForm {
    pub fn zero(degree: usize, universe: Universe) -> DifferentialForm {
        DifferentialForm {
            degree,
            terms: BTreeMap::new(),
            universe,
        }
    }

    pub fn function(p: Polynomial, universe: Universe) -> DifferentialForm {
        DifferentialForm::from_term(p, Vec::new(), universe)
    }

    pub fn dvar(v: Variable, universe: Universe) -> DifferentialForm {
        DifferentialForm::from_term(Polynomial::one(), vec![v], universe)
    }

    /// `coeff * dv_1 ^ ... ^ dv_p` for an arbitrary ordering of the `v_i`.
    pub fn from_term(coeff: Polynomial, vars: Vec<Variable>, universe: Universe) -> DifferentialForm {
        let mut out = DifferentialForm::zero(vars.len(), universe);
        out.add_term(vars, &coeff);
        out
    }

    fn add_term(&mut self, vars: Vec<Variable>, coeff: &Polynomial) {
        debug_assert_eq!(vars.len(), self.degree);
        if coeff.is_zero() {
            return;
        }
        let Some((vars, odd)) = normalize(vars) else {
            return;
        };
        let entry = self.terms.entry(vars.clone()).or_default();
        if odd {
            entry.add_assign_ref(&-coeff);
        } else {
            entry.add_assign_ref(coeff);
        }
        if entry.is_zero() {
            self.terms.remove(&vars);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Variable], &Polynomial)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, vars: &[Variable]) -> Polynomial {
        self.terms.get(vars).cloned().unwrap_or_default()
    }

    /// The underlying function of a 0-form.
    pub fn to_function(&self) -> Option<Polynomial> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    pub fn add(&self, other: &DifferentialForm) -> DifferentialForm {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (vars, c) in &other.terms {
            out.add_term(vars.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> DifferentialForm {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &DifferentialForm) -> DifferentialForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree, self.universe);
        if s.is_zero() {
            return out;
        }
        for (vars, c) in &self.terms {
            out.terms.insert(vars.clone(), c.scale(s));
        }
        out
    }

    pub fn mul_function(&self, p: &Polynomial, ctx: &TruncationContext) -> DifferentialForm {
        self.wedge(&DifferentialForm::function(p.clone(), self.universe), ctx)
    }

    /// Passes to the quotient by the y-weight ideal and the mode window.
    pub fn reduce(&self, ctx: &TruncationContext) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree, self.universe);
        for (vars, c) in &self.terms {
            if !tuple_in_window(vars, ctx) {
                continue;
            }
            let k = neg_count(vars);
            if k >= ctx.nilpotency {
                continue;
            }
            let c = c.retain(|m, _| m.window_ok(ctx) && m.neg_degree() + k < ctx.nilpotency);
            if !c.is_zero() {
                out.terms.insert(vars.clone(), c);
            }
        }
        out
    }

    pub fn wedge(&self, other: &DifferentialForm, ctx: &TruncationContext) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree + other.degree, self.universe);
        for (v1, c1) in &self.terms {
            for (v2, c2) in &other.terms {
                let mut vars = v1.clone();
                vars.extend_from_slice(v2);
                let k = neg_count(&vars);
                if k >= ctx.nilpotency || !tuple_in_window(&vars, ctx) {
                    continue;
                }
                let c = c1.mul_filtered(c2, |m| m.window_ok(ctx) && m.neg_degree() + k < ctx.nilpotency);
                out.add_term(vars, &c);
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self, ctx: &TruncationContext) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree + 1, self.universe);
        for (vars, c) in &self.terms {
            for v in c.variables() {
                if !self.universe.is_coordinate(&v) || vars.contains(&v) {
                    continue;
                }
                let mut tuple = Vec::with_capacity(vars.len() + 1);
                tuple.push(v);
                tuple.extend_from_slice(vars);
                out.add_term(tuple, &c.derive(v));
            }
        }
        out.reduce(ctx)
    }

    /// Interior product with Koszul signs.
    pub fn contract(&self, xi: &VectorField, ctx: &TruncationContext) -> Result<DifferentialForm> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = DifferentialForm::zero(self.degree - 1, self.universe);
        for (vars, c) in &self.terms {
            for (j, v) in vars.iter().enumerate() {
                let Some(comp) = xi.components.get(v) else {
                    continue;
                };
                let mut rest = vars.clone();
                rest.remove(j);
                let mut coeff = c.mul_exact(comp);
                if j % 2 == 1 {
                    coeff = -&coeff;
                }
                out.add_term(rest, &coeff);
            }
        }
        Ok(out.reduce(ctx))
    }

    /// Lie derivative along `xi`, treated as a derivation commuting with `d`.
    pub fn lie_derivative(&self, xi: &VectorField, ctx: &TruncationContext) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree, self.universe);
        for (vars, c) in &self.terms {
            out = out.add(&DifferentialForm::from_term(xi.apply(c), vars.clone(), self.universe));
            for (j, v) in vars.iter().enumerate() {
                let Some(comp) = xi.components.get(v) else {
                    continue;
                };
                let dcomp = DifferentialForm::function(comp.clone(), self.universe).d(ctx);
                let mut acc = DifferentialForm::function(c.clone(), self.universe);
                for (l, w) in vars.iter().enumerate() {
                    let slot = if l == j {
                        dcomp.clone()
                    } else {
                        DifferentialForm::dvar(*w, self.universe)
                    };
                    acc = acc.wedge(&slot, ctx);
                }
                out = out.add(&acc);
            }
        }
        out.reduce(ctx)
    }

    /// y-weight of each (monomial, differential tuple) pair: negative-mode
    /// polynomial degree plus the number of negative-mode differentials.
    pub fn y_weight_pieces(&self) -> BTreeMap<u32, DifferentialForm> {
        let mut out: BTreeMap<u32, DifferentialForm> = BTreeMap::new();
        for (vars, c) in &self.terms {
            let k = neg_count(vars);
            for (m, coeff) in c.terms() {
                let w = k + m.neg_degree();
                let piece = out
                    .entry(w)
                    .or_insert_with(|| DifferentialForm::zero(self.degree, self.universe));
                piece.add_term(vars.clone(), &Polynomial::term(coeff.clone(), m.clone()));
            }
        }
        out
    }

    /// True when every term has positive y-weight.
    pub fn is_relative(&self) -> bool {
        self.first_weight_zero().is_none()
    }

    fn first_weight_zero(&self) -> Option<String> {
        for (vars, c) in &self.terms {
            if neg_count(vars) > 0 {
                continue;
            }
            for (m, coeff) in c.terms() {
                if m.neg_degree() == 0 {
                    return Some(
                        DifferentialForm::from_term(
                            Polynomial::term(coeff.clone(), m.clone()),
                            vars.clone(),
                            self.universe,
                        )
                        .to_string(),
                    );
                }
            }
        }
        None
    }

    /// Rendering of the first term, used as a failure witness.
    pub fn first_term(&self) -> Option<String> {
        let (vars, c) = self.terms.iter().next()?;
        let (m, coeff) = c.terms().next()?;
        Some(
            DifferentialForm::from_term(Polynomial::term(coeff.clone(), m.clone()), vars.clone(), self.universe)
                .to_string(),
        )
    }

    /// Keeps only the terms whose coefficient monomials and differentials satisfy `keep`.
    pub fn retain_vars<F: Fn(&Variable) -> bool>(&self, keep: F) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree, self.universe);
        for (vars, c) in &self.terms {
            if !vars.iter().all(&keep) {
                continue;
            }
            let c = c.retain(|m, _| m.variables().all(|v| keep(&v)));
            if !c.is_zero() {
                out.terms.insert(vars.clone(), c);
            }
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs<F: Fn(&Polynomial) -> Polynomial>(&self, f: F) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.degree, self.universe);
        for (vars, c) in &self.terms {
            out.add_term(vars.clone(), &f(c));
        }
        out
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (vars, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if vars.is_empty() {
                write!(f, "{}", c)?;
                continue;
            }
            write!(f, "({})*", c)?;
            for (j, v) in vars.iter().enumerate() {
                if j > 0 {
                    write!(f, "^")?;
                }
                write!(f, "d{}", v)?;
            }
        }
        Ok(())
    }
}

/// A derivation `sum_v xi_v d/dv` with finitely many nonzero components.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VectorField {
    components: BTreeMap<Variable, Polynomial>,
}

impl VectorField {
    pub fn new() -> VectorField {
        VectorField::default()
    }

    pub fn partial(v: Variable) -> VectorField {
        let mut xi = VectorField::new();
        xi.set(v, Polynomial::one());
        xi
    }

    pub fn set(&mut self, v: Variable, component: Polynomial) {
        if component.is_zero() {
            self.components.remove(&v);
        } else {
            self.components.insert(v, component);
        }
    }

    pub fn component(&self, v: &Variable) -> Option<&Polynomial> {
        self.components.get(v)
    }

    /// Derivative of a function along the field.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for v in p.variables() {
            if let Some(comp) = self.components.get(&v) {
                out.add_assign_ref(&p.derive(v).mul_exact(comp));
            }
        }
        out
    }

    /// Euler field `sum_{n<0} b_n d/db_n` over the given variables.
    pub fn euler<I: IntoIterator<Item = Variable>>(vars: I) -> VectorField {
        let mut xi = VectorField::new();
        for v in vars {
            if v.is_negative_b() {
                xi.set(v, Polynomial::var(v));
            }
        }
        xi
    }

    /// `t^m d/dt` acting on the loop coordinates: `b_n -> (n-m+1) b_{n-m+1}`,
    /// with images outside the window dropped.
    pub fn reparam(m: i64, ctx: &TruncationContext) -> VectorField {
        let mut xi = VectorField::new();
        for chart in 1..=ctx.charts {
            for n in -ctx.neg..=ctx.pos {
                let target = n - m + 1;
                if !ctx.in_window(target) {
                    continue;
                }
                xi.set(Variable::b(chart, n), Polynomial::term(int(target), Monomial::var(Variable::b(chart, target))));
            }
        }
        xi
    }
}

pub fn d(omega: &DifferentialForm, ctx: &TruncationContext) -> DifferentialForm {
    omega.d(ctx)
}

pub fn wedge(alpha: &DifferentialForm, beta: &DifferentialForm, ctx: &TruncationContext) -> DifferentialForm {
    alpha.wedge(beta, ctx)
}

pub fn contract(omega: &DifferentialForm, xi: &VectorField, ctx: &TruncationContext) -> Result<DifferentialForm> {
    omega.contract(xi, ctx)
}

/// Applies the reparametrization derivation `D_m` to a form on the loop space.
pub fn reparam_derive(omega: &DifferentialForm, m: i64, ctx: &TruncationContext) -> DifferentialForm {
    omega.lie_derivative(&VectorField::reparam(m, ctx), ctx)
}

pub fn reparam_derive_poly(p: &Polynomial, m: i64, ctx: &TruncationContext) -> Polynomial {
    VectorField::reparam(m, ctx).apply(p).reduce(ctx)
}

/// True for loop variables whose `D_m` image may miss contributions from modes
/// outside the window.
pub fn reparam_unsound(v: &Variable, m: i64, ctx: &TruncationContext) -> bool {
    let Some(n) = v.b_mode() else {
        return false;
    };
    match m {
        0 => n == -ctx.neg,
        1 => false,
        _ => n >= ctx.pos - m + 2,
    }
}

/// Drops the monomials on which `D_m` is not determined by the window.
pub fn reparam_sound_part(p: &Polynomial, m: i64, ctx: &TruncationContext) -> Polynomial {
    p.retain(|mono, _| !mono.variables().any(|v| reparam_unsound(&v, m, ctx)))
}

pub fn reparam_sound_form(omega: &DifferentialForm, m: i64, ctx: &TruncationContext) -> DifferentialForm {
    omega.retain_vars(|v| !reparam_unsound(v, m, ctx))
}

/// The homotopy `H = (1/k) i_E` on each y-weight-`k` piece; weight-0 terms map to 0.
pub fn homotopy(alpha: &DifferentialForm, ctx: &TruncationContext) -> DifferentialForm {
    if alpha.degree() == 0 {
        return DifferentialForm::zero(0, alpha.universe());
    }
    let mut out = DifferentialForm::zero(alpha.degree() - 1, alpha.universe());
    for (k, piece) in alpha.y_weight_pieces() {
        if k == 0 {
            continue;
        }
        let mut vars = std::collections::BTreeSet::new();
        for (tuple, c) in piece.terms() {
            vars.extend(tuple.iter().copied());
            vars.extend(c.variables());
        }
        let e = VectorField::euler(vars);
        let contracted = piece.contract(&e, ctx).expect("positive degree");
        out = out.add(&contracted.scale(&Rational::new(1.into(), (k as i64).into())));
    }
    out.reduce(ctx)
}

/// The unique relative primitive of a closed relative form.
pub fn poincare_inverse(alpha: &DifferentialForm, ctx: &TruncationContext) -> Result<DifferentialForm> {
    if alpha.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let alpha = alpha.reduce(ctx);
    if !alpha.d(ctx).is_zero() {
        return Err(Error::NotClosed);
    }
    if let Some(term) = alpha.first_weight_zero() {
        return Err(Error::NotRelative(term));
    }
    Ok(homotopy(&alpha, ctx))
}
