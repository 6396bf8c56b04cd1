//! Randomized property suites over seeded inputs. Each suite returns a
//! [`Report`] with one record per generated input.

use rand::Rng;

use crate::context::TruncationContext;
use crate::derham::{homotopy, poincare_inverse, DifferentialForm, Universe};
use crate::error::Result;
use crate::exactpoly::{int, Polynomial, Variable};
use crate::factorization::{verify_factorizing, FactorOptions};
use crate::gen::{self, Rng64};
use crate::heisenberg::{
    basis_upto, field_mode, gms_automorphism, mult_function, normal_order, normal_order_rewrite, recover_function,
    verify_234_with, FunctionAction, HeisenbergState, Strategy,
};
use crate::laurent::LaurentSeries;
use crate::par::{self, Execution};
use crate::report::Report;
use crate::transgression::{
    check_reparam_invariance, residue_p, tau_dinv, transgress, transgress_function, CoordChange, XForm,
};

/// Sizes and seed shared by the suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 2024,
            exec: Execution::default(),
        }
    }
}

fn first_failure(report: &Report) -> Option<String> {
    report.failures().next().map(|r| match &r.witness {
        Some(w) => format!("{}: {w}", r.id),
        None => r.id.clone(),
    })
}

fn form_witness(f: &DifferentialForm) -> Option<String> {
    f.first_term()
}

fn poly_witness(p: &Polynomial) -> Option<String> {
    p.leading().map(|(m, c)| Polynomial::term(c.clone(), m.clone()).to_string())
}

fn seeds(rng: &mut Rng64, count: usize) -> Vec<u64> {
    (0..count).map(|_| rng.random()).collect()
}

/// `t^{m+1} d/dt` applied to a series.
fn lie_t(s: &LaurentSeries, m: i64) -> LaurentSeries {
    s.derive_t().shift(m + 1)
}

type ResidueInput = Vec<(LaurentSeries, Vec<LaurentSeries>)>;

fn residue_input(rng: &mut Rng64, vars: &[Variable], p: usize, lo: i64, hi: i64) -> ResidueInput {
    let terms = rng.random_range(1..=2);
    (0..terms)
        .map(|_| {
            let a0 = gen::laurent(rng, vars, lo, hi, 3, 2);
            let slots = (0..p).map(|_| gen::laurent(rng, vars, lo, hi, 3, 2)).collect();
            (a0, slots)
        })
        .collect()
}

/// Residue calculus: vanishing on series without poles, invariance under
/// `t^{m+1} d/dt` for `-1 <= m <= 3`, and commutation with `d`.
pub fn residue_suite(count: usize, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let inputs = seeds(&mut rng, count);
    let outcomes = par::map(opts.exec, &inputs, |&seed| -> Result<[Option<String>; 3]> {
        let mut rng = gen::rng(seed);
        let charts = rng.random_range(1..=3);
        let ctx = TruncationContext::new(charts, 6, 6, 4);
        let mut vars = gen::modes(charts, -2, 2);
        vars.push(Variable::aux(1));
        let p = rng.random_range(1..=2);

        let regular = residue_input(&mut rng, &vars, p, 0, 6);
        let vanish = form_witness(&residue_p(&regular, &ctx)?);

        let input = residue_input(&mut rng, &vars, p, -6, 6);
        let mut lie = None;
        for m in -1..=3 {
            let mut moved: ResidueInput = Vec::new();
            for (a0, slots) in &input {
                moved.push((lie_t(a0, m), slots.clone()));
                for i in 0..slots.len() {
                    let mut s = slots.clone();
                    s[i] = lie_t(&slots[i], m);
                    moved.push((a0.clone(), s));
                }
            }
            if let Some(w) = form_witness(&residue_p(&moved, &ctx)?) {
                lie = Some(format!("m = {m}: {w}"));
                break;
            }
        }

        let res = residue_p(&input, &ctx)?;
        let lifted: ResidueInput = input
            .iter()
            .map(|(a0, slots)| {
                let mut s = vec![a0.clone()];
                s.extend(slots.iter().cloned());
                (LaurentSeries::constant(Polynomial::one()), s)
            })
            .collect();
        let commute = form_witness(&residue_p(&lifted, &ctx)?.sub(&res.d(&ctx)));
        Ok([vanish, lie, commute])
    });
    let mut report = Report::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let [vanish, lie, commute] = outcome?;
        report.check(format!("regular.{idx}"), "the residue of series without poles vanishes", vanish);
        report.check(format!("lie.{idx}"), "residues of t^(m+1) d/dt derivatives vanish", lie);
        report.check(format!("d.{idx}"), "the residue commutes with d", commute);
    }
    Ok(report)
}

/// Transgression: relative output, reparametrization invariance, commutation
/// with `d`, vanishing on exact forms.
pub fn transgression_suite(count: usize, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let inputs = seeds(&mut rng, count);
    let outcomes = par::map(opts.exec, &inputs, |&seed| -> Result<[Option<String>; 4]> {
        let mut rng = gen::rng(seed);
        let charts = rng.random_range(1..=3);
        let ctx = TruncationContext::new(charts, 4, 4, 3);
        let eta = gen::one_form(&mut rng, charts, 3);
        let omega = gen::two_form(&mut rng, charts, 2);
        let f = transgress_function(&eta, &ctx)?;
        let tau2 = transgress(&omega, &ctx)?;
        let relative = if !DifferentialForm::function(f.clone(), Universe::Loop).is_relative() {
            poly_witness(&f.retain(|m, _| m.neg_degree() == 0))
        } else if !tau2.is_relative() {
            form_witness(&tau2)
        } else {
            None
        };
        let invariant = first_failure(&check_reparam_invariance(&f, 3, &[], &ctx));
        let commute = form_witness(&transgress(&eta.d(&ctx), &ctx)?.sub(&DifferentialForm::function(f, Universe::Loop).d(&ctx)));
        let g = gen::polynomial(&mut rng, &gen::coords(charts), 3, 3);
        let dg = XForm::new(DifferentialForm::function(g, Universe::X))?.d(&ctx);
        let exact = form_witness(&transgress(&dg, &ctx)?);
        Ok([relative, invariant, commute, exact])
    });
    let mut report = Report::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let [relative, invariant, commute, exact] = outcome?;
        report.check(format!("relative.{idx}"), "transgressions vanish on arcs", relative);
        report.check(format!("invariant.{idx}"), "t^m d/dt (m <= 3) annihilates the transgressed function", invariant);
        report.check(format!("d.{idx}"), "the transgression commutes with d", commute);
        report.check(format!("exact.{idx}"), "the transgression of an exact form vanishes", exact);
    }
    Ok(report)
}

/// Relative Poincare lemma and the symplectic action of exact 2-forms.
pub fn poincare_suite(count: usize, count_tau: usize, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let inputs = seeds(&mut rng, count);
    let ctx = TruncationContext::new(2, 3, 3, 4);
    let outcomes = par::map(opts.exec, &inputs, |&seed| -> Result<[Option<String>; 3]> {
        let mut rng = gen::rng(seed);
        let beta = DifferentialForm::function(gen::relative_function(&mut rng, &ctx, 3, 4), Universe::Loop).reduce(&ctx);
        let primitive = form_witness(&homotopy(&beta.d(&ctx), &ctx).sub(&beta));
        let p = rng.random_range(1..=2);
        let alpha = gen::relative_form(&mut rng, &ctx, p, 4).d(&ctx);
        let inverse = form_witness(&poincare_inverse(&alpha, &ctx)?.d(&ctx).sub(&alpha));
        let gamma = gen::relative_form(&mut rng, &ctx, p, 4);
        let cartan = form_witness(
            &homotopy(&gamma.d(&ctx), &ctx)
                .add(&homotopy(&gamma, &ctx).d(&ctx))
                .sub(&gamma),
        );
        Ok([primitive, inverse, cartan])
    });
    let mut report = Report::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let [primitive, inverse, cartan] = outcome?;
        report.check(format!("primitive.{idx}"), "H(d beta) = beta for relative functions", primitive);
        report.check(format!("inverse.{idx}"), "d H(alpha) = alpha for closed relative forms", inverse);
        report.check(format!("homotopy.{idx}"), "dH + Hd is the identity on relative forms", cartan);
    }
    let taus = seeds(&mut rng, count_tau);
    let outcomes = par::map(opts.exec, &taus, |&seed| -> Result<Option<String>> {
        let mut rng = gen::rng(seed);
        let charts = rng.random_range(1..=3);
        let ctx = TruncationContext::new(charts, 3, 3, 3);
        let eta = gen::one_form(&mut rng, charts, 2);
        let lhs = tau_dinv(&eta.d(&ctx), &ctx)?.poly;
        Ok(poly_witness(&(&lhs - &transgress_function(&eta, &ctx)?)))
    });
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        report.check(format!("action.{idx}"), "the symplectic action of d eta is the transgression of eta", outcome?);
    }
    Ok(report)
}

/// Normal ordering is independent of the rewriting order, and the action of
/// loop functions is associative.
pub fn heisenberg_suite(words: usize, triples: usize, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let word_seeds = seeds(&mut rng, words);
    let outcomes = par::map(opts.exec, &word_seeds, |&seed| {
        let mut rng = gen::rng(seed);
        let len = rng.random_range(1..=8);
        let word = gen::op_word(&mut rng, 2, 3, len);
        let reference = normal_order(&word);
        let strategies = [Strategy::Leftmost, Strategy::Rightmost, Strategy::Random(seed)];
        strategies
            .iter()
            .map(|&s| normal_order_rewrite(&word, s))
            .find(|other| *other != reference)
            .map(|other| format!("{} vs {}", reference, other))
    });
    let mut report = Report::new();
    for (idx, witness) in outcomes.into_iter().enumerate() {
        report.check(format!("confluence.{idx}"), "every rewriting order reaches the same normal form", witness);
    }
    let ctx = TruncationContext::new(2, 3, 3, 4);
    let triple_seeds = seeds(&mut rng, triples);
    let outcomes = par::map(opts.exec, &triple_seeds, |&seed| -> Result<Option<String>> {
        let mut rng = gen::rng(seed);
        let modes = gen::modes(2, -3, 3);
        let phi = gen::polynomial(&mut rng, &modes, 2, 3);
        let psi = gen::polynomial(&mut rng, &modes, 2, 3);
        let v = gen::state(&mut rng, 2, 3, 3, 3);
        let lhs = mult_function(&phi.mul(&psi, &ctx), &v, &ctx)?;
        let rhs = mult_function(&phi, &mult_function(&psi, &v, &ctx)?, &ctx)?;
        Ok(lhs.sub(&rhs).first_term())
    });
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        report.check(format!("associativity.{idx}"), "(phi psi) . v = phi . (psi . v)", outcome?);
    }
    Ok(report)
}

/// Multiplication by `S(d eta)` equals the field-substitution automorphism on
/// the full basis of weight at most `w`, for `count` forms per chart count.
pub fn operator_suite(charts: &[usize], count: usize, w: i64, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let mut report = Report::new();
    for &n in charts {
        let ctx = TruncationContext::new(n, 10, 10, 6).with_weight(w as u32, 2);
        for idx in 0..count {
            let eta = gen::one_form(&mut rng, n, 2);
            let omega = eta.d(&ctx);
            let sub = verify_234_with(&omega, w, &ctx, opts.exec)?;
            report.check(
                format!("N{n}.{idx}"),
                format!("S(d eta) acts as the field substitution on all {} basis states", sub.records.len() - 1),
                first_failure(&sub),
            );
        }
    }
    Ok(report)
}

/// The field substitution of a constant 2-form preserves the products
/// `x_(k) y` for `x` of weight at most 1, `y` of weight at most 3, `|k| <= 3`.
pub fn automorphism_suite(count: usize, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let ctx = TruncationContext::new(2, 10, 10, 6).with_weight(6, 1);
    let xs: Vec<HeisenbergState> = basis_upto(1, &ctx.clone().with_weight(1, 2))
        .into_iter()
        .filter(|w| w.a_part().is_empty() || (w.a_degree() == 1 && w.b_part().is_empty()))
        .map(HeisenbergState::word)
        .collect();
    let ys: Vec<HeisenbergState> = basis_upto(3, &ctx).into_iter().map(HeisenbergState::word).collect();
    let mut report = Report::new();
    for idx in 0..count {
        let c = int(rng.random_range(-3i64..=3));
        let omega = XForm::new(DifferentialForm::from_term(
            Polynomial::constant(if idx == 0 { int(1) } else { c }),
            vec![Variable::coord(1), Variable::coord(2)],
            Universe::X,
        ))?;
        let my: Vec<HeisenbergState> = ys
            .iter()
            .map(|y| gms_automorphism(&omega, y, &ctx))
            .collect::<Result<_>>()?;
        let outcomes = par::map(opts.exec, &xs, |x| -> Result<Option<String>> {
            let mx = gms_automorphism(&omega, x, &ctx)?;
            for (y, my) in ys.iter().zip(&my) {
                for k in -3..=3 {
                    let lhs = gms_automorphism(&omega, &field_mode(x, k, y, &ctx)?, &ctx)?;
                    let rhs = field_mode(&mx, k, my, &ctx)?;
                    if let Some(t) = lhs.sub(&rhs).first_term() {
                        return Ok(Some(format!("x = {x}, k = {k}, y = {y}: {t}")));
                    }
                }
            }
            Ok(None)
        });
        let mut witness = None;
        for outcome in outcomes {
            if let Some(w) = outcome? {
                witness.get_or_insert(w);
            }
        }
        report.check(
            format!("omega.{idx}"),
            format!("the substitution for {omega} preserves x_(k) y"),
            witness,
        );
    }
    Ok(report)
}

/// The transgression of random 1-forms is factorizing.
pub fn factorization_suite(count: usize, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let ctx = TruncationContext::new(2, 2, 2, 3);
    let mut report = Report::new();
    for idx in 0..count {
        let eta = gen::one_form(&mut rng, 2, 2);
        let sub = verify_factorizing(
            &eta,
            None,
            &ctx,
            &FactorOptions {
                samples: 5,
                j_max: 3,
                seed: rng.random(),
                exec: opts.exec,
            },
        )?;
        report.check(
            format!("eta.{idx}"),
            format!("the transgression of {eta} passes all {} factorization checks", sub.records.len()),
            first_failure(&sub),
        );
    }
    Ok(report)
}

/// A bounded loop function is recovered from its action on the basis, so one
/// acting as zero is zero.
pub fn faithfulness_suite(count: usize, w: i64, opts: SuiteOptions) -> Result<Report> {
    let mut rng = gen::rng(opts.seed);
    let ctx = TruncationContext::new(2, w, w, 3);
    let inputs = seeds(&mut rng, count);
    let outcomes = par::map(opts.exec, &inputs, |&seed| -> Result<Option<String>> {
        let mut rng = gen::rng(seed);
        let g = gen::bounded_function(&mut rng, 2, w, ctx.nilpotency, 6);
        let fa = FunctionAction::new(&g)?;
        let recovered = recover_function(|v| fa.apply(v), w, &ctx);
        Ok(poly_witness(&(&recovered - &g)))
    });
    let mut report = Report::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        report.check(format!("recover.{idx}"), "the function is recovered from its action on the basis", outcome?);
    }
    let zero = recover_function(|_| HeisenbergState::zero(), w, &ctx);
    report.check("zero", "a function acting as zero is zero", poly_witness(&zero));
    Ok(report)
}

/// `b^1_{-1} b^2_1 + b^1_{-2} b^2_2`, which is not reparametrization invariant.
pub fn non_invariant_candidate() -> Polynomial {
    let b = |i: usize, n: i64| Polynomial::var(Variable::b(i, n));
    &(&b(1, -1) * &b(2, 1)) + &(&b(1, -2) * &b(2, 2))
}

/// The non-invariant candidate must be rejected by both checks, each with a witness.
pub fn negative_control(opts: SuiteOptions) -> Result<Report> {
    let ctx = TruncationContext::new(2, 2, 2, 3);
    let f = non_invariant_candidate();
    let mut report = Report::new();
    let samples = vec![CoordChange::new(vec![int(2)])?];
    let inv = check_reparam_invariance(&f, 3, &samples, &ctx);
    let witness = first_failure(&inv);
    report.check(
        "invariance",
        "the candidate is rejected by the invariance check with a witness",
        witness.is_none().then(|| "accepted".to_string()),
    );
    let eta = XForm::one_form(&[(Polynomial::var(Variable::coord(1)), 2)]);
    let fact = verify_factorizing(
        &eta,
        Some(&f),
        &ctx,
        &FactorOptions {
            samples: 5,
            j_max: 2,
            seed: opts.seed,
            exec: opts.exec,
        },
    )?;
    let rejected = fact.failures().any(|r| r.id.starts_with("offdiag") && r.witness.is_some());
    report.check(
        "factorization",
        "the candidate is rejected by the off-diagonal check with a witness",
        (!rejected).then(|| "accepted".to_string()),
    );
    Ok(report)
}

/// Titles of the numbered suites run by [`numbered`].
pub const SUITES: [&str; 9] = [
    "residue calculus",
    "transgression",
    "relative Poincare lemma",
    "Heisenberg module",
    "multiplication by S(w) equals the field substitution",
    "field substitution preserves field modes",
    "factorization",
    "faithfulness",
    "non-invariant candidate is rejected",
];

/// Suite `n` (1-based, see [`SUITES`]) at its standard size.
pub fn numbered(n: usize, opts: SuiteOptions) -> Result<Report> {
    match n {
        1 => residue_suite(200, opts),
        2 => transgression_suite(100, opts),
        3 => poincare_suite(100, 50, opts),
        4 => heisenberg_suite(500, 200, opts),
        5 => operator_suite(&[2, 3], 10, 4, opts),
        6 => automorphism_suite(3, opts),
        7 => factorization_suite(5, opts),
        8 => faithfulness_suite(50, 4, opts),
        9 => negative_control(opts),
        _ => Err(crate::error::Error::InvalidArgument(format!("no suite {n}"))),
    }
}

/// Every numbered suite, ids prefixed by the suite number.
pub fn selftest(opts: SuiteOptions) -> Result<Report> {
    let mut report = Report::new();
    for n in 1..=SUITES.len() {
        report.extend_prefixed(&format!("suite{n}"), numbered(n, opts)?);
    }
    Ok(report)
}
