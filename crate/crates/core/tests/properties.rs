use loopcas_core::derham::{homotopy, reparam_derive};
use loopcas_core::exactpoly::rat;
use loopcas_core::factorization::{expand_at_points, global_pullback, local_residues, total_residue, PointConfig};
use loopcas_core::gen;
use loopcas_core::heisenberg::{basis_upto, field_mode, gms_automorphism, translate, HeisenbergState};
use loopcas_core::laurent::{ev_series, series_compose};
use loopcas_core::transgression::{action_exp, residue_p, XForm};
use loopcas_core::{DifferentialForm, Polynomial, TruncationContext, Universe, Variable};
use proptest::prelude::*;
use rand::Rng;

fn ctx() -> TruncationContext {
    TruncationContext::new(2, 3, 3, 3)
}

fn loop_poly(rng: &mut gen::Rng64, terms: usize) -> Polynomial {
    gen::polynomial(rng, &gen::modes(2, -3, 3), 3, terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms_hold_in_the_quotient(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = ctx();
        let (p, q, r) = (loop_poly(&mut rng, 4), loop_poly(&mut rng, 4), loop_poly(&mut rng, 4));
        prop_assert_eq!(p.mul(&q, &c).mul(&r, &c), p.mul(&q.mul(&r, &c), &c));
        prop_assert_eq!(p.mul(&(&q + &r), &c), &p.mul(&q, &c) + &p.mul(&r, &c));
        prop_assert_eq!(p.mul(&q, &c), q.mul(&p, &c));
    }

    #[test]
    fn reduction_is_idempotent_and_drops_only_excluded_terms(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = ctx();
        let p = gen::polynomial(&mut rng, &gen::modes(2, -5, 5), 4, 6);
        let reduced = p.reduce(&c);
        prop_assert_eq!(reduced.reduce(&c), reduced.clone());
        let dropped = &p - &reduced;
        prop_assert!(dropped.terms().all(|(m, _)| !m.survives(&c)));
    }

    #[test]
    fn partial_derivatives_commute(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let p = loop_poly(&mut rng, 5);
        let (u, v) = (Variable::b(1, -1), Variable::b(2, 1));
        prop_assert_eq!(p.derive(u).derive(v), p.derive(v).derive(u));
        let q = loop_poly(&mut rng, 5);
        let lhs = p.mul_exact(&q).derive(u);
        let rhs = &p.derive(u).mul_exact(&q) + &p.mul_exact(&q.derive(u));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_leibniz_and_compose_homomorphism(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = ctx();
        let vars = gen::modes(2, -1, 1);
        let s = gen::laurent(&mut rng, &vars, -3, 3, 2, 3);
        let u = gen::laurent(&mut rng, &vars, -3, 3, 2, 3);
        let lhs = s.mul(&u, &c).unwrap().derive_t();
        let rhs = s.derive_t().mul(&u, &c).unwrap().add(&s.mul(&u.derive_t(), &c).unwrap());
        for k in -8..=6 {
            prop_assert_eq!(lhs.coeff(k).unwrap_or_default(), rhs.coeff(k).unwrap_or_default());
        }
        prop_assert!(s.derive_t().coeff(-1).unwrap_or_default().is_zero());

        let loops = vec![ev_series(1, &c).unwrap(), ev_series(2, &c).unwrap()];
        let f = gen::polynomial(&mut rng, &gen::coords(2), 2, 2);
        let g = gen::polynomial(&mut rng, &gen::coords(2), 2, 2);
        let fg = series_compose(&f.mul_exact(&g), &loops, &c).unwrap();
        let prod = series_compose(&f, &loops, &c).unwrap().mul(&series_compose(&g, &loops, &c).unwrap(), &c).unwrap();
        for k in -3..=3 {
            prop_assert_eq!(fg.known_coeff(k).unwrap(), prod.known_coeff(k).unwrap());
        }
    }

    #[test]
    fn exterior_derivative_laws(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = ctx();
        let a = gen::relative_form(&mut rng, &c, 1, 3);
        let b = gen::relative_form(&mut rng, &c, 1, 3);
        prop_assert!(a.d(&c).d(&c).is_zero());
        let lhs = a.wedge(&b, &c).d(&c);
        let rhs = a.d(&c).wedge(&b, &c).sub(&a.wedge(&b.d(&c), &c));
        prop_assert_eq!(lhs, rhs);
        for m in 0..=3 {
            prop_assert_eq!(reparam_derive(&a.d(&c), m, &c), reparam_derive(&a, m, &c).d(&c));
        }
        let cartan = homotopy(&a.d(&c), &c).add(&homotopy(&a, &c).d(&c));
        prop_assert_eq!(cartan, a.reduce(&c));
    }

    #[test]
    fn residue_is_alternating(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = TruncationContext::new(2, 6, 6, 4);
        let vars = gen::modes(2, -2, 2);
        let a0 = gen::laurent(&mut rng, &vars, -4, 4, 2, 2);
        let a1 = gen::laurent(&mut rng, &vars, -4, 4, 2, 2);
        let a2 = gen::laurent(&mut rng, &vars, -4, 4, 2, 2);
        let fwd = residue_p(&[(a0.clone(), vec![a1.clone(), a2.clone()])], &c).unwrap();
        let back = residue_p(&[(a0, vec![a2, a1])], &c).unwrap();
        prop_assert_eq!(fwd, back.neg());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exponentiated_action_is_invertible(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = ctx();
        let omega = gen::one_form(&mut rng, 2, 2).d(&c);
        let s = action_exp(&omega, &c).unwrap().poly;
        let inv = action_exp(&omega.neg(), &c).unwrap().poly;
        prop_assert!(s.mul(&inv, &c).is_one());
    }

    #[test]
    fn field_of_a_translate_is_a_derivative(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = TruncationContext::new(2, 4, 4, 4).with_weight(10, 2);
        let xs: Vec<_> = basis_upto(2, &c.clone().with_weight(2, 1))
            .into_iter()
            .filter(|w| w.a_part().is_empty() || (w.a_degree() == 1 && w.b_part().is_empty()))
            .collect();
        let x = HeisenbergState::word(xs[rng.random_range(0..xs.len())].clone());
        let y = gen::state(&mut rng, 2, 2, 2, 2);
        let k = rng.random_range(-3i64..=3);
        let lhs = field_mode(&translate(&x, &c).unwrap(), k, &y, &c).unwrap();
        let rhs = field_mode(&x, k - 1, &y, &c).unwrap().scale(&loopcas_core::exactpoly::int(-k));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(field_mode(&HeisenbergState::vacuum(), -1, &y, &c).unwrap(), y);
    }

    #[test]
    fn automorphism_never_raises_a_degree(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = TruncationContext::new(2, 4, 4, 5).with_weight(6, 1);
        let omega = gen::one_form(&mut rng, 2, 2).d(&c);
        let v = gen::state(&mut rng, 2, 3, 3, 1);
        let image = gms_automorphism(&omega, &v, &c).unwrap();
        prop_assert!(image.a_degree() <= v.a_degree());
        let (w, coeff) = v.terms().next().unwrap();
        prop_assert_eq!(&image.coefficient(w), coeff);
    }

    #[test]
    fn residue_at_infinity_is_the_sum_of_local_residues(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let c = TruncationContext::new(2, 2, 2, 3);
        let eta = gen::one_form(&mut rng, 2, 2);
        let k = rng.random_range(1..=3);
        let mut points = Vec::new();
        while points.len() < k {
            let x = rat(rng.random_range(-6i64..=6), rng.random_range(1i64..=4));
            if !points.contains(&x) {
                points.push(x);
            }
        }
        let cfg = PointConfig::rational(points);
        let g = global_pullback(&eta, &cfg, &c).unwrap();
        prop_assert_eq!(total_residue(&g, &cfg, &c).unwrap(), local_residues(&g, &cfg, &c).unwrap());
        let arcs = TruncationContext::new(2, 0, 2, 3);
        for coords in expand_at_points(&cfg, &arcs, 3).unwrap() {
            prop_assert!(coords.keys().all(|v| v.b_mode().unwrap() >= 0));
        }
    }
}

#[test]
fn generated_inputs_are_not_trivial() {
    let mut rng = gen::rng(1);
    let c = TruncationContext::new(2, 4, 4, 3);
    let nonzero = (0..50)
        .filter(|_| {
            let eta = gen::one_form(&mut rng, 2, 3);
            !loopcas_core::transgression::transgress_function(&eta, &c).unwrap().is_zero()
        })
        .count();
    assert!(nonzero >= 40, "{nonzero} of 50 transgressions nonzero");
    let forms = (0..50)
        .filter(|_| !gen::relative_form(&mut rng, &c, 1, 3).d(&c).is_zero())
        .count();
    assert!(forms >= 40);
    let single = XForm::one_form(&[(Polynomial::var(Variable::coord(1)), 2)]);
    let lifted = DifferentialForm::function(Polynomial::one(), Universe::Loop);
    assert!(!single.form().is_zero() && lifted.degree() == 0);
}
