//! Algebraic invariants over generated inputs.

use proptest::prelude::*;

use vertframe::forms::{Form, VectorField};
use vertframe::geobundle::{lie_bracket, BundleChart};
use vertframe::linalg::Mat;
use vertframe::multiphase::MultiphaseSpace;
use vertframe::random::Sampler;
use vertframe::symexpr::{int, parse_expr, CoordName, Expr};
use vertframe::vframe::{bracket_defect_lvy, ga_act_fiber, ga_act_frame, pairing_check};

fn vars() -> Vec<CoordName> {
    vec![CoordName::BaseX(1), CoordName::BaseX(2), CoordName::FiberY(1)]
}

/// Sparse polynomial with small integer coefficients in `x1, x2, y1`.
fn poly() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2, 0u32..=1), 0..4).prop_map(|terms| {
        let v = vars();
        terms
            .into_iter()
            .map(|(c, a, b, e)| {
                Expr::from_int(c) * Expr::var(v[0].clone()).pow(a) * Expr::var(v[1].clone()).pow(b) * Expr::var(v[2].clone()).pow(e)
            })
            .sum()
    })
}

fn nonzero_poly() -> impl Strategy<Value = Expr> {
    poly().prop_filter("nonzero", |e| !e.is_zero())
}

fn one_form() -> impl Strategy<Value = Form> {
    prop::collection::vec(poly(), 3).prop_map(|cs| {
        let v = vars();
        cs.into_iter().zip(v).fold(Form::zero(1), |acc, (c, x)| acc.add(&Form::monomial(c, &[x])))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn quotients_cancel(a in poly(), b in nonzero_poly()) {
        let q = a.checked_div(&b).unwrap();
        prop_assert_eq!(&q * &b, a);
    }

    #[test]
    fn leibniz_rule(a in poly(), b in poly()) {
        let x = CoordName::BaseX(1);
        prop_assert_eq!((&a * &b).diff(&x), &(&a.diff(&x) * &b) + &(&a * &b.diff(&x)));
    }

    #[test]
    fn display_parses_back(a in poly(), b in nonzero_poly()) {
        let e = a.checked_div(&b).unwrap();
        prop_assert_eq!(parse_expr(&e.to_string(), None).unwrap(), e);
    }

    #[test]
    fn d_squared_is_zero(w in one_form(), f in poly()) {
        prop_assert!(w.d().d().is_zero());
        prop_assert!(Form::scalar(f).d().d().is_zero());
    }

    #[test]
    fn wedge_of_one_forms_anticommutes(a in one_form(), b in one_form()) {
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).neg());
        prop_assert_eq!(a.wedge(&b).d(), a.d().wedge(&b).sub(&a.wedge(&b.d())));
    }

    #[test]
    fn lie_bracket_is_antisymmetric_and_jacobi(s in any::<u64>()) {
        let c = BundleChart::new(2, 1).unwrap();
        let mut smp = Sampler::new(s);
        let (u, v, w) = (smp.projectable_field(&c, 2), smp.projectable_field(&c, 2), smp.projectable_field(&c, 2));
        let uv = lie_bracket(&c, &u, &v).unwrap();
        prop_assert!(uv.add(&lie_bracket(&c, &v, &u).unwrap()).is_zero());
        let jac = u.bracket(&v.bracket(&w)).add(&v.bracket(&w.bracket(&u))).add(&w.bracket(&u.bracket(&v)));
        prop_assert!(jac.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closure_on_lvy_and_exact_defect_on_z(s in any::<u64>()) {
        let c = BundleChart::new(2, 1).unwrap();
        let mut smp = Sampler::new(s);
        let (xi, zeta) = (smp.projectable_field(&c, 2), smp.projectable_field(&c, 2));
        prop_assert!(bracket_defect_lvy(&c, &xi, &zeta).unwrap().iter().all(Expr::is_zero));
        let z = MultiphaseSpace::new(c);
        prop_assert_eq!(z.bracket_defect(&xi, &zeta).unwrap(), z.exact_term(&xi, &zeta).unwrap());
    }

    #[test]
    fn group_actions_compose(s in any::<u64>()) {
        let c = BundleChart::new(2, 2).unwrap();
        let mut smp = Sampler::new(s);
        let (w, g, h) = (smp.frame_point(&c), smp.ga_element(&c), smp.ga_element(&c));
        prop_assert_eq!(ga_act_frame(&ga_act_frame(&w, &g).unwrap(), &h).unwrap(), ga_act_frame(&w, &g.mul(&h)).unwrap());
        prop_assert!(g.mul(&g.inverse().unwrap()).is_identity());
        let (b, l) = (smp.rational_matrix(2, 2), smp.rational());
        let (hb, hl) = ga_act_fiber(&h, &b, &l).unwrap();
        prop_assert_eq!(ga_act_fiber(&g, &hb, &hl).unwrap(), ga_act_fiber(&g.mul(&h), &b, &l).unwrap());
    }

    #[test]
    fn pairing_holds_at_random_points(s in any::<u64>()) {
        let c = BundleChart::new(2, 1).unwrap();
        let mut smp = Sampler::new(s);
        let w = smp.frame_point(&c);
        let b = if s % 4 == 0 { Mat::zeros(2, 1) } else { smp.rational_matrix(2, 1) };
        let l = if s % 5 == 0 { int(0) } else { smp.rational() };
        prop_assert!(pairing_check(&w, &b, &l).unwrap());
    }
}

#[test]
fn vector_field_apply_is_a_derivation() {
    let v = VectorField::from_components([(CoordName::BaseX(1), Expr::x(2)), (CoordName::FiberY(1), Expr::from_int(3))]);
    let f = parse_expr("x1^2*y1", None).unwrap();
    assert_eq!(v.apply(&f), parse_expr("2*x1*x2*y1 + 3*x1^2", None).unwrap());
}
