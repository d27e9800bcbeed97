mod common;

use common::{conserves_integral, round_trip, shadowing_square, small_rational};
use genus0::arith::{MPoly, Monomial, RatFn, Scalar};
use genus0::builtins;
use genus0::dynamics::SystemAnalysis;
use genus0::mobius::{DynamicsClass, FixedPoint, Mobius};
use genus0::vars;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn quadratic() -> impl Strategy<Value = Scalar> {
    (small_rational(), small_rational()).prop_map(|(p, q)| {
        Scalar::quadratic(p.as_rational().unwrap().clone(), q.as_rational().unwrap().clone(), 5).unwrap()
    })
}

fn poly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec((-4i64..=4, 0u32..3, 0u32..3), 1..4).prop_map(|terms| {
        MPoly::from_terms(terms.into_iter().map(|(c, i, j)| {
            let m = Monomial::var(&vars::x(), i).mul(&Monomial::var(&vars::y(), j));
            (m, Scalar::from_int(c))
        }))
    })
}

fn nonzero_poly() -> impl Strategy<Value = MPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn mobius() -> impl Strategy<Value = Mobius<Scalar>> {
    (small_rational(), small_rational(), small_rational(), small_rational())
        .prop_filter_map("singular", |(a, b, c, d)| Mobius::checked(a, b, c, d).ok())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn quadratic_field_axioms(a in quadratic(), b in quadratic(), c in quadratic()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.try_inv().unwrap(), Scalar::one());
        }
        prop_assert_eq!(a.norm(), (&a * &a.conj()).as_rational().unwrap().clone());
    }

    #[test]
    fn sqrt_squares_back(p in -20i64..20, q in 1i64..6) {
        let s = Scalar::from_rational(ratio(p, q));
        if let Some(r) = s.sqrt().unwrap() {
            prop_assert_eq!(&r * &r, s);
        }
    }

    #[test]
    fn gcd_divides_both(f in nonzero_poly(), g in nonzero_poly(), c in nonzero_poly()) {
        let a = f.mul(&c);
        let b = g.mul(&c);
        let d = a.gcd(&b);
        prop_assert!(a.div_exact(&d).is_some());
        prop_assert!(b.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&c.monic()).is_some() || c.is_constant(), "{} ∤ {}", c, d);
    }

    #[test]
    fn square_roots_of_squares(f in poly()) {
        let r = f.mul(&f).sqrt().expect("a square");
        prop_assert!(r == f || r == f.neg());
        let g = f.mul(&f).add(&MPoly::var(&vars::y()).pow(5));
        if let Some(r) = g.sqrt() {
            prop_assert_eq!(r.mul(&r), g);
        }
    }

    #[test]
    fn ratfn_field_ops(n1 in poly(), d1 in nonzero_poly(), n2 in poly(), d2 in nonzero_poly()) {
        let r = RatFn::new(n1, d1).unwrap();
        let s = RatFn::new(n2, d2).unwrap();
        prop_assert_eq!(r.add(&s).sub(&s), r.clone());
        if !s.is_zero() {
            prop_assert_eq!(r.mul(&s).try_div(&s).unwrap(), r.clone());
        }
        // reduced form is canonical
        let t = RatFn::new(r.numer().mul(s.denom()), r.denom().mul(s.denom())).unwrap();
        prop_assert_eq!(t, r);
    }

    #[test]
    fn mobius_group_laws(m in mobius(), n in mobius(), g in mobius()) {
        prop_assert!(m.compose(&m.inverse()).is_identity());
        prop_assert_eq!(m.compose(&n).compose(&g), m.compose(&n.compose(&g)));
        prop_assert_eq!(m.conjugate_by(&g).conjugacy_invariant(), m.conjugacy_invariant());
    }

    #[test]
    fn solve_conjugator_finds_a_conjugator(m in mobius(), g in mobius()) {
        let n = m.conjugate_by(&g);
        let found = n.solve_conjugator(&m).expect("conjugate maps");
        prop_assert_eq!(m.conjugate_by(&found), n);
    }

    #[test]
    fn classification_is_consistent(m in mobius()) {
        prop_assume!(!m.is_identity());
        let class = m.classify().unwrap();
        let z = |p: &FixedPoint| p.as_exact().and_then(|t| m.derivative_at(t)).map(|d| d.to_complex().norm());
        match class.class {
            DynamicsClass::Hyperbolic => {
                if let (Some(d0), Some(d1)) = (z(&class.t0), class.t1.as_ref().and_then(z)) {
                    prop_assert!(d0 < 1.0 && d1 > 1.0, "{} {} {}", m, d0, d1);
                }
            }
            DynamicsClass::Parabolic => prop_assert!(class.t1.is_none()),
            DynamicsClass::Rotation { theta, order } => {
                prop_assert!((0.0..1.0).contains(&theta));
                if let Some(k) = order {
                    prop_assert!(m.pow(k).is_identity());
                }
            }
        }
        for p in [Some(&class.t0), class.t1.as_ref()].into_iter().flatten() {
            if let Some(t) = p.as_exact() {
                prop_assert_eq!(m.apply(t), Some(t.clone()));
            }
        }
    }
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn parser_round_trip(src in common::expression()) {
        if let Some(Err(msg)) = round_trip(&src) {
            prop_assert!(false, "{}", msg);
        }
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn builtins_conserve_the_integral(x in small_rational(), y in small_rational()) {
        for sys in builtins::all() {
            conserves_integral(&sys, (x.clone(), y.clone()), 8).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn fiber_maps_shadow_the_map(h in small_rational(), t in small_rational()) {
        for sys in builtins::all() {
            let an = SystemAnalysis::new(&sys).unwrap();
            shadowing_square(&an, &h, &t).map_err(TestCaseError::fail)?;
        }
    }
}
