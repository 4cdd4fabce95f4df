mod common;

use std::sync::Arc;

use common::*;
use num_bigint::BigInt;
use pexp::corpus;
use pexp::fan::{stellar_subdivision, Fan};
use pexp::laurent::LaurentPoly;
use pexp::pexp::{gkm_validate, CartierData, PExpError, PExpFun, Validation};
use proptest::prelude::*;

fn fans() -> Vec<Arc<Fan>> {
    vec![corpus::p1(), corpus::p2(), corpus::p112(), corpus::hirzebruch(2), corpus::p1113(), corpus::cube(), corpus::a1_cone()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn restriction_is_independent_of_the_owning_cone(which in 0usize..7, seed in any::<u64>()) {
        let fan = &fans()[which];
        let f = random_pexp(&mut rng(seed), fan);
        for face in 0..fan.cones().len() {
            let r = f.restrict_id(face).unwrap();
            for sigma in fan.max_cones_containing(face) {
                let phi = fan.max_cone(sigma).characters().map_to(fan.cone(face).characters());
                prop_assert_eq!(f.value(sigma).map_exponents(&phi).unwrap(), r.clone());
            }
        }
    }

    #[test]
    fn restriction_is_functorial(which in 0usize..7, seed in any::<u64>()) {
        let fan = &fans()[which];
        let f = random_pexp(&mut rng(seed), fan);
        for tau in 0..fan.cones().len() {
            let on_tau = f.restrict_id(tau).unwrap();
            for rho in 0..fan.cones().len() {
                if fan.is_face(rho, tau) {
                    let phi = fan.cone(tau).characters().map_to(fan.cone(rho).characters());
                    prop_assert_eq!(on_tau.map_exponents(&phi).unwrap(), f.restrict_id(rho).unwrap());
                }
            }
        }
    }

    #[test]
    fn cartier_classes_multiply(which in 0usize..7, seed in any::<u64>()) {
        let fan = &fans()[which];
        let mut r = rng(seed);
        let (a, b) = (random_cartier(&mut r, fan), random_cartier(&mut r, fan));
        let lhs = PExpFun::from_cartier(fan, &a.add(&b)).unwrap();
        let rhs = PExpFun::from_cartier(fan, &a).unwrap().mul(&PExpFun::from_cartier(fan, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_is_a_ring_map_and_descends(which in 0usize..6, seed in any::<u64>()) {
        let fan = &fans()[which];
        let mut r = rng(seed);
        let s = stellar_subdivision(fan, &random_support_point(&mut r, fan, 3)).unwrap();
        let (f, g) = (random_pexp(&mut r, fan), random_pexp(&mut r, fan));
        let up = |h: &PExpFun| h.pullback(&s).unwrap();
        prop_assert_eq!(up(&f.mul(&g).unwrap()), up(&f).mul(&up(&g)).unwrap());
        prop_assert_eq!(up(&f.add(&g).unwrap()), up(&f).add(&up(&g)).unwrap());
        prop_assert_eq!(up(&PExpFun::one(fan)), PExpFun::one(&s.fine));
        prop_assert!(gkm_validate(&s.fine, up(&f).values().to_vec()).unwrap().is_valid());
        prop_assert_eq!(up(&f).descend(&s).unwrap(), f);
    }

    #[test]
    fn perturbing_one_value_breaks_gkm(which in 0usize..6, seed in any::<u64>(), c in 1i64..5) {
        let fan = &fans()[which];
        let mut r = rng(seed);
        let f = random_pexp(&mut r, fan);
        let i = (seed as usize) % fan.max_cones().len();
        let mut values = f.values().to_vec();
        let bump = LaurentPoly::term(c, random_character(&mut r, values[i].rank(), 3));
        values[i] = &values[i] + &bump;
        match gkm_validate(fan, values).unwrap() {
            Validation::Violations(v) => prop_assert!(v.iter().all(|x| x.first == i || x.second == i)),
            Validation::Valid(_) => prop_assert!(false, "perturbation went unnoticed"),
        }
    }
}

#[test]
fn xi_satisfies_gkm_and_restricts_to_its_rays() {
    let fan = corpus::p112();
    let xi = match gkm_validate(&fan, xi_values()).unwrap() {
        Validation::Valid(f) => f,
        Validation::Violations(v) => panic!("{}", v[0]),
    };
    // the zero cone sees the augmentation of every value
    let at_origin = xi.restrict(&[]).unwrap();
    assert_eq!(at_origin.rank(), 0);
    for v in xi.values() {
        assert_eq!(v.augment(), at_origin.augment());
    }
}

#[test]
fn ray_values_that_are_not_integral_are_rejected() {
    // on <e1, -e1-2e2> the slope would be (1, -1/2)
    let fan = corpus::p112();
    let values: Vec<BigInt> = [1, 0, 0].into_iter().map(BigInt::from).collect();
    assert!(matches!(CartierData::from_ray_values(&fan, &values), Err(PExpError::NotLinear(_))));
    let even: Vec<BigInt> = [2, 0, 0].into_iter().map(BigInt::from).collect();
    let d = CartierData::from_ray_values(&fan, &even).unwrap();
    for (cone, m) in fan.max_cones().iter().zip(&d.m) {
        for &r in cone {
            assert_eq!(m.pair(&fan.rays()[r]), even[r]);
        }
    }
}

#[test]
fn incompatible_cartier_data_is_rejected() {
    let fan = corpus::p2();
    let d = CartierData::new(vec![ch(&[0, 0]), ch(&[1, 0]), ch(&[0, 0])]);
    assert!(matches!(PExpFun::from_cartier(&fan, &d), Err(PExpError::IncompatibleCartierData { .. })));
}

#[test]
fn value_count_and_fan_mismatch() {
    let fan = corpus::p2();
    assert!(matches!(gkm_validate(&fan, vec![LaurentPoly::one(2)]), Err(PExpError::ValueCount { expected: 3, found: 1 })));
    let other = corpus::p1xp1();
    assert!(matches!(PExpFun::one(&fan).add(&PExpFun::one(&other)), Err(PExpError::FanMismatch)));
}

#[test]
fn descent_fails_when_pieces_disagree() {
    let fan = corpus::p2();
    let s = stellar_subdivision(&fan, &pt(&[1, 1])).unwrap();
    // the blown-up divisor class is not a pullback
    let values: Vec<BigInt> = (0..s.fine.rays().len()).map(|r| BigInt::from((r == 3) as i64)).collect();
    let d = CartierData::from_ray_values(&s.fine, &values).unwrap();
    let e = PExpFun::from_cartier(&s.fine, &d).unwrap();
    assert!(matches!(e.descend(&s), Err(PExpError::NotDescendable { .. })));
}
