mod common;

use common::{ch, lp};
use num_bigint::BigInt;
use pexp::lattice::{Character, IntMatrix};
use pexp::laurent::{LaurentError, LaurentPoly, LocalizationSum};
use proptest::prelude::*;

fn poly(rank: usize) -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec((proptest::collection::vec(-3i64..=3, rank), -4i64..=4), 0..5).prop_map(move |terms| {
        LaurentPoly::from_iter_terms(rank, terms.into_iter().map(|(u, c)| (Character::from_i64(&u), BigInt::from(c))))
    })
}

fn weight(rank: usize) -> impl Strategy<Value = Character> {
    proptest::collection::vec(-2i64..=2, rank)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
        .prop_map(|v| Character::from_i64(&v))
}

fn product_of_factors(rank: usize, ws: &[Character]) -> LaurentPoly {
    ws.iter().fold(LaurentPoly::one(rank), |acc, w| acc.mul_one_minus(w))
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(2), a.clone());
    }

    #[test]
    fn augmentation_is_a_ring_map(a in poly(3), b in poly(3)) {
        prop_assert_eq!((&a * &b).augment(), a.augment() * b.augment());
        prop_assert_eq!((&a + &b).augment(), a.augment() + b.augment());
    }

    #[test]
    fn divide_exact_inverts_mul_one_minus(f in poly(3), w in weight(3)) {
        prop_assert_eq!(f.mul_one_minus(&w).divide_exact(&w).unwrap(), f);
    }

    #[test]
    fn divide_exact_rejects_nonzero_augmentation_on_a_line(f in poly(1), w in weight(1)) {
        // on rank one, (1 - e^w) | f forces f(1) = 0
        if f.augment() != BigInt::from(0) {
            let rejected = matches!(f.divide_exact(&w), Err(LaurentError::NotDivisible { .. }));
            prop_assert!(rejected);
        }
    }

    #[test]
    fn map_exponents_is_multiplicative(a in poly(2), b in poly(2), m in proptest::collection::vec(-3i64..=3, 6)) {
        let phi = IntMatrix::from_i64(&[&m[0..3], &m[3..6]]);
        let img = |p: &LaurentPoly| p.map_exponents(&phi).unwrap();
        prop_assert_eq!(img(&(&a * &b)), &img(&a) * &img(&b));
    }

    #[test]
    fn reduce_recovers_split_polynomials(
        parts in proptest::collection::vec((poly(2), proptest::collection::vec(weight(2), 0..=3), any::<bool>()), 1..=4)
    ) {
        let mut sum = LocalizationSum::new(2);
        let mut expected = LaurentPoly::zero(2);
        for (p, ws, flip) in &parts {
            expected = &expected + p;
            let mut num = &product_of_factors(2, ws) * p;
            let mut den = ws.clone();
            if *flip && !den.is_empty() {
                // 1/(1 - e^w) = -e^{-w}/(1 - e^{-w})
                let w = den[0].clone();
                num = -&num.shift(&w.neg());
                den[0] = w.neg();
            }
            sum.push(num, den).unwrap();
        }
        prop_assert_eq!(sum.reduce().unwrap(), expected);
    }

    #[test]
    fn reduce_agrees_with_common_denominator(
        terms in proptest::collection::vec((poly(2), proptest::collection::vec(weight(2), 1..=2)), 1..=3)
    ) {
        let mut sum = LocalizationSum::new(2);
        for (n, d) in &terms {
            sum.push(n.clone(), d.clone()).unwrap();
        }
        match (sum.reduce(), sum.reduce_common_denominator()) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(LaurentError::NotPolynomial { .. }), Err(LaurentError::NotPolynomial { .. })) => {}
            (a, b) => prop_assert!(false, "fast {a:?} vs exact {b:?}"),
        }
    }
}

#[test]
fn reduce_on_the_projective_line() {
    let u = ch(&[1]);
    let mut sum = LocalizationSum::new(1);
    sum.push(LaurentPoly::one(1), vec![u.clone()]).unwrap();
    sum.push(LaurentPoly::monomial(u.clone()), vec![u.neg()]).unwrap();
    assert_eq!(sum.reduce().unwrap(), lp(1, &[(1, &[0]), (1, &[1])]));

    let mut swapped = LocalizationSum::new(1);
    swapped.push(LaurentPoly::monomial(u.clone()), vec![u.clone()]).unwrap();
    swapped.push(LaurentPoly::one(1), vec![u.neg()]).unwrap();
    assert!(swapped.reduce().unwrap().is_zero());
}

#[test]
fn reduce_rejects_a_lone_pole() {
    let mut sum = LocalizationSum::new(2);
    sum.push(LaurentPoly::one(2), vec![ch(&[1, 0])]).unwrap();
    assert!(matches!(sum.reduce(), Err(LaurentError::NotPolynomial { .. })));
}

#[test]
fn reduce_of_empty_sum_is_zero() {
    assert!(LocalizationSum::new(3).reduce().unwrap().is_zero());
}

#[test]
fn push_rejects_zero_weight_and_rank_mismatch() {
    let mut sum = LocalizationSum::new(2);
    assert!(sum.push(LaurentPoly::one(2), vec![ch(&[0, 0])]).is_err());
    assert!(sum.push(LaurentPoly::one(3), vec![ch(&[1, 0])]).is_err());
}

#[test]
fn exact_division_by_a_polynomial() {
    let a = lp(2, &[(1, &[0, 0]), (1, &[1, 0])]);
    let b = lp(2, &[(2, &[0, 1]), (-1, &[3, -2])]);
    assert_eq!((&a * &b).exact_div(&a), Some(b.clone()));
    assert_eq!(a.exact_div(&b), None);
}

#[test]
fn units_are_signed_monomials() {
    let m = lp(2, &[(-1, &[2, -1])]);
    assert!(m.is_unit());
    assert!((&m * &m.unit_inverse().unwrap()).is_one());
    assert!(!lp(2, &[(1, &[0, 0]), (1, &[1, 0])]).is_unit());
    assert!(!lp(2, &[(2, &[0, 0])]).is_unit());
}

#[test]
fn rank_mismatch_is_reported() {
    assert!(matches!(
        LaurentPoly::one(1).checked_add(&LaurentPoly::one(2)),
        Err(LaurentError::RankMismatch { left: 1, right: 2 })
    ));
}
