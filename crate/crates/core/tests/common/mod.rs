#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use pexp::fan::Fan;
use pexp::lattice::{Character, LatticePoint};
use pexp::laurent::LaurentPoly;
use pexp::pexp::{CartierData, PExpFun};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn ch(c: &[i64]) -> Character {
    Character::from_i64(c)
}

pub fn pt(c: &[i64]) -> LatticePoint {
    LatticePoint::from_i64(c)
}

pub fn lp(rank: usize, terms: &[(i64, &[i64])]) -> LaurentPoly {
    LaurentPoly::from_terms(rank, terms)
}

pub fn random_character(rng: &mut ChaCha8Rng, rank: usize, bound: i64) -> Character {
    Character::new((0..rank).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

pub fn random_laurent(rng: &mut ChaCha8Rng, rank: usize, max_terms: usize, bound: i64) -> LaurentPoly {
    let n = rng.gen_range(0..=max_terms);
    LaurentPoly::from_iter_terms(
        rank,
        (0..n).map(|_| (random_character(rng, rank, bound), BigInt::from(rng.gen_range(-3i64..=3)))),
    )
}

/// Random Cartier data: random ray values when they are linear with
/// integral slopes on every cone, otherwise a global character plus a
/// constant on all rays.
pub fn random_cartier(rng: &mut ChaCha8Rng, fan: &Fan) -> CartierData {
    for _ in 0..40 {
        let values: Vec<BigInt> = (0..fan.rays().len()).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect();
        if let Ok(d) = CartierData::from_ray_values(fan, &values) {
            return d;
        }
    }
    let m = random_character(rng, fan.rank(), 3);
    for lambda in [rng.gen_range(-3i64..=3), 0] {
        let values: Vec<BigInt> = fan.rays().iter().map(|v| m.pair(v) + lambda).collect();
        if let Ok(d) = CartierData::from_ray_values(fan, &values) {
            return d;
        }
    }
    unreachable!("global characters are always Cartier")
}

/// A random R(T)-combination of Cartier classes.
pub fn random_pexp(rng: &mut ChaCha8Rng, fan: &Arc<Fan>) -> PExpFun {
    let k = rng.gen_range(1..=3);
    let mut f = PExpFun::zero(fan);
    for _ in 0..k {
        let d = random_cartier(rng, fan);
        let c = random_laurent(rng, fan.rank(), 2, 2);
        let g = PExpFun::from_cartier(fan, &d).unwrap().scale(&c).unwrap();
        f = f.add(&g).unwrap();
    }
    f
}

/// A random primitive lattice point in the support of `fan`.
pub fn random_support_point(rng: &mut ChaCha8Rng, fan: &Fan, bound: i64) -> LatticePoint {
    loop {
        let v = LatticePoint::new((0..fan.rank()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect());
        if !v.is_zero() && v.content() == BigInt::from(1) && fan.locate(&v).is_some() {
            return v;
        }
    }
}

/// `Σ e^m` over `m ∈ Z^2` with `a, b ≥ 0`, `a + b ≤ d`.
pub fn simplex_points(d: i64) -> LaurentPoly {
    let mut terms = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            terms.push((ch(&[a, b]), BigInt::from(1)));
        }
    }
    LaurentPoly::from_iter_terms(2, terms)
}

/// Cartier data of the degree-`d` class on the corpus `P^2`.
pub fn p2_degree(d: i64) -> CartierData {
    CartierData::new(vec![ch(&[0, 0]), ch(&[d, 0]), ch(&[0, d])])
}

/// The displayed Example 1.1 functions on `P(1,1,2)`: `ξ` and the three
/// "dual" functions, in maximal cone order `<e1,e2>, <e1,-e1-2e2>, <e2,-e1-2e2>`.
pub fn xi_values() -> Vec<LaurentPoly> {
    vec![
        lp(2, &[(1, &[1, 0]), (1, &[0, 1])]),
        lp(2, &[(1, &[0, 0]), (1, &[1, -1])]),
        lp(2, &[(1, &[-2, 1]), (1, &[-1, 0])]),
    ]
}

pub fn displayed_duals() -> Vec<Vec<LaurentPoly>> {
    let one = LaurentPoly::one(2);
    let om = |c: &[i64]| LaurentPoly::one_minus(&ch(c));
    vec![
        vec![one.clone(), one.clone(), one],
        vec![LaurentPoly::zero(2), om(&[0, 1]), om(&[2, 0])],
        vec![LaurentPoly::zero(2), &om(&[0, 1]) * &om(&[-2, 1]), LaurentPoly::zero(2)],
    ]
}

pub fn expected_xi_coefficients() -> Vec<LaurentPoly> {
    vec![
        lp(2, &[(1, &[1, 0]), (1, &[0, 1])]),
        lp(2, &[(1, &[-2, 1]), (1, &[-1, 0])]),
        lp(2, &[(1, &[0, 0]), (1, &[1, -1])]),
    ]
}

/// The function supported on `<e2,-e1-2e2>` with value
/// `(1 - e^{u1})(1 - e^{-2u1+u2})`.
pub fn chart_point_class() -> Vec<LaurentPoly> {
    let om = |c: &[i64]| LaurentPoly::one_minus(&ch(c));
    vec![LaurentPoly::zero(2), LaurentPoly::zero(2), &om(&[1, 0]) * &om(&[-2, 1])]
}

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}
