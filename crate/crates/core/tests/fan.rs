mod common;

use std::sync::Arc;

use common::{pt, random_support_point, rng};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use pexp::corpus;
use pexp::fan::{
    multiplicity_excess, resolve, resolve_with, stellar_subdivision, star_quotient, Cone, Fan, FanError,
    ResolveStrategy, SubdivisionMap,
};
use pexp::lattice::LatticePoint;
use proptest::prelude::*;

/// Every fine maximal cone lies in its assigned coarse cone, and the fine
/// fan survives full validation.
fn check_subdivision(s: &SubdivisionMap) {
    let rebuilt = Fan::new(s.fine.rank(), s.fine.rays().to_vec(), s.fine.max_cones().to_vec()).expect("valid fan");
    assert_eq!(rebuilt, *s.fine);
    assert_eq!(s.assignment.len(), s.fine.max_cones().len());
    for (i, &a) in s.assignment.iter().enumerate() {
        let coarse = &s.coarse.max_cone(a).cone();
        for &r in &s.fine.max_cones()[i] {
            assert!(coarse.contains(&s.fine.rays()[r]), "fine cone {i} escapes coarse cone {a}");
        }
    }
}

/// Lattice points `Σ λ_i v_i`, `0 ≤ λ_i < 1`, found by scanning a box.
fn brute_parallelepiped(gens: &[[i64; 2]]) -> Vec<LatticePoint> {
    let [a, b] = gens else { unreachable!() };
    let det = a[0] * b[1] - a[1] * b[0];
    let bound = a[0].abs() + a[1].abs() + b[0].abs() + b[1].abs();
    let mut out = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            // Cramer: λ = (x b1 - y b0) / det, μ = (a0 y - a1 x) / det
            let (l, m) = (x * b[1] - y * b[0], a[0] * y - a[1] * x);
            let inside = |t: i64| if det > 0 { (0..det).contains(&t) } else { (det + 1..=0).contains(&t) };
            if inside(l) && inside(m) && (x, y) != (0, 0) {
                out.push(pt(&[x, y]));
            }
        }
    }
    out.sort();
    out
}

fn planar_cone() -> impl Strategy<Value = [[i64; 2]; 2]> {
    ((-5i64..=5, -5i64..=5), (-5i64..=5, -5i64..=5))
        .prop_filter("independent primitive", |((a, b), (c, d))| {
            let g = |x: i64, y: i64| num_integer::gcd(x, y) == 1;
            a * d - b * c != 0 && g(*a, *b) && g(*c, *d)
        })
        .prop_map(|((a, b), (c, d))| [[a, b], [c, d]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn parallelepiped_matches_enumeration(gens in planar_cone()) {
        let cone = Cone::new(2, gens.iter().map(|g| pt(g)).collect()).unwrap();
        let mut found: Vec<LatticePoint> = cone.parallelepiped_points().unwrap().into_iter().map(|p| p.point).collect();
        found.sort();
        prop_assert_eq!(&found, &brute_parallelepiped(&gens));
        prop_assert_eq!(BigInt::from(found.len() + 1), cone.multiplicity().unwrap());
    }

    #[test]
    fn planar_cones_resolve_to_smooth_subdivisions(gens in planar_cone(), seed in 0u64..1000) {
        let fan = Arc::new(Fan::new(2, gens.iter().map(|g| pt(g)).collect(), vec![vec![0, 1]]).unwrap());
        for strategy in [ResolveStrategy::Canonical, ResolveStrategy::Seeded(seed)] {
            let r = resolve_with(&fan, strategy).unwrap();
            prop_assert!(r.map.fine.is_smooth());
            for step in &r.steps {
                prop_assert!(step.excess_after < step.excess_before);
            }
            check_subdivision(&r.map);
        }
    }

    #[test]
    fn stellar_subdivisions_are_fans(which in 0usize..6, seed in 0u64..1000) {
        let fans = [corpus::p2(), corpus::p112(), corpus::hirzebruch(3), corpus::p1113(), corpus::cube(), corpus::mult3_cone()];
        let fan = &fans[which];
        let mut r = rng(seed);
        let v = random_support_point(&mut r, fan, 3);
        let s = stellar_subdivision(fan, &v).unwrap();
        check_subdivision(&s);
        prop_assert_eq!(s.fine.is_complete(), fan.is_complete());
        prop_assert!(s.fine.rays().contains(&v));
    }

    #[test]
    fn seeded_resolutions_of_blowups_are_smooth(seed in 0u64..500) {
        let mut r = rng(seed);
        let fan = if seed % 2 == 0 { corpus::p112() } else { corpus::p1113() };
        let v = random_support_point(&mut r, &fan, 3);
        let s = stellar_subdivision(&fan, &v).unwrap();
        let res = resolve_with(&s.fine, ResolveStrategy::Seeded(seed)).unwrap();
        prop_assert!(res.map.fine.is_smooth());
        let full = s.then(&res.map);
        check_subdivision(&full);
    }
}

#[test]
fn the_a1_cone_resolves_in_one_step() {
    let r = resolve_with(&corpus::a1_cone(), ResolveStrategy::Canonical).unwrap();
    assert_eq!(r.steps.len(), 1);
    assert_eq!(r.steps[0].ray, pt(&[1, 1]));
    assert_eq!(r.steps[0].excess_before, BigInt::one());
    assert!(r.steps[0].excess_after.is_zero());
}

#[test]
fn the_cube_is_triangulated_and_resolved() {
    let fan = corpus::cube();
    assert!(!fan.is_simplicial());
    let map = resolve(&fan).unwrap();
    assert!(map.fine.is_smooth());
    assert!(map.fine.is_complete());
    assert!(multiplicity_excess(&map.fine).is_zero());
    check_subdivision(&map);
}

#[test]
fn face_lattice_of_p112() {
    let fan = corpus::p112();
    // zero cone, three rays, three maximal cones
    assert_eq!(fan.cones().len(), 7);
    let sigma = fan.cone_id(&[0, 2]).unwrap();
    assert_eq!(fan.multiplicity(sigma).unwrap(), BigInt::from(2));
    let ray = fan.cone_id(&[2]).unwrap();
    assert!(fan.is_face(ray, sigma));
    assert_eq!(fan.max_cones_containing(ray).len(), 2);
    assert!(matches!(fan.cone_id(&[0, 1, 2]), Err(FanError::ConeNotInFan(_))));
}

#[test]
fn star_quotient_of_a_ray_is_a_line() {
    let q = star_quotient(&corpus::p112(), &[2]).unwrap();
    assert_eq!(q.fan.rank(), 1);
    assert_eq!(q.fan.max_cones().len(), 2);
    assert!(q.fan.is_complete());
}

#[test]
fn completeness() {
    for (name, fan) in corpus::complete() {
        assert!(fan.is_complete(), "{name}");
    }
    assert!(!corpus::a1_cone().is_complete());
    let half = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, 0]], &[&[0, 1], &[1, 2]]).unwrap();
    assert!(!half.is_complete());
}

#[test]
fn builder_rejects_bad_input() {
    let err = |rays: &[&[i64]], cones: &[&[usize]]| Fan::from_i64(2, rays, cones).unwrap_err();
    assert!(matches!(err(&[&[2, 0], &[0, 1]], &[&[0, 1]]), FanError::NonPrimitiveRay { index: 0, .. }));
    assert!(matches!(err(&[&[0, 0]], &[&[0]]), FanError::ZeroRay(0)));
    assert!(matches!(err(&[&[1, 0], &[1, 0]], &[&[0], &[1]]), FanError::DuplicateRay(0, 1)));
    assert!(matches!(err(&[&[1, 0], &[0, 1]], &[&[0, 5]]), FanError::RayIndexOutOfRange { .. }));
    assert!(matches!(err(&[&[1, 0], &[-1, 0]], &[&[0, 1]]), FanError::NotStronglyConvex(_)));
    assert!(matches!(err(&[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1], &[2]]), FanError::NotAFan { .. }));
    assert!(matches!(err(&[&[1, 0], &[0, 1], &[1, 2]], &[&[0, 1], &[0, 2]]), FanError::NotAFan { .. }));
    assert!(matches!(err(&[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1]]), FanError::UnusedRay(2)));
    assert!(matches!(err(&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]), FanError::DuplicateCone(_)));
}

#[test]
fn stellar_subdivision_errors() {
    let fan = corpus::a1_cone();
    assert!(matches!(stellar_subdivision(&fan, &pt(&[-1, 0])), Err(FanError::RayOutsideSupport(_))));
    assert!(matches!(stellar_subdivision(&fan, &pt(&[2, 2])), Err(FanError::NonPrimitiveRay { .. })));
    assert!(matches!(stellar_subdivision(&fan, &pt(&[1, 1, 1])), Err(FanError::RankMismatch { .. })));
}

#[test]
fn subdividing_at_an_existing_ray_of_a_simplicial_fan_is_the_identity() {
    let fan = corpus::p2();
    assert!(stellar_subdivision(&fan, &pt(&[1, 0])).unwrap().is_identity());
}
