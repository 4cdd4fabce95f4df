//! Small named fans used by the examples and tests.

use std::sync::Arc;

use crate::fan::Fan;

fn build(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Arc<Fan> {
    Arc::new(Fan::from_i64(rank, rays, cones).expect("corpus fans are valid"))
}

pub fn p1() -> Arc<Fan> {
    build(1, &[&[1], &[-1]], &[&[0], &[1]])
}

pub fn p2() -> Arc<Fan> {
    build(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])
}

pub fn p1xp1() -> Arc<Fan> {
    build(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])
}

/// Hirzebruch surface `F_a`.
pub fn hirzebruch(a: i64) -> Arc<Fan> {
    build(2, &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])
}

/// Weighted projective plane `P(1,1,2)`: rays `e1, e2, -e1-2e2`.
pub fn p112() -> Arc<Fan> {
    build(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[0, 2], &[1, 2]])
}

/// `P(1,1,1,3)`: one maximal cone of multiplicity 3.
pub fn p1113() -> Arc<Fan> {
    build(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -3]],
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
    )
}

/// Cones over the six faces of the cube `[-1,1]^3`: complete, not
/// simplicial.
pub fn cube() -> Arc<Fan> {
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for x in [-1, 1] {
        for y in [-1, 1] {
            for z in [-1, 1] {
                rays.push(vec![x, y, z]);
            }
        }
    }
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for axis in 0..3 {
        for sign in [-1, 1] {
            cones.push((0..rays.len()).filter(|&i| rays[i][axis] == sign).collect());
        }
    }
    let rays: Vec<&[i64]> = rays.iter().map(Vec::as_slice).collect();
    let cones: Vec<&[usize]> = cones.iter().map(Vec::as_slice).collect();
    build(3, &rays, &cones)
}

/// The single cone `⟨e1, e1+2e2⟩` of multiplicity 2.
pub fn a1_cone() -> Arc<Fan> {
    build(2, &[&[1, 0], &[1, 2]], &[&[0, 1]])
}

/// The single cone `⟨e1, e2, e1+e2+3e3⟩` of multiplicity 3.
pub fn mult3_cone() -> Arc<Fan> {
    build(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 3]], &[&[0, 1, 2]])
}

/// Complete fans with their names.
pub fn complete() -> Vec<(&'static str, Arc<Fan>)> {
    vec![
        ("P1", p1()),
        ("P2", p2()),
        ("P1xP1", p1xp1()),
        ("F2", hirzebruch(2)),
        ("P(1,1,2)", p112()),
        ("P(1,1,1,3)", p1113()),
        ("cube", cube()),
    ]
}
