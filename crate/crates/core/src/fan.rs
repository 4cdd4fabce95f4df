//! Rational polyhedral cones and fans.
//!
//! A [`Fan`] stores its rays, its maximal cones as ray-index sets, and the
//! full face lattice derived from them. Cones inside a fan are always named
//! by their sorted ray-index sets; the empty set is the zero cone.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{
    annihilator, integer_kernel, quotient, saturation, smith_normal_form, sublattice_index,
    Character, IntMatrix, LatticePoint, QuotientLattice,
};

/// Largest rank for which non-simplicial cones are supported.
pub const MAX_NON_SIMPLICIAL_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("ray {index} = {ray} is not primitive")]
    NonPrimitiveRay { index: usize, ray: LatticePoint },
    #[error("ray {0} is zero")]
    ZeroRay(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("ray {0} does not span a cone of the fan")]
    UnusedRay(usize),
    #[error("cone {cone:?} refers to ray index {index}, out of range")]
    RayIndexOutOfRange { cone: Vec<usize>, index: usize },
    #[error("maximal cone {0:?} is listed twice")]
    DuplicateCone(Vec<usize>),
    #[error("cone {0:?} is not strongly convex")]
    NotStronglyConvex(Vec<usize>),
    #[error("ray {ray} of cone {cone:?} is not an extreme ray")]
    RedundantRay { cone: Vec<usize>, ray: usize },
    #[error("not a fan: cones {first:?} and {second:?} {reason}")]
    NotAFan { first: Vec<usize>, second: Vec<usize>, reason: String },
    #[error("non-simplicial cone {cone:?} in rank {rank} > {max}", max = MAX_NON_SIMPLICIAL_RANK)]
    UnsupportedDimension { cone: Vec<usize>, rank: usize },
    #[error("cone {0:?} is not simplicial")]
    NotSimplicial(Vec<usize>),
    #[error("cone {0:?} is not a cone of the fan")]
    ConeNotInFan(Vec<usize>),
    #[error("{0} does not lie in the support of the fan")]
    RayOutsideSupport(LatticePoint),
}

/// A facet of a cone: a supporting form and the generators it vanishes on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Character,
    pub generators: Vec<usize>,
}

/// A strongly convex rational polyhedral cone given by its primitive
/// extreme rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    rank: usize,
    generators: Vec<LatticePoint>,
    dim: usize,
    facets: Vec<Facet>,
    /// Basis of `σ^⊥ ∩ M`.
    orthogonal: Vec<Character>,
}

#[derive(Debug)]
enum ConeDefect {
    NotPrimitive(usize),
    Zero(usize),
    NotStronglyConvex,
    Redundant(usize),
    Unsupported,
}

impl Cone {
    /// Builds a cone from primitive, pairwise distinct generators, each of
    /// which must span an extreme ray.
    pub fn new(rank: usize, generators: Vec<LatticePoint>) -> Result<Cone, FanError> {
        for g in &generators {
            if g.rank() != rank {
                return Err(FanError::RankMismatch { expected: rank, found: g.rank() });
            }
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.is_zero() && !g.content().is_one() {
                return Err(FanError::NonPrimitiveRay { index: i, ray: g.clone() });
            }
        }
        let ids: Vec<usize> = (0..generators.len()).collect();
        Cone::build(rank, generators).map_err(|d| defect_error(d, &ids, rank))
    }

    /// The cone generated by arbitrary nonzero vectors: normalizes to
    /// primitive generators and drops the ones that are not extreme.
    pub fn hull(rank: usize, vectors: &[LatticePoint]) -> Result<Cone, FanError> {
        let mut gens: Vec<LatticePoint> = Vec::new();
        for v in vectors {
            if v.rank() != rank {
                return Err(FanError::RankMismatch { expected: rank, found: v.rank() });
            }
            if v.is_zero() {
                continue;
            }
            let p = crate::lattice::primitive_generator(v).expect("nonzero");
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        let dim = span_dim(rank, &gens);
        let facets = compute_facets(rank, &gens, dim);
        let faces = facet_closure(gens.len(), &facets);
        if !faces.contains(&Vec::new()) {
            return Err(FanError::NotStronglyConvex(Vec::new()));
        }
        let keep: Vec<LatticePoint> =
            gens.iter().enumerate().filter(|(i, _)| faces.contains(&vec![*i])).map(|(_, g)| g.clone()).collect();
        Cone::build(rank, keep).map_err(|d| defect_error(d, &[], rank))
    }

    fn build(rank: usize, generators: Vec<LatticePoint>) -> Result<Cone, ConeDefect> {
        for (i, g) in generators.iter().enumerate() {
            let c = g.content();
            if c.is_zero() {
                return Err(ConeDefect::Zero(i));
            }
            if !c.is_one() {
                return Err(ConeDefect::NotPrimitive(i));
            }
        }
        let dim = span_dim(rank, &generators);
        let simplicial = dim == generators.len();
        if !simplicial && rank > MAX_NON_SIMPLICIAL_RANK {
            return Err(ConeDefect::Unsupported);
        }
        let facets = compute_facets(rank, &generators, dim);
        if dim > 0 && !simplicial {
            let faces = facet_closure(generators.len(), &facets);
            if !faces.contains(&Vec::new()) {
                return Err(ConeDefect::NotStronglyConvex);
            }
            if let Some(i) = (0..generators.len()).find(|&i| !faces.contains(&vec![i])) {
                return Err(ConeDefect::Redundant(i));
            }
        }
        let orthogonal = annihilator(rank, &generators).expect("ranks checked");
        Ok(Cone { rank, generators, dim, facets, orthogonal })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[LatticePoint] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Basis of `σ^⊥ ∩ M`.
    pub fn orthogonal(&self) -> &[Character] {
        &self.orthogonal
    }

    pub fn is_simplicial(&self) -> bool {
        self.dim == self.generators.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    pub fn in_span(&self, v: &LatticePoint) -> bool {
        self.orthogonal.iter().all(|u| u.pair(v).is_zero())
    }

    pub fn contains(&self, v: &LatticePoint) -> bool {
        self.in_span(v) && self.facets.iter().all(|f| !f.normal.pair(v).is_negative())
    }

    pub fn contains_in_relative_interior(&self, v: &LatticePoint) -> bool {
        self.in_span(v) && self.facets.iter().all(|f| f.normal.pair(v).is_positive())
    }

    /// Index of the generated sublattice inside `Span(σ) ∩ N`.
    pub fn multiplicity(&self) -> Result<BigInt, FanError> {
        if !self.is_simplicial() {
            return Err(FanError::NotSimplicial(Vec::new()));
        }
        Ok(sublattice_index(self.rank, &self.generators))
    }

    pub fn is_smooth(&self) -> bool {
        self.multiplicity().is_ok_and(|m| m.is_one())
    }

    /// All faces as sets of generator positions, including the cone itself
    /// and the zero face.
    pub fn face_sets(&self) -> BTreeSet<Vec<usize>> {
        if self.is_simplicial() {
            (0..self.generators.len()).powerset().collect()
        } else {
            facet_closure(self.generators.len(), &self.facets)
        }
    }

    /// Nonzero lattice points `Σ λ_i v_i` with `0 ≤ λ_i < 1` (simplicial
    /// cones only), with their coefficient vectors.
    pub fn parallelepiped_points(&self) -> Result<Vec<ParallelepipedPoint>, FanError> {
        if !self.is_simplicial() {
            return Err(FanError::NotSimplicial(Vec::new()));
        }
        let k = self.generators.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        // Coordinates of the generators in a basis of Span(σ) ∩ N.
        let rows: Vec<&[BigInt]> = self.generators.iter().map(|g| g.coords()).collect();
        let snf = smith_normal_form(&IntMatrix::from_rows(self.rank, &rows));
        let g = snf.u_inv.mul(&snf.d).columns(0..k);
        // Z^k / rowspace(G) ≅ ⊕ Z/d_i; λ = Σ (y_i / d_i) U'[i, :].
        let inner = smith_normal_form(&g);
        let d: Vec<BigInt> = (0..k).map(|i| inner.d[(i, i)].clone()).collect();
        let l = d[k - 1].clone();
        let mut out = Vec::new();
        let ranges: Vec<Vec<BigInt>> = d
            .iter()
            .map(|di| {
                let n = di.to_usize().expect("multiplicity fits in memory");
                (0..n).map(BigInt::from).collect()
            })
            .collect();
        for ys in ranges.iter().multi_cartesian_product() {
            let mut num = vec![BigInt::zero(); k];
            for (i, y) in ys.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let scale = *y * (&l / &d[i]);
                for (j, n) in num.iter_mut().enumerate() {
                    *n += &scale * &inner.u[(i, j)];
                }
            }
            for n in num.iter_mut() {
                *n = n.mod_floor(&l);
            }
            if num.iter().all(Zero::is_zero) {
                continue;
            }
            let mut p = vec![BigInt::zero(); self.rank];
            for (n, v) in num.iter().zip(&self.generators) {
                for (pc, vc) in p.iter_mut().zip(v.coords()) {
                    *pc += n * vc;
                }
            }
            let p: Vec<BigInt> = p.into_iter().map(|c| {
                debug_assert!(c.is_multiple_of(&l));
                c / &l
            }).collect();
            out.push(ParallelepipedPoint {
                point: LatticePoint::new(p),
                numerators: num,
                denominator: l.clone(),
            });
        }
        Ok(out)
    }
}

/// A lattice point `Σ (numerators_i / denominator) v_i` of a cone's
/// fundamental parallelepiped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelepipedPoint {
    pub point: LatticePoint,
    pub numerators: Vec<BigInt>,
    pub denominator: BigInt,
}

impl ParallelepipedPoint {
    /// `Σ λ_i` scaled by the denominator.
    pub fn height_numerator(&self) -> BigInt {
        self.numerators.iter().sum()
    }
}

/// Maps a defect to an error, translating generator positions through `ids`.
fn defect_error(d: ConeDefect, ids: &[usize], rank: usize) -> FanError {
    let id = |i: usize| ids.get(i).copied().unwrap_or(i);
    match d {
        ConeDefect::NotPrimitive(i) => FanError::NonPrimitiveRay { index: id(i), ray: LatticePoint::zero(rank) },
        ConeDefect::Zero(i) => FanError::ZeroRay(id(i)),
        ConeDefect::NotStronglyConvex => FanError::NotStronglyConvex(ids.to_vec()),
        ConeDefect::Redundant(i) => FanError::RedundantRay { cone: ids.to_vec(), ray: id(i) },
        ConeDefect::Unsupported => FanError::UnsupportedDimension { cone: ids.to_vec(), rank },
    }
}

fn span_dim(rank: usize, vecs: &[LatticePoint]) -> usize {
    let rows: Vec<&[BigInt]> = vecs.iter().map(|v| v.coords()).collect();
    saturation(rank, &rows).len()
}

/// Facets by brute force over `(dim - 1)`-subsets of generators.
fn compute_facets(rank: usize, gens: &[LatticePoint], dim: usize) -> Vec<Facet> {
    if dim == 0 {
        return Vec::new();
    }
    let mut found: BTreeMap<Vec<usize>, Character> = BTreeMap::new();
    for subset in (0..gens.len()).combinations(dim - 1) {
        let rows: Vec<&[BigInt]> = subset.iter().map(|&i| gens[i].coords()).collect();
        if !rows.is_empty() && saturation(rank, &rows).len() != dim - 1 {
            continue;
        }
        let kernel = integer_kernel(rank, &rows);
        let Some(normal) = kernel
            .into_iter()
            .map(Character::new)
            .find(|u| gens.iter().any(|g| !u.pair(g).is_zero()))
        else {
            continue;
        };
        let pairings: Vec<BigInt> = gens.iter().map(|g| normal.pair(g)).collect();
        let normal = if pairings.iter().all(|p| !p.is_negative()) {
            normal
        } else if pairings.iter().all(|p| !p.is_positive()) {
            normal.neg()
        } else {
            continue;
        };
        let zero_set: Vec<usize> = (0..gens.len()).filter(|&i| pairings[i].is_zero()).collect();
        found.entry(zero_set).or_insert(normal);
    }
    found.into_iter().map(|(generators, normal)| Facet { normal, generators }).collect()
}

/// All intersections of facets, plus the whole cone.
fn facet_closure(n: usize, facets: &[Facet]) -> BTreeSet<Vec<usize>> {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    faces.insert((0..n).collect());
    let mut queue: VecDeque<Vec<usize>> = facets.iter().map(|f| f.generators.clone()).collect();
    while let Some(face) = queue.pop_front() {
        if !faces.insert(face.clone()) {
            continue;
        }
        for f in facets {
            let meet: Vec<usize> = face.iter().copied().filter(|i| f.generators.contains(i)).collect();
            if !faces.contains(&meet) {
                queue.push_back(meet);
            }
        }
    }
    faces
}

/// A cone of a fan together with its character quotient `M_σ = M / (σ^⊥ ∩ M)`.
#[derive(Debug, Clone)]
pub struct FanCone {
    rays: Vec<usize>,
    cone: Cone,
    maximal: bool,
    characters: QuotientLattice,
}

impl FanCone {
    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn is_maximal(&self) -> bool {
        self.maximal
    }

    /// The quotient lattice `M_σ`.
    pub fn characters(&self) -> &QuotientLattice {
        &self.characters
    }
}

/// A fan: rays, maximal cones, and the derived face lattice.
#[derive(Clone)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticePoint>,
    max_cones: Vec<Vec<usize>>,
    /// Every cone of the fan, sorted by (dimension, ray set).
    cones: Vec<FanCone>,
    index: HashMap<Vec<usize>, usize>,
    /// Position in `cones` of each maximal cone.
    max_ids: Vec<usize>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("rank", &self.rank)
            .field("rays", &self.rays)
            .field("max_cones", &self.max_cones)
            .finish()
    }
}

impl Fan {
    /// Validates rays and cones and computes the face lattice.
    pub fn new(rank: usize, rays: Vec<LatticePoint>, max_cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        Fan::assemble(rank, rays, max_cones, true)
    }

    /// Shared constructor. Skipping the pairwise intersection check is
    /// sound only when the cones are known to form a fan, e.g. after a
    /// stellar subdivision of a valid fan.
    pub(crate) fn assemble(
        rank: usize,
        rays: Vec<LatticePoint>,
        max_cones: Vec<Vec<usize>>,
        check_intersections: bool,
    ) -> Result<Fan, FanError> {
        for (i, r) in rays.iter().enumerate() {
            if r.rank() != rank {
                return Err(FanError::RankMismatch { expected: rank, found: r.rank() });
            }
            let c = r.content();
            if c.is_zero() {
                return Err(FanError::ZeroRay(i));
            }
            if !c.is_one() {
                return Err(FanError::NonPrimitiveRay { index: i, ray: r.clone() });
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay(j, i));
            }
        }
        let mut max_cones: Vec<Vec<usize>> = if max_cones.is_empty() { vec![Vec::new()] } else { max_cones };
        for c in max_cones.iter_mut() {
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::RayIndexOutOfRange { cone: c.clone(), index: bad });
            }
            c.sort_unstable();
            c.dedup();
        }
        for (i, c) in max_cones.iter().enumerate() {
            if max_cones[..i].contains(c) {
                return Err(FanError::DuplicateCone(c.clone()));
            }
        }

        let mut geometry: Vec<Cone> = Vec::with_capacity(max_cones.len());
        for c in &max_cones {
            let gens: Vec<LatticePoint> = c.iter().map(|&i| rays[i].clone()).collect();
            let cone = Cone::build(rank, gens).map_err(|d| defect_error(d, c, rank))?;
            geometry.push(cone);
        }

        // Face lattice.
        let local_faces: Vec<BTreeSet<Vec<usize>>> = geometry.iter().map(Cone::face_sets).collect();
        let mut faces: BTreeMap<Vec<usize>, Cone> = BTreeMap::new();
        for (c, locals) in max_cones.iter().zip(&local_faces) {
            for local in locals {
                let global: Vec<usize> = local.iter().map(|&i| c[i]).collect();
                if faces.contains_key(&global) {
                    continue;
                }
                let gens: Vec<LatticePoint> = global.iter().map(|&i| rays[i].clone()).collect();
                let face = Cone::build(rank, gens).map_err(|d| defect_error(d, &global, rank))?;
                faces.insert(global, face);
            }
        }
        if let Some(i) = (0..rays.len()).find(|&i| !faces.contains_key(&vec![i])) {
            return Err(FanError::UnusedRay(i));
        }

        for (i, a) in max_cones.iter().enumerate().filter(|_| check_intersections) {
            for (j, b) in max_cones.iter().enumerate() {
                if i == j {
                    continue;
                }
                let as_face = local_faces[j].iter().any(|local| local.iter().map(|&k| b[k]).eq(a.iter().copied()));
                if as_face {
                    return Err(FanError::NotAFan {
                        first: a.clone(),
                        second: b.clone(),
                        reason: "are nested (a maximal cone is a face of another)".into(),
                    });
                }
            }
        }
        for i in (0..max_cones.len()).filter(|_| check_intersections) {
            for j in i + 1..max_cones.len() {
                check_meet(
                    rank,
                    &rays,
                    (&max_cones[i], &geometry[i], &local_faces[i]),
                    (&max_cones[j], &geometry[j], &local_faces[j]),
                )?;
            }
        }

        let mut cones: Vec<FanCone> = faces
            .into_iter()
            .map(|(rays_of, cone)| {
                let characters = quotient(rank, &cone.orthogonal().iter().map(|u| u.coords().to_vec()).collect::<Vec<_>>())
                    .expect("annihilator is saturated");
                let maximal = max_cones.contains(&rays_of);
                FanCone { rays: rays_of, cone, maximal, characters }
            })
            .collect();
        cones.sort_by(|a, b| (a.dim(), &a.rays).cmp(&(b.dim(), &b.rays)));
        let index: HashMap<Vec<usize>, usize> = cones.iter().enumerate().map(|(i, c)| (c.rays.clone(), i)).collect();
        let max_ids = max_cones.iter().map(|c| index[c]).collect();
        Ok(Fan { rank, rays, max_cones, cones, index, max_ids })
    }

    /// Convenience constructor from small integer data.
    pub fn from_i64(rank: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Fan, FanError> {
        Fan::new(
            rank,
            rays.iter().map(|r| LatticePoint::from_i64(r)).collect(),
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticePoint] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cones(&self) -> &[FanCone] {
        &self.cones
    }

    pub fn cone(&self, id: usize) -> &FanCone {
        &self.cones[id]
    }

    /// Position in [`Fan::cones`] of the cone with the given ray set.
    pub fn cone_id(&self, rays: &[usize]) -> Result<usize, FanError> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        key.dedup();
        self.index.get(&key).copied().ok_or(FanError::ConeNotInFan(key))
    }

    /// Cone id of the `i`-th maximal cone.
    pub fn max_cone_id(&self, i: usize) -> usize {
        self.max_ids[i]
    }

    pub fn max_cone(&self, i: usize) -> &FanCone {
        &self.cones[self.max_ids[i]]
    }

    /// Indices of the maximal cones containing the given cone as a face.
    pub fn max_cones_containing(&self, cone_id: usize) -> Vec<usize> {
        let rays = &self.cones[cone_id].rays;
        (0..self.max_cones.len())
            .filter(|&i| rays.iter().all(|r| self.max_cones[i].binary_search(r).is_ok()))
            .collect()
    }

    /// True when `face` is a face of `cone` (both given as cone ids).
    pub fn is_face(&self, face: usize, cone: usize) -> bool {
        let big = &self.cones[cone].rays;
        self.cones[face].rays.iter().all(|r| big.binary_search(r).is_ok())
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_ids.iter().all(|&i| self.cones[i].cone.is_simplicial())
    }

    pub fn is_smooth(&self) -> bool {
        self.max_ids.iter().all(|&i| self.cones[i].cone.is_smooth())
    }

    /// Multiplicity of a simplicial cone of the fan.
    pub fn multiplicity(&self, cone_id: usize) -> Result<BigInt, FanError> {
        let c = &self.cones[cone_id];
        c.cone.multiplicity().map_err(|_| FanError::NotSimplicial(c.rays.clone()))
    }

    /// Some maximal cone containing `v`, if any.
    pub fn locate(&self, v: &LatticePoint) -> Option<usize> {
        (0..self.max_cones.len()).find(|&i| self.max_cone(i).cone.contains(v))
    }

    /// Completeness by facet pairing: every maximal cone is full
    /// dimensional, every facet is shared by exactly two maximal cones lying
    /// on opposite sides of it, and the facet-adjacency graph is connected.
    pub fn is_complete(&self) -> bool {
        let n = self.max_cones.len();
        if self.max_ids.iter().any(|&i| !self.cones[i].cone.is_full_dimensional()) {
            return false;
        }
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &id) in self.max_ids.iter().enumerate() {
            let cone = &self.cones[id].cone;
            for facet in cone.facets() {
                let facet_rays: Vec<usize> = facet.generators.iter().map(|&k| self.max_cones[i][k]).collect();
                let Ok(fid) = self.cone_id(&facet_rays) else {
                    return false;
                };
                let owners = self.max_cones_containing(fid);
                if owners.len() != 2 {
                    return false;
                }
                let other = if owners[0] == i { owners[1] } else { owners[0] };
                let opposite = self.max_cones[other]
                    .iter()
                    .filter(|r| !facet_rays.contains(r))
                    .all(|&r| facet.normal.pair(&self.rays[r]).is_negative());
                if !opposite {
                    return false;
                }
                adjacency[i].push(other);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Checks that two maximal cones meet in a common face.
fn check_meet(
    rank: usize,
    rays: &[LatticePoint],
    (a_rays, a, a_faces): (&[usize], &Cone, &BTreeSet<Vec<usize>>),
    (b_rays, b, b_faces): (&[usize], &Cone, &BTreeSet<Vec<usize>>),
) -> Result<(), FanError> {
    let common: Vec<usize> = a_rays.iter().copied().filter(|r| b_rays.contains(r)).collect();
    let fail = |reason: &str| FanError::NotAFan { first: a_rays.to_vec(), second: b_rays.to_vec(), reason: reason.into() };
    let a_local: Vec<usize> = common.iter().map(|r| a_rays.iter().position(|x| x == r).unwrap()).collect();
    let b_local: Vec<usize> = common.iter().map(|r| b_rays.iter().position(|x| x == r).unwrap()).collect();
    if !a_faces.contains(&a_local) || !b_faces.contains(&b_local) {
        return Err(fail("share rays that do not span a common face"));
    }

    // Fast path: a facet hyperplane of one cone separates them and cuts out
    // exactly the common face on both sides.
    let zero_set = |u: &Character, rs: &[usize]| -> Vec<usize> {
        rs.iter().copied().filter(|&r| u.pair(&rays[r]).is_zero()).collect()
    };
    let candidates = a.facets().iter().map(|f| f.normal.clone()).chain(b.facets().iter().map(|f| f.normal.neg()));
    for u in candidates {
        let nonneg_a = a_rays.iter().all(|&r| !u.pair(&rays[r]).is_negative());
        let nonpos_b = b_rays.iter().all(|&r| !u.pair(&rays[r]).is_positive());
        if nonneg_a && nonpos_b && zero_set(&u, a_rays) == common && zero_set(&u, b_rays) == common {
            return Ok(());
        }
    }

    // Exact path: enumerate the extreme rays of the intersection.
    let equations: Vec<Character> = a.orthogonal().iter().chain(b.orthogonal()).cloned().collect();
    let inequalities: Vec<Character> =
        a.facets().iter().chain(b.facets()).map(|f| f.normal.clone()).collect();
    for r in extreme_rays(rank, &equations, &inequalities) {
        if !common.iter().any(|&c| rays[c] == r) {
            return Err(fail("overlap in a region that is not a common face"));
        }
    }
    Ok(())
}

/// Extreme rays of the pointed cone `{v : <e, v> = 0, <h, v> >= 0}`.
fn extreme_rays(rank: usize, equations: &[Character], inequalities: &[Character]) -> Vec<LatticePoint> {
    let mut out: Vec<LatticePoint> = Vec::new();
    let eq_rows: Vec<&[BigInt]> = equations.iter().map(|e| e.coords()).collect();
    let eq_rank = saturation(rank, &eq_rows).len();
    if eq_rank >= rank {
        return out;
    }
    let need = rank - 1 - eq_rank;
    for subset in (0..inequalities.len()).combinations(need) {
        let mut rows = eq_rows.clone();
        rows.extend(subset.iter().map(|&i| inequalities[i].coords()));
        let kernel = integer_kernel(rank, &rows);
        if kernel.len() != 1 {
            continue;
        }
        let v = LatticePoint::new(kernel.into_iter().next().unwrap());
        for cand in [v.clone(), v.neg()] {
            if inequalities.iter().all(|h| !h.pair(&cand).is_negative()) {
                let p = crate::lattice::primitive_generator(&cand).expect("nonzero kernel vector");
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// The fan of an orbit closure: `Star τ` projected to `N / N_τ`.
#[derive(Debug, Clone)]
pub struct StarQuotient {
    pub fan: Fan,
    /// The projection `N → N / N_τ` (row vectors).
    pub projection: QuotientLattice,
    /// For each maximal cone of the quotient fan, the maximal cone of the
    /// original fan it is the image of.
    pub source_cones: Vec<usize>,
}

/// Projects the star of `tau` (a ray-index set) to `N / N_τ`.
pub fn star_quotient(fan: &Fan, tau: &[usize]) -> Result<StarQuotient, FanError> {
    let tau_id = fan.cone_id(tau)?;
    let tau_cone = &fan.cones[tau_id];
    let rank = fan.rank;
    let rows: Vec<&[BigInt]> = tau_cone.cone.generators().iter().map(|g| g.coords()).collect();
    let n_tau = saturation(rank, &rows);
    let projection = quotient(rank, &n_tau).expect("saturation is saturated");
    let qrank = projection.rank();

    let star = fan.max_cones_containing(tau_id);
    let image_of = |r: usize| {
        let v = LatticePoint::new(projection.project(fan.rays[r].coords()));
        crate::lattice::primitive_generator(&v).ok()
    };
    let mut hulls = Vec::with_capacity(star.len());
    for &sigma in &star {
        let images: Vec<LatticePoint> = fan.max_cones[sigma]
            .iter()
            .filter(|r| !tau_cone.rays.contains(r))
            .filter_map(|&r| image_of(r))
            .collect();
        hulls.push(Cone::hull(qrank, &images)?);
    }
    // Quotient rays keep the order of the original rays they come from.
    let mut new_rays: Vec<LatticePoint> = Vec::new();
    for r in 0..fan.rays.len() {
        if let Some(v) = image_of(r) {
            if !new_rays.contains(&v) && hulls.iter().any(|h| h.generators().contains(&v)) {
                new_rays.push(v);
            }
        }
    }
    let new_cones: Vec<Vec<usize>> = hulls
        .iter()
        .map(|h| h.generators().iter().map(|g| new_rays.iter().position(|r| r == g).unwrap()).sorted().collect())
        .collect();
    let source_cones = star;
    let quotient_fan = Fan::new(qrank, new_rays, new_cones)?;
    Ok(StarQuotient { fan: quotient_fan, projection, source_cones })
}

/// A refinement `fine → coarse` of fans with equal support.
#[derive(Debug, Clone)]
pub struct SubdivisionMap {
    pub fine: Arc<Fan>,
    pub coarse: Arc<Fan>,
    /// For each maximal cone of `fine`, the maximal cone of `coarse`
    /// containing it.
    pub assignment: Vec<usize>,
}

impl SubdivisionMap {
    pub fn identity(fan: Arc<Fan>) -> Self {
        let assignment = (0..fan.max_cones.len()).collect();
        SubdivisionMap { fine: fan.clone(), coarse: fan, assignment }
    }

    /// `self` refines `coarse`, `next` refines `self.fine`; the result
    /// refines `coarse` directly.
    pub fn then(&self, next: &SubdivisionMap) -> SubdivisionMap {
        assert!(*next.coarse == *self.fine, "subdivision maps do not compose");
        SubdivisionMap {
            fine: next.fine.clone(),
            coarse: self.coarse.clone(),
            assignment: next.assignment.iter().map(|&i| self.assignment[i]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self.fine == *self.coarse
    }
}

/// Stellar subdivision at a primitive vector of the support.
///
/// Every maximal cone containing `ray` is replaced by the joins of `ray`
/// with those of its facets that do not contain it. At an existing ray of a
/// simplicial fan this is the identity; at an existing ray of a
/// non-simplicial cone it is the pulling triangulation step.
pub fn stellar_subdivision(fan: &Arc<Fan>, ray: &LatticePoint) -> Result<SubdivisionMap, FanError> {
    if ray.rank() != fan.rank {
        return Err(FanError::RankMismatch { expected: fan.rank, found: ray.rank() });
    }
    if ray.is_zero() {
        return Err(FanError::RayOutsideSupport(ray.clone()));
    }
    if !ray.content().is_one() {
        return Err(FanError::NonPrimitiveRay { index: fan.rays.len(), ray: ray.clone() });
    }
    let containing: Vec<usize> =
        (0..fan.max_cones.len()).filter(|&i| fan.max_cone(i).cone.contains(ray)).collect();
    if containing.is_empty() {
        return Err(FanError::RayOutsideSupport(ray.clone()));
    }
    let mut rays = fan.rays.clone();
    let v = match rays.iter().position(|r| r == ray) {
        Some(i) => i,
        None => {
            rays.push(ray.clone());
            rays.len() - 1
        }
    };
    let mut cones = Vec::new();
    let mut assignment = Vec::new();
    for (i, c) in fan.max_cones.iter().enumerate() {
        if !containing.contains(&i) {
            cones.push(c.clone());
            assignment.push(i);
            continue;
        }
        let cone = &fan.max_cone(i).cone;
        for facet in cone.facets() {
            if facet.normal.pair(ray).is_zero() {
                continue;
            }
            let mut new: Vec<usize> = facet.generators.iter().map(|&k| c[k]).collect();
            new.push(v);
            new.sort_unstable();
            cones.push(new);
            assignment.push(i);
        }
    }
    let fine = Fan::assemble(fan.rank, rays, cones, false)?;
    if fine == **fan {
        return Ok(SubdivisionMap::identity(fan.clone()));
    }
    Ok(SubdivisionMap { fine: Arc::new(fine), coarse: fan.clone(), assignment })
}

/// How [`resolve`] chooses its subdivisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResolveStrategy {
    /// Deterministic: a cone of maximal multiplicity (lexicographic
    /// tie-break), subdivided at the parallelepiped point of least height.
    #[default]
    Canonical,
    /// Random non-smooth cone and random parallelepiped point, drawn from a
    /// seeded generator. Produces a different (still valid) resolution.
    Seeded(u64),
}

/// One subdivision performed by [`resolve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveStep {
    pub ray: LatticePoint,
    /// Σ (multiplicity - 1) over maximal cones, before and after the step.
    pub excess_before: BigInt,
    pub excess_after: BigInt,
}

/// A resolution together with the trace of its smoothing steps.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub map: SubdivisionMap,
    pub steps: Vec<ResolveStep>,
}

/// Σ (multiplicity - 1) over the maximal cones of a simplicial fan; zero
/// exactly when the fan is smooth.
pub fn multiplicity_excess(fan: &Fan) -> BigInt {
    (0..fan.max_cones.len())
        .map(|i| fan.max_cone(i).cone.multiplicity().expect("simplicial fan") - BigInt::one())
        .sum()
}

/// Resolves a fan: triangulate non-simplicial cones by pulling existing
/// rays, then subdivide at parallelepiped points until every cone is smooth.
pub fn resolve(fan: &Arc<Fan>) -> Result<SubdivisionMap, FanError> {
    Ok(resolve_with(fan, ResolveStrategy::Canonical)?.map)
}

pub fn resolve_with(fan: &Arc<Fan>, strategy: ResolveStrategy) -> Result<Resolution, FanError> {
    let mut rng = match strategy {
        ResolveStrategy::Canonical => None,
        ResolveStrategy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut map = SubdivisionMap::identity(fan.clone());

    while let Some(ray) = pulling_ray(&map.fine, rng.as_mut()) {
        let step = stellar_subdivision(&map.fine, &ray)?;
        map = map.then(&step);
    }

    let mut steps = Vec::new();
    loop {
        let current = map.fine.clone();
        let mults: Vec<BigInt> =
            (0..current.max_cones.len()).map(|i| current.max_cone(i).cone.multiplicity().expect("simplicial")).collect();
        let singular: Vec<usize> = (0..mults.len()).filter(|&i| !mults[i].is_one()).collect();
        if singular.is_empty() {
            break;
        }
        let excess_before = multiplicity_excess(&current);
        let point = match rng.as_mut() {
            None => {
                let top = singular.iter().map(|&i| &mults[i]).max().unwrap();
                let sigma = singular
                    .iter()
                    .copied()
                    .filter(|&i| &mults[i] == top)
                    .min_by(|&a, &b| current.max_cones[a].cmp(&current.max_cones[b]))
                    .unwrap();
                current
                    .max_cone(sigma)
                    .cone
                    .parallelepiped_points()?
                    .into_iter()
                    .min_by(|a, b| {
                        (a.height_numerator(), &a.point).cmp(&(b.height_numerator(), &b.point))
                    })
                    .expect("singular cone has a nonzero parallelepiped point")
                    .point
            }
            Some(rng) => seeded_point(&current, &singular, &excess_before, rng)?,
        };
        let step = stellar_subdivision(&current, &point)?;
        let excess_after = multiplicity_excess(&step.fine);
        debug_assert!(multiset_decreases(&current, &step), "resolution step did not improve multiplicities");
        steps.push(ResolveStep { ray: point, excess_before, excess_after });
        map = map.then(&step);
    }
    Ok(Resolution { map, steps })
}

/// A random point on a random singular cone, preferring choices that lower
/// the multiplicity excess.
fn seeded_point(
    fan: &Arc<Fan>,
    singular: &[usize],
    excess: &BigInt,
    rng: &mut ChaCha8Rng,
) -> Result<LatticePoint, FanError> {
    let mut candidates: Vec<LatticePoint> = Vec::new();
    for &i in singular {
        for p in fan.max_cone(i).cone.parallelepiped_points()? {
            // a multiple k*p has p itself as a parallelepiped point
            if p.point.content().is_one() && !candidates.contains(&p.point) {
                candidates.push(p.point);
            }
        }
    }
    candidates.shuffle(rng);
    for p in &candidates {
        let step = stellar_subdivision(fan, p)?;
        if multiplicity_excess(&step.fine) < *excess {
            return Ok(p.clone());
        }
    }
    Ok(candidates.into_iter().next().expect("singular cone has a nonzero parallelepiped point"))
}

fn multiset_decreases(coarse: &Fan, step: &SubdivisionMap) -> bool {
    let mut groups: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
    for (i, &a) in step.assignment.iter().enumerate() {
        groups.entry(a).or_default().push(step.fine.max_cone(i).cone.multiplicity().unwrap());
    }
    groups.iter().all(|(&a, pieces)| {
        let m = coarse.max_cone(a).cone.multiplicity().unwrap();
        (pieces.len() == 1 && pieces[0] == m) || pieces.iter().all(|p| *p < m)
    })
}

/// A ray whose pulling splits some non-simplicial maximal cone.
fn pulling_ray(fan: &Fan, rng: Option<&mut ChaCha8Rng>) -> Option<LatticePoint> {
    let mut options: Vec<(usize, usize)> = Vec::new();
    for (i, c) in fan.max_cones.iter().enumerate() {
        let cone = &fan.max_cone(i).cone;
        if cone.is_simplicial() {
            continue;
        }
        for (k, &r) in c.iter().enumerate() {
            let missing = cone.facets().iter().filter(|f| !f.generators.contains(&k)).count();
            if missing >= 2 {
                options.push((i, r));
            }
        }
        if rng.is_none() && !options.is_empty() {
            break;
        }
    }
    let (_, r) = match rng {
        None => *options.first()?,
        Some(rng) => *options.choose(rng)?,
    };
    Some(fan.rays[r].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p112() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[0, 2], &[1, 2]]).unwrap()
    }

    fn lp(c: &[i64]) -> LatticePoint {
        LatticePoint::from_i64(c)
    }

    #[test]
    fn builds_p112() {
        let fan = p112();
        assert_eq!(fan.cones().len(), 7);
        assert!(fan.is_complete());
        assert!(fan.is_simplicial());
        assert!(!fan.is_smooth());
    }

    #[test]
    fn builds_p1() {
        let fan = Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).unwrap();
        assert!(fan.is_complete());
        assert!(fan.is_smooth());
    }

    #[test]
    fn rejects_overlap() {
        let err = Fan::from_i64(2, &[&[1, 0], &[-1, 0], &[1, 1]], &[&[0, 2], &[1, 2], &[0, 1]]).unwrap_err();
        assert!(matches!(err, FanError::NotStronglyConvex(_) | FanError::NotAFan { .. }), "{err:?}");
        let err = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 2]], &[&[0, 1], &[0, 2]]).unwrap_err();
        assert!(matches!(err, FanError::NotAFan { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_rays() {
        assert!(matches!(
            Fan::from_i64(2, &[&[2, 0]], &[&[0]]),
            Err(FanError::NonPrimitiveRay { index: 0, .. })
        ));
        assert!(matches!(Fan::from_i64(2, &[&[1, 0], &[1, 0]], &[&[0], &[1]]), Err(FanError::DuplicateRay(0, 1))));
        assert!(matches!(
            Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1, 2]]),
            Err(FanError::RedundantRay { ray: 2, .. })
        ));
    }

    #[test]
    fn multiplicities() {
        let c = |g: &[&[i64]]| Cone::new(2, g.iter().map(|x| lp(x)).collect()).unwrap();
        assert_eq!(c(&[&[1, 0], &[0, 1]]).multiplicity().unwrap(), BigInt::from(1));
        assert_eq!(c(&[&[1, 0], &[-1, -2]]).multiplicity().unwrap(), BigInt::from(2));
        assert_eq!(c(&[&[0, 1], &[-1, -2]]).multiplicity().unwrap(), BigInt::from(1));
        let square = Cone::new(3, vec![lp(&[1, 0, 1]), lp(&[0, 1, 1]), lp(&[-1, 0, 1]), lp(&[0, -1, 1])]).unwrap();
        assert!(!square.is_simplicial());
        assert!(square.multiplicity().is_err());
        assert_eq!(square.facets().len(), 4);
    }

    #[test]
    fn completeness() {
        assert!(p112().is_complete());
        let quadrant = Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap();
        assert!(!quadrant.is_complete());
    }

    #[test]
    fn star_quotient_p112() {
        let fan = p112();
        let sq = star_quotient(&fan, &[2]).unwrap();
        assert_eq!(sq.fan.rank(), 1);
        assert_eq!(sq.fan.max_cones().len(), 2);
        assert!(sq.fan.is_complete());
        assert_eq!(sq.source_cones, vec![1, 2]);

        let same = star_quotient(&fan, &[]).unwrap();
        assert_eq!(same.fan, fan);

        let point = star_quotient(&fan, &[0, 1]).unwrap();
        assert_eq!(point.fan.rank(), 0);
        assert_eq!(point.fan.max_cones(), &[Vec::<usize>::new()]);
        assert!(point.fan.is_complete());

        assert!(matches!(star_quotient(&fan, &[0, 1, 2]), Err(FanError::ConeNotInFan(_))));
    }

    #[test]
    fn blowup_plane() {
        let fan = Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap());
        let s = stellar_subdivision(&fan, &lp(&[1, 1])).unwrap();
        assert_eq!(s.fine.max_cones(), &[vec![0, 2], vec![1, 2]]);
        assert!(s.fine.is_smooth());
        assert_eq!(s.assignment, vec![0, 0]);
        let same = stellar_subdivision(&fan, &lp(&[1, 0])).unwrap();
        assert!(same.is_identity());
        assert!(matches!(stellar_subdivision(&fan, &lp(&[-1, 0])), Err(FanError::RayOutsideSupport(_))));
    }

    #[test]
    fn subdivide_p112() {
        let fan = Arc::new(p112());
        let s = stellar_subdivision(&fan, &lp(&[0, -1])).unwrap();
        assert_eq!(s.fine.max_cones().len(), 4);
        assert!(s.fine.is_smooth());
        assert!(s.fine.is_complete());
    }

    #[test]
    fn resolve_examples() {
        let smooth = Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap());
        assert!(resolve(&smooth).unwrap().is_identity());

        let r = resolve_with(&Arc::new(p112()), ResolveStrategy::Canonical).unwrap();
        assert_eq!(r.map.fine.rays().len(), 4);
        assert!(r.map.fine.rays().contains(&lp(&[0, -1])));
        assert!(r.map.fine.is_smooth());
        assert_eq!(r.steps.len(), 1);

        let cone = Arc::new(Fan::from_i64(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]).unwrap());
        let r = resolve_with(&cone, ResolveStrategy::Canonical).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].ray, lp(&[1, 1]));
        assert_eq!(r.map.fine.max_cones().len(), 2);
        assert!(r.map.fine.is_smooth());
    }

    #[test]
    fn parallelepiped_matches_brute_force() {
        let cone = Cone::new(3, vec![lp(&[1, 0, 0]), lp(&[0, 1, 0]), lp(&[1, 1, 3])]).unwrap();
        let mut fast: Vec<LatticePoint> = cone.parallelepiped_points().unwrap().into_iter().map(|p| p.point).collect();
        fast.sort();
        let m = 3i64;
        let mut brute = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let coords: Vec<i64> = (0..3)
                        .map(|k| a * [1, 0, 0][k] + b * [0, 1, 0][k] + c * [1, 1, 3][k])
                        .collect();
                    if (a, b, c) != (0, 0, 0) && coords.iter().all(|x| x % m == 0) {
                        brute.push(lp(&coords.iter().map(|x| x / m).collect::<Vec<_>>()));
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(fast, brute);
    }
}
