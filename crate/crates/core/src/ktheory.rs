//! Fixed-point localization, Euler characteristics, Kronecker pairings
//! against orbit closures, and linear algebra over `Z[M]`.
//!
//! Singular fans are handled by computing on a resolution. The resolution is
//! computed once per [`KContext`] and shared by all pairings.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::fan::{resolve_with, Cone, Fan, FanError, ResolveStrategy, SubdivisionMap};
use crate::lattice::{dual_basis, Character};
use crate::laurent::{LaurentError, LaurentPoly, LocalizationSum};
use crate::pexp::{gkm_validate, PExpError, PExpFun, Validation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KTheoryError {
    #[error("cone {0:?} is not smooth")]
    NotSmooth(Vec<usize>),
    #[error("cone {0:?} is not full dimensional")]
    NotFullDimensional(Vec<usize>),
    #[error("fan is not complete")]
    NotComplete,
    #[error("fixed-point data has {found} entries, fan has {expected} maximal cones")]
    DataLength { expected: usize, found: usize },
    #[error("expected {expected} items, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("functions live on a different fan")]
    FanMismatch,
    #[error("not in the span of the basis: {0}")]
    NotInSpan(String),
    #[error("coefficient {index} is {numerator} / ({denominator}), not a Laurent polynomial")]
    NotIntegral { index: usize, numerator: LaurentPoly, denominator: LaurentPoly },
    #[error("basis values are linearly dependent over the fraction field")]
    DependentBasis,
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    PExp(#[from] PExpError),
}

/// Global sign `ε` applied to tangent weights.
///
/// With [`Epsilon::Plus`] and Cartier classes `σ ↦ e^{m_σ}`, the Euler
/// characteristic of a line bundle is `Σ e^m` over the lattice points of
/// its polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Epsilon {
    #[default]
    Plus,
    Minus,
}

impl Epsilon {
    pub fn apply(self, u: Character) -> Character {
        match self {
            Epsilon::Plus => u,
            Epsilon::Minus => u.neg(),
        }
    }
}

impl FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+1" | "1" | "+" => Ok(Epsilon::Plus),
            "-1" | "-" => Ok(Epsilon::Minus),
            _ => Err(format!("epsilon must be +1 or -1, got {s:?}")),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+1",
            Epsilon::Minus => "-1",
        })
    }
}

/// Weights of the torus action on the tangent space at the fixed point of a
/// smooth full-dimensional cone, in generator order.
pub fn tangent_weights(cone: &Cone, epsilon: Epsilon) -> Result<Vec<Character>, KTheoryError> {
    let ids = || (0..cone.generators().len()).collect::<Vec<_>>();
    if !cone.is_full_dimensional() {
        return Err(KTheoryError::NotFullDimensional(ids()));
    }
    let dual = dual_basis(cone.generators()).map_err(|_| KTheoryError::NotSmooth(ids()))?;
    Ok(dual.into_iter().map(|u| epsilon.apply(u)).collect())
}

/// Localization data on a smooth complete fan: tangent weights and a
/// numerator per maximal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointData {
    pub weights: Vec<Vec<Character>>,
    pub numerators: Vec<LaurentPoly>,
}

/// Tangent weights at every fixed point of a smooth complete fan.
pub fn fixed_point_weights(fan: &Fan, epsilon: Epsilon) -> Result<Vec<Vec<Character>>, KTheoryError> {
    (0..fan.max_cones().len())
        .map(|i| {
            let c = fan.max_cone(i);
            tangent_weights(c.cone(), epsilon).map_err(|e| match e {
                KTheoryError::NotSmooth(_) => KTheoryError::NotSmooth(c.rays().to_vec()),
                KTheoryError::NotFullDimensional(_) => KTheoryError::NotFullDimensional(c.rays().to_vec()),
                other => other,
            })
        })
        .collect()
}

fn koszul_numerators(fan: &Fan, weights: &[Vec<Character>], tau: usize) -> Vec<LaurentPoly> {
    let tau_rays = fan.cone(tau).rays();
    (0..fan.max_cones().len())
        .map(|i| {
            let rays = &fan.max_cones()[i];
            if !tau_rays.iter().all(|r| rays.contains(r)) {
                return LaurentPoly::zero(fan.rank());
            }
            let mut p = LaurentPoly::one(fan.rank());
            for (k, r) in rays.iter().enumerate() {
                if tau_rays.contains(r) {
                    p = p.mul_one_minus(&weights[i][k]);
                }
            }
            p
        })
        .collect()
}

/// The class of the structure sheaf of the orbit closure `V(τ)` on a smooth
/// complete fan, as fixed-point data.
pub fn orbit_closure_class(fan: &Fan, tau: &[usize], epsilon: Epsilon) -> Result<FixedPointData, KTheoryError> {
    let id = fan.cone_id(tau)?;
    let weights = fixed_point_weights(fan, epsilon)?;
    let numerators = koszul_numerators(fan, &weights, id);
    Ok(FixedPointData { weights, numerators })
}

/// `Σ_σ numerator_σ / Π (1 - e^{w})`, reduced to a Laurent polynomial.
pub fn euler_characteristic(fan: &Fan, data: &FixedPointData) -> Result<LaurentPoly, KTheoryError> {
    let n = fan.max_cones().len();
    if data.numerators.len() != n || data.weights.len() != n {
        return Err(KTheoryError::DataLength { expected: n, found: data.numerators.len().min(data.weights.len()) });
    }
    if !fan.is_complete() {
        return Err(KTheoryError::NotComplete);
    }
    localize(fan.rank(), &data.weights, &data.numerators)
}

fn localize(rank: usize, weights: &[Vec<Character>], numerators: &[LaurentPoly]) -> Result<LaurentPoly, KTheoryError> {
    let mut sum = LocalizationSum::new(rank);
    for (w, num) in weights.iter().zip(numerators) {
        if !num.is_zero() {
            sum.push(num.clone(), w.clone())?;
        }
    }
    Ok(sum.reduce()?)
}

/// A complete fan together with a smooth resolution and its fixed-point
/// weights, shared by all Euler characteristic and pairing computations.
#[derive(Debug, Clone)]
pub struct KContext {
    fan: Arc<Fan>,
    resolution: SubdivisionMap,
    epsilon: Epsilon,
    weights: Vec<Vec<Character>>,
}

impl KContext {
    pub fn new(fan: &Arc<Fan>) -> Result<KContext, KTheoryError> {
        Self::with_options(fan, ResolveStrategy::Canonical, Epsilon::default())
    }

    pub fn with_options(fan: &Arc<Fan>, strategy: ResolveStrategy, epsilon: Epsilon) -> Result<KContext, KTheoryError> {
        if !fan.is_complete() {
            return Err(KTheoryError::NotComplete);
        }
        let resolution = resolve_with(fan, strategy)?.map;
        let weights = fixed_point_weights(&resolution.fine, epsilon)?;
        Ok(KContext { fan: fan.clone(), resolution, epsilon, weights })
    }

    /// Uses a caller-supplied smooth subdivision of `fan` instead of
    /// resolving it. Any two such choices give the same `chi` and pairings.
    pub fn from_resolution(fan: &Arc<Fan>, resolution: SubdivisionMap, epsilon: Epsilon) -> Result<KContext, KTheoryError> {
        if !fan.is_complete() {
            return Err(KTheoryError::NotComplete);
        }
        if *resolution.coarse != **fan {
            return Err(KTheoryError::FanMismatch);
        }
        let weights = fixed_point_weights(&resolution.fine, epsilon)?;
        Ok(KContext { fan: fan.clone(), resolution, epsilon, weights })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn resolution(&self) -> &SubdivisionMap {
        &self.resolution
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    fn lift(&self, f: &PExpFun) -> Result<PExpFun, KTheoryError> {
        if **f.fan() != *self.fan {
            return Err(KTheoryError::FanMismatch);
        }
        Ok(f.pullback(&self.resolution)?)
    }

    /// Equivariant Euler characteristic of `f`.
    pub fn chi(&self, f: &PExpFun) -> Result<LaurentPoly, KTheoryError> {
        let lifted = self.lift(f)?;
        localize(self.fan.rank(), &self.weights, lifted.values())
    }

    /// Cones of the resolution contained in `τ` with the same dimension,
    /// lexicographically least first.
    pub fn strict_transform_candidates(&self, tau: &[usize]) -> Result<Vec<usize>, KTheoryError> {
        let coarse = self.fan.cone(self.fan.cone_id(tau)?);
        let fine = &self.resolution.fine;
        let mut out: Vec<usize> = (0..fine.cones().len())
            .filter(|&id| {
                let c = fine.cone(id);
                c.dim() == coarse.dim() && c.rays().iter().all(|&r| coarse.cone().contains(&fine.rays()[r]))
            })
            .collect();
        out.sort_by(|&a, &b| fine.cone(a).rays().cmp(fine.cone(b).rays()));
        Ok(out)
    }

    /// `⟨f, [O_{V(τ)}]⟩`, computed on the resolution.
    pub fn kronecker_pair(&self, f: &PExpFun, tau: &[usize]) -> Result<LaurentPoly, KTheoryError> {
        let fine_tau = *self
            .strict_transform_candidates(tau)?
            .first()
            .expect("a subdivision of τ has a cone of full dimension in τ");
        self.pair_on_resolution(f, fine_tau)
    }

    /// Pairing against the orbit closure of a given cone of the resolution.
    pub fn pair_on_resolution(&self, f: &PExpFun, fine_cone: usize) -> Result<LaurentPoly, KTheoryError> {
        let lifted = self.lift(f)?;
        let fine = &self.resolution.fine;
        let koszul = koszul_numerators(fine, &self.weights, fine_cone);
        let numerators: Vec<LaurentPoly> = lifted.values().iter().zip(&koszul).map(|(a, b)| a * b).collect();
        localize(self.fan.rank(), &self.weights, &numerators)
    }

    /// Entrywise pairings, evaluated in parallel.
    pub fn gram_matrix(&self, fs: &[PExpFun], taus: &[Vec<usize>]) -> Result<PairingMatrix, KTheoryError> {
        for tau in taus {
            self.fan.cone_id(tau)?;
        }
        let entries = fs
            .par_iter()
            .map(|f| taus.iter().map(|tau| self.kronecker_pair(f, tau)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PairingMatrix {
            rank: self.fan.rank(),
            row_labels: (0..fs.len()).map(|i| format!("f{i}")).collect(),
            columns: taus.to_vec(),
            entries,
        })
    }

    /// Functions `g_j = Σ_i C_ji s_i` whose Gram matrix against `taus` is
    /// the identity.
    pub fn dual_basis_solve(&self, taus: &[Vec<usize>], spanning: &[PExpFun]) -> Result<Vec<PExpFun>, KTheoryError> {
        if taus.len() != spanning.len() {
            return Err(KTheoryError::LengthMismatch { expected: taus.len(), found: spanning.len() });
        }
        let gram = self.gram_matrix(spanning, taus)?;
        let c = invert(&gram.entries, self.fan.rank())?;
        let duals = c
            .iter()
            .map(|row| combine(&self.fan, row, spanning))
            .collect::<Result<Vec<_>, _>>()?;
        let check = self.gram_matrix(&duals, taus)?;
        debug_assert_eq!(check.shape(), GramShape::Identity);
        if check.shape() != GramShape::Identity {
            return Err(KTheoryError::SingularGram);
        }
        Ok(duals)
    }
}

/// `Σ c_i f_i`, validated.
pub fn combine(fan: &Arc<Fan>, coeffs: &[LaurentPoly], fs: &[PExpFun]) -> Result<PExpFun, KTheoryError> {
    let mut acc = PExpFun::zero(fan);
    for (c, f) in coeffs.iter().zip(fs) {
        acc = acc.add(&f.scale(c)?)?;
    }
    match gkm_validate(fan, acc.values().to_vec())? {
        Validation::Valid(f) => Ok(f),
        Validation::Violations(_) => unreachable!("PExp is an R(T)-module"),
    }
}

pub fn chi(fan: &Arc<Fan>, f: &PExpFun) -> Result<LaurentPoly, KTheoryError> {
    KContext::new(fan)?.chi(f)
}

pub fn kronecker_pair(fan: &Arc<Fan>, f: &PExpFun, tau: &[usize]) -> Result<LaurentPoly, KTheoryError> {
    KContext::new(fan)?.kronecker_pair(f, tau)
}

pub fn gram_matrix(fan: &Arc<Fan>, fs: &[PExpFun], taus: &[Vec<usize>]) -> Result<PairingMatrix, KTheoryError> {
    KContext::new(fan)?.gram_matrix(fs, taus)
}

pub fn dual_basis_solve(fan: &Arc<Fan>, taus: &[Vec<usize>], spanning: &[PExpFun]) -> Result<Vec<PExpFun>, KTheoryError> {
    KContext::new(fan)?.dual_basis_solve(taus, spanning)
}

/// Kronecker pairings: rows are functions, columns are cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMatrix {
    pub rank: usize,
    pub row_labels: Vec<String>,
    pub columns: Vec<Vec<usize>>,
    pub entries: Vec<Vec<LaurentPoly>>,
}

/// How a square pairing matrix compares to the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramShape {
    Identity,
    UpperUnitriangular,
    LowerUnitriangular,
    Other,
}

impl fmt::Display for GramShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GramShape::Identity => "identity",
            GramShape::UpperUnitriangular => "upper unitriangular",
            GramShape::LowerUnitriangular => "lower unitriangular",
            GramShape::Other => "other",
        })
    }
}

impl PairingMatrix {
    pub fn is_square(&self) -> bool {
        self.entries.len() == self.columns.len()
    }

    pub fn shape(&self) -> GramShape {
        if !self.is_square() {
            return GramShape::Other;
        }
        let n = self.entries.len();
        let diag_one = (0..n).all(|i| self.entries[i][i].is_one());
        let zero_below = (0..n).all(|i| (0..i).all(|j| self.entries[i][j].is_zero()));
        let zero_above = (0..n).all(|i| (i + 1..n).all(|j| self.entries[i][j].is_zero()));
        match (diag_one, zero_below, zero_above) {
            (true, true, true) => GramShape::Identity,
            (true, true, false) => GramShape::UpperUnitriangular,
            (true, false, true) => GramShape::LowerUnitriangular,
            _ => GramShape::Other,
        }
    }

    pub fn determinant(&self) -> Option<LaurentPoly> {
        self.is_square().then(|| determinant(&self.entries, self.rank))
    }
}

#[derive(Debug)]
enum SolveError {
    Dependent,
    Inconsistent,
    NotIntegral { index: usize, numerator: LaurentPoly, denominator: LaurentPoly },
}

fn div(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a.exact_div(b).expect("fraction-free elimination divides exactly")
}

/// Fraction-free elimination of `A x = b` for several right-hand sides.
/// `A` is `m × k` with `m ≥ k` and full column rank; every equation is
/// enforced.
fn solve(a: &[Vec<LaurentPoly>], rhs: &[Vec<LaurentPoly>], rank: usize) -> Result<Vec<Vec<LaurentPoly>>, SolveError> {
    let m = a.len();
    let k = a.first().map_or(0, Vec::len);
    let nr = rhs.len();
    // augmented rows: k coefficient columns followed by nr right-hand sides
    let mut rows: Vec<Vec<LaurentPoly>> =
        (0..m).map(|i| a[i].iter().cloned().chain(rhs.iter().map(|b| b[i].clone())).collect()).collect();
    let width = k + nr;
    let mut prev = LaurentPoly::one(rank);
    for j in 0..k {
        let Some(p) = (j..m).find(|&i| !rows[i][j].is_zero()) else {
            return Err(SolveError::Dependent);
        };
        rows.swap(j, p);
        for i in j + 1..m {
            for l in j + 1..width {
                let t = &(&rows[j][j] * &rows[i][l]) - &(&rows[i][j] * &rows[j][l]);
                rows[i][l] = div(&t, &prev);
            }
            rows[i][j] = LaurentPoly::zero(rank);
        }
        prev = rows[j][j].clone();
    }
    for row in rows.iter().skip(k) {
        if row[k..].iter().any(|x| !x.is_zero()) {
            return Err(SolveError::Inconsistent);
        }
    }
    let det = if k == 0 { LaurentPoly::one(rank) } else { rows[k - 1][k - 1].clone() };
    let mut out = Vec::with_capacity(nr);
    for b in 0..nr {
        // y_i = det * x_i are the Cramer numerators
        let mut y = vec![LaurentPoly::zero(rank); k];
        for i in (0..k).rev() {
            let mut t = &det * &rows[i][k + b];
            for l in i + 1..k {
                t = &t - &(&rows[i][l] * &y[l]);
            }
            y[i] = div(&t, &rows[i][i]);
        }
        let x = y
            .into_iter()
            .enumerate()
            .map(|(i, yi)| {
                yi.exact_div(&det).ok_or_else(|| SolveError::NotIntegral {
                    index: i,
                    numerator: yi.clone(),
                    denominator: det.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(x);
    }
    Ok(out)
}

/// Determinant of a square matrix over `Z[M]` by Bareiss elimination.
pub fn determinant(m: &[Vec<LaurentPoly>], rank: usize) -> LaurentPoly {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = false;
    let mut prev = LaurentPoly::one(rank);
    for j in 0..n {
        let Some(p) = (j..n).find(|&i| !a[i][j].is_zero()) else {
            return LaurentPoly::zero(rank);
        };
        if p != j {
            a.swap(j, p);
            sign = !sign;
        }
        for i in j + 1..n {
            for l in j + 1..n {
                let t = &(&a[j][j] * &a[i][l]) - &(&a[i][j] * &a[j][l]);
                a[i][l] = div(&t, &prev);
            }
        }
        prev = a[j][j].clone();
    }
    if n == 0 {
        return LaurentPoly::one(rank);
    }
    if sign {
        -&prev
    } else {
        prev
    }
}

/// `C` with `C · G = I`, verified by multiplication.
fn invert(g: &[Vec<LaurentPoly>], rank: usize) -> Result<Vec<Vec<LaurentPoly>>, KTheoryError> {
    let n = g.len();
    // columns of Cᵀ solve Gᵀ x = e_j
    let gt: Vec<Vec<LaurentPoly>> = (0..n).map(|i| (0..n).map(|j| g[j][i].clone()).collect()).collect();
    let unit: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|j| (0..n).map(|i| LaurentPoly::constant(rank, BigInt::from((i == j) as i32))).collect())
        .collect();
    let c = solve(&gt, &unit, rank).map_err(|e| match e {
        SolveError::Dependent | SolveError::Inconsistent => KTheoryError::SingularGram,
        SolveError::NotIntegral { index, numerator, denominator, .. } => {
            KTheoryError::NotIntegral { index, numerator, denominator }
        }
    })?;
    for (i, row) in c.iter().enumerate() {
        for j in 0..n {
            let s = row.iter().zip(g).fold(LaurentPoly::zero(rank), |acc, (cl, gl)| &acc + &(cl * &gl[j]));
            if s != LaurentPoly::constant(rank, BigInt::from((i == j) as i32)) {
                return Err(KTheoryError::SingularGram);
            }
        }
    }
    Ok(c)
}

/// Coefficients `c ∈ Z[M]^k` with `f = Σ c_i basis_i`.
///
/// The system is solved on the full-dimensional maximal cones, where values
/// lie in `Z[M]` itself; the result is then checked on every cone.
pub fn decompose(f: &PExpFun, basis: &[PExpFun]) -> Result<Vec<LaurentPoly>, KTheoryError> {
    let fan = f.fan();
    if basis.iter().any(|b| **b.fan() != **fan) {
        return Err(KTheoryError::FanMismatch);
    }
    let rank = fan.rank();
    let full: Vec<usize> =
        (0..fan.max_cones().len()).filter(|&i| fan.max_cone(i).cone().is_full_dimensional()).collect();
    let a: Vec<Vec<LaurentPoly>> = full.iter().map(|&i| basis.iter().map(|b| b.value(i).clone()).collect()).collect();
    let b: Vec<LaurentPoly> = full.iter().map(|&i| f.value(i).clone()).collect();
    let coeffs = match solve(&a, &[b], rank) {
        Ok(mut x) => x.remove(0),
        Err(SolveError::Dependent) => return Err(KTheoryError::DependentBasis),
        Err(SolveError::Inconsistent) => {
            return Err(KTheoryError::NotInSpan("the cone-value system is inconsistent".into()))
        }
        Err(SolveError::NotIntegral { index, numerator, denominator, .. }) => {
            return Err(KTheoryError::NotIntegral { index, numerator, denominator })
        }
    };
    let mut back = PExpFun::zero(fan);
    for (c, g) in coeffs.iter().zip(basis) {
        back = back.add(&g.scale(c)?)?;
    }
    if back != *f {
        let bad = (0..fan.max_cones().len()).find(|&i| back.value(i) != f.value(i)).unwrap_or(0);
        return Err(KTheoryError::NotInSpan(format!(
            "re-expansion differs on cone {:?}",
            fan.max_cones()[bad]
        )));
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::stellar_subdivision;
    use crate::lattice::LatticePoint;
    use crate::pexp::CartierData;

    fn ch(c: &[i64]) -> Character {
        Character::from_i64(c)
    }

    fn p1() -> Arc<Fan> {
        Arc::new(Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).unwrap())
    }

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap())
    }

    #[test]
    fn tangent_weight_examples() {
        let std = Cone::new(2, vec![LatticePoint::from_i64(&[1, 0]), LatticePoint::from_i64(&[0, 1])]).unwrap();
        assert_eq!(tangent_weights(&std, Epsilon::Plus).unwrap(), vec![ch(&[1, 0]), ch(&[0, 1])]);
        let c = Cone::new(2, vec![LatticePoint::from_i64(&[0, 1]), LatticePoint::from_i64(&[-1, -2])]).unwrap();
        assert_eq!(tangent_weights(&c, Epsilon::Plus).unwrap(), vec![ch(&[-2, 1]), ch(&[-1, 0])]);
        let sing = Cone::new(2, vec![LatticePoint::from_i64(&[1, 0]), LatticePoint::from_i64(&[-1, -2])]).unwrap();
        assert!(matches!(tangent_weights(&sing, Epsilon::Plus), Err(KTheoryError::NotSmooth(_))));
        let ray = Cone::new(2, vec![LatticePoint::from_i64(&[1, 0])]).unwrap();
        assert!(matches!(tangent_weights(&ray, Epsilon::Plus), Err(KTheoryError::NotFullDimensional(_))));
    }

    #[test]
    fn euler_characteristic_examples() {
        let fan = p1();
        let w = fixed_point_weights(&fan, Epsilon::Plus).unwrap();
        let ones = FixedPointData { weights: w.clone(), numerators: vec![LaurentPoly::one(1); 2] };
        assert_eq!(euler_characteristic(&fan, &ones).unwrap(), LaurentPoly::one(1));
        let line = FixedPointData { weights: w, numerators: vec![LaurentPoly::one(1), LaurentPoly::monomial(ch(&[1]))] };
        assert_eq!(euler_characteristic(&fan, &line).unwrap(), LaurentPoly::from_terms(1, &[(1, &[0]), (1, &[1])]));

        let fan = p2();
        let data = orbit_closure_class(&fan, &[], Epsilon::Plus).unwrap();
        assert!(data.numerators.iter().all(LaurentPoly::is_one));
        assert_eq!(euler_characteristic(&fan, &data).unwrap(), LaurentPoly::one(2));
    }

    #[test]
    fn epsilon_minus_breaks_the_lattice_point_oracle() {
        let fan = p1();
        let f = PExpFun::from_cartier(&fan, &CartierData::new(vec![ch(&[0]), ch(&[1])])).unwrap();
        let ctx = KContext::with_options(&fan, ResolveStrategy::Canonical, Epsilon::Minus).unwrap();
        assert_eq!(ctx.chi(&PExpFun::one(&fan)).unwrap(), LaurentPoly::one(1));
        assert_ne!(ctx.chi(&f).unwrap(), LaurentPoly::from_terms(1, &[(1, &[0]), (1, &[1])]));
    }

    #[test]
    fn orbit_class_on_resolved_p112() {
        let fan = Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[0, 2], &[1, 2]]).unwrap());
        let s = stellar_subdivision(&fan, &LatticePoint::from_i64(&[0, -1])).unwrap();
        let data = orbit_closure_class(&s.fine, &[2], Epsilon::Plus).unwrap();
        let nonzero: Vec<&LaurentPoly> = data.numerators.iter().filter(|p| !p.is_zero()).collect();
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.iter().all(|p| p.len() == 2));
        assert_eq!(euler_characteristic(&s.fine, &data).unwrap().augment(), 1.into());
    }

    #[test]
    fn not_complete() {
        let quadrant = Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap());
        assert!(matches!(KContext::new(&quadrant), Err(KTheoryError::NotComplete)));
    }

    #[test]
    fn p1_dual_pair() {
        let fan = p1();
        let line = PExpFun::from_cartier(&fan, &CartierData::new(vec![ch(&[0]), ch(&[1])])).unwrap();
        let taus = vec![vec![], vec![0]];
        let ctx = KContext::new(&fan).unwrap();
        let duals = ctx.dual_basis_solve(&taus, &[PExpFun::one(&fan), line]).unwrap();
        assert_eq!(ctx.gram_matrix(&duals, &taus).unwrap().shape(), GramShape::Identity);
        let one = ctx.dual_basis_solve(&[vec![]], &[PExpFun::one(&fan)]).unwrap();
        assert_eq!(one, vec![PExpFun::one(&fan)]);
        assert!(ctx.gram_matrix(&[], &[]).unwrap().entries.is_empty());
    }

    #[test]
    fn decompose_not_integral() {
        let fan = p1();
        let two = PExpFun::constant(&fan, &LaurentPoly::constant(1, 2)).unwrap();
        match decompose(&PExpFun::one(&fan), &[two]) {
            Err(KTheoryError::NotIntegral { index: 0, .. }) => {}
            other => panic!("expected NotIntegral, got {other:?}"),
        }
        let eu = PExpFun::constant(&fan, &LaurentPoly::monomial(ch(&[1]))).unwrap();
        assert_eq!(decompose(&PExpFun::one(&fan), &[eu]).unwrap(), vec![LaurentPoly::monomial(ch(&[-1]))]);
    }

    #[test]
    fn decompose_dependent_and_not_in_span() {
        let fan = p1();
        let one = PExpFun::one(&fan);
        assert_eq!(decompose(&one, &[one.clone(), one.clone()]), Err(KTheoryError::DependentBasis));
        let line = PExpFun::from_cartier(&fan, &CartierData::new(vec![ch(&[0]), ch(&[1])])).unwrap();
        assert!(matches!(decompose(&line, &[one]), Err(KTheoryError::NotInSpan(_))));
    }

    #[test]
    fn determinant_small() {
        let x = LaurentPoly::monomial(ch(&[1]));
        let m = vec![vec![LaurentPoly::zero(1), x.clone()], vec![LaurentPoly::one(1), LaurentPoly::one(1)]];
        assert_eq!(determinant(&m, 1), -&x);
    }
}
