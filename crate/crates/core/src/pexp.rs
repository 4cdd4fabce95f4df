//! The ring `PExp(Δ)` of integral piecewise exponential functions.
//!
//! A function is stored by its values on the maximal cones of its fan. The
//! value on `σ` lives in `Z[M_σ]`, written in the coordinates of the fan's
//! fixed quotient lattice for `σ`; for full-dimensional cones that is `Z[M]`
//! itself. Values on smaller cones are obtained by restriction.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::fan::{Fan, FanError, SubdivisionMap};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::lattice::{smith_normal_form, Character, IntMatrix};
use crate::laurent::{LaurentError, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PExpError {
    #[error("expected {expected} values (one per maximal cone), got {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("value on cone {cone:?} has rank {found}; expected {expected} (or the ambient rank {ambient})")]
    ValueRank { cone: Vec<usize>, expected: usize, found: usize, ambient: usize },
    #[error("global coefficient has rank {found}, fan has rank {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("functions live on different fans")]
    FanMismatch,
    #[error("Cartier data is incompatible on cones {first:?} and {second:?}: {difference} does not vanish on their common face")]
    IncompatibleCartierData { first: Vec<usize>, second: Vec<usize>, difference: Character },
    #[error("not descendable: fine values over coarse cone {coarse_cone:?} differ ({first} vs {second})")]
    NotDescendable { coarse_cone: Vec<usize>, first: LaurentPoly, second: LaurentPoly },
    #[error("ray values are not linear on cone {0:?} or need a non-integral character there")]
    NotLinear(Vec<usize>),
    #[error("subdivision map is malformed: {0}")]
    BadSubdivision(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// A failure of face compatibility between two maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmViolation {
    /// Maximal cone indices.
    pub first: usize,
    pub second: usize,
    /// Ray set of the common face.
    pub face: Vec<usize>,
    /// Both values restricted to the face.
    pub first_value: LaurentPoly,
    pub second_value: LaurentPoly,
}

impl fmt::Display for GkmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "maximal cones {} and {} disagree on face {:?}: {} vs {}",
            self.first, self.second, self.face, self.first_value, self.second_value
        )
    }
}

/// Outcome of [`gkm_validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid(PExpFun),
    Violations(Vec<GkmViolation>),
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid(_))
    }

    pub fn valid(self) -> Option<PExpFun> {
        match self {
            Validation::Valid(f) => Some(f),
            Validation::Violations(_) => None,
        }
    }
}

/// An element of `PExp(Δ)`.
#[derive(Clone, PartialEq, Eq)]
pub struct PExpFun {
    fan: Arc<Fan>,
    values: Vec<LaurentPoly>,
}

impl fmt::Debug for PExpFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.values.iter().map(|v| v.to_string())).finish()
    }
}

/// Matrix of `M_a → M_b` for cone ids `a ⊇ b`.
pub(crate) fn restriction_matrix(fan: &Fan, from: usize, to: usize) -> IntMatrix {
    fan.cone(from).characters().map_to(fan.cone(to).characters())
}

/// Brings a raw value into the coordinates of `M_σ`: values already of rank
/// `dim σ` are taken as is, ambient-rank values are projected.
fn coerce_value(fan: &Fan, max_index: usize, value: LaurentPoly) -> Result<LaurentPoly, PExpError> {
    let cone = fan.max_cone(max_index);
    let dim = cone.dim();
    if value.rank() == dim {
        Ok(value)
    } else if value.rank() == fan.rank() {
        Ok(value.map_exponents(cone.characters().projection())?)
    } else {
        Err(PExpError::ValueRank {
            cone: cone.rays().to_vec(),
            expected: dim,
            found: value.rank(),
            ambient: fan.rank(),
        })
    }
}

/// Checks face compatibility of one value per maximal cone.
///
/// Each pair of maximal cones is compared on their common face, which
/// covers all faces since restriction is functorial.
pub fn gkm_validate(fan: &Arc<Fan>, values: Vec<LaurentPoly>) -> Result<Validation, PExpError> {
    let n = fan.max_cones().len();
    if values.len() != n {
        return Err(PExpError::ValueCount { expected: n, found: values.len() });
    }
    let values: Vec<LaurentPoly> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| coerce_value(fan, i, v))
        .collect::<Result<_, _>>()?;
    let violations = violations(fan, &values);
    if violations.is_empty() {
        Ok(Validation::Valid(PExpFun { fan: fan.clone(), values }))
    } else {
        Ok(Validation::Violations(violations))
    }
}

fn violations(fan: &Fan, values: &[LaurentPoly]) -> Vec<GkmViolation> {
    let n = values.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let a = fan.max_cones()[i].as_slice();
            let b = &fan.max_cones()[j];
            let common: Vec<usize> = a.iter().copied().filter(|r| b.contains(r)).collect();
            let face = fan.cone_id(&common).expect("fan axiom: common rays span a face");
            let first_value = values[i]
                .map_exponents(&restriction_matrix(fan, fan.max_cone_id(i), face))
                .expect("ranks agree");
            let second_value = values[j]
                .map_exponents(&restriction_matrix(fan, fan.max_cone_id(j), face))
                .expect("ranks agree");
            if first_value != second_value {
                out.push(GkmViolation { first: i, second: j, face: common, first_value, second_value });
            }
        }
    }
    out
}

/// Piecewise-linear data: one character per maximal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierData {
    pub m: Vec<Character>,
}

impl CartierData {
    pub fn new(m: Vec<Character>) -> Self {
        CartierData { m }
    }

    /// The piecewise-linear function taking value `a_ρ` at each ray
    /// generator, when it exists with integral slopes. On cones that are not
    /// full dimensional the free directions are set to zero.
    pub fn from_ray_values(fan: &Fan, values: &[BigInt]) -> Result<CartierData, PExpError> {
        if values.len() != fan.rays().len() {
            return Err(PExpError::ValueCount { expected: fan.rays().len(), found: values.len() });
        }
        let n = fan.rank();
        let m = fan
            .max_cones()
            .iter()
            .map(|rays| {
                let gens: Vec<&[BigInt]> = rays.iter().map(|&r| fan.rays()[r].coords()).collect();
                let a: Vec<BigInt> = rays.iter().map(|&r| values[r].clone()).collect();
                let snf = smith_normal_form(&IntMatrix::from_rows(n, &gens));
                // generators · m = a  ⇔  D · (V⁻¹ m) = U a
                let ua = snf.u.transpose().left_apply(&a);
                let mut y = vec![BigInt::zero(); n];
                for (i, rhs) in ua.iter().enumerate() {
                    let d = if i < n { snf.d[(i, i)].clone() } else { BigInt::zero() };
                    if d.is_zero() {
                        if !rhs.is_zero() {
                            return Err(PExpError::NotLinear(rays.clone()));
                        }
                    } else {
                        let (q, r) = rhs.div_rem(&d);
                        if !r.is_zero() {
                            return Err(PExpError::NotLinear(rays.clone()));
                        }
                        y[i] = q;
                    }
                }
                Ok(Character::new(snf.v.transpose().left_apply(&y)))
            })
            .collect::<Result<_, _>>()?;
        Ok(CartierData { m })
    }

    pub fn add(&self, other: &CartierData) -> CartierData {
        CartierData { m: self.m.iter().zip(&other.m).map(|(a, b)| a.add(b)).collect() }
    }
}

impl PExpFun {
    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    /// Values on the maximal cones, in the fan's cone order.
    pub fn values(&self) -> &[LaurentPoly] {
        &self.values
    }

    pub fn value(&self, max_index: usize) -> &LaurentPoly {
        &self.values[max_index]
    }

    /// The constant function with value `g ∈ Z[M]`.
    pub fn constant(fan: &Arc<Fan>, g: &LaurentPoly) -> Result<PExpFun, PExpError> {
        if g.rank() != fan.rank() {
            return Err(PExpError::RankMismatch { expected: fan.rank(), found: g.rank() });
        }
        let values = (0..fan.max_cones().len())
            .map(|i| g.map_exponents(fan.max_cone(i).characters().projection()))
            .collect::<Result<_, _>>()?;
        Ok(PExpFun { fan: fan.clone(), values })
    }

    pub fn one(fan: &Arc<Fan>) -> PExpFun {
        Self::constant(fan, &LaurentPoly::one(fan.rank())).expect("rank matches")
    }

    pub fn zero(fan: &Arc<Fan>) -> PExpFun {
        Self::constant(fan, &LaurentPoly::zero(fan.rank())).expect("rank matches")
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(LaurentPoly::is_zero)
    }

    /// Validates and wraps raw values.
    pub fn try_new(fan: &Arc<Fan>, values: Vec<LaurentPoly>) -> Result<Result<PExpFun, Vec<GkmViolation>>, PExpError> {
        Ok(match gkm_validate(fan, values)? {
            Validation::Valid(f) => Ok(f),
            Validation::Violations(v) => Err(v),
        })
    }

    /// Value on an arbitrary cone (given by ray set), in `Z[M_τ]`.
    pub fn restrict(&self, tau: &[usize]) -> Result<LaurentPoly, PExpError> {
        let face = self.fan.cone_id(tau)?;
        self.restrict_id(face)
    }

    pub fn restrict_id(&self, face: usize) -> Result<LaurentPoly, PExpError> {
        let owner = *self
            .fan
            .max_cones_containing(face)
            .first()
            .ok_or_else(|| FanError::ConeNotInFan(self.fan.cone(face).rays().to_vec()))?;
        let phi = restriction_matrix(&self.fan, self.fan.max_cone_id(owner), face);
        Ok(self.values[owner].map_exponents(&phi)?)
    }

    fn same_fan(&self, other: &PExpFun) -> Result<(), PExpError> {
        if Arc::ptr_eq(&self.fan, &other.fan) || *self.fan == *other.fan {
            Ok(())
        } else {
            Err(PExpError::FanMismatch)
        }
    }

    fn zip_with(
        &self,
        other: &PExpFun,
        op: impl Fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly,
    ) -> Result<PExpFun, PExpError> {
        self.same_fan(other)?;
        let values: Vec<LaurentPoly> = self.values.iter().zip(&other.values).map(|(a, b)| op(a, b)).collect();
        debug_assert!(violations(&self.fan, &values).is_empty(), "PExp is closed under ring operations");
        Ok(PExpFun { fan: self.fan.clone(), values })
    }

    pub fn add(&self, other: &PExpFun) -> Result<PExpFun, PExpError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PExpFun) -> Result<PExpFun, PExpError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &PExpFun) -> Result<PExpFun, PExpError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn neg(&self) -> PExpFun {
        PExpFun { fan: self.fan.clone(), values: self.values.iter().map(|v| -v).collect() }
    }

    /// The `R(T)`-module action of a global `g ∈ Z[M]`.
    pub fn scale(&self, g: &LaurentPoly) -> Result<PExpFun, PExpError> {
        self.mul(&PExpFun::constant(&self.fan, g)?)
    }

    /// The class `σ ↦ e^{m_σ}` of piecewise-linear Cartier data.
    pub fn from_cartier(fan: &Arc<Fan>, data: &CartierData) -> Result<PExpFun, PExpError> {
        let n = fan.max_cones().len();
        if data.m.len() != n {
            return Err(PExpError::ValueCount { expected: n, found: data.m.len() });
        }
        for m in &data.m {
            if m.rank() != fan.rank() {
                return Err(PExpError::RankMismatch { expected: fan.rank(), found: m.rank() });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let a = &fan.max_cones()[i];
                let b = &fan.max_cones()[j];
                let difference = data.m[i].sub(&data.m[j]);
                let vanishes =
                    a.iter().filter(|r| b.contains(r)).all(|&r| difference.pair(&fan.rays()[r]) == 0.into());
                if !vanishes {
                    return Err(PExpError::IncompatibleCartierData {
                        first: a.clone(),
                        second: b.clone(),
                        difference,
                    });
                }
            }
        }
        let values: Vec<LaurentPoly> = data.m.iter().map(|m| LaurentPoly::monomial(m.clone())).collect();
        match gkm_validate(fan, values)? {
            Validation::Valid(f) => Ok(f),
            Validation::Violations(v) => unreachable!("compatible Cartier data violates GKM: {v:?}"),
        }
    }

    /// Pullback along a subdivision: each fine cone takes the value of the
    /// coarse cone containing it.
    pub fn pullback(&self, s: &SubdivisionMap) -> Result<PExpFun, PExpError> {
        if *self.fan != *s.coarse {
            return Err(PExpError::FanMismatch);
        }
        check_assignment(s)?;
        let fine = &s.fine;
        let values = s
            .assignment
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let phi = s.coarse.max_cone(a).characters().map_to(fine.max_cone(i).characters());
                self.values[a].map_exponents(&phi)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PExpFun { fan: fine.clone(), values })
    }

    /// Descends a function on `s.fine` to `s.coarse`, when all fine cones
    /// inside each coarse cone carry the same value.
    pub fn descend(&self, s: &SubdivisionMap) -> Result<PExpFun, PExpError> {
        if *self.fan != *s.fine {
            return Err(PExpError::FanMismatch);
        }
        check_assignment(s)?;
        let coarse = &s.coarse;
        let mut values: Vec<Option<LaurentPoly>> = vec![None; coarse.max_cones().len()];
        for (i, &a) in s.assignment.iter().enumerate() {
            let fine_cone = s.fine.max_cone(i);
            let coarse_cone = coarse.max_cone(a);
            if fine_cone.dim() != coarse_cone.dim() {
                return Err(PExpError::BadSubdivision(format!(
                    "fine cone {:?} and coarse cone {:?} have different dimensions",
                    fine_cone.rays(),
                    coarse_cone.rays()
                )));
            }
            let v = self.values[i].map_exponents(&fine_cone.characters().map_to(coarse_cone.characters()))?;
            match &values[a] {
                None => values[a] = Some(v),
                Some(existing) if *existing == v => {}
                Some(existing) => {
                    return Err(PExpError::NotDescendable {
                        coarse_cone: coarse_cone.rays().to_vec(),
                        first: existing.clone(),
                        second: v,
                    })
                }
            }
        }
        let values: Vec<LaurentPoly> = values
            .into_iter()
            .enumerate()
            .map(|(a, v)| {
                v.ok_or_else(|| PExpError::BadSubdivision(format!("coarse cone {a} has no fine cone")))
            })
            .collect::<Result<_, _>>()?;
        let f = match gkm_validate(coarse, values)? {
            Validation::Valid(f) => f,
            Validation::Violations(v) => {
                let v = &v[0];
                return Err(PExpError::NotDescendable {
                    coarse_cone: coarse.max_cones()[v.first].clone(),
                    first: v.first_value.clone(),
                    second: v.second_value.clone(),
                });
            }
        };
        debug_assert_eq!(f.pullback(s).ok().as_ref(), Some(self));
        Ok(f)
    }
}

fn check_assignment(s: &SubdivisionMap) -> Result<(), PExpError> {
    if s.assignment.len() != s.fine.max_cones().len() {
        return Err(PExpError::BadSubdivision("assignment length differs from fine cone count".into()));
    }
    if let Some(&a) = s.assignment.iter().find(|&&a| a >= s.coarse.max_cones().len()) {
        return Err(PExpError::BadSubdivision(format!("assignment refers to coarse cone {a}")));
    }
    Ok(())
}
