//! The representation ring `R(T) = Z[M]`, written as finite exponential sums
//! `a_1 e^{u_1} + ... + a_r e^{u_r}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{primitive_character, smith_normal_form, Character, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("division by 1 - e^w with w = 0")]
    ZeroCharacter,
    #[error("{numerator} is not divisible by 1 - e^{divisor}")]
    NotDivisible { numerator: String, divisor: Character },
    #[error("localization sum does not reduce to a Laurent polynomial: division by 1 - e^{factor} left a remainder")]
    NotPolynomial { factor: Character },
}

/// Element of `Z[M]`: a map from exponents to nonzero coefficients.
///
/// Terms are kept in lexicographic exponent order; no stored coefficient is
/// zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<Character, BigInt>,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, BigInt::one())
    }

    pub fn constant(rank: usize, c: impl Into<BigInt>) -> Self {
        Self::term(c, Character::zero(rank))
    }

    /// `e^u`.
    pub fn monomial(u: Character) -> Self {
        Self::term(BigInt::one(), u)
    }

    /// `c * e^u`.
    pub fn term(c: impl Into<BigInt>, u: Character) -> Self {
        let mut p = LaurentPoly::zero(u.rank());
        p.add_term(u, c.into());
        p
    }

    /// `1 - e^w`.
    pub fn one_minus(w: &Character) -> Self {
        let mut p = LaurentPoly::one(w.rank());
        p.add_term(w.clone(), -BigInt::one());
        p
    }

    /// Shorthand used heavily in tests: `[(coeff, exponent), ...]`.
    pub fn from_terms(rank: usize, terms: &[(i64, &[i64])]) -> Self {
        let mut p = LaurentPoly::zero(rank);
        for (c, e) in terms {
            assert_eq!(e.len(), rank, "exponent rank");
            p.add_term(Character::from_i64(e), BigInt::from(*c));
        }
        p
    }

    /// Builds from raw terms, merging duplicates and pruning zeros.
    pub fn from_iter_terms(rank: usize, terms: impl IntoIterator<Item = (Character, BigInt)>) -> Self {
        let mut p = LaurentPoly::zero(rank);
        for (u, c) in terms {
            assert_eq!(u.rank(), rank, "exponent rank");
            p.add_term(u, c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().is_some_and(|(u, c)| u.is_zero() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Character, &BigInt)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, u: &Character) -> BigInt {
        self.terms.get(u).cloned().unwrap_or_default()
    }

    /// Adds `c * e^u` in place.
    pub fn add_term(&mut self, u: Character, c: BigInt) {
        debug_assert_eq!(u.rank(), self.rank);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(u) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_rank(&self, other: &LaurentPoly) -> Result<(), LaurentError> {
        if self.rank != other.rank {
            return Err(LaurentError::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.add_term(u.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.add_term(u.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_rank(other)?;
        let mut out = LaurentPoly::zero(self.rank);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.add(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> LaurentPoly {
        if k.is_zero() {
            return LaurentPoly::zero(self.rank);
        }
        LaurentPoly { rank: self.rank, terms: self.terms.iter().map(|(u, c)| (u.clone(), c * k)).collect() }
    }

    /// Multiplies by `e^u`.
    pub fn shift(&self, u: &Character) -> LaurentPoly {
        LaurentPoly { rank: self.rank, terms: self.terms.iter().map(|(v, c)| (v.add(u), c.clone())).collect() }
    }

    /// `self * (1 - e^w)`.
    pub fn mul_one_minus(&self, w: &Character) -> LaurentPoly {
        let mut out = self.clone();
        for (u, c) in &self.terms {
            out.add_term(u.add(w), -c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        (0..k).fold(LaurentPoly::one(self.rank), |acc, _| &acc * self)
    }

    /// The augmentation `e^u ↦ 1`: sum of coefficients.
    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Pushes every exponent through the integer matrix `phi` (rows = this
    /// rank, columns = target rank; exponents are row vectors).
    pub fn map_exponents(&self, phi: &IntMatrix) -> Result<LaurentPoly, LaurentError> {
        if phi.nrows() != self.rank {
            return Err(LaurentError::RankMismatch { left: self.rank, right: phi.nrows() });
        }
        let mut out = LaurentPoly::zero(phi.ncols());
        for (u, c) in &self.terms {
            out.add_term(Character::new(phi.left_apply(u.coords())), c.clone());
        }
        Ok(out)
    }

    /// `±e^m` is a unit; returns its inverse.
    pub fn unit_inverse(&self) -> Option<LaurentPoly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (u, c) = self.terms.iter().next()?;
        if c.abs().is_one() {
            Some(LaurentPoly::term(c.clone(), u.neg()))
        } else {
            None
        }
    }

    pub fn is_unit(&self) -> bool {
        self.unit_inverse().is_some()
    }

    /// Exact quotient `g` with `self = (1 - e^w) g`.
    ///
    /// Writes `w = k w0` with `w0` primitive, picks `ν ∈ N` with
    /// `<w0, ν> = 1` from the Smith form of `w0`, and treats each coset of
    /// `Z w0` as a univariate Laurent polynomial in `t = e^{w0}`. Each is then
    /// divided by `1 - t^k` from the top degree down.
    pub fn divide_exact(&self, w: &Character) -> Result<LaurentPoly, LaurentError> {
        if w.rank() != self.rank {
            return Err(LaurentError::RankMismatch { left: self.rank, right: w.rank() });
        }
        if w.is_zero() {
            return Err(LaurentError::ZeroCharacter);
        }
        let k = w.content();
        let w0 = primitive_character(w).map_err(|_| LaurentError::ZeroCharacter)?;
        let snf = smith_normal_form(&IntMatrix::from_rows(self.rank, &[w0.coords()]));
        let sign = snf.u[(0, 0)].clone();
        let nu: Vec<BigInt> = snf.v.column(0).into_iter().map(|x| x * &sign).collect();
        debug_assert!(w0.coords().iter().zip(&nu).map(|(a, b)| a * b).sum::<BigInt>().is_one());

        let mut groups: BTreeMap<Character, BTreeMap<BigInt, BigInt>> = BTreeMap::new();
        for (u, c) in &self.terms {
            let deg: BigInt = u.coords().iter().zip(&nu).map(|(a, b)| a * b).sum();
            let rest = u.sub(&w0.scale(&deg));
            groups.entry(rest).or_default().insert(deg, c.clone());
        }

        let mut out = LaurentPoly::zero(self.rank);
        for (rest, mut poly) in groups {
            let min_deg = poly.keys().next().cloned().expect("nonempty group");
            while let Some((top, c)) = poly.pop_last() {
                let lower = &top - &k;
                if lower < min_deg {
                    return Err(LaurentError::NotDivisible {
                        numerator: self.to_string(),
                        divisor: w.clone(),
                    });
                }
                out.add_term(rest.add(&w0.scale(&lower)), -c.clone());
                let slot = poly.entry(lower.clone()).or_default();
                *slot += c;
                if slot.is_zero() {
                    poly.remove(&lower);
                }
            }
        }
        Ok(out)
    }

    /// Exact quotient by an arbitrary divisor, or `None` when the division
    /// leaves a remainder.
    ///
    /// Lexicographic leading-term division. Degrees in each coordinate are
    /// additive under multiplication, so the quotient's exponents are
    /// confined to a box computed up front; leaving that box proves a
    /// nonzero remainder.
    pub fn exact_div(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        assert_eq!(self.rank, d.rank, "rank mismatch");
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if d.terms.len() == 1 {
            let (u, c) = d.terms.iter().next()?;
            let mut out = LaurentPoly::zero(self.rank);
            for (v, a) in &self.terms {
                let (q, r) = a.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                out.add_term(v.sub(u), q);
            }
            return Some(out);
        }
        let (lo_f, hi_f) = self.degree_box();
        let (lo_d, hi_d) = d.degree_box();
        let lo: Vec<BigInt> = lo_f.iter().zip(&lo_d).map(|(a, b)| a - b).collect();
        let hi: Vec<BigInt> = hi_f.iter().zip(&hi_d).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return None;
        }
        let (lead_u, lead_c) = d.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut out = LaurentPoly::zero(self.rank);
        while let Some((u, c)) = rem.terms.iter().next_back() {
            let (q, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return None;
            }
            let e = u.sub(lead_u);
            let inside = e.coords().iter().zip(lo.iter().zip(&hi)).all(|(x, (a, b))| a <= x && x <= b);
            if !inside {
                return None;
            }
            for (v, b) in &d.terms {
                rem.add_term(v.add(&e), -(&q * b));
            }
            out.add_term(e, q);
        }
        Some(out)
    }

    /// Coordinatewise minimum and maximum exponent. Panics on zero.
    fn degree_box(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let mut lo: Option<Vec<BigInt>> = None;
        let mut hi: Option<Vec<BigInt>> = None;
        for u in self.terms.keys() {
            match (&mut lo, &mut hi) {
                (Some(l), Some(h)) => {
                    for (i, x) in u.coords().iter().enumerate() {
                        if *x < l[i] {
                            l[i] = x.clone();
                        }
                        if *x > h[i] {
                            h[i] = x.clone();
                        }
                    }
                }
                _ => {
                    lo = Some(u.coords().to_vec());
                    hi = Some(u.coords().to_vec());
                }
            }
        }
        (lo.expect("nonzero polynomial"), hi.expect("nonzero polynomial"))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            /// Panics on rank mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$checked(rhs).expect("LaurentPoly rank mismatch")
            }
        }

        impl std::ops::$tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-BigInt::one())
    }
}

impl fmt::Display for LaurentPoly {
    /// `a*e^[c1,c2,...]` terms joined by ` + `, in lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (u, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*e^{u}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({}; {})", self.rank, self)
    }
}

/// A formal sum of fractions `numerator / Π (1 - e^w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationSum {
    rank: usize,
    terms: Vec<(LaurentPoly, Vec<Character>)>,
}

impl LocalizationSum {
    pub fn new(rank: usize) -> Self {
        LocalizationSum { rank, terms: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &[(LaurentPoly, Vec<Character>)] {
        &self.terms
    }

    pub fn push(&mut self, numerator: LaurentPoly, denominator: Vec<Character>) -> Result<(), LaurentError> {
        if numerator.rank() != self.rank {
            return Err(LaurentError::RankMismatch { left: self.rank, right: numerator.rank() });
        }
        for w in &denominator {
            if w.rank() != self.rank {
                return Err(LaurentError::RankMismatch { left: self.rank, right: w.rank() });
            }
            if w.is_zero() {
                return Err(LaurentError::ZeroCharacter);
            }
        }
        self.terms.push((numerator, denominator));
        Ok(())
    }

    /// Reduces the sum to a single Laurent polynomial.
    ///
    /// Picks a direction `ξ` on which no weight vanishes, rewrites every
    /// factor so its weight has positive `ξ`-degree, and expands each term
    /// as a geometric series up to the largest degree the reduced sum can
    /// have. The result is then checked by evaluation modulo a prime; if
    /// the sum is not a Laurent polynomial the check fails and the exact
    /// common-denominator method reports the offending factor.
    pub fn reduce(&self) -> Result<LaurentPoly, LaurentError> {
        let terms: Vec<&(LaurentPoly, Vec<Character>)> = self.terms.iter().filter(|(n, _)| !n.is_zero()).collect();
        if terms.is_empty() {
            return Ok(LaurentPoly::zero(self.rank));
        }
        for (_, den) in &terms {
            if den.iter().any(Character::is_zero) {
                return Err(LaurentError::ZeroCharacter);
            }
        }
        let xi = generic_direction(self.rank, terms.iter().flat_map(|(_, d)| d.iter()));
        let deg = |u: &Character| -> BigInt { u.coords().iter().zip(&xi).map(|(a, b)| a * b).sum() };
        let bound = terms
            .iter()
            .map(|(num, den)| {
                let top = num.terms().map(|(u, _)| deg(u)).max().expect("nonzero numerator");
                let drop: BigInt = den.iter().map(&deg).filter(|d| d.is_positive()).sum();
                top - drop
            })
            .max()
            .expect("nonempty");

        let mut total: BTreeMap<Character, BigInt> = BTreeMap::new();
        for (num, den) in &terms {
            let mut num = (*num).clone();
            let mut steps = Vec::with_capacity(den.len());
            for w in den.iter() {
                if deg(w).is_negative() {
                    // 1/(1 - e^w) = -e^{-w} / (1 - e^{-w})
                    num = -&num.shift(&w.neg());
                    steps.push(w.neg());
                } else {
                    steps.push(w.clone());
                }
            }
            let mut current: BTreeMap<Character, BigInt> =
                num.terms.into_iter().filter(|(u, _)| deg(u) <= bound).collect();
            for w in &steps {
                let dw = deg(w);
                let mut next: BTreeMap<Character, BigInt> = BTreeMap::new();
                for (u, c) in current {
                    let mut e = u;
                    let mut d = deg(&e);
                    while d <= bound {
                        *next.entry(e.clone()).or_default() += &c;
                        e = e.add(w);
                        d += &dw;
                    }
                }
                current = next;
            }
            for (u, c) in current {
                *total.entry(u).or_default() += c;
            }
        }
        let result = LaurentPoly::from_iter_terms(self.rank, total);
        if self.agrees_modulo_prime(&result) {
            Ok(result)
        } else {
            self.reduce_common_denominator()
        }
    }

    /// Compares the sum with `candidate` at random points modulo `2^61 - 1`.
    fn agrees_modulo_prime(&self, candidate: &LaurentPoly) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 2 && attempts < 64 {
            attempts += 1;
            let x: Vec<u64> = (0..self.rank).map(|_| rng.gen_range(2..PRIME - 1)).collect();
            let Some(value) = self.evaluate_mod(&x) else { continue };
            if value != eval_poly_mod(candidate, &x) {
                return false;
            }
            checked += 1;
        }
        checked == 2
    }

    fn evaluate_mod(&self, x: &[u64]) -> Option<u64> {
        let mut sum = 0u64;
        for (num, den) in &self.terms {
            let mut d = 1u64;
            for w in den {
                d = mul_mod(d, sub_mod(1, monomial_mod(w, x)));
            }
            if d == 0 {
                return None;
            }
            sum = add_mod(sum, mul_mod(eval_poly_mod(num, x), pow_mod(d, PRIME - 2)));
        }
        Some(sum)
    }

    /// Exact reduction over the common denominator of all terms. Slow when
    /// there are many distinct weights, but it names the factor that fails
    /// to divide.
    ///
    /// Each factor `1 - e^w` with `w` lexicographically negative is first
    /// rewritten as `(1 - e^{-w}) (-e^w)` and the unit moved to the
    /// numerator. All terms are then brought over the common denominator and
    /// the numerator is divided by its factors, ordered lexicographically by
    /// primitive direction.
    pub fn reduce_common_denominator(&self) -> Result<LaurentPoly, LaurentError> {
        let mut normalized: Vec<(LaurentPoly, BTreeMap<Character, u32>)> = Vec::with_capacity(self.terms.len());
        for (num, den) in &self.terms {
            let mut num = num.clone();
            let mut counts: BTreeMap<Character, u32> = BTreeMap::new();
            for w in den {
                if w.is_zero() {
                    return Err(LaurentError::ZeroCharacter);
                }
                let w = if w.is_lex_negative() {
                    // 1/(1 - e^w) = -e^{-w} / (1 - e^{-w})
                    num = -&num.shift(&w.neg());
                    w.neg()
                } else {
                    w.clone()
                };
                *counts.entry(w).or_default() += 1;
            }
            normalized.push((num, counts));
        }

        let mut common: BTreeMap<Character, u32> = BTreeMap::new();
        for (_, counts) in &normalized {
            for (w, &m) in counts {
                let slot = common.entry(w.clone()).or_default();
                *slot = (*slot).max(m);
            }
        }

        let mut numerator = LaurentPoly::zero(self.rank);
        for (num, counts) in normalized {
            let mut scaled = num;
            for (w, &m) in &common {
                let have = counts.get(w).copied().unwrap_or(0);
                for _ in have..m {
                    scaled = scaled.mul_one_minus(w);
                }
            }
            numerator = &numerator + &scaled;
        }

        let mut factors: Vec<(Character, Character, u32)> = common
            .into_iter()
            .map(|(w, m)| (primitive_character(&w).expect("nonzero factor"), w, m))
            .collect();
        factors.sort();
        for (_, w, m) in factors {
            for _ in 0..m {
                numerator = numerator
                    .divide_exact(&w)
                    .map_err(|_| LaurentError::NotPolynomial { factor: w.clone() })?;
            }
        }
        Ok(numerator)
    }
}


const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn add_mod(a: u64, b: u64) -> u64 {
    (a + b) % PRIME
}

fn sub_mod(a: u64, b: u64) -> u64 {
    (a + PRIME - b) % PRIME
}

fn pow_mod(mut base: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

fn big_mod(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().expect("reduced below the modulus")
}

fn monomial_mod(u: &Character, x: &[u64]) -> u64 {
    u.coords().iter().zip(x).fold(1, |acc, (e, &xi)| mul_mod(acc, pow_mod(xi, big_mod(e, PRIME - 1))))
}

fn eval_poly_mod(p: &LaurentPoly, x: &[u64]) -> u64 {
    p.terms().fold(0, |acc, (u, c)| add_mod(acc, mul_mod(big_mod(c, PRIME), monomial_mod(u, x))))
}

/// The first integer vector, by growing box radius and then
/// lexicographically, that pairs nontrivially with every weight.
fn generic_direction<'a>(rank: usize, weights: impl Iterator<Item = &'a Character>) -> Vec<BigInt> {
    let weights: BTreeSet<&Character> = weights.collect();
    for radius in 1i64.. {
        let side = 2 * radius + 1;
        let count = (side as u64).pow(rank as u32);
        for idx in 0..count {
            let mut rest = idx;
            let v: Vec<i64> = (0..rank)
                .map(|_| {
                    let d = (rest % side as u64) as i64 - radius;
                    rest /= side as u64;
                    d
                })
                .collect();
            if v.iter().all(|c| c.abs() < radius) {
                continue;
            }
            let v: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
            let ok = weights.iter().all(|w| !w.coords().iter().zip(&v).map(|(a, b)| a * b).sum::<BigInt>().is_zero());
            if ok {
                return v;
            }
        }
    }
    unreachable!("finitely many hyperplanes cannot cover the lattice")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(c: &[i64]) -> Character {
        Character::from_i64(c)
    }

    #[test]
    fn ring_examples() {
        let one_minus = LaurentPoly::one_minus(&u(&[1]));
        let one_plus = &LaurentPoly::one(1) + &LaurentPoly::monomial(u(&[1]));
        assert_eq!(&one_minus * &one_plus, LaurentPoly::one_minus(&u(&[2])));
        assert_eq!(
            &LaurentPoly::monomial(u(&[1, 0])) * &LaurentPoly::monomial(u(&[0, 1])),
            LaurentPoly::monomial(u(&[1, 1]))
        );
        let f = LaurentPoly::from_terms(2, &[(1, &[1, 0]), (1, &[0, 1])]);
        let g = LaurentPoly::from_terms(2, &[(-1, &[0, 1])]);
        let s = &f + &g;
        assert_eq!(s, LaurentPoly::monomial(u(&[1, 0])));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn rank_mismatch() {
        let a = LaurentPoly::one(1);
        let b = LaurentPoly::one(2);
        assert!(matches!(a.checked_add(&b), Err(LaurentError::RankMismatch { .. })));
        assert!(matches!(a.checked_mul(&b), Err(LaurentError::RankMismatch { .. })));
    }

    #[test]
    fn augment_examples() {
        let f = LaurentPoly::from_terms(2, &[(3, &[0, 0]), (2, &[1, 0]), (-1, &[0, 1])]);
        assert_eq!(f.augment(), BigInt::from(4));
        assert_eq!(LaurentPoly::zero(2).augment(), BigInt::zero());
        let g = &LaurentPoly::one_minus(&u(&[0, 1])) * &LaurentPoly::one_minus(&u(&[-2, 1]));
        assert_eq!(g.augment(), BigInt::zero());
    }

    #[test]
    fn map_exponents_examples() {
        // evaluation on the ray -e1-2e2
        let phi = IntMatrix::from_i64(&[&[-1], &[-2]]);
        let f = LaurentPoly::from_terms(2, &[(1, &[0, 0]), (1, &[1, -1])]);
        assert_eq!(f.map_exponents(&phi).unwrap(), LaurentPoly::from_terms(1, &[(1, &[0]), (1, &[1])]));
        assert_eq!(f.map_exponents(&IntMatrix::identity(2)).unwrap(), f);
        let g = LaurentPoly::from_terms(2, &[(1, &[1, 0]), (1, &[0, 1])]);
        let to_zero = IntMatrix::zeros(2, 0);
        assert_eq!(g.map_exponents(&to_zero).unwrap(), LaurentPoly::constant(0, 2));
        assert!(g.map_exponents(&IntMatrix::identity(3)).is_err());
    }

    #[test]
    fn divide_exact_examples() {
        let f = LaurentPoly::one_minus(&u(&[2]));
        assert_eq!(f.divide_exact(&u(&[1])).unwrap(), LaurentPoly::from_terms(1, &[(1, &[0]), (1, &[1])]));

        let f = &LaurentPoly::one_minus(&u(&[1, 0])) * &LaurentPoly::one_minus(&u(&[0, 1]));
        assert_eq!(f.divide_exact(&u(&[0, 1])).unwrap(), LaurentPoly::one_minus(&u(&[1, 0])));

        let f = LaurentPoly::one_minus(&u(&[1]));
        assert!(matches!(f.divide_exact(&u(&[2])), Err(LaurentError::NotDivisible { .. })));
        assert_eq!(f.divide_exact(&u(&[0])), Err(LaurentError::ZeroCharacter));
    }

    #[test]
    fn divide_exact_negative_direction() {
        let w = u(&[-1, 2]);
        let g = LaurentPoly::from_terms(2, &[(3, &[1, 1]), (-2, &[0, -4]), (1, &[5, 0])]);
        let f = g.mul_one_minus(&w);
        assert_eq!(f.divide_exact(&w).unwrap(), g);
        let w2 = u(&[-2, 4]);
        let f2 = g.mul_one_minus(&w2);
        assert_eq!(f2.divide_exact(&w2).unwrap(), g);
    }

    #[test]
    fn exact_div_general() {
        let a = LaurentPoly::from_terms(2, &[(1, &[1, 0]), (2, &[0, -1]), (-3, &[0, 0])]);
        let b = LaurentPoly::from_terms(2, &[(2, &[1, 1]), (1, &[-1, 0])]);
        let p = &a * &b;
        assert_eq!(p.exact_div(&b).unwrap(), a);
        assert_eq!(p.exact_div(&a).unwrap(), b);
        let one_plus = LaurentPoly::from_terms(1, &[(1, &[0]), (1, &[1])]);
        assert!(LaurentPoly::one(1).exact_div(&one_plus).is_none());
        assert!(LaurentPoly::one(1).exact_div(&LaurentPoly::constant(1, 2)).is_none());
    }

    #[test]
    fn reduce_examples() {
        let mut s = LocalizationSum::new(1);
        s.push(LaurentPoly::one(1), vec![u(&[1])]).unwrap();
        s.push(LaurentPoly::one(1), vec![u(&[-1])]).unwrap();
        assert_eq!(s.reduce().unwrap(), LaurentPoly::one(1));

        let mut s = LocalizationSum::new(1);
        s.push(LaurentPoly::monomial(u(&[1])), vec![u(&[1])]).unwrap();
        s.push(LaurentPoly::one(1), vec![u(&[-1])]).unwrap();
        // e^u/(1-e^u) + 1/(1-e^{-u}) = (e^u - e^u)/(1-e^u) = 0
        assert_eq!(s.reduce().unwrap(), LaurentPoly::zero(1));

        let mut s = LocalizationSum::new(1);
        s.push(LaurentPoly::one(1), vec![u(&[1])]).unwrap();
        s.push(LaurentPoly::monomial(u(&[1])), vec![u(&[-1])]).unwrap();
        assert_eq!(s.reduce().unwrap(), LaurentPoly::from_terms(1, &[(1, &[0]), (1, &[1])]));

        let mut s = LocalizationSum::new(1);
        s.push(LaurentPoly::one(1), vec![u(&[1])]).unwrap();
        assert!(matches!(s.reduce(), Err(LaurentError::NotPolynomial { .. })));

        let mut s = LocalizationSum::new(1);
        assert_eq!(s.push(LaurentPoly::one(1), vec![u(&[0])]), Err(LaurentError::ZeroCharacter));
    }

    #[test]
    fn display_is_lexicographic() {
        let f = LaurentPoly::from_terms(2, &[(1, &[1, 0]), (-2, &[0, 1]), (3, &[0, 0])]);
        assert_eq!(f.to_string(), "3*e^[0,0] + -2*e^[0,1] + 1*e^[1,0]");
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
    }
}
