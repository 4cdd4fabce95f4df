//! Exact integer linear algebra on the lattices `N` (cocharacters) and `M`
//! (characters).
//!
//! Everything here works over arbitrary-precision integers. The central
//! kernel is [`smith_normal_form`]; saturation tests, annihilators, quotient
//! lattices and dual bases are all read off from the unimodular transforms it
//! produces.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero vector has no primitive generator")]
    ZeroVector,
    #[error("sublattice is not saturated (invariant factors {0:?})")]
    NotSaturated(Vec<BigInt>),
    #[error("kernel basis is not linearly independent")]
    NotIndependent,
    #[error("basis is not unimodular (|det| = {0})")]
    NotUnimodular(BigInt),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have length `cols`.
    pub fn from_rows<R: AsRef<[BigInt]>>(cols: usize, rows: &[R]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r.iter().cloned());
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = &self[(i, j)];
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Submatrix of the given column range.
    pub fn columns(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Submatrix of the given row range.
    pub fn rows_range(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let rows: Vec<&[BigInt]> = range.map(|i| self.row(i)).collect();
        IntMatrix::from_rows(self.cols, &rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * prev
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, src: usize, dst: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(src, c)] * k;
            self[(dst, c)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, src: usize, dst: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, src)] * k;
            self[(r, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, c)]);
            self[(i, c)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -std::mem::take(&mut self[(r, j)]);
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "IntMatrix{rows:?}")
    }
}

/// Result of [`smith_normal_form`]: `u * a * v == d`, with the inverses of the
/// unimodular transforms tracked alongside.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct SnfWork {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfWork {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.d.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.d.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn add_row(&mut self, src: usize, dst: usize, k: &BigInt) {
        self.d.add_row(src, dst, k);
        self.u.add_row(src, dst, k);
        self.u_inv.add_col(dst, src, &-k);
    }

    fn add_col(&mut self, src: usize, dst: usize, k: &BigInt) {
        self.d.add_col(src, dst, k);
        self.v.add_col(src, dst, k);
        self.v_inv.add_row(dst, src, &-k);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Smallest nonzero |entry| in the trailing block starting at (t, t);
    /// ties go to the lexicographically first (row, col).
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.nrows() {
            for j in t..self.d.ncols() {
                let x = &self.d[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.d[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Smith normal form by elementary row/column gcd reduction.
///
/// The pivot is always the smallest nonzero absolute value in the active
/// block with (row, column) lexicographic tie-break, so the transforms are
/// reproducible.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.nrows(), a.ncols());
    let mut w = SnfWork {
        d: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        while let Some((pi, pj)) = w.pivot(t) {
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if w.d[(i, t)].is_zero() {
                    continue;
                }
                let q = w.d[(i, t)].div_floor(&p);
                w.add_row(t, i, &-q);
                dirty |= !w.d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if w.d[(t, j)].is_zero() {
                    continue;
                }
                let q = w.d[(t, j)].div_floor(&p);
                w.add_col(t, j, &-q);
                dirty |= !w.d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility chain: fold any offending row into the pivot row.
            let offending = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !w.d[(i, j)].is_multiple_of(&p)));
            match offending {
                Some(i) => w.add_row(i, t, &BigInt::one()),
                None => break,
            }
        }
        if w.d[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }
    Snf { u: w.u, u_inv: w.u_inv, d: w.d, v: w.v, v_inv: w.v_inv }
}

macro_rules! lattice_vector {
    ($name:ident) => {
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            coords: Vec<BigInt>,
        }

        impl $name {
            pub fn new(coords: Vec<BigInt>) -> Self {
                $name { coords }
            }

            pub fn from_i64(coords: &[i64]) -> Self {
                $name { coords: coords.iter().map(|&c| BigInt::from(c)).collect() }
            }

            pub fn zero(rank: usize) -> Self {
                $name { coords: vec![BigInt::zero(); rank] }
            }

            /// The `i`-th standard basis vector.
            pub fn basis(rank: usize, i: usize) -> Self {
                let mut v = Self::zero(rank);
                v.coords[i] = BigInt::one();
                v
            }

            pub fn rank(&self) -> usize {
                self.coords.len()
            }

            pub fn coords(&self) -> &[BigInt] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<BigInt> {
                self.coords
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(Zero::is_zero)
            }

            pub fn add(&self, other: &Self) -> Self {
                debug_assert_eq!(self.rank(), other.rank());
                $name { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
            }

            pub fn sub(&self, other: &Self) -> Self {
                debug_assert_eq!(self.rank(), other.rank());
                $name { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
            }

            pub fn neg(&self) -> Self {
                $name { coords: self.coords.iter().map(|a| -a).collect() }
            }

            pub fn scale(&self, k: &BigInt) -> Self {
                $name { coords: self.coords.iter().map(|a| a * k).collect() }
            }

            /// gcd of the coordinates (0 for the zero vector).
            pub fn content(&self) -> BigInt {
                self.coords.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
            }

            /// True when the first nonzero coordinate is negative.
            pub fn is_lex_negative(&self) -> bool {
                self.coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "[")?;
                for (i, c) in self.coords.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    };
}

lattice_vector!(LatticePoint);
lattice_vector!(Character);

impl Character {
    /// The evaluation pairing `<u, v>`.
    pub fn pair(&self, v: &LatticePoint) -> BigInt {
        debug_assert_eq!(self.rank(), v.rank());
        self.coords.iter().zip(v.coords()).map(|(a, b)| a * b).sum()
    }
}

impl LatticePoint {
    pub fn pair(&self, u: &Character) -> BigInt {
        u.pair(self)
    }
}

/// Divides out the content, keeping the direction.
pub fn primitive_generator(v: &LatticePoint) -> Result<LatticePoint, LatticeError> {
    let g = v.content();
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(LatticePoint::new(v.coords().iter().map(|c| c / &g).collect()))
}

pub(crate) fn primitive_character(u: &Character) -> Result<Character, LatticeError> {
    let g = u.content();
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(Character::new(u.coords().iter().map(|c| c / &g).collect()))
}

/// Saturated basis of `{x : <x, r> = 0 for every row r}` in `Z^rank`.
pub(crate) fn integer_kernel(rank: usize, rows: &[&[BigInt]]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return (0..rank).map(|i| LatticePoint::basis(rank, i).into_coords()).collect();
    }
    let a = IntMatrix::from_rows(rank, rows);
    let snf = smith_normal_form(&a);
    let r = snf.rank();
    (r..rank).map(|j| snf.v.column(j)).collect()
}

/// Saturated basis of `span(rows) ∩ Z^rank`.
pub(crate) fn saturation(rank: usize, rows: &[&[BigInt]]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let a = IntMatrix::from_rows(rank, rows);
    let snf = smith_normal_form(&a);
    (0..snf.rank()).map(|i| snf.v_inv.row(i).to_vec()).collect()
}

/// Basis of `{u ∈ M : <u, v> = 0 for all v}`, saturated in `M`.
pub fn annihilator(rank: usize, vectors: &[LatticePoint]) -> Result<Vec<Character>, LatticeError> {
    check_ranks(rank, vectors.iter().map(LatticePoint::rank))?;
    let rows: Vec<&[BigInt]> = vectors.iter().map(|v| v.coords()).collect();
    Ok(integer_kernel(rank, &rows).into_iter().map(Character::new).collect())
}

/// The cocharacters orthogonal to every given character.
pub fn orthogonal_points(rank: usize, chars: &[Character]) -> Result<Vec<LatticePoint>, LatticeError> {
    check_ranks(rank, chars.iter().map(Character::rank))?;
    let rows: Vec<&[BigInt]> = chars.iter().map(|v| v.coords()).collect();
    Ok(integer_kernel(rank, &rows).into_iter().map(LatticePoint::new).collect())
}

fn check_ranks(rank: usize, ranks: impl Iterator<Item = usize>) -> Result<(), LatticeError> {
    for r in ranks {
        if r != rank {
            return Err(LatticeError::RankMismatch { expected: rank, found: r });
        }
    }
    Ok(())
}

/// A free quotient `Z^source_rank / L` of a lattice by a saturated
/// sublattice, presented by an explicit projection and section.
///
/// Vectors are rows: `project(x) = x · projection`, `lift(y) = y · section`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuotientLattice {
    source_rank: usize,
    kernel_basis: Vec<Vec<BigInt>>,
    projection: IntMatrix,
    section: IntMatrix,
}

impl QuotientLattice {
    pub fn identity(rank: usize) -> Self {
        QuotientLattice {
            source_rank: rank,
            kernel_basis: Vec::new(),
            projection: IntMatrix::identity(rank),
            section: IntMatrix::identity(rank),
        }
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    /// Rank of the quotient.
    pub fn rank(&self) -> usize {
        self.projection.ncols()
    }

    pub fn kernel_basis(&self) -> &[Vec<BigInt>] {
        &self.kernel_basis
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    pub fn section(&self) -> &IntMatrix {
        &self.section
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.projection.left_apply(x)
    }

    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.section.left_apply(y)
    }

    /// Matrix of the induced map from `self` to `target`, defined when the
    /// kernel of `self` is contained in the kernel of `target`.
    pub fn map_to(&self, target: &QuotientLattice) -> IntMatrix {
        self.section.mul(&target.projection)
    }
}

impl fmt::Debug for QuotientLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientLattice")
            .field("source_rank", &self.source_rank)
            .field("rank", &self.rank())
            .field("projection", &self.projection)
            .finish()
    }
}

/// Builds `Z^rank / span(kernel_basis)` from the Smith normal form of the
/// kernel basis.
pub fn quotient<R: AsRef<[BigInt]>>(
    rank: usize,
    kernel_basis: &[R],
) -> Result<QuotientLattice, LatticeError> {
    check_ranks(rank, kernel_basis.iter().map(|r| r.as_ref().len()))?;
    if kernel_basis.is_empty() {
        return Ok(QuotientLattice::identity(rank));
    }
    let k = kernel_basis.len();
    let a = IntMatrix::from_rows(rank, kernel_basis);
    let snf = smith_normal_form(&a);
    let factors = snf.invariant_factors();
    if factors.len() < k {
        return Err(LatticeError::NotIndependent);
    }
    if factors.iter().any(|d| !d.is_one()) {
        return Err(LatticeError::NotSaturated(factors));
    }
    Ok(QuotientLattice {
        source_rank: rank,
        kernel_basis: kernel_basis.iter().map(|r| r.as_ref().to_vec()).collect(),
        projection: snf.v.columns(k..rank),
        section: snf.v_inv.rows_range(k..rank),
    })
}

/// Characters `u_i` with `<u_i, b_j> = δ_ij` for a unimodular basis `b`.
pub fn dual_basis(basis: &[LatticePoint]) -> Result<Vec<Character>, LatticeError> {
    let n = basis.len();
    check_ranks(n, basis.iter().map(LatticePoint::rank))?;
    let rows: Vec<&[BigInt]> = basis.iter().map(|b| b.coords()).collect();
    // Rows of (B^T)^{-1}; with U B^T V = I that inverse is V U.
    let bt = IntMatrix::from_rows(n, &rows).transpose();
    let snf = smith_normal_form(&bt);
    let det: BigInt = if snf.rank() < n {
        BigInt::zero()
    } else {
        snf.invariant_factors().iter().product()
    };
    if !det.is_one() {
        return Err(LatticeError::NotUnimodular(bt.determinant().abs()));
    }
    let inv = snf.v.mul(&snf.u);
    Ok((0..n).map(|i| Character::new(inv.row(i).to_vec())).collect())
}

/// Index of the sublattice spanned by `vectors` inside the lattice points of
/// their real span.
pub fn sublattice_index(rank: usize, vectors: &[LatticePoint]) -> BigInt {
    if vectors.is_empty() {
        return BigInt::one();
    }
    let rows: Vec<&[BigInt]> = vectors.iter().map(|v| v.coords()).collect();
    smith_normal_form(&IntMatrix::from_rows(rank, &rows)).invariant_factors().iter().product()
}
