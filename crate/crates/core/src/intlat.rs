//! Exact integer lattice linear algebra.
//!
//! Everything here works over arbitrary-precision integers. The routines are
//! the classical elimination algorithms: row-style Hermite normal form with a
//! tracked unimodular transform, Smith normal form with both transforms, and
//! the lattice constructions built on top of them (saturated kernels,
//! orthogonal complements of cones, quotient projections).

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("ray matrix has rank {rank} but {cols} columns; rays must be linearly independent")]
    RankDeficient { rank: usize, cols: usize },
    #[error("sublattice is not saturated (invariant factors {factors:?})")]
    NotSaturated { factors: Vec<BigInt> },
    #[error("vectors of length {got} do not fit ambient dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
}

/// Dense integer matrix, row-major.
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

    /// Builds a matrix from rows of equal length. An empty row list gives a
    /// `0 x cols` matrix, so the column count must be passed explicitly.
    pub fn from_rows_big(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let big = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Self::from_rows_big(big, cols)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns_big(columns: &[Vec<BigInt>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Entry as `i64`; panics on overflow.
    pub fn entry_i64(&self, i: usize, j: usize) -> i64 {
        self[(i, j)].to_i64().expect("matrix entry exceeds i64")
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[source * self.cols + j] * factor;
            if !v.is_zero() {
                self.data[target * self.cols + j] += v;
            }
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + source] * factor;
            if !v.is_zero() {
                self.data[i * self.cols + target] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[r * self.cols + j];
            *v = -std::mem::take(v);
        }
    }

    /// Replaces rows (a, b) by (s*a + t*b, u*a + v*b).
    fn combine_rows(&mut self, a: usize, b: usize, [s, t, u, v]: &[BigInt; 4]) {
        for j in 0..self.cols {
            let x = self.data[a * self.cols + j].clone();
            let y = self.data[b * self.cols + j].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.data[a * self.cols + j] = s * &x + t * &y;
            self.data[b * self.cols + j] = u * &x + v * &y;
        }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        hermite_rank(&hermite_normal_form(self).0)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    /// Inverse of a unimodular matrix.
    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub fn inverse_unimodular(&self) -> Result<IntMatrix, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let (h, u) = hermite_normal_form(self);
        if h != IntMatrix::identity(self.rows) {
            return Err(LatticeError::NotUnimodular);
        }
        Ok(u)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.row_vecs())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A basis of a sublattice of `Z^ambient_dim`, stored as row vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    /// Wraps vectors that the caller asserts are linearly independent.
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(LatticeError::DimensionMismatch { expected: ambient_dim, got: v.len() });
        }
        let basis = LatticeBasis { ambient_dim, vectors };
        let rank = basis.to_matrix().rank();
        if rank != basis.vectors.len() {
            return Err(LatticeError::RankDeficient { rank, cols: basis.vectors.len() });
        }
        Ok(basis)
    }

    pub fn from_i64(ambient_dim: usize, vectors: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(
            ambient_dim,
            vectors.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        )
    }

    pub fn empty(ambient_dim: usize) -> Self {
        LatticeBasis { ambient_dim, vectors: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    /// Basis vectors as the rows of a `rank x ambient_dim` matrix.
    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows_big(self.vectors.clone(), self.ambient_dim)
    }

    /// Invariant factors of the basis matrix.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let (s, _, _) = smith_normal_form(&self.to_matrix());
        (0..self.rank()).map(|i| s[(i, i)].clone()).collect()
    }

    /// True when `Z^n / L` is torsion free.
    pub fn is_saturated(&self) -> bool {
        self.invariant_factors().iter().all(One::is_one)
    }

    /// Membership test by exact integer solving.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        solve_integer(&self.to_matrix().transpose(), v).is_some()
    }

    /// Integer coordinates of `v` in this basis.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_integer(&self.to_matrix().transpose(), v)
    }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// The unimodular 2x2 block sending `(a, b)` to `(gcd, 0)`.
fn gcd_block(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    let (g, s, t) = ext_gcd(a, b);
    [s, t, -(b / &g), a / &g]
}

/// Row-style Hermite normal form.
///
/// Returns `(H, U)` with `U` unimodular and `U * M = H`. The nonzero rows of
/// `H` come first, each pivot is positive and lies strictly right of the pivot
/// above it, and entries above a pivot are reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..h.cols {
        if pivot_row == h.rows {
            break;
        }
        let Some(first) = (pivot_row..h.rows).find(|&i| !h[(i, col)].is_zero()) else {
            continue;
        };
        h.swap_rows(pivot_row, first);
        u.swap_rows(pivot_row, first);
        for i in pivot_row + 1..h.rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            let a = h[(pivot_row, col)].clone();
            let b = h[(i, col)].clone();
            if (&b % &a).is_zero() {
                let q = -(&b / &a);
                h.add_row_multiple(i, pivot_row, &q);
                u.add_row_multiple(i, pivot_row, &q);
            } else {
                let block = gcd_block(&a, &b);
                h.combine_rows(pivot_row, i, &block);
                u.combine_rows(pivot_row, i, &block);
            }
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let p = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let q = -h[(i, col)].div_floor(&p);
            h.add_row_multiple(i, pivot_row, &q);
            u.add_row_multiple(i, pivot_row, &q);
        }
        pivots.push(col);
        pivot_row += 1;
    }
    (h, u)
}

/// Number of nonzero rows of a matrix in Hermite form.
pub fn hermite_rank(h: &IntMatrix) -> usize {
    (0..h.rows).take_while(|&i| h.row(i).iter().any(|v| !v.is_zero())).count()
}

/// Smith normal form.
///
/// Returns `(S, U, V)` with `U, V` unimodular, `U * M * V = S`, `S` diagonal
/// with nonnegative entries each dividing the next.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let dim = m.rows.min(m.cols);
    for t in 0..dim {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    let e = &s[(i, j)];
                    if e.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| e.abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_smith(s, u, v);
            };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);

            let mut clean = true;
            for i in t + 1..s.rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -s[(i, t)].div_floor(&s[(t, t)]);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..s.cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -s[(t, j)].div_floor(&s[(t, t)]);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = s[(t, t)].clone();
            let offender = (t + 1..s.rows)
                .find(|&i| (t + 1..s.cols).any(|j| !(&s[(i, j)] % &p).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_smith(s, u, v)
}

fn finish_smith(
    mut s: IntMatrix,
    mut u: IntMatrix,
    v: IntMatrix,
) -> (IntMatrix, IntMatrix, IntMatrix) {
    for t in 0..s.rows.min(s.cols) {
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Canonical form of a lattice basis: Hermite form of the stacked vectors with
/// the zero rows dropped. Pivots are positive, so every vector's first nonzero
/// entry is positive.
pub fn canonical_basis(ambient_dim: usize, vectors: Vec<Vec<BigInt>>) -> LatticeBasis {
    let m = IntMatrix::from_rows_big(vectors, ambient_dim);
    let (h, _) = hermite_normal_form(&m);
    let r = hermite_rank(&h);
    LatticeBasis { ambient_dim, vectors: (0..r).map(|i| h.row(i).to_vec()).collect() }
}

/// Basis of the saturated lattice `{v in Z^cols : M v = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> LatticeBasis {
    let (h, u) = hermite_normal_form(&m.transpose());
    let r = hermite_rank(&h);
    let vectors = (r..u.rows).map(|i| u.row(i).to_vec()).collect();
    canonical_basis(m.cols, vectors)
}

/// Basis of the integer vectors orthogonal to every column of `rays`.
pub fn complement_basis(rays: &IntMatrix) -> Result<LatticeBasis, LatticeError> {
    let rank = rays.rank();
    if rank != rays.cols {
        return Err(LatticeError::RankDeficient { rank, cols: rays.cols });
    }
    Ok(kernel_basis(&rays.transpose()))
}

/// Surjection `Z^n -> Z^d` whose kernel is exactly the saturated lattice `L`.
pub fn quotient_projection(lattice: &LatticeBasis) -> Result<IntMatrix, LatticeError> {
    let factors = lattice.invariant_factors();
    if factors.iter().any(|f| !f.is_one()) {
        return Err(LatticeError::NotSaturated { factors });
    }
    let rows = kernel_basis(&lattice.to_matrix());
    Ok(rows.to_matrix())
}

/// Whether `h` has the shape produced by [`hermite_normal_form`].
pub fn is_hermite_form(h: &IntMatrix) -> bool {
    let r = hermite_rank(h);
    if (r..h.rows).any(|i| h.row(i).iter().any(|v| !v.is_zero())) {
        return false;
    }
    let mut last: Option<usize> = None;
    for i in 0..r {
        let Some(p) = (0..h.cols).find(|&j| !h[(i, j)].is_zero()) else {
            return false;
        };
        if last.is_some_and(|l| p <= l) || !h[(i, p)].is_positive() {
            return false;
        }
        for k in 0..i {
            if h[(k, p)].is_negative() || h[(k, p)] >= h[(i, p)] {
                return false;
            }
        }
        last = Some(p);
    }
    true
}

/// Whether `s` is diagonal with nonnegative entries, each dividing the next,
/// zeros last.
pub fn is_smith_form(s: &IntMatrix) -> bool {
    let d = s.rows.min(s.cols);
    for i in 0..s.rows {
        for j in 0..s.cols {
            if i != j && !s[(i, j)].is_zero() {
                return false;
            }
        }
    }
    for i in 0..d {
        if s[(i, i)].is_negative() {
            return false;
        }
        if i + 1 < d {
            let (a, b) = (&s[(i, i)], &s[(i + 1, i + 1)]);
            if a.is_zero() && !b.is_zero() {
                return false;
            }
            if !a.is_zero() && !(b % a).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Finds an integer solution of `A c = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    // U A^T = H, so A U^T = H^T and c = U^T y.
    let (h, u) = hermite_normal_form(&a.transpose());
    let r = hermite_rank(&h);
    let mut y: Vec<BigInt> = vec![BigInt::zero(); a.cols];
    for i in 0..r {
        let p = (0..h.cols).find(|&j| !h[(i, j)].is_zero()).expect("pivot row");
        let mut rhs = b[p].clone();
        for (l, yl) in y.iter().enumerate().take(i) {
            rhs -= &h[(l, p)] * yl;
        }
        let (q, rem) = rhs.div_rem(&h[(i, p)]);
        if !rem.is_zero() {
            return None;
        }
        y[i] = q;
    }
    // consistency on every row, not just the pivot rows
    for j in 0..h.cols {
        let lhs: BigInt = (0..r).map(|i| &h[(i, j)] * &y[i]).sum();
        if lhs != b[j] {
            return None;
        }
    }
    let mut c = vec![BigInt::zero(); a.cols];
    for (i, yi) in y.iter().enumerate().take(r) {
        if yi.is_zero() {
            continue;
        }
        for (k, ck) in c.iter_mut().enumerate() {
            *ck += &u[(i, k)] * yi;
        }
    }
    Some(c)
}

pub fn gcd_of(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Lattice spanned by the rows, enumerated with coefficients in [-k, k].
    fn row_lattice_box(m: &IntMatrix, k: i64) -> std::collections::HashSet<Vec<BigInt>> {
        let mut out = std::collections::HashSet::new();
        let r = m.rows();
        let mut coeffs = vec![-k; r];
        loop {
            let mut v = vec![BigInt::zero(); m.cols()];
            for (i, c) in coeffs.iter().enumerate() {
                for (j, vj) in v.iter_mut().enumerate() {
                    *vj += &m[(i, j)] * c;
                }
            }
            out.insert(v);
            let mut i = 0;
            loop {
                if i == r {
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] <= k {
                    break;
                }
                coeffs[i] = -k;
                i += 1;
            }
        }
    }

    #[test]
    fn hermite_of_identity() {
        let id = IntMatrix::identity(2);
        let (h, u) = hermite_normal_form(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);
    }

    #[test]
    fn hermite_of_zero() {
        let z = IntMatrix::zeros(2, 3);
        let (h, u) = hermite_normal_form(&z);
        assert_eq!(h, z);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hermite_preserves_row_lattice_small_example() {
        let m = IntMatrix::from_rows(&[[2, 4], [1, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(&u * &m, h);
        assert!(is_hermite_form(&h));
        // double inclusion checked against brute-force enumeration
        let lm = row_lattice_box(&m, 15);
        let lh = row_lattice_box(&h, 15);
        let lm_small: Vec<_> = lm.iter().filter(|v| v.iter().all(|x| x.abs() <= BigInt::from(6))).collect();
        let lh_small: Vec<_> = lh.iter().filter(|v| v.iter().all(|x| x.abs() <= BigInt::from(2))).collect();
        for v in &lm_small {
            assert!(lh.contains(*v), "{v:?} missing from HNF lattice");
        }
        for v in &lh_small {
            assert!(lm.contains(*v), "{v:?} missing from input lattice");
        }
        assert_eq!(h, IntMatrix::from_rows(&[[1, 1], [0, 2]]));
    }

    #[test]
    fn smith_of_diag_2_3() {
        let m = IntMatrix::from_rows(&[[2, 0], [0, 3]]);
        let (s, u, v) = smith_normal_form(&m);
        assert_eq!(s, IntMatrix::from_rows(&[[1, 0], [0, 6]]));
        assert_eq!(&(&u * &m) * &v, s);
    }

    #[test]
    fn smith_diag_2_3_brute_force_oracle() {
        // The invariant factors are determined by the gcd of the entries and
        // the determinant. Search small unimodular pairs for a diagonalising
        // transform with gcd 1 on the first entry.
        let m = IntMatrix::from_rows(&[[2, 0], [0, 3]]);
        let mut found = None;
        let range = -6i64..=6;
        let unimods: Vec<IntMatrix> = range
            .clone()
            .flat_map(|a| range.clone().map(move |b| (a, b)))
            .flat_map(|(a, b)| range.clone().flat_map(move |c| (-6i64..=6).map(move |d| [a, b, c, d])))
            .filter(|[a, b, c, d]| (a * d - b * c).abs() == 1)
            .map(|[a, b, c, d]| IntMatrix::from_rows(&[[a, b], [c, d]]))
            .collect();
        'outer: for u in unimods.iter().take(400) {
            let um = u * &m;
            for v in &unimods {
                let s = &um * v;
                if s[(0, 1)].is_zero() && s[(1, 0)].is_zero() && s[(0, 0)].abs().is_one() {
                    found = Some(s[(1, 1)].abs());
                    break 'outer;
                }
            }
        }
        assert_eq!(found, Some(BigInt::from(6)));
    }

    #[test]
    fn smith_trivial_cases() {
        let id = IntMatrix::identity(3);
        assert_eq!(smith_normal_form(&id).0, id);
        let z = IntMatrix::from_rows(&[[0]]);
        assert_eq!(smith_normal_form(&z).0, z);
    }

    #[test]
    fn kernel_of_two_minus_one() {
        let m = IntMatrix::from_rows(&[[2, -1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.vectors(), &[big(&[1, 2])]);
        // enumeration oracle: primitive solutions in [-3,3]^2 are exactly ±(1,2)
        let mut sols = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if 2 * a - b == 0 && num_integer::gcd(a, b) == 1 {
                    sols.push((a, b));
                }
            }
        }
        assert_eq!(sols, vec![(-1, -2), (1, 2)]);
    }

    #[test]
    fn kernel_trivial_cases() {
        assert_eq!(kernel_basis(&IntMatrix::identity(3)).rank(), 0);
        assert_eq!(kernel_basis(&IntMatrix::zeros(1, 2)).rank(), 2);
    }

    #[test]
    fn complement_examples() {
        // full-dimensional cone
        let cone = IntMatrix::from_columns_big(&[big(&[-1, -2]), big(&[0, 1])], 2);
        assert_eq!(complement_basis(&cone).unwrap().rank(), 0);
        let r0 = IntMatrix::from_columns_big(&[big(&[-1, -2])], 2);
        assert_eq!(complement_basis(&r0).unwrap().vectors(), &[big(&[2, -1])]);
        let r2 = IntMatrix::from_columns_big(&[big(&[0, 1])], 2);
        assert_eq!(complement_basis(&r2).unwrap().vectors(), &[big(&[1, 0])]);
        // enumeration oracle for r2
        let mut prim = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if b == 0 && num_integer::gcd(a, b) == 1 && (a, b) > (0, 0) {
                    prim.push((a, b));
                }
            }
        }
        assert_eq!(prim, vec![(1, 0)]);
    }

    #[test]
    fn complement_rejects_dependent_rays() {
        let m = IntMatrix::from_columns_big(&[big(&[1, 2]), big(&[2, 4])], 2);
        assert!(matches!(complement_basis(&m), Err(LatticeError::RankDeficient { .. })));
    }

    #[test]
    fn quotient_projection_examples() {
        let l = LatticeBasis::from_i64(2, &[vec![2, -1]]).unwrap();
        let pi = quotient_projection(&l).unwrap();
        assert_eq!(pi, IntMatrix::from_rows(&[[1, 2]]));
        assert!(pi.mul_vec(&big(&[2, -1]))[0].is_zero());
        assert!(gcd_of(pi.row(0)).is_one());

        let pi = quotient_projection(&LatticeBasis::empty(2)).unwrap();
        assert_eq!(pi, IntMatrix::identity(2));

        let full = LatticeBasis::from_i64(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let pi = quotient_projection(&full).unwrap();
        assert_eq!((pi.rows(), pi.cols()), (0, 2));
    }

    #[test]
    fn quotient_projection_rejects_unsaturated() {
        let l = LatticeBasis::from_i64(2, &[vec![2, 0]]).unwrap();
        assert!(matches!(quotient_projection(&l), Err(LatticeError::NotSaturated { .. })));
    }

    #[test]
    fn solve_integer_detects_non_integral() {
        let a = IntMatrix::from_rows(&[[2, 0], [0, 3]]);
        assert_eq!(solve_integer(&a, &big(&[4, 9])), Some(big(&[2, 3])));
        assert_eq!(solve_integer(&a, &big(&[1, 3])), None);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = IntMatrix::from_rows(&[[-1, 0], [-2, 1]]);
        assert_eq!(m.determinant().unwrap(), BigInt::from(-1));
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(&inv * &m, IntMatrix::identity(2));
        let m2 = IntMatrix::from_rows(&[[-1, 1], [-2, 0]]);
        assert_eq!(m2.determinant().unwrap(), BigInt::from(2));
        assert_eq!(m2.inverse_unimodular(), Err(LatticeError::NotUnimodular));
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c).map(|ch| ch.to_vec()).collect();
                IntMatrix::from_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn prop_hermite_identity(m in arb_matrix(4)) {
            let (h, u) = hermite_normal_form(&m);
            prop_assert_eq!(&u * &m, h.clone());
            prop_assert!(u.is_unimodular());
            prop_assert!(is_hermite_form(&h));
        }

        #[test]
        fn prop_hermite_same_row_lattice(m in arb_matrix(3)) {
            let (h, _) = hermite_normal_form(&m);
            let r = hermite_rank(&h);
            let hb = IntMatrix::from_rows_big((0..r).map(|i| h.row(i).to_vec()).collect(), m.cols());
            for i in 0..m.rows() {
                prop_assert!(solve_integer(&hb.transpose(), m.row(i)).is_some());
            }
            for i in 0..r {
                prop_assert!(solve_integer(&m.transpose(), h.row(i)).is_some());
            }
        }

        #[test]
        fn prop_smith_identity(m in arb_matrix(4)) {
            let (s, u, v) = smith_normal_form(&m);
            prop_assert_eq!(&(&u * &m) * &v, s.clone());
            prop_assert!(u.is_unimodular() && v.is_unimodular());
            let d = s.rows().min(s.cols());
            for i in 0..s.rows() {
                for j in 0..s.cols() {
                    if i != j { prop_assert!(s[(i, j)].is_zero()); }
                }
            }
            for i in 0..d {
                prop_assert!(!s[(i, i)].is_negative());
                if i + 1 < d && !s[(i, i)].is_zero() {
                    prop_assert!((&s[(i + 1, i + 1)] % &s[(i, i)]).is_zero());
                }
                if i + 1 < d && s[(i, i)].is_zero() {
                    prop_assert!(s[(i + 1, i + 1)].is_zero());
                }
            }
        }

        #[test]
        fn prop_kernel_saturated(m in arb_matrix(4)) {
            let k = kernel_basis(&m);
            prop_assert_eq!(k.rank() + m.rank(), m.cols());
            prop_assert!(k.is_saturated());
            for v in k.vectors() {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }
    }
}
