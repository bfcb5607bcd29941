//! Dense matrices over an abstract scalar field.
//!
//! Provides multiplication, Kronecker products, multi-site embeddings into
//! tensor-product spaces, linear solving and rank. The basis convention is
//! fixed crate-wide: in a product of n two-dimensional sites, site 1 is the
//! most significant bit of the basis index.

use num_traits::Zero;

use crate::scalar::{Rational, Scalar, DEFAULT_REL_TOL};

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome<T> {
    /// Full column rank and consistent: the one solution.
    Unique(Vec<T>),
    /// Consistent but rank-deficient: one particular solution (minimum-norm
    /// in the `f64` backend, free variables zero in the exact backend).
    Underdetermined { rank: usize, particular: Vec<T> },
    /// No solution within tolerance (exactly none, in the exact backend).
    Inconsistent { residual: f64 },
}

impl<T> SolveOutcome<T> {
    pub fn is_unique(&self) -> bool {
        matches!(self, SolveOutcome::Unique(_))
    }

    /// The solution vector for `Unique` or `Underdetermined` outcomes.
    pub fn solution(&self) -> Option<&[T]> {
        match self {
            SolveOutcome::Unique(x) => Some(x),
            SolveOutcome::Underdetermined { particular, .. } => Some(particular),
            SolveOutcome::Inconsistent { .. } => None,
        }
    }
}

/// Dense row-major matrix over one scalar backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Panics when the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|row| row.len() == c),
            "ragged rows in matrix constructor"
        );
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c] = v;
    }

    /// Row-major flattening, the vectorization used by the algebra solver.
    pub fn vectorize(&self) -> Vec<T> {
        self.data.clone()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Matrix product; panics on a dimension mismatch.
    ///
    /// Zero entries are skipped, so products of embedded few-body operators
    /// cost roughly (nonzeros) x (nonzeros) scalar multiplies.
    pub fn mat_mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let cell = &mut out.data[i * rhs.cols + j];
                    *cell = std::mem::replace(cell, T::zero()) + a.clone() * b.clone();
                }
            }
        }
        out
    }

    /// Kronecker product: entry `((ra*rb' + rb), (ca*cb' + cb)) = A[ra,ca] * B[rb,cb]`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for ra in 0..self.rows {
            for ca in 0..self.cols {
                let a = &self[(ra, ca)];
                if a.is_zero() {
                    continue;
                }
                for rb in 0..rhs.rows {
                    for cb in 0..rhs.cols {
                        let b = &rhs[(rb, cb)];
                        if b.is_zero() {
                            continue;
                        }
                        out.set(
                            ra * rhs.rows + rb,
                            ca * rhs.cols + cb,
                            a.clone() * b.clone(),
                        );
                    }
                }
            }
        }
        out
    }

    /// Embeds an operator on `2^m`-dimensional space into `n_sites` sites.
    ///
    /// `sites` are 1-based, strictly increasing positions; site 1 is the most
    /// significant bit of a basis index. The result acts as `self` on the
    /// listed sites and as the identity elsewhere. Panics when a site is out
    /// of range, repeated, or not increasing, or when `self` is not square of
    /// dimension `2^sites.len()`.
    pub fn embed_sites(&self, sites: &[usize], n_sites: usize) -> Self {
        let m = sites.len();
        assert_eq!(self.rows, self.cols, "embedded operator must be square");
        assert_eq!(self.rows, 1 << m, "operator dimension must be 2^{m}");
        assert!(
            sites.windows(2).all(|w| w[0] < w[1]),
            "sites must be strictly increasing"
        );
        assert!(
            sites.iter().all(|&s| s >= 1 && s <= n_sites),
            "site out of range 1..={n_sites}"
        );

        let dim = 1usize << n_sites;
        // Shift of each target site counted from the least significant bit.
        let shifts: Vec<u32> = sites.iter().map(|&s| (n_sites - s) as u32).collect();
        let free_mask = {
            let mut mask = dim - 1;
            for &sh in &shifts {
                mask &= !(1usize << sh);
            }
            mask
        };
        let extract = |x: usize| -> usize {
            shifts
                .iter()
                .fold(0usize, |acc, &sh| (acc << 1) | ((x >> sh) & 1))
        };
        let scatter = |bits: usize| -> usize {
            shifts
                .iter()
                .enumerate()
                .fold(0usize, |acc, (pos, &sh)| {
                    acc | (((bits >> (m - 1 - pos)) & 1) << sh)
                })
        };

        let mut out = Self::zeros(dim, dim);
        for x in 0..dim {
            let rx = extract(x);
            let free = x & free_mask;
            for cy in 0..(1usize << m) {
                let v = &self[(rx, cy)];
                if v.is_zero() {
                    continue;
                }
                out.set(x, free | scatter(cy), v.clone());
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    /// Adds `s * rhs` into `self` in place.
    pub fn add_scaled(&mut self, s: &T, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        if s.is_zero() {
            return;
        }
        for (cell, r) in self.data.iter_mut().zip(&rhs.data) {
            if r.is_zero() {
                continue;
            }
            *cell = std::mem::replace(cell, T::zero()) + s.clone() * r.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest absolute entry, converted to `f64` (lossy for rationals).
    pub fn max_abs_f64(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// Solves `self * x = b` with the backend default tolerance.
    pub fn solve(&self, b: &[T]) -> SolveOutcome<T> {
        self.solve_with_tol(b, DEFAULT_REL_TOL)
    }

    /// Solves `self * x = b`; `rel_tol` is ignored by the exact backend.
    pub fn solve_with_tol(&self, b: &[T], rel_tol: f64) -> SolveOutcome<T> {
        assert_eq!(self.rows, b.len(), "dimension mismatch: rhs length");
        T::solve_system(self, b, rel_tol)
    }

    pub fn rank(&self) -> usize {
        self.rank_with_tol(DEFAULT_REL_TOL)
    }

    pub fn rank_with_tol(&self, rel_tol: f64) -> usize {
        T::rank_of(self, rel_tol)
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "dimension mismatch: vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    let a = &self.data[i * self.cols + j];
                    if a.is_zero() || x[j].is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * x[j].clone();
                }
                acc
            })
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T: Scalar> std::ops::Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: Self) -> Matrix<T> {
        self.mat_mul(rhs)
    }
}

// ---------------------------------------------------------------------------
// exact backend: fraction-reduced Gaussian elimination
// ---------------------------------------------------------------------------

/// Bit size of a rational, the pivot-selection metric. Smaller pivots bound
/// coefficient growth during elimination.
fn bit_size(v: &Rational) -> u64 {
    v.numer().bits().max(v.denom().bits())
}

/// Row-reduces `rows` in place (full reduced echelon form), returning the
/// pivot (row, col) list. Columns `0..ncols` are eligible for pivots; any
/// extra columns are carried along as augmentation.
fn reduce_rows(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<(usize, usize)> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for col in 0..ncols {
        if next == nrows {
            break;
        }
        let pivot_row = (next..nrows)
            .filter(|&r| !rows[r][col].is_zero())
            .min_by_key(|&r| bit_size(&rows[r][col]));
        let Some(pr) = pivot_row else { continue };
        rows.swap(next, pr);
        let pivot = rows[next][col].clone();
        let width = rows[next].len();
        for j in col..width {
            if rows[next][j].is_zero() {
                continue;
            }
            let v = std::mem::replace(&mut rows[next][j], Rational::zero());
            rows[next][j] = v / pivot.clone();
        }
        for r in 0..nrows {
            if r == next || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for j in col..width {
                if rows[next][j].is_zero() {
                    continue;
                }
                let delta = factor.clone() * rows[next][j].clone();
                let v = std::mem::replace(&mut rows[r][j], Rational::zero());
                rows[r][j] = v - delta;
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    pivots
}

pub(crate) fn exact_solve(a: &Matrix<Rational>, b: &[Rational]) -> SolveOutcome<Rational> {
    let (m, n) = (a.rows(), a.cols());
    let mut aug: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| a[(i, j)].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = reduce_rows(&mut aug, n);
    let rank = pivots.len();

    let mut inconsistent_sq = 0.0f64;
    for row in aug.iter().take(m).skip(rank) {
        if !row[n].is_zero() {
            let v = row[n].to_f64_lossy();
            inconsistent_sq += v * v;
        }
    }
    if inconsistent_sq > 0.0 {
        return SolveOutcome::Inconsistent {
            residual: inconsistent_sq.sqrt(),
        };
    }

    let mut x = vec![Rational::zero(); n];
    for &(pr, pc) in &pivots {
        x[pc] = aug[pr][n].clone();
    }
    if rank == n {
        SolveOutcome::Unique(x)
    } else {
        SolveOutcome::Underdetermined { rank, particular: x }
    }
}

pub(crate) fn exact_rank(a: &Matrix<Rational>) -> usize {
    let (m, n) = (a.rows(), a.cols());
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..n).map(|j| a[(i, j)].clone()).collect())
        .collect();
    reduce_rows(&mut rows, n).len()
}

// ---------------------------------------------------------------------------
// f64 backend: SVD with a relative singular-value cutoff
// ---------------------------------------------------------------------------

fn to_nalgebra(a: &Matrix<f64>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub(crate) fn svd_solve(a: &Matrix<f64>, b: &[f64], rel_tol: f64) -> SolveOutcome<f64> {
    let na = to_nalgebra(a);
    let nb = nalgebra::DVector::from_column_slice(b);
    let svd = na.clone().svd(true, true);
    let sv_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = rel_tol * sv_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd
        .solve(&nb, eps)
        .expect("SVD solve requires u and v_t, both were computed");
    let residual = (&na * &x - &nb).norm();
    let scale = nb.norm().max(sv_max * x.norm()).max(f64::MIN_POSITIVE);
    if residual > rel_tol * scale {
        return SolveOutcome::Inconsistent { residual };
    }
    let sol = x.iter().cloned().collect();
    if rank == a.cols() {
        SolveOutcome::Unique(sol)
    } else {
        SolveOutcome::Underdetermined {
            rank,
            particular: sol,
        }
    }
}

pub(crate) fn svd_rank(a: &Matrix<f64>, rel_tol: f64) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let sv = to_nalgebra(a).singular_values();
    let sv_max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * sv_max).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn rmat(entries: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            entries
                .iter()
                .map(|row| row.iter().map(|&v| ratio(v, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_times_identity() {
        let i2 = Matrix::<Rational>::identity(2);
        assert_eq!(i2.mat_mul(&i2), i2);
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Matrix::<Rational>::identity(2);
        assert_eq!(i2.kron(&i2), Matrix::identity(4));
    }

    #[test]
    fn kron_entry_formula() {
        let a = rmat(&[&[1, 2], &[0, 1]]);
        let b = rmat(&[&[1, 0], &[3, 1]]);
        let k = a.kron(&b);
        // entry (1,3) = A[0,1] * B[1,1] = 2 * 1
        assert_eq!(k[(1, 3)], ratio(2, 1));
    }

    #[test]
    fn embed_prefix_matches_kron() {
        let swap = rmat(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]);
        let i2 = Matrix::<Rational>::identity(2);
        assert_eq!(swap.embed_sites(&[1, 2], 3), swap.kron(&i2));
        assert_eq!(swap.embed_sites(&[2, 3], 3), i2.kron(&swap));
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let i8 = Matrix::<Rational>::identity(8);
        let b: Vec<Rational> = (0..8).map(|v| ratio(v - 3, 2)).collect();
        assert_eq!(i8.solve(&b), SolveOutcome::Unique(b));
    }

    #[test]
    fn repeated_column_is_underdetermined() {
        // 8 columns, two of them equal: rank 7.
        let a: Matrix<Rational> = Matrix::from_fn(8, 8, |i, j| {
            let jj = if j == 7 { 0 } else { j };
            ratio(if i == jj { 1 } else { 0 }, 1)
        });
        let ones = vec![ratio(1, 1); 8];
        let b = a.mul_vec(&ones);
        match a.solve(&b) {
            SolveOutcome::Underdetermined { rank, particular } => {
                assert_eq!(rank, 7);
                assert_eq!(a.mul_vec(&particular), b);
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn exact_inconsistent_detected() {
        let a = rmat(&[&[1, 0], &[1, 0]]);
        let b = vec![ratio(1, 1), ratio(2, 1)];
        match a.solve(&b) {
            SolveOutcome::Inconsistent { residual } => assert!(residual > 0.0),
            other => panic!("expected inconsistent, got {other:?}"),
        }
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(Matrix::<Rational>::identity(8).rank(), 8);
        assert_eq!(Matrix::<Rational>::zeros(5, 7).rank(), 0);
        assert_eq!(Matrix::<f64>::identity(8).rank(), 8);
        assert_eq!(Matrix::<f64>::zeros(5, 7).rank(), 0);
    }

    #[test]
    fn svd_solve_unique_and_rank_deficient() {
        let a = Matrix::<f64>::from_rows(vec![
            vec![2.0, 0.0],
            vec![0.0, 3.0],
            vec![0.0, 0.0],
        ]);
        match a.solve(&[4.0, 9.0, 0.0]) {
            SolveOutcome::Unique(x) => {
                assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
            }
            other => panic!("expected unique, got {other:?}"),
        }
        let dup = Matrix::<f64>::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]]);
        match dup.solve(&[2.0, 4.0]) {
            SolveOutcome::Underdetermined { rank, .. } => assert_eq!(rank, 1),
            other => panic!("expected underdetermined, got {other:?}"),
        }
        match dup.solve(&[1.0, 0.0]) {
            SolveOutcome::Inconsistent { residual } => assert!(residual > 1e-3),
            other => panic!("expected inconsistent, got {other:?}"),
        }
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mat_mul_rejects_bad_shapes() {
        let a = Matrix::<f64>::zeros(2, 3);
        let b = Matrix::<f64>::zeros(2, 3);
        let _ = a.mat_mul(&b);
    }

    #[test]
    #[should_panic(expected = "site out of range")]
    fn embed_rejects_out_of_range_site() {
        let m = Matrix::<f64>::identity(4);
        let _ = m.embed_sites(&[2, 4], 3);
    }

    #[test]
    #[should_panic(expected = "strictly increasing")]
    fn embed_rejects_duplicate_sites() {
        let m = Matrix::<f64>::identity(4);
        let _ = m.embed_sites(&[2, 2], 3);
    }
}
