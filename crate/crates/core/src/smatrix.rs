//! The 8x8 coefficient matrices of the tetrahedral algebra relation
//!
//! ```text
//! R_ij^a R_ik^b R_jk^c  =  sum_{d,e,f} S^{abc}_{def} R_jk^f R_ik^e R_ij^d
//! ```
//!
//! for a line triple i < j < k, built two ways: a closed form at modulus
//! zero in terms of the line tangents (the middle tangent entering through
//! its reciprocal), and a derivation at any modulus by vectorizing the
//! relation and solving the resulting 64x8 linear system row by row.
//!
//! Rows are indexed by the superscript bits packed as `4a + 2b + c`,
//! columns by the subscript bits packed as `4d + 2e + f`. Every body
//! conserves parity: an entry vanishes unless `a^b^c == d^e^f`.

use crate::error::CoreError;
use crate::linalg::{Matrix, SolveOutcome};
use crate::rmatrix::{r_matrix, r_matrix_exact, EllipticConfig, ExactConfig, RSign};
use crate::scalar::{Rational, Scalar};

/// Coefficient matrix of one line triple.
#[derive(Clone, Debug)]
pub struct SMatrix<T> {
    /// Line labels (i, j, k) with i < j < k.
    pub lines: (usize, usize, usize),
    /// 8x8 body; rows = superscripts, columns = subscripts.
    pub body: Matrix<T>,
}

/// Parity of a packed bit-triple index.
pub fn parity(idx: usize) -> usize {
    (idx.count_ones() & 1) as usize
}

impl<T: Scalar> SMatrix<T> {
    pub fn identity(lines: (usize, usize, usize)) -> Self {
        SMatrix {
            lines,
            body: Matrix::identity(8),
        }
    }

    /// True when every parity-violating entry is exactly zero.
    pub fn conserves_parity(&self) -> bool {
        (0..8).all(|r| {
            (0..8).all(|c| parity(r) == parity(c) || self.body[(r, c)].is_zero())
        })
    }
}

/// The coupling function `(1 + rho sigma) / (rho + sigma)`.
///
/// Errors at the pole `rho + sigma = 0`.
pub fn f_coupling<T: Scalar>(rho: &T, sigma: &T) -> Result<T, CoreError> {
    let den = rho.clone() + sigma.clone();
    if den.is_zero() {
        return Err(CoreError::CouplingPole {
            rho: rho.to_string(),
            sigma: sigma.to_string(),
        });
    }
    Ok((T::one() + rho.clone() * sigma.clone()) / den)
}

fn pack(a: usize, b: usize, c: usize) -> usize {
    4 * a + 2 * b + c
}

/// Closed-form body at modulus zero from the triple's tangents
/// `(t_first, t_mid, t_last)`; `t_mid` enters through its reciprocal.
///
/// The four even-parity diagonal entries are 1, the twelve odd-parity
/// entries are signed products of two coupling values, and the remaining
/// 48 entries are exactly zero.
pub fn s_closed_form<T: Scalar>(
    lines: (usize, usize, usize),
    taus: &[T; 3],
) -> Result<SMatrix<T>, CoreError> {
    let t1 = &taus[0];
    let t3 = &taus[2];
    if taus[1].is_zero() {
        return Err(CoreError::ZeroMiddleTangent);
    }
    let u = T::one() / taus[1].clone();

    let f13 = f_coupling(t1, t3)?;
    let fu3 = f_coupling(&u, t3)?;
    let f1mu = f_coupling(t1, &(-u.clone()))?;
    let fum3 = f_coupling(&u, &(-t3.clone()))?;
    let f1m3 = f_coupling(t1, &(-t3.clone()))?;
    let f1u = f_coupling(t1, &u)?;

    let mut body = Matrix::zeros(8, 8);
    for idx in [pack(0, 0, 0), pack(0, 1, 1), pack(1, 0, 1), pack(1, 1, 0)] {
        body.set(idx, idx, T::one());
    }
    let mut put = |row: usize, col: usize, v: T| body.set(row, col, v);
    put(pack(0, 0, 1), pack(0, 1, 0), f13.clone() * fu3.clone());
    put(pack(0, 0, 1), pack(1, 0, 0), f1mu.clone() * fu3.clone());
    put(pack(0, 0, 1), pack(1, 1, 1), f1mu.clone() * f13.clone());
    put(pack(0, 1, 0), pack(0, 0, 1), fum3.clone() * f1m3.clone());
    put(pack(0, 1, 0), pack(1, 0, 0), f1mu.clone() * f1m3.clone());
    put(pack(0, 1, 0), pack(1, 1, 1), f1mu * fum3.clone());
    put(pack(1, 0, 0), pack(0, 0, 1), -(fum3.clone() * f1u.clone()));
    put(pack(1, 0, 0), pack(0, 1, 0), f13.clone() * f1u.clone());
    put(pack(1, 0, 0), pack(1, 1, 1), -(f13 * fum3));
    put(pack(1, 1, 1), pack(0, 0, 1), f1u.clone() * f1m3.clone());
    put(pack(1, 1, 1), pack(0, 1, 0), -(f1u * fu3.clone()));
    put(pack(1, 1, 1), pack(1, 0, 0), -(f1m3 * fu3));

    Ok(SMatrix { lines, body })
}

// ---------------------------------------------------------------------------
// triple operator products
// ---------------------------------------------------------------------------

/// The six embedded two-line operators of one triple, on sites 1..3.
#[derive(Clone, Debug)]
pub struct TripleR<T> {
    pub lines: (usize, usize, usize),
    rij: [Matrix<T>; 2],
    rik: [Matrix<T>; 2],
    rjk: [Matrix<T>; 2],
}

fn check_triple(lines: (usize, usize, usize), available: usize) -> Result<(), CoreError> {
    let (i, j, k) = lines;
    if !(i < j && j < k) {
        return Err(CoreError::BadLinePair(i, j.max(k)));
    }
    if i < 1 || k > available {
        return Err(CoreError::LineOutOfRange {
            index: k,
            lines: available,
        });
    }
    Ok(())
}

impl TripleR<Rational> {
    pub fn exact(config: &ExactConfig, lines: (usize, usize, usize)) -> Result<Self, CoreError> {
        check_triple(lines, config.lines())?;
        let (i, j, k) = lines;
        let build = |p: usize, q: usize, sp: usize, sq: usize| -> Result<[Matrix<Rational>; 2], CoreError> {
            Ok([
                r_matrix_exact(p, q, RSign::Zero, config)?.embed_at([sp, sq], 3),
                r_matrix_exact(p, q, RSign::One, config)?.embed_at([sp, sq], 3),
            ])
        };
        Ok(TripleR {
            lines,
            rij: build(i, j, 1, 2)?,
            rik: build(i, k, 1, 3)?,
            rjk: build(j, k, 2, 3)?,
        })
    }
}

impl TripleR<f64> {
    pub fn approx(config: &EllipticConfig, lines: (usize, usize, usize)) -> Result<Self, CoreError> {
        check_triple(lines, config.lines())?;
        let (i, j, k) = lines;
        let build = |p: usize, q: usize, sp: usize, sq: usize| -> Result<[Matrix<f64>; 2], CoreError> {
            Ok([
                r_matrix(p, q, RSign::Zero, config)?.embed_at([sp, sq], 3),
                r_matrix(p, q, RSign::One, config)?.embed_at([sp, sq], 3),
            ])
        };
        Ok(TripleR {
            lines,
            rij: build(i, j, 1, 2)?,
            rik: build(i, k, 1, 3)?,
            rjk: build(j, k, 2, 3)?,
        })
    }
}

impl<T: Scalar> TripleR<T> {
    /// `R_ij^a R_ik^b R_jk^c` as an 8x8 matrix; `abc` packed as `4a+2b+c`.
    pub fn product_written(&self, abc: usize) -> Matrix<T> {
        let (a, b, c) = ((abc >> 2) & 1, (abc >> 1) & 1, abc & 1);
        self.rij[a].mat_mul(&self.rik[b]).mat_mul(&self.rjk[c])
    }

    /// `R_jk^f R_ik^e R_ij^d` as an 8x8 matrix; `def` packed as `4d+2e+f`.
    pub fn product_reversed(&self, def: usize) -> Matrix<T> {
        let (d, e, f) = ((def >> 2) & 1, (def >> 1) & 1, def & 1);
        self.rjk[f].mat_mul(&self.rik[e]).mat_mul(&self.rij[d])
    }
}

// ---------------------------------------------------------------------------
// solver route
// ---------------------------------------------------------------------------

/// Diagnostics of one 64x8 solve.
#[derive(Clone, Debug)]
pub struct SolveDiagnostics {
    /// Rank of the matrix whose columns are the vectorized reversed products.
    pub column_rank: usize,
    /// How many of the 8 rows came back with a unique solution.
    pub unique_rows: usize,
    /// Max-abs residual of `columns * row - written`, one entry per row.
    pub row_residuals: [f64; 8],
    /// Largest absolute entry over all written and reversed products.
    pub scale: f64,
}

impl SolveDiagnostics {
    pub fn max_row_residual(&self) -> f64 {
        self.row_residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Max row residual relative to the product scale.
    pub fn relative_residual(&self) -> f64 {
        self.max_row_residual() / self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn all_unique(&self) -> bool {
        self.unique_rows == 8
    }
}

/// Derives the triple's coefficient matrix by solving the vectorized
/// relation, one superscript row at a time.
///
/// The 64x8 system matrix stacks the vectorized reversed products as
/// columns. At a generic nonzero modulus every row solves uniquely; at
/// modulus zero the column matrix is rank-deficient and rows come back
/// `Underdetermined` (recorded in the diagnostics, with a particular
/// solution in the body). An `Inconsistent` row is escalated to an error:
/// the defining relation guarantees solvability.
///
/// In the `f64` backend, entries of the solved body below
/// `rel_tol * max_abs` are zeroed afterwards so the parity pattern is
/// directly testable.
pub fn solve_s<T: Scalar>(
    triple_r: &TripleR<T>,
    rel_tol: f64,
) -> Result<(SMatrix<T>, SolveDiagnostics), CoreError> {
    let reversed: Vec<Matrix<T>> = (0..8).map(|def| triple_r.product_reversed(def)).collect();
    let columns = Matrix::from_fn(64, 8, |r, c| reversed[c].vectorize()[r].clone());
    let column_rank = columns.rank_with_tol(rel_tol);

    let mut scale: f64 = reversed.iter().map(Matrix::max_abs_f64).fold(0.0, f64::max);
    let mut body = Matrix::zeros(8, 8);
    let mut unique_rows = 0usize;
    let mut row_residuals = [0.0f64; 8];

    for abc in 0..8 {
        let written = triple_r.product_written(abc);
        scale = scale.max(written.max_abs_f64());
        let rhs = written.vectorize();
        let outcome = columns.solve_with_tol(&rhs, rel_tol);
        let row = match &outcome {
            SolveOutcome::Unique(x) => {
                unique_rows += 1;
                x.clone()
            }
            SolveOutcome::Underdetermined { particular, .. } => particular.clone(),
            SolveOutcome::Inconsistent { residual } => {
                return Err(CoreError::AlgebraInconsistent { residual: *residual })
            }
        };
        let reproduced = columns.mul_vec(&row);
        row_residuals[abc] = reproduced
            .iter()
            .zip(&rhs)
            .map(|(p, q)| (p.clone() - q.clone()).abs().to_f64_lossy())
            .fold(0.0, f64::max);
        for (def, v) in row.into_iter().enumerate() {
            body.set(abc, def, v);
        }
    }

    if !T::EXACT {
        let cutoff = rel_tol * body.max_abs_f64();
        body = Matrix::from_fn(8, 8, |r, c| {
            let v = body[(r, c)].clone();
            if v.abs().to_f64_lossy() < cutoff {
                T::zero()
            } else {
                v
            }
        });
    }

    Ok((
        SMatrix {
            lines: triple_r.lines,
            body,
        },
        SolveDiagnostics {
            column_rank,
            unique_rows,
            row_residuals,
            scale,
        },
    ))
}

// ---------------------------------------------------------------------------
// residual check
// ---------------------------------------------------------------------------

/// Residual of substituting a coefficient matrix into the relation.
#[derive(Clone, Copy, Debug)]
pub struct AlgebraCheck {
    /// Largest absolute entry of `written - sum coeff * reversed`, over all
    /// 8 superscript rows (lossy for the exact backend; see `exact_zero`).
    pub max_abs_residual: f64,
    /// Largest absolute entry over all written and reversed products.
    pub scale: f64,
    /// True when every residual entry is exactly zero (always false only in
    /// the sense of floating point; exact-backend checks set it precisely).
    pub exact_zero: bool,
}

impl AlgebraCheck {
    pub fn relative(&self) -> f64 {
        self.max_abs_residual / self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Substitutes `s` into the relation for `triple_r` and reports the
/// residual over all 8 superscript rows.
pub fn verify_algebra<T: Scalar>(triple_r: &TripleR<T>, s: &SMatrix<T>) -> AlgebraCheck {
    let reversed: Vec<Matrix<T>> = (0..8).map(|def| triple_r.product_reversed(def)).collect();
    let mut scale: f64 = reversed.iter().map(Matrix::max_abs_f64).fold(0.0, f64::max);
    let mut max_abs = 0.0f64;
    let mut exact_zero = true;
    for abc in 0..8 {
        let written = triple_r.product_written(abc);
        scale = scale.max(written.max_abs_f64());
        let mut combo = Matrix::zeros(8, 8);
        for (def, rev) in reversed.iter().enumerate() {
            combo.add_scaled(&s.body[(abc, def)], rev);
        }
        let diff = written.sub(&combo);
        exact_zero &= diff.is_zero();
        max_abs = max_abs.max(diff.max_abs_f64());
    }
    AlgebraCheck {
        max_abs_residual: max_abs,
        scale,
        exact_zero,
    }
}

// ---------------------------------------------------------------------------
// per-triple dispatch
// ---------------------------------------------------------------------------

/// Tangents of the triple's lines from an exact config, in triple order.
pub fn triple_taus_exact(
    config: &ExactConfig,
    lines: (usize, usize, usize),
) -> Result<[Rational; 3], CoreError> {
    check_triple(lines, config.lines())?;
    let (i, j, k) = lines;
    Ok([
        config.angles[i - 1].tan()?,
        config.angles[j - 1].tan()?,
        config.angles[k - 1].tan()?,
    ])
}

/// Closed-form coefficient matrix for a triple of an exact config.
pub fn s_for_triple_exact(
    config: &ExactConfig,
    lines: (usize, usize, usize),
) -> Result<SMatrix<Rational>, CoreError> {
    let taus = triple_taus_exact(config, lines)?;
    s_closed_form(lines, &taus)
}

/// Closed-form coefficient matrix at modulus zero for a triple of real
/// line parameters (tangents taken in floating point).
pub fn s_for_triple_closed_f64(
    lambdas: &[f64],
    lines: (usize, usize, usize),
) -> Result<SMatrix<f64>, CoreError> {
    check_triple(lines, lambdas.len())?;
    let (i, j, k) = lines;
    let taus = [
        lambdas[i - 1].tan(),
        lambdas[j - 1].tan(),
        lambdas[k - 1].tan(),
    ];
    s_closed_form(lines, &taus)
}

/// Solver-derived coefficient matrix for a triple of an exact config.
pub fn solve_s_exact(
    config: &ExactConfig,
    lines: (usize, usize, usize),
) -> Result<(SMatrix<Rational>, SolveDiagnostics), CoreError> {
    let triple_r = TripleR::exact(config, lines)?;
    solve_s(&triple_r, 0.0)
}

/// Solver-derived coefficient matrix for a triple of an elliptic config.
pub fn solve_s_approx(
    config: &EllipticConfig,
    lines: (usize, usize, usize),
    rel_tol: f64,
) -> Result<(SMatrix<f64>, SolveDiagnostics), CoreError> {
    let triple_r = TripleR::approx(config, lines)?;
    solve_s(&triple_r, rel_tol)
}
