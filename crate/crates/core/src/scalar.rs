//! Scalar backends: exact arbitrary-precision rationals and tolerance-aware
//! doubles.
//!
//! Every matrix in this crate is generic over [`Scalar`]. The exact backend
//! ([`Rational`]) never rounds; the approximate backend (`f64`) carries its
//! comparison tolerance through the solver entry points (relative, default
//! [`DEFAULT_REL_TOL`]). Mixing backends in one expression is a type error,
//! which is the strongest available form of mode-mismatch rejection.

use std::fmt::{Debug, Display};

use num_traits::{Num, Signed, ToPrimitive};

use crate::linalg::{Matrix, SolveOutcome};

/// Exact scalar: arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Relative tolerance used by the `f64` backend when none is supplied.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Field scalar usable as a matrix entry.
///
/// `solve_system` and `rank_of` are the two backend-specific operations:
/// exact fraction-reduced Gaussian elimination for [`Rational`], singular
/// value decomposition with a relative cutoff for `f64`. `rel_tol` is
/// ignored by the exact backend.
pub trait Scalar:
    Num + Signed + Clone + PartialEq + Debug + Display + Send + Sync + 'static
{
    /// True when arithmetic in this backend is exact (no rounding, ever).
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    /// Lossy conversion for reporting; exact values may round.
    fn to_f64_lossy(&self) -> f64;

    fn solve_system(a: &Matrix<Self>, b: &[Self], rel_tol: f64) -> SolveOutcome<Self>;

    fn rank_of(a: &Matrix<Self>, rel_tol: f64) -> usize;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn solve_system(a: &Matrix<Self>, b: &[Self], rel_tol: f64) -> SolveOutcome<Self> {
        crate::linalg::svd_solve(a, b, rel_tol)
    }

    fn rank_of(a: &Matrix<Self>, rel_tol: f64) -> usize {
        crate::linalg::svd_rank(a, rel_tol)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(v.into())
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn solve_system(a: &Matrix<Self>, b: &[Self], _rel_tol: f64) -> SolveOutcome<Self> {
        crate::linalg::exact_solve(a, b)
    }

    fn rank_of(a: &Matrix<Self>, _rel_tol: f64) -> usize {
        crate::linalg::exact_rank(a)
    }
}

/// Rational from an integer pair; panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_closed() {
        let a = ratio(1, 3);
        let b = ratio(1, 6);
        assert_eq!(a.clone() + b.clone(), ratio(1, 2));
        assert_eq!(a * b, ratio(1, 18));
    }

    #[test]
    fn from_int_roundtrip() {
        assert_eq!(Rational::from_int(-7), ratio(-7, 1));
        assert_eq!(f64::from_int(-7), -7.0);
    }
}
