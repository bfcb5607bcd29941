//! Verification engine for the tetrahedral Zamolodchikov algebra and the
//! Zamolodchikov tetrahedron equation over free-fermion two-line operators.
//!
//! Two scalar backends drive everything:
//!
//! * **exact** — arbitrary-precision rationals at modulus k = 0, where the
//!   spectral points live on the rational unit circle (tangent half-angle
//!   parametrization) and every identity is checked as literal equality of
//!   rational matrices;
//! * **approx** — doubles with Jacobi elliptic entries for any modulus
//!   k in [0, 1), where coefficient matrices are derived by rank-revealing
//!   least squares and identities are checked against explicit tolerances.
//!
//! The crate exposes the layers separately: generic dense linear algebra
//! ([`linalg`]), Jacobi elliptic functions ([`elliptic`]), the two-line
//! operators ([`rmatrix`]), the 8x8 coefficient matrices of the tetrahedral
//! algebra ([`smatrix`]), the six-edge tetrahedron assembly and randomized
//! testing ([`tetra`]), and run reporting ([`report`]).

pub mod elliptic;
pub mod error;
pub mod linalg;
pub mod report;
pub mod rmatrix;
pub mod sample;
pub mod scalar;
pub mod selftest;
pub mod smatrix;
pub mod tetra;

pub use error::CoreError;
pub use linalg::{Matrix, SolveOutcome};
pub use scalar::{ratio, Rational, Scalar, DEFAULT_REL_TOL};
