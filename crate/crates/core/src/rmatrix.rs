//! Two-line operators on a pair of spectral lines.
//!
//! For lines i < j with spectral parameters `l_i`, `l_j` and modulus `k`,
//! the sign-0 operator is built from the argument `w = l_i - l_j` and the
//! sign-1 operator from `w = l_i + l_j`, with entries
//!
//! ```text
//! a = cn w,   b = sn w dn w,   c = dn w,   d = k sn w cn w
//! ```
//!
//! placed on the checkerboard
//!
//! ```text
//! sign 0: [ a . . d ]      sign 1: [ -a . .  d ]
//!         [ . b c . ]              [ . -b  c . ]
//!         [ . c b . ]              [ . -c  b . ]
//!         [ d . . a ]              [ -d . .  a ]
//! ```
//!
//! The sign-0 body is symmetric; both satisfy the free-fermion identity
//! `a^2 + b^2 = c^2 + d^2`. At k = 0 the entries degenerate to
//! `(cos w, sin w, 1, 0)`, which the exact backend evaluates as rationals
//! via tangent half-angle points on the unit circle.

use num_traits::{One, Zero};

use crate::elliptic::jacobi;
use crate::error::CoreError;
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

/// Which of the two operator families a body belongs to.
///
/// `Zero` uses the difference of the line parameters and a symmetric body;
/// `One` uses their sum and the sign-twisted body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RSign {
    Zero,
    One,
}

impl RSign {
    /// Maps a superscript bit (0 or 1) to the operator family.
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            RSign::Zero
        } else {
            RSign::One
        }
    }
}

/// Exact point on the unit circle, parametrized by the tangent half-angle.
///
/// `sin = 2t/(1+t^2)`, `cos = (1-t^2)/(1+t^2)`, so `sin^2 + cos^2 = 1`
/// identically in exact arithmetic. The full tangent `sin/cos` exists
/// unless `t = +-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalAngle {
    t: Rational,
    sin: Rational,
    cos: Rational,
}

impl RationalAngle {
    pub fn new(t: Rational) -> Self {
        let den = Rational::one() + t.clone() * t.clone();
        let sin = (Rational::from_int(2) * t.clone()) / den.clone();
        let cos = (Rational::one() - t.clone() * t.clone()) / den;
        RationalAngle { t, sin, cos }
    }

    pub fn half_angle_tangent(&self) -> &Rational {
        &self.t
    }

    pub fn sin(&self) -> &Rational {
        &self.sin
    }

    pub fn cos(&self) -> &Rational {
        &self.cos
    }

    /// The full-angle tangent `sin/cos`; errors at `t = +-1` where cos = 0.
    pub fn tan(&self) -> Result<Rational, CoreError> {
        if self.cos.is_zero() {
            return Err(CoreError::TangentUndefined(self.t.to_string()));
        }
        Ok(self.sin.clone() / self.cos.clone())
    }

    /// The angle as a double, for cross-backend comparisons.
    pub fn to_radians(&self) -> f64 {
        2.0 * self.t.to_f64_lossy().atan()
    }
}

/// Spectral data for the exact backend; the modulus is fixed at zero.
#[derive(Clone, Debug)]
pub struct ExactConfig {
    pub angles: Vec<RationalAngle>,
}

impl ExactConfig {
    pub fn from_half_angle_tangents(ts: impl IntoIterator<Item = Rational>) -> Self {
        ExactConfig {
            angles: ts.into_iter().map(RationalAngle::new).collect(),
        }
    }

    pub fn lines(&self) -> usize {
        self.angles.len()
    }
}

/// Spectral data for the floating-point backend.
#[derive(Clone, Debug)]
pub struct EllipticConfig {
    pub k: f64,
    pub lambdas: Vec<f64>,
}

impl EllipticConfig {
    pub fn lines(&self) -> usize {
        self.lambdas.len()
    }
}

/// Either backend's spectral data; exact mode forces modulus zero by
/// construction.
#[derive(Clone, Debug)]
pub enum SpectralConfig {
    Exact(ExactConfig),
    Approx(EllipticConfig),
}

impl SpectralConfig {
    pub fn lines(&self) -> usize {
        match self {
            SpectralConfig::Exact(c) => c.lines(),
            SpectralConfig::Approx(c) => c.lines(),
        }
    }
}

/// A two-line operator body together with its line pair and family.
#[derive(Clone, Debug)]
pub struct RMatrix<T> {
    pub i: usize,
    pub j: usize,
    pub sign: RSign,
    pub body: Matrix<T>,
}

impl<T: Scalar> RMatrix<T> {
    /// Embeds the body into `n_lines` sites at the positions of its pair.
    pub fn embed(&self, n_lines: usize) -> Matrix<T> {
        self.body.embed_sites(&[self.i, self.j], n_lines)
    }

    /// Embeds the body at explicit site positions (used when lines are
    /// relabeled to a dense 1..m site range).
    pub fn embed_at(&self, sites: [usize; 2], n_sites: usize) -> Matrix<T> {
        self.body.embed_sites(&sites, n_sites)
    }
}

fn check_pair(i: usize, j: usize, lines: usize) -> Result<(), CoreError> {
    if i >= j {
        return Err(CoreError::BadLinePair(i, j));
    }
    if i < 1 || j > lines {
        return Err(CoreError::LineOutOfRange {
            index: if i < 1 { i } else { j },
            lines,
        });
    }
    Ok(())
}

fn body_from_entries<T: Scalar>(a: T, b: T, c: T, d: T, sign: RSign) -> Matrix<T> {
    let z = T::zero;
    let rows = match sign {
        RSign::Zero => vec![
            vec![a.clone(), z(), z(), d.clone()],
            vec![z(), b.clone(), c.clone(), z()],
            vec![z(), c, b, z()],
            vec![d, z(), z(), a],
        ],
        RSign::One => vec![
            vec![-a.clone(), z(), z(), d.clone()],
            vec![z(), -b.clone(), c.clone(), z()],
            vec![z(), -c, b, z()],
            vec![-d, z(), z(), a],
        ],
    };
    Matrix::from_rows(rows)
}

/// Entry quadruple `(a, b, c, d)` of the elliptic operator for the given
/// line parameters, modulus and family.
pub fn r_entries(li: f64, lj: f64, k: f64, sign: RSign) -> Result<[f64; 4], CoreError> {
    let w = match sign {
        RSign::Zero => li - lj,
        RSign::One => li + lj,
    };
    let t = jacobi(w, k)?;
    Ok([t.cn, t.sn * t.dn, t.dn, k * t.sn * t.cn])
}

/// The elliptic operator for pair `(i, j)` (1-based, i < j) of `config`.
pub fn r_matrix(
    i: usize,
    j: usize,
    sign: RSign,
    config: &EllipticConfig,
) -> Result<RMatrix<f64>, CoreError> {
    check_pair(i, j, config.lines())?;
    let [a, b, c, d] = r_entries(config.lambdas[i - 1], config.lambdas[j - 1], config.k, sign)?;
    Ok(RMatrix {
        i,
        j,
        sign,
        body: body_from_entries(a, b, c, d, sign),
    })
}

/// Entry quadruple at modulus zero, exactly, from two unit-circle points.
///
/// Sign 0 takes the difference angle, sign 1 the sum angle:
/// `(cos w, sin w, 1, 0)` by the angle-addition laws on `(sin, cos)` pairs.
pub fn r_entries_exact(
    ai: &RationalAngle,
    aj: &RationalAngle,
    sign: RSign,
) -> [Rational; 4] {
    let (si, ci) = (ai.sin(), ai.cos());
    let (sj, cj) = (aj.sin(), aj.cos());
    let (a, b) = match sign {
        RSign::Zero => (
            ci.clone() * cj.clone() + si.clone() * sj.clone(),
            si.clone() * cj.clone() - ci.clone() * sj.clone(),
        ),
        RSign::One => (
            ci.clone() * cj.clone() - si.clone() * sj.clone(),
            si.clone() * cj.clone() + ci.clone() * sj.clone(),
        ),
    };
    [a, b, Rational::one(), Rational::zero()]
}

/// The exact modulus-zero operator for pair `(i, j)` of `config`.
pub fn r_matrix_exact(
    i: usize,
    j: usize,
    sign: RSign,
    config: &ExactConfig,
) -> Result<RMatrix<Rational>, CoreError> {
    check_pair(i, j, config.lines())?;
    let [a, b, c, d] = r_entries_exact(&config.angles[i - 1], &config.angles[j - 1], sign);
    Ok(RMatrix {
        i,
        j,
        sign,
        body: body_from_entries(a, b, c, d, sign),
    })
}

/// Positions allowed to be nonzero in any operator body (0-based).
pub const BODY_SUPPORT: [(usize, usize); 8] = [
    (0, 0),
    (0, 3),
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
    (3, 0),
    (3, 3),
];

/// True when every entry outside the checkerboard support is zero.
pub fn has_checkerboard_support<T: Scalar>(body: &Matrix<T>) -> bool {
    (0..4).all(|r| {
        (0..4).all(|c| BODY_SUPPORT.contains(&(r, c)) || body[(r, c)].is_zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn swap_pattern() -> Matrix<f64> {
        Matrix::from_rows(vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
    }

    #[test]
    fn equal_parameters_give_swap_pattern() {
        for k in [0.0, 0.3, 0.7] {
            let cfg = EllipticConfig {
                k,
                lambdas: vec![0.4, 0.4],
            };
            let r = r_matrix(1, 2, RSign::Zero, &cfg).unwrap();
            let diff = r.body.sub(&swap_pattern()).max_abs_f64();
            assert!(diff <= 1e-15, "k={k}: {diff}");
        }
    }

    #[test]
    fn sign_zero_body_is_symmetric() {
        let cfg = EllipticConfig {
            k: 0.45,
            lambdas: vec![0.9, -0.2],
        };
        let r = r_matrix(1, 2, RSign::Zero, &cfg).unwrap();
        assert_eq!(r.body, r.body.transpose());
        let r1 = r_matrix(1, 2, RSign::One, &cfg).unwrap();
        assert_ne!(r1.body, r1.body.transpose());
    }

    #[test]
    fn zero_modulus_entries_are_circular() {
        let [a, b, c, d] = r_entries(0.8, 0.3, 0.0, RSign::Zero).unwrap();
        assert!((a - 0.5f64.cos()).abs() < 1e-15);
        assert!((b - 0.5f64.sin()).abs() < 1e-15);
        assert_eq!(c, 1.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn free_fermion_identity() {
        for (li, lj, k) in [(0.3, 0.1, 0.5), (1.1, -0.4, 0.9), (0.0, 0.7, 0.2)] {
            for sign in [RSign::Zero, RSign::One] {
                let [a, b, c, d] = r_entries(li, lj, k, sign).unwrap();
                assert!(
                    (a * a + b * b - c * c - d * d).abs() <= 1e-14,
                    "at ({li},{lj},{k},{sign:?})"
                );
            }
        }
    }

    #[test]
    fn exact_pythagorean_point() {
        // t = 1/2 puts (sin, cos) at (4/5, 3/5).
        let cfg = ExactConfig::from_half_angle_tangents([ratio(1, 2), ratio(0, 1)]);
        let r = r_matrix_exact(1, 2, RSign::Zero, &cfg).unwrap();
        assert_eq!(r.body[(0, 0)], ratio(3, 5));
        assert_eq!(r.body[(1, 1)], ratio(4, 5));
        assert_eq!(r.body[(1, 2)], ratio(1, 1));
        assert_eq!(r.body[(0, 3)], ratio(0, 1));
    }

    #[test]
    fn exact_free_fermion_identity_holds_exactly() {
        let cfg = ExactConfig::from_half_angle_tangents([ratio(3, 7), ratio(-5, 4)]);
        for sign in [RSign::Zero, RSign::One] {
            let [a, b, c, d] = r_entries_exact(&cfg.angles[0], &cfg.angles[1], sign);
            assert_eq!(
                a.clone() * a + b.clone() * b,
                c.clone() * c + d.clone() * d
            );
        }
    }

    #[test]
    fn exact_matches_approx_at_zero_modulus() {
        let cfg = ExactConfig::from_half_angle_tangents([ratio(1, 2), ratio(1, 3)]);
        let lam: Vec<f64> = cfg.angles.iter().map(RationalAngle::to_radians).collect();
        let fcfg = EllipticConfig { k: 0.0, lambdas: lam };
        for sign in [RSign::Zero, RSign::One] {
            let re = r_matrix_exact(1, 2, sign, &cfg).unwrap();
            let rf = r_matrix(1, 2, sign, &fcfg).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    let e = re.body[(r, c)].to_f64_lossy();
                    assert!(
                        (e - rf.body[(r, c)]).abs() <= 1e-15,
                        "entry ({r},{c}) sign {sign:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn sum_angle_cancellation_gives_primed_swap() {
        // t and -t give l_i + l_j = 0, so a' = 1, b' = 0, c' = 1, d' = 0.
        let cfg = ExactConfig::from_half_angle_tangents([ratio(2, 5), ratio(-2, 5)]);
        let r = r_matrix_exact(1, 2, RSign::One, &cfg).unwrap();
        let one = ratio(1, 1);
        assert_eq!(r.body[(0, 0)], -one.clone());
        assert_eq!(r.body[(1, 2)], one.clone());
        assert_eq!(r.body[(2, 1)], -one.clone());
        assert_eq!(r.body[(3, 3)], one);
        assert_eq!(r.body[(1, 1)], ratio(0, 1));
    }

    #[test]
    fn pair_validation() {
        let cfg = EllipticConfig {
            k: 0.1,
            lambdas: vec![0.1, 0.2, 0.3],
        };
        assert!(matches!(
            r_matrix(2, 2, RSign::Zero, &cfg),
            Err(CoreError::BadLinePair(2, 2))
        ));
        assert!(matches!(
            r_matrix(1, 4, RSign::Zero, &cfg),
            Err(CoreError::LineOutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn tangent_undefined_at_unit_half_angle() {
        let angle = RationalAngle::new(ratio(1, 1));
        assert!(angle.cos().is_zero());
        assert!(matches!(angle.tan(), Err(CoreError::TangentUndefined(_))));
    }

    #[test]
    fn embed_uses_pair_positions() {
        let cfg = EllipticConfig {
            k: 0.2,
            lambdas: vec![0.5, -0.3, 0.8],
        };
        let r12 = r_matrix(1, 2, RSign::Zero, &cfg).unwrap();
        let r23 = r_matrix(2, 3, RSign::Zero, &cfg).unwrap();
        let i2 = Matrix::<f64>::identity(2);
        assert_eq!(r12.embed(3), r12.body.kron(&i2));
        assert_eq!(r23.embed(3), i2.kron(&r23.body));
    }
}
