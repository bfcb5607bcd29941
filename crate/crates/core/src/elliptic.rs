//! Jacobi elliptic functions sn, cn, dn of real argument and modulus
//! k in [0, 1).
//!
//! Computed by the descending Landen transformation: build the
//! arithmetic-geometric mean scale `a_n, b_n, c_n` from `(1, k', k)` until
//! the descending modulus `c_n / a_n` drops below machine epsilon, start the
//! amplitude at `phi_N = 2^N a_N u`, and walk it back down with
//! `phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n)) / 2`. Then
//! `sn = sin phi_0`, `cn = cos phi_0`, and `dn = sqrt(1 - k^2 sn^2)` (dn is
//! positive for every real argument when k < 1, so the square root loses no
//! information). Convergence is quadratic; the whole scale is at most a
//! dozen levels.
//!
//! At k = 0 the scale collapses immediately and the functions degenerate to
//! (sin u, cos u, 1) with no extra rounding.

use crate::error::CoreError;

/// Values of the three Jacobi elliptic functions at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    /// Argument the triple was evaluated at.
    pub u: f64,
    /// Modulus the triple was evaluated at.
    pub k: f64,
}

fn check_modulus(k: f64) -> Result<(), CoreError> {
    if !(0.0..1.0).contains(&k) || !k.is_finite() {
        return Err(CoreError::InvalidModulus(k));
    }
    Ok(())
}

/// Jacobi sn, cn, dn at real argument `u`, modulus `k` in [0, 1).
pub fn jacobi(u: f64, k: f64) -> Result<EllipticTriple, CoreError> {
    check_modulus(k)?;
    if !u.is_finite() {
        return Err(CoreError::NonFiniteArgument(u));
    }

    // AGM scale from (a, b, c) = (1, k', k).
    let mut a_seq = Vec::with_capacity(12);
    let mut c_seq = Vec::with_capacity(12);
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    a_seq.push(a);
    c_seq.push(c);
    while c > f64::EPSILON * a {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        a_seq.push(a);
        c_seq.push(c);
    }

    let levels = a_seq.len() - 1;
    let mut phi = (1u64 << levels) as f64 * a_seq[levels] * u;
    for n in (1..=levels).rev() {
        let s = (c_seq[n] / a_seq[n]) * phi.sin();
        phi = 0.5 * (phi + s.clamp(-1.0, 1.0).asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - (k * sn) * (k * sn)).sqrt();
    Ok(EllipticTriple { sn, cn, dn, u, k })
}

/// Complete elliptic integral of the first kind K(k), via the AGM.
pub fn quarter_period(k: f64) -> Result<f64, CoreError> {
    check_modulus(k)?;
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    while (a - b).abs() > f64::EPSILON * a {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::FRAC_PI_2 / a)
}
