//! Fixed-frequency realization of the WR iteration.
//!
//! At a Laplace point `s` the time-domain iteration becomes a pair of complex
//! tridiagonal solves per sweep. Each side is truncated to `half_length` nodes
//! with a zero far boundary, and the error contraction is read off from the
//! iterates directly, without any closed-form root.

use num_complex::Complex64;
use crate::spectral::LaplacePoint;
use crate::tridiag::TridiagonalLu;

use super::SolverError;

pub const DEFAULT_HALF_LENGTH: usize = 400;
pub const MAX_HALF_LENGTH: usize = 3200;
pub const ECHO_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleTc {
    Classical,
    /// Possibly frequency-dependent (complex) parameters.
    Optimized { alpha: Complex64, beta: Complex64 },
}

impl OracleTc {
    pub fn real(alpha: f64, beta: f64) -> Self {
        OracleTc::Optimized {
            alpha: Complex64::from(alpha),
            beta: Complex64::from(beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMeasurement {
    /// `u₀` after three sweeps over `u₀` after one sweep.
    pub factor: Complex64,
    /// Same ratio taken at the first node of the right piece.
    pub factor_right: Complex64,
    /// `|factor|²`.
    pub contraction: f64,
    /// Squared far-end to interface amplitude ratio of the first sweep.
    pub echo: f64,
    pub half_length: usize,
}

struct Side {
    lu: TridiagonalLu<Complex64>,
    len: usize,
}

impl Side {
    fn new(len: usize, a: f64, diag: Complex64, edge: usize, edge_shift: Complex64) -> Option<Self> {
        let off = vec![Complex64::from(a); len - 1];
        let mut d = vec![diag; len];
        d[edge] += edge_shift;
        Some(Self {
            lu: TridiagonalLu::factor(&off, &d, &off)?,
            len,
        })
    }

    fn solve(&self, edge: usize, value: Complex64) -> Vec<Complex64> {
        let mut x = vec![Complex64::from(0.0); self.len];
        x[edge] = value;
        self.lu.solve_in_place(&mut x);
        x
    }
}

/// Runs the iteration at one truncation length; fails if the far boundary
/// echo exceeds [`ECHO_LIMIT`].
pub fn fixed_frequency_oracle(
    a: f64,
    b: f64,
    tc: OracleTc,
    overlap: usize,
    s: LaplacePoint,
    half_length: usize,
) -> Result<OracleMeasurement, SolverError> {
    if half_length < 50.max(overlap + 2) {
        return Err(SolverError::InvalidSetting(format!(
            "half_length must be at least max(50, n+2), got {half_length}"
        )));
    }
    if !(a > 0.0 && a.is_finite() && b.is_finite() && -b >= 2.0 * a) {
        return Err(SolverError::InvalidSetting(format!(
            "need a > 0 and -b >= 2a, got a={a}, b={b}"
        )));
    }
    if -b == 2.0 * a && s.omega() == 0.0 && s.sigma() == 0.0 {
        return Err(SolverError::InvalidSetting(
            "the iteration does not contract at s = 0 without leakage".into(),
        ));
    }
    let one = Complex64::from(1.0);
    let ac = Complex64::from(a);
    let (ka, kb) = match tc {
        OracleTc::Classical => (None, None),
        OracleTc::Optimized { alpha, beta } => {
            if (one + alpha).norm() == 0.0 || (beta - one).norm() == 0.0 {
                return Err(SolverError::SingularTransmission {
                    alpha: alpha.re,
                    beta: beta.re,
                });
            }
            (Some((one + alpha).inv()), Some((beta - one).inv()))
        }
    };
    let n = overlap;
    let l = half_length;
    let diag = Complex64::from(b) - s.s();
    // left piece: nodes j = 1−L ..= n, index j + L − 1; right piece: j = 1 ..= L
    let left_len = l + n;
    let last = left_len - 1;
    let left = Side::new(left_len, a, diag, last, ka.map_or(Complex64::from(0.0), |k| ac * k))
        .ok_or(SolverError::SingularShiftedMatrix)?;
    let right = Side::new(l, a, diag, 0, kb.map_or(Complex64::from(0.0), |k| -ac * k))
        .ok_or(SolverError::SingularShiftedMatrix)?;

    // unit perturbation of the data seen by both pieces
    let (mut u0, mut u1, mut wn, mut wn1) = (one, Complex64::from(0.0), Complex64::from(0.0), one);
    let mut first_left = Vec::new();
    let mut first_right = Vec::new();
    let mut u0_hist = Vec::new();
    let mut w1_hist = Vec::new();
    for sweep in 0..3 {
        let left_data = match ka {
            None => wn1,
            Some(k) => wn1 - k * wn,
        };
        let right_data = match kb {
            None => u0,
            Some(k) => u0 + k * u1,
        };
        let u = left.solve(last, -ac * left_data);
        let w = right.solve(0, -ac * right_data);
        let u_phantom = match ka {
            None => wn1,
            Some(k) => k * u[last] + wn1 - k * wn,
        };
        let w_phantom = match kb {
            None => u0,
            Some(k) => -k * w[0] + u0 + k * u1,
        };
        let (nu0, nu1) = (u[l - 1], if n >= 1 { u[l] } else { u_phantom });
        let (nwn, nwn1) = (if n >= 1 { w[n - 1] } else { w_phantom }, w[n]);
        u0_hist.push(nu0);
        w1_hist.push(w[0]);
        if sweep == 0 {
            first_left = u;
            first_right = w;
        }
        (u0, u1, wn, wn1) = (nu0, nu1, nwn, nwn1);
    }
    let ratio = |far: Complex64, near: Complex64| -> f64 {
        if near.norm() == 0.0 {
            0.0
        } else {
            (far.norm() / near.norm()).powi(2)
        }
    };
    let echo = ratio(first_left[0], first_left[last]).max(ratio(first_right[l - 1], first_right[0]));
    if echo > ECHO_LIMIT || !echo.is_finite() {
        return Err(SolverError::TruncationTooShort { half_length, echo });
    }
    if u0_hist[0].norm() == 0.0 || w1_hist[0].norm() == 0.0 {
        return Err(SolverError::InvalidSetting(
            "the unit perturbation produced no first iterate".into(),
        ));
    }
    let factor = u0_hist[2] / u0_hist[0];
    Ok(OracleMeasurement {
        factor,
        factor_right: w1_hist[2] / w1_hist[0],
        contraction: factor.norm_sqr(),
        echo,
        half_length,
    })
}

/// Starts at [`DEFAULT_HALF_LENGTH`] and doubles up to [`MAX_HALF_LENGTH`]
/// while the echo check fails.
pub fn fixed_frequency_oracle_auto(
    a: f64,
    b: f64,
    tc: OracleTc,
    overlap: usize,
    s: LaplacePoint,
) -> Result<OracleMeasurement, SolverError> {
    let mut half = DEFAULT_HALF_LENGTH.max(overlap + 2);
    loop {
        match fixed_frequency_oracle(a, b, tc, overlap, s, half) {
            Err(SolverError::TruncationTooShort { .. }) if half * 2 <= MAX_HALF_LENGTH => half *= 2,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decaying_frequency_passes_echo_check() {
        let s = LaplacePoint::new(1.0, 2.0).unwrap();
        let m = fixed_frequency_oracle(1.0, -2.01, OracleTc::Classical, 0, s, 400).unwrap();
        assert!(m.echo < 1e-100);
        assert!((m.factor - m.factor_right).norm() < 1e-12);
    }

    #[test]
    fn slow_decay_needs_longer_truncation() {
        let s = LaplacePoint::new(0.0, 0.0).unwrap();
        let err = fixed_frequency_oracle(1.0, -2.0 - 1e-6, OracleTc::Classical, 0, s, 400);
        assert!(matches!(err, Err(SolverError::TruncationTooShort { .. })));
    }

    #[test]
    fn doubling_retry() {
        // |λ₁| ≈ 1.01 needs more than 400 nodes
        let s = LaplacePoint::new(0.0, 0.0).unwrap();
        let m = fixed_frequency_oracle_auto(1.0, -2.0 - 1e-4, OracleTc::Classical, 1, s).unwrap();
        assert!(m.half_length > 400);
        assert!(m.echo <= ECHO_LIMIT);
    }

    #[test]
    fn input_checks() {
        let s = LaplacePoint::on_axis(1.0);
        assert!(fixed_frequency_oracle(1.0, -2.1, OracleTc::Classical, 0, s, 10).is_err());
        assert!(fixed_frequency_oracle(1.0, -1.0, OracleTc::Classical, 0, s, 100).is_err());
        let zero = LaplacePoint::on_axis(0.0);
        assert!(fixed_frequency_oracle(1.0, -2.0, OracleTc::Classical, 0, zero, 100).is_err());
        assert!(matches!(
            fixed_frequency_oracle(1.0, -2.1, OracleTc::real(-1.0, 0.0), 0, s, 100),
            Err(SolverError::SingularTransmission { .. })
        ));
    }
}
