//! Laplace-domain convergence analysis for two overlapping sub-circuits.
//!
//! For the uniform ladder `a·y[j-1] + (b−s)·y[j] + a·y[j+1] = 0` every error
//! mode is a power of the characteristic root `λ₁` (growing to the right) or
//! `λ₂ = 1/λ₁`. The convergence factors below are per double iteration:
//! `e^{k+1} = ρ(s)·e^{k-1}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::golden_section_max;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("Laplace point must satisfy sigma >= 0 and be finite (sigma={sigma}, omega={omega})")]
    InvalidPoint { sigma: f64, omega: f64 },
    #[error("coefficients must satisfy a > 0 and -b >= 2a (a={a}, b={b})")]
    Coefficients { a: f64, b: f64 },
    #[error("transmission parameters make the convergence factor singular")]
    SingularParameter,
    #[error("frequency grid of {grid} points is too coarse (minimum 16)")]
    TooCoarse { grid: usize },
    #[error("omega_max must be positive and finite, got {0}")]
    OmegaMax(f64),
}

/// A point `s = σ + iω` of the closed right half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacePoint {
    sigma: f64,
    omega: f64,
}

impl LaplacePoint {
    pub fn new(sigma: f64, omega: f64) -> Result<Self, SpectralError> {
        if !(sigma.is_finite() && omega.is_finite() && sigma >= 0.0) {
            return Err(SpectralError::InvalidPoint { sigma, omega });
        }
        Ok(Self { sigma, omega })
    }

    /// `s = iω`.
    pub fn on_axis(omega: f64) -> Self {
        Self { sigma: 0.0, omega }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.sigma, self.omega)
    }

    pub fn conj(&self) -> Self {
        Self {
            sigma: self.sigma,
            omega: -self.omega,
        }
    }
}

/// Roots of `a·λ² + (b−s)·λ + a = 0`, ordered so that `|λ₂| ≤ 1 ≤ |λ₁|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

/// Parameters of the optimized transmission conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OwrParams {
    pub alpha: f64,
    pub beta: f64,
    pub overlap: usize,
}

impl OwrParams {
    pub fn new(alpha: f64, beta: f64, overlap: usize) -> Self {
        Self {
            alpha,
            beta,
            overlap,
        }
    }

    /// The one-parameter family `β = −α`.
    pub fn symmetric(alpha: f64, overlap: usize) -> Self {
        Self::new(alpha, -alpha, overlap)
    }

    /// True when the contraction guarantee `α > 0, β < 0` applies.
    pub fn is_contractive(&self) -> bool {
        self.alpha > 0.0 && self.beta < 0.0
    }
}

fn check_coefficients(a: f64, b: f64) -> Result<(), SpectralError> {
    // a few ulps of slack so that b = -(2+0)·a computed in floating point passes
    if !(a.is_finite() && b.is_finite() && a > 0.0 && -b >= 2.0 * a * (1.0 - 4.0 * f64::EPSILON)) {
        return Err(SpectralError::Coefficients { a, b });
    }
    Ok(())
}

pub fn lambda_roots(s: LaplacePoint, a: f64, b: f64) -> Result<RootPair, SpectralError> {
    check_coefficients(a, b)?;
    let q = s.s() - b;
    let disc = q * q - 4.0 * a * a;
    let root = disc.sqrt();
    let plus = (q + root) / (2.0 * a);
    let minus = (q - root) / (2.0 * a);
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    // the smaller root loses digits to cancellation; λ₁λ₂ = 1 recovers them
    Ok(RootPair {
        lambda1: big,
        lambda2: big.inv(),
    })
}

/// Classical (Dirichlet) WR factor `(1/λ₁²)^{n+1}`.
pub fn rho_classical(s: LaplacePoint, a: f64, b: f64, overlap: usize) -> Result<Complex64, SpectralError> {
    let l1 = lambda_roots(s, a, b)?.lambda1;
    Ok(l1.inv().powi(2 * (overlap as i32 + 1)))
}

/// Optimized WR factor for real parameters.
pub fn rho_owr(s: LaplacePoint, a: f64, b: f64, p: &OwrParams) -> Result<Complex64, SpectralError> {
    rho_owr_symbol(
        s,
        a,
        b,
        Complex64::from(p.alpha),
        Complex64::from(p.beta),
        p.overlap,
    )
}

/// Optimized WR factor for frequency-dependent (complex) parameters.
pub fn rho_owr_symbol(
    s: LaplacePoint,
    a: f64,
    b: f64,
    alpha: Complex64,
    beta: Complex64,
    overlap: usize,
) -> Result<Complex64, SpectralError> {
    let l1 = lambda_roots(s, a, b)?.lambda1;
    owr_factor(l1, alpha, beta, overlap)
}

pub(crate) fn owr_factor(
    l1: Complex64,
    alpha: Complex64,
    beta: Complex64,
    overlap: usize,
) -> Result<Complex64, SpectralError> {
    let one = Complex64::from(1.0);
    let den_left = l1 * (one + alpha) - one;
    let den_right = one + (beta - one) * l1;
    if den_left.norm() < 1e-300 || den_right.norm() < 1e-300 {
        return Err(SpectralError::SingularParameter);
    }
    let left = (alpha + one - l1) / den_left;
    let right = (l1 + beta - one) / den_right;
    Ok(left * right * l1.inv().powi(2 * overlap as i32))
}

/// Frequency-dependent parameters `(λ₁−1, 1−λ₁)` that make the factor vanish.
pub fn optimal_nonlocal_params(
    s: LaplacePoint,
    a: f64,
    b: f64,
) -> Result<(Complex64, Complex64), SpectralError> {
    let l1 = lambda_roots(s, a, b)?.lambda1;
    Ok((l1 - 1.0, 1.0 - l1))
}

/// Result of a maximum search along the imaginary axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSup {
    pub sup_value: f64,
    pub argmax_omega: f64,
    pub omega_max: f64,
    /// Refined local maxima `(ω, |ρ|)` in increasing `ω`.
    pub local_maxima: Vec<(f64, f64)>,
}

/// Grid used by the axis search: `ω = 0` followed by `grid` log-spaced points
/// from `ω_max·1e-12` to `ω_max`.
pub fn axis_grid(omega_max: f64, grid: usize) -> Vec<f64> {
    let lo = (omega_max * 1e-12).ln();
    let hi = omega_max.ln();
    std::iter::once(0.0)
        .chain((0..grid).map(|i| {
            if i + 1 == grid {
                omega_max
            } else {
                (lo + (hi - lo) * i as f64 / (grid - 1) as f64).exp()
            }
        }))
        .collect()
}

/// Maximise `f(ω) ≥ 0` over `[0, ω_max]`.
///
/// Every discrete local maximum of the grid is refined by golden section on its
/// two neighbouring cells; ties resolve toward smaller `ω`.
pub fn sup_on_axis<F>(f: F, omega_max: f64, grid: usize) -> Result<AxisSup, SpectralError>
where
    F: Fn(f64) -> f64,
{
    if grid < 16 {
        return Err(SpectralError::TooCoarse { grid });
    }
    if !(omega_max.is_finite() && omega_max > 0.0) {
        return Err(SpectralError::OmegaMax(omega_max));
    }
    let omegas = axis_grid(omega_max, grid);
    let values: Vec<f64> = omegas.iter().map(|&w| f(w)).collect();
    let last = values.len() - 1;
    let mut maxima = Vec::new();
    for i in 0..=last {
        let rises = i == 0 || values[i] > values[i - 1];
        let falls = i == last || values[i] >= values[i + 1];
        if !(rises && falls) {
            continue;
        }
        let lo = omegas[i.saturating_sub(1)];
        let hi = omegas[(i + 1).min(last)];
        let (w, v) = golden_section_max(&f, lo, hi, 1e-10, 200);
        let best = if v > values[i] { (w, v) } else { (omegas[i], values[i]) };
        maxima.push(best);
    }
    let (argmax_omega, sup_value) = maxima
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, m| if m.1 > acc.1 { m } else { acc });
    Ok(AxisSup {
        sup_value,
        argmax_omega,
        omega_max,
        local_maxima: maxima,
    })
}

/// `sup |ρ_owr(iω)|` over `0 ≤ ω ≤ ω_max`; symmetry in `ω` makes `ω < 0` redundant.
pub fn sup_rho_on_axis(
    a: f64,
    b: f64,
    p: &OwrParams,
    omega_max: f64,
    grid: usize,
) -> Result<AxisSup, SpectralError> {
    check_coefficients(a, b)?;
    // surface singular parameters up front instead of inside the search
    rho_owr(LaplacePoint::on_axis(0.0), a, b, p)?;
    sup_on_axis(
        |w| {
            rho_owr(LaplacePoint::on_axis(w), a, b, p)
                .map(|r| r.norm())
                .unwrap_or(f64::INFINITY)
        },
        omega_max,
        grid,
    )
}

/// `sup |ρ_cla(iω)|` over `0 ≤ ω ≤ ω_max`.
pub fn sup_rho_classical_on_axis(
    a: f64,
    b: f64,
    overlap: usize,
    omega_max: f64,
    grid: usize,
) -> Result<AxisSup, SpectralError> {
    check_coefficients(a, b)?;
    sup_on_axis(
        |w| {
            rho_classical(LaplacePoint::on_axis(w), a, b, overlap)
                .map(|r| r.norm())
                .unwrap_or(f64::INFINITY)
        },
        omega_max,
        grid,
    )
}
