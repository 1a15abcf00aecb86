//! Constant transmission parameter `α` (with `β = −α`) for optimized WR.
//!
//! Two routes: the leading-order closed forms in the leakage parameter `ε`, and a
//! direct numerical solution of
//! `min_α max_{0 ≤ ω ≤ ω_max} |ρ_n(iω, α, −α)|`.
//! The numerical route does not assume the equi-oscillation structure; it
//! reports it afterwards as a certificate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::golden_section_min;
use crate::spectral::{
    rho_owr, sup_rho_on_axis, AxisSup, LaplacePoint, OwrParams, SpectralError,
};

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("epsilon must be positive and finite, got {0}")]
    Domain(f64),
    #[error("no interior equi-oscillation frequency exists without overlap")]
    NoInteriorFrequency,
    #[error("sup |rho| >= 1 for every alpha in [{lo}, {hi}]; no contraction")]
    NoContraction { lo: f64, hi: f64 },
    #[error("outer objective is not unimodal on [{lo}, {hi}] ({sign_changes} slope sign changes)")]
    Multimodal { lo: f64, hi: f64, sign_changes: usize },
    #[error("minimum lies on the bracket edge of [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Exponents and constants of `α = C_α ε^δ` and `ω̃ = C_ω ε^η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticAnsatz {
    pub c_alpha: f64,
    pub delta: f64,
    /// Only defined with overlap; without it the second extremum sits at `ω → ∞`.
    pub c_omega: Option<f64>,
    pub eta: Option<f64>,
}

impl AsymptoticAnsatz {
    pub fn for_overlap(overlap: usize, a: f64) -> Self {
        if overlap == 0 {
            Self {
                c_alpha: std::f64::consts::SQRT_2,
                delta: 0.25,
                c_omega: None,
                eta: None,
            }
        } else {
            let n = overlap as f64;
            let c_alpha = n.powf(-1.0 / 3.0);
            Self {
                c_alpha,
                delta: 1.0 / 3.0,
                c_omega: Some(2.0 * a / n * c_alpha),
                eta: Some(1.0 / 3.0),
            }
        }
    }

    pub fn alpha(&self, epsilon: f64) -> f64 {
        self.c_alpha * epsilon.powf(self.delta)
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), OptimizeError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(OptimizeError::Domain(epsilon));
    }
    Ok(())
}

/// `√2·ε^{1/4}` without overlap, `(ε/n)^{1/3}` with overlap `n ≥ 1`.
pub fn alpha_star_asymptotic(epsilon: f64, overlap: usize) -> Result<f64, OptimizeError> {
    check_epsilon(epsilon)?;
    Ok(if overlap == 0 {
        std::f64::consts::SQRT_2 * epsilon.powf(0.25)
    } else {
        (epsilon / overlap as f64).cbrt()
    })
}

/// Leading-order prediction of `sup |ρ|` at the asymptotic parameter.
pub fn rho_bound_asymptotic(epsilon: f64, overlap: usize) -> Result<f64, OptimizeError> {
    check_epsilon(epsilon)?;
    Ok(if overlap == 0 {
        1.0 - 2.0 * std::f64::consts::SQRT_2 * epsilon.powf(0.25)
    } else {
        1.0 - 4.0 * (overlap as f64).cbrt() * epsilon.powf(1.0 / 6.0)
    })
}

/// Predicted interior equi-oscillation frequency `(2a/n)·n^{−1/3}·ε^{1/3}`.
pub fn omega_tilde_asymptotic(epsilon: f64, overlap: usize, a: f64) -> Result<f64, OptimizeError> {
    check_epsilon(epsilon)?;
    if overlap == 0 {
        return Err(OptimizeError::NoInteriorFrequency);
    }
    let n = overlap as f64;
    Ok(2.0 * a / n * n.powf(-1.0 / 3.0) * epsilon.cbrt())
}

/// `ω_max = π/Δt` for a time grid, `10⁶·a` for pure analysis.
pub fn default_omega_max(a: f64, dt: Option<f64>) -> f64 {
    match dt {
        Some(dt) => std::f64::consts::PI / dt,
        None => 1e6 * a,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub alpha_star: f64,
    pub sup_rho: f64,
    /// `[0, ω₂]` where `ω₂` is the competing maximum (near `ω_max` without
    /// overlap, interior `ω̃` with overlap).
    pub equioscillation_points: Vec<f64>,
    /// `| |ρ(0)| − |ρ(ω₂)| |` at `alpha_star`.
    pub residual: f64,
}

/// Tuning knobs of [`optimize_alpha_numeric_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Log-spaced frequency points of the inner search.
    pub grid: usize,
    /// The bracket is `[α_asym/f, f·α_asym]`.
    pub bracket_factor: f64,
    /// Log-spaced α samples used to validate the bracket.
    pub samples: usize,
    /// Relative tolerance on `α`.
    pub alpha_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            grid: 1000,
            bracket_factor: 30.0,
            samples: 64,
            alpha_tol: 1e-8,
        }
    }
}

pub fn optimize_alpha_numeric(
    epsilon: f64,
    overlap: usize,
    a: f64,
    omega_max: f64,
) -> Result<OptimizationResult, OptimizeError> {
    optimize_alpha_numeric_with(epsilon, overlap, a, omega_max, &OptimizeOptions::default())
}

pub fn optimize_alpha_numeric_with(
    epsilon: f64,
    overlap: usize,
    a: f64,
    omega_max: f64,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult, OptimizeError> {
    check_epsilon(epsilon)?;
    let b = -(2.0 + epsilon) * a;
    let center = alpha_star_asymptotic(epsilon, overlap)?;
    let lo = center / opts.bracket_factor;
    let hi = center * opts.bracket_factor;
    let objective = |alpha: f64| -> Result<f64, OptimizeError> {
        Ok(sup_rho_on_axis(a, b, &OwrParams::symmetric(alpha, overlap), omega_max, opts.grid)?
            .sup_value)
    };

    let samples = opts.samples.max(3);
    let alphas: Vec<f64> = (0..samples)
        .map(|i| lo * (hi / lo).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let values = alphas
        .iter()
        .map(|&al| objective(al))
        .collect::<Result<Vec<_>, _>>()?;
    if values.iter().all(|&v| v >= 1.0) {
        return Err(OptimizeError::NoContraction { lo, hi });
    }
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| (w[1] - w[0]).signum())
        .filter(|s| *s != 0.0)
        .collect();
    let sign_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if sign_changes > 1 {
        return Err(OptimizeError::Multimodal {
            lo,
            hi,
            sign_changes,
        });
    }
    let best = values
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| if v < values[acc] { i } else { acc });
    if best == 0 || best == samples - 1 || sign_changes == 0 {
        return Err(OptimizeError::NotBracketed { lo, hi });
    }

    let (alpha_star, _) = golden_section_min(
        |al| objective(al).unwrap_or(f64::INFINITY),
        alphas[best - 1],
        alphas[best + 1],
        opts.alpha_tol / 2.0,
        400,
    );
    let p = OwrParams::symmetric(alpha_star, overlap);
    let sup = sup_rho_on_axis(a, b, &p, omega_max, opts.grid)?;
    let (points, residual) = equioscillation(&sup, a, b, &p)?;
    Ok(OptimizationResult {
        alpha_star,
        sup_rho: sup.sup_value,
        equioscillation_points: points,
        residual,
    })
}

fn equioscillation(
    sup: &AxisSup,
    a: f64,
    b: f64,
    p: &OwrParams,
) -> Result<(Vec<f64>, f64), OptimizeError> {
    let at_zero = rho_owr(LaplacePoint::on_axis(0.0), a, b, p)?.norm();
    // maxima inside the origin cell are the ω = 0 extremum itself
    let first_grid_point = sup.omega_max * 1e-12;
    let partner = sup
        .local_maxima
        .iter()
        .filter(|(w, _)| *w >= first_grid_point)
        .fold(None, |acc: Option<(f64, f64)>, &m| match acc {
            Some(best) if best.1 >= m.1 => Some(best),
            _ => Some(m),
        });
    Ok(match partner {
        Some((w, v)) => (vec![0.0, w], (at_zero - v).abs()),
        None => (vec![0.0], f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((alpha_star_asymptotic(1e-4, 0).unwrap() - 0.141_421_356_237_309_5).abs() < 1e-15);
        assert!((alpha_star_asymptotic(1e-3, 1).unwrap() - 0.1).abs() < 1e-15);
        assert!((rho_bound_asymptotic(1e-4, 0).unwrap() - (1.0 - 0.2 * 2f64.sqrt())).abs() < 1e-15);
        assert!((rho_bound_asymptotic(1e-6, 1).unwrap() - 0.6).abs() < 1e-14);
        for n in [0, 3] {
            let r = rho_bound_asymptotic(1e-300, n).unwrap();
            assert!(r <= 1.0 && r > 1.0 - 1e-15);
        }
    }

    #[test]
    fn omega_tilde_values() {
        assert!((omega_tilde_asymptotic(1e-3, 1, 1.0).unwrap() - 0.2).abs() < 1e-15);
        let w = omega_tilde_asymptotic(1e-3, 2, 1.0).unwrap();
        assert!((w - 0.1 * 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((w - 0.07937).abs() < 1e-5);
        let ratio = omega_tilde_asymptotic(8e-6, 3, 2.0).unwrap()
            / omega_tilde_asymptotic(1e-6, 3, 2.0).unwrap();
        assert!((ratio - 2.0).abs() < 1e-14);
        assert_eq!(
            omega_tilde_asymptotic(1e-3, 0, 1.0),
            Err(OptimizeError::NoInteriorFrequency)
        );
    }

    #[test]
    fn domain_errors() {
        assert_eq!(alpha_star_asymptotic(0.0, 1), Err(OptimizeError::Domain(0.0)));
        assert!(rho_bound_asymptotic(-1.0, 0).is_err());
        assert!(optimize_alpha_numeric(0.0, 0, 1.0, 1e6).is_err());
    }

    #[test]
    fn ansatz_constants() {
        let z = AsymptoticAnsatz::for_overlap(0, 1.0);
        assert_eq!(z.delta, 0.25);
        assert!((z.c_alpha - 2f64.sqrt()).abs() < 1e-15);
        assert!(z.c_omega.is_none());
        let two = AsymptoticAnsatz::for_overlap(2, 3.0);
        assert_eq!(two.delta, 1.0 / 3.0);
        assert_eq!(two.eta, Some(1.0 / 3.0));
        assert!((two.c_omega.unwrap() - 3.0 * two.c_alpha).abs() < 1e-15);
        assert!((two.alpha(1e-4) - alpha_star_asymptotic(1e-4, 2).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn default_frequency_ranges() {
        assert_eq!(default_omega_max(2.0, None), 2e6);
        assert!((default_omega_max(1.0, Some(0.1)) - 10.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
