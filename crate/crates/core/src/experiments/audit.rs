use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::mna::TridiagonalOde;
use crate::optimizer::{alpha_star_asymptotic, omega_tilde_asymptotic, optimize_alpha_numeric};
use crate::solver::{backward_euler_window, fixed_frequency_oracle_auto, OracleTc, RowForcing};
use crate::spectral::{
    lambda_roots, optimal_nonlocal_params, rho_classical, rho_owr, sup_rho_on_axis, LaplacePoint,
    OwrParams,
};

use super::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCheck {
    pub check: String,
    pub case: String,
    pub measured: f64,
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&AuditCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn max_deviation_by_check(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for c in &self.checks {
            let e = out.entry(c.check.clone()).or_insert(0.0_f64);
            *e = e.max(c.deviation);
        }
        out
    }

    fn push(&mut self, check: &str, case: String, measured: f64, reference: f64, deviation: f64, tolerance: f64) {
        self.checks.push(AuditCheck {
            check: check.to_string(),
            case,
            measured,
            reference,
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        });
    }
}

struct Sample {
    eps: f64,
    s: LaplacePoint,
}

fn draw(rng: &mut ChaCha8Rng) -> Sample {
    let eps = 10f64.powf(rng.gen_range(-6.0..=-1.0));
    let sigma = rng.gen_range(0.0..=1.0);
    let omega = rng.gen_range(-10.0..=10.0);
    Sample {
        eps,
        s: LaplacePoint::new(sigma, omega).expect("sigma is non-negative"),
    }
}

fn case(x: &Sample) -> String {
    format!("eps={:e} s={}{:+}i", x.eps, x.s.sigma(), x.s.omega())
}

/// Runs every independent oracle: quadratic residuals of the roots, the
/// fixed-frequency iteration against both convergence factors, nilpotency of
/// the nonlocal parameters, a brute-force α grid against golden section, and
/// two closed-form arithmetic checks.
pub fn audit_oracles(sample_count: usize, seed: u64) -> Result<AuditReport, ExperimentError> {
    if sample_count < 10 {
        return Err(ExperimentError::Config(format!(
            "sample_count must be at least 10, got {sample_count}"
        )));
    }
    let num = |e: &dyn std::fmt::Display| ExperimentError::Numerical(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AuditReport { checks: Vec::new() };
    let a = 1.0;

    for _ in 0..sample_count {
        let x = draw(&mut rng);
        let b = -(2.0 + x.eps) * a;
        let roots = lambda_roots(x.s, a, b).map_err(|e| num(&e))?;
        let q = x.s.s() - b;
        let worst = [roots.lambda1, roots.lambda2]
            .iter()
            .map(|&l| {
                let r = a * l * l - q * l + a;
                r.norm() / (a * l.norm_sqr() + q.norm() * l.norm() + a)
            })
            .fold(0.0, f64::max);
        rep.push("root_residual", case(&x), worst, 0.0, worst, 1e-13);
    }

    for i in 0..sample_count {
        let x = draw(&mut rng);
        let n = i % 4;
        let b = -(2.0 + x.eps) * a;
        let m = fixed_frequency_oracle_auto(a, b, OracleTc::Classical, n, x.s).map_err(|e| num(&e))?;
        let r = rho_classical(x.s, a, b, n).map_err(|e| num(&e))?.norm_sqr();
        rep.push("oracle_classical", format!("{} n={n}", case(&x)), m.contraction, r, (m.contraction - r).abs(), 1e-6);
    }

    for i in 0..sample_count {
        let x = draw(&mut rng);
        let n = i % 4;
        let alpha = 1.0 - rng.gen_range(0.0..1.0);
        let b = -(2.0 + x.eps) * a;
        let m = fixed_frequency_oracle_auto(a, b, OracleTc::real(alpha, -alpha), n, x.s)
            .map_err(|e| num(&e))?;
        let r = rho_owr(x.s, a, b, &OwrParams::symmetric(alpha, n))
            .map_err(|e| num(&e))?
            .norm_sqr();
        rep.push(
            "oracle_owr",
            format!("{} n={n} alpha={alpha}", case(&x)),
            m.contraction,
            r,
            (m.contraction - r).abs(),
            1e-6,
        );
    }

    for i in 0..sample_count {
        let x = draw(&mut rng);
        let n = i % 4;
        let b = -(2.0 + x.eps) * a;
        let (alpha, beta) = optimal_nonlocal_params(x.s, a, b).map_err(|e| num(&e))?;
        let m = fixed_frequency_oracle_auto(a, b, OracleTc::Optimized { alpha, beta }, n, x.s)
            .map_err(|e| num(&e))?;
        rep.push("nilpotency", format!("{} n={n}", case(&x)), m.contraction, 0.0, m.contraction, 1e-12);
    }

    // brute-force α grid around the closed form against the golden-section optimum
    let eps = 1e-4;
    let omega_max = 1e6 * a;
    let b = -(2.0 + eps) * a;
    let cells = 240;
    let step = 9f64.ln() / cells as f64;
    for n in 0..3 {
        let center = alpha_star_asymptotic(eps, n).map_err(|e| num(&e))?;
        let mut best = (f64::NAN, f64::INFINITY);
        for k in 0..=cells {
            let al = center / 3.0 * (step * k as f64).exp();
            let v = sup_rho_on_axis(a, b, &OwrParams::symmetric(al, n), omega_max, 1000)
                .map_err(|e| num(&e))?
                .sup_value;
            if v < best.1 {
                best = (al, v);
            }
        }
        let golden = optimize_alpha_numeric(eps, n, a, omega_max).map_err(|e| num(&e))?;
        let dev = (best.0 / golden.alpha_star).ln().abs();
        rep.push("alpha_grid_vs_golden", format!("eps=1e-4 n={n}"), golden.alpha_star, best.0, dev, step);
        let gap = (golden.sup_rho - best.1).max(0.0);
        rep.push("sup_golden_vs_grid", format!("eps=1e-4 n={n}"), golden.sup_rho, best.1, gap, 1e-9);
    }

    for (n, expect) in [(1, 0.2), (2, 0.1 * 2f64.powf(-1.0 / 3.0))] {
        let w = omega_tilde_asymptotic(1e-3, n, 1.0).map_err(|e| num(&e))?;
        rep.push("omega_tilde_arithmetic", format!("a=1 eps=1e-3 n={n}"), w, expect, (w - expect).abs(), 1e-12);
    }

    // 3-node chain driven on its last row; steady state solved by hand is (1/4, 1/2, 3/4)
    let sys = TridiagonalOde::uniform(3, 1.0, -2.0);
    let steps = 4000;
    let forcing = [RowForcing { row: 2, values: vec![1.0; steps] }];
    let w = backward_euler_window(&sys, &[0.0; 3], &forcing, 0.0, 0.05, steps).map_err(|e| num(&e))?;
    for (j, expect) in [0.25, 0.5, 0.75].into_iter().enumerate() {
        let v = w.value(j, steps);
        rep.push("backward_euler_steady_state", format!("node {j}"), v, expect, (v - expect).abs(), 1e-6);
    }
    Ok(rep)
}
