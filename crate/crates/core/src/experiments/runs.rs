use std::path::Path;

use serde_json::json;

use crate::mna::{build_rc_ladder, heat_equation_system, CircuitSpec, Netlist, TridiagonalOde};
use crate::optimizer::{
    alpha_star_asymptotic, default_omega_max, omega_tilde_asymptotic, optimize_alpha_numeric_with,
    OptimizeOptions,
};
use crate::solver::{make_partition, ConvergenceReport, InitialGuess, RunSettings, TcKind, WrSolver};
use crate::spectral::{axis_grid, rho_classical, rho_owr, sup_rho_on_axis, LaplacePoint, OwrParams};

use super::audit::audit_oracles;
use super::config::{AlphaKind, AlphaSource, Settings};
use super::output::{col, tag, write_records, write_table, Cell, Column, FileRecord};
use super::{ExperimentError, ExperimentId};

pub(super) struct RunOutput {
    pub files: Vec<FileRecord>,
    pub derived: serde_json::Value,
    pub failure: Option<String>,
}

const RHO_COLUMNS: [Column; 2] = [col("omega", "rad/s"), col("abs_rho", "1")];
const HISTORY_COLUMNS: [Column; 3] = [
    col("iteration", "1"),
    col("error_l2", "V*s^0.5"),
    col("contraction_2step", "1"),
];

fn config(msg: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Config(msg.to_string())
}

fn numerical(msg: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Numerical(msg.to_string())
}

fn positive(name: &str, v: f64) -> Result<(), ExperimentError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn is_time_domain(id: ExperimentId) -> bool {
    matches!(
        id,
        ExperimentId::WrVsOwr | ExperimentId::HeatCrosscheck | ExperimentId::MultiSubcircuit
    )
}

/// Checks every setting against the preconditions of the module that will
/// consume it, before anything is computed.
pub(super) fn validate(id: ExperimentId, s: &Settings) -> Result<(), ExperimentError> {
    positive("resistance", s.resistance)?;
    positive("capacitance", s.capacitance)?;
    positive("epsilon", s.epsilon)?;
    if s.epsilons.is_empty() {
        return Err(config("epsilons must not be empty"));
    }
    for &e in &s.epsilons {
        positive("epsilons entry", e)?;
    }
    if s.overlaps.is_empty() || s.subcircuits.is_empty() || s.alpha_sources.is_empty() {
        return Err(config("overlaps, subcircuits and alpha_sources must not be empty"));
    }
    if let Some(w) = s.omega_max {
        positive("omega_max", w)?;
    }
    if s.points < 2 {
        return Err(config(format!("points must be at least 2, got {}", s.points)));
    }
    if s.grid < 16 {
        return Err(config(format!("grid must be at least 16, got {}", s.grid)));
    }
    for src in &s.alpha_sources {
        if let AlphaSource::Explicit(a) = *src {
            if !a.is_finite() || a == -1.0 {
                return Err(config(format!("explicit alpha {a} is singular or not finite")));
            }
        }
    }
    if let Some(b) = s.beta {
        if !b.is_finite() || b == 1.0 {
            return Err(config(format!("beta {b} is singular or not finite")));
        }
    }
    match id {
        ExperimentId::OmegaVsEpsilon if s.overlaps.contains(&0) => {
            return Err(config("omega-vs-epsilon needs overlaps >= 1; without overlap there is no interior frequency"));
        }
        ExperimentId::OracleAudit if s.samples < 10 => {
            return Err(config(format!("samples must be at least 10, got {}", s.samples)));
        }
        _ => {}
    }
    if is_time_domain(id) {
        let order = if id == ExperimentId::HeatCrosscheck {
            s.nodes
        } else {
            circuit_system(s)?.system.order()
        };
        run_settings(s, 1)?.steps().map_err(config)?;
        if !(s.sigma.is_finite() && s.sigma >= 0.0) {
            return Err(config(format!("sigma must be >= 0, got {}", s.sigma)));
        }
        if !(s.tol >= 0.0) {
            return Err(config(format!("tol must be >= 0, got {}", s.tol)));
        }
        for &ns in &s.subcircuits {
            if s.budget(ns) == 0 {
                return Err(config("the iteration budget must be at least 1"));
            }
            for &n in &s.overlaps {
                make_partition(order, ns, n, TcKind::Dirichlet).map_err(config)?;
            }
        }
    }
    Ok(())
}

pub(super) fn dispatch(id: ExperimentId, s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    match id {
        ExperimentId::RhoCurves => rho_curves(s, dir),
        ExperimentId::Equioscillation => equioscillation(s, dir),
        ExperimentId::AlphaVsEpsilon => alpha_vs_epsilon(s, dir),
        ExperimentId::OmegaVsEpsilon => omega_vs_epsilon(s, dir),
        ExperimentId::WrVsOwr | ExperimentId::MultiSubcircuit => circuit_runs(s, dir),
        ExperimentId::HeatCrosscheck => heat_crosscheck(s, dir),
        ExperimentId::OracleAudit => oracle_audit(s, dir),
    }
}

fn b_of(a: f64, eps: f64) -> f64 {
    -(2.0 + eps) * a
}

fn options(s: &Settings) -> OptimizeOptions {
    OptimizeOptions {
        grid: s.grid,
        ..OptimizeOptions::default()
    }
}

fn resolve_alpha(
    src: AlphaSource,
    eps: f64,
    n: usize,
    a: f64,
    omega_max: f64,
    s: &Settings,
) -> Result<f64, ExperimentError> {
    match src {
        AlphaSource::Named(AlphaKind::Asymptotic) => alpha_star_asymptotic(eps, n).map_err(numerical),
        AlphaSource::Named(AlphaKind::Numeric) => {
            optimize_alpha_numeric_with(eps, n, a, omega_max, &options(s))
                .map(|r| r.alpha_star)
                .map_err(numerical)
        }
        AlphaSource::Explicit(v) => Ok(v),
    }
}

fn rho_curves(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let a = s.a();
    let omega_max = s.omega_max.unwrap_or(10.0 * a);
    let omegas: Vec<f64> = (0..s.points)
        .map(|i| omega_max * i as f64 / (s.points - 1) as f64)
        .collect();
    let mut files = Vec::new();
    let mut alphas = Vec::new();
    for &eps in &s.epsilons {
        let b = b_of(a, eps);
        for &n in &s.overlaps {
            let rows = omegas
                .iter()
                .map(|&w| {
                    let r = rho_classical(LaplacePoint::on_axis(w), a, b, n).map_err(numerical)?;
                    Ok(vec![Cell::from(w), Cell::from(r.norm())])
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            files.push(write_table(dir, &format!("rho_wr_n{n}_eps{}.csv", tag(eps)), &RHO_COLUMNS, &rows)?);
            for &src in &s.alpha_sources {
                let alpha = resolve_alpha(src, eps, n, a, default_omega_max(a, None), s)?;
                let p = OwrParams::new(alpha, s.beta.unwrap_or(-alpha), n);
                let rows = omegas
                    .iter()
                    .map(|&w| {
                        let r = rho_owr(LaplacePoint::on_axis(w), a, b, &p).map_err(numerical)?;
                        Ok(vec![Cell::from(w), Cell::from(r.norm())])
                    })
                    .collect::<Result<Vec<_>, ExperimentError>>()?;
                let name = format!("rho_owr_{}_n{n}_eps{}.csv", src.label(), tag(eps));
                files.push(write_table(dir, &name, &RHO_COLUMNS, &rows)?);
                alphas.push(json!({"epsilon": eps, "overlap": n, "source": src.label(), "alpha": alpha}));
            }
        }
    }
    Ok(RunOutput {
        files,
        derived: json!({ "a": a, "alphas": alphas }),
        failure: None,
    })
}

fn equioscillation(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let a = s.a();
    let omega_max = s.omega_max.unwrap_or_else(|| default_omega_max(a, None));
    let mut files = Vec::new();
    let mut derived = Vec::new();
    for &eps in &s.epsilons {
        let b = b_of(a, eps);
        for &n in &s.overlaps {
            let res = optimize_alpha_numeric_with(eps, n, a, omega_max, &options(s)).map_err(numerical)?;
            let asym = alpha_star_asymptotic(eps, n).map_err(numerical)?;
            let p = OwrParams::symmetric(res.alpha_star, n);
            let rows = axis_grid(omega_max, s.points)
                .into_iter()
                .map(|w| {
                    let r = rho_owr(LaplacePoint::on_axis(w), a, b, &p).map_err(numerical)?;
                    Ok(vec![Cell::from(w), Cell::from(r.norm())])
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            let suffix = format!("n{n}_eps{}", tag(eps));
            files.push(write_table(dir, &format!("equiosc_{suffix}.csv"), &RHO_COLUMNS, &rows)?);

            let scan: Vec<f64> = (0..s.points)
                .map(|i| asym / 10.0 * 100f64.powf(i as f64 / (s.points - 1) as f64))
                .collect();
            let rows = scan
                .iter()
                .map(|&al| {
                    let sup = sup_rho_on_axis(a, b, &OwrParams::symmetric(al, n), omega_max, s.grid)
                        .map_err(numerical)?;
                    Ok(vec![Cell::from(al), Cell::from(sup.sup_value)])
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            let cols = [col("alpha", "1"), col("sup_rho", "1")];
            files.push(write_table(dir, &format!("alpha_scan_{suffix}.csv"), &cols, &rows)?);

            let sup_asym = sup_rho_on_axis(a, b, &OwrParams::symmetric(asym, n), omega_max, s.grid)
                .map_err(numerical)?
                .sup_value;
            let sup_cla = crate::spectral::sup_rho_classical_on_axis(a, b, n, omega_max, s.grid)
                .map_err(numerical)?
                .sup_value;
            derived.push(json!({
                "epsilon": eps,
                "overlap": n,
                "alpha_numeric": res.alpha_star,
                "alpha_asymptotic": asym,
                "sup_rho_numeric": res.sup_rho,
                "sup_rho_asymptotic": sup_asym,
                "sup_rho_classical": sup_cla,
                "equioscillation_points": res.equioscillation_points,
                "equioscillation_residual": res.residual,
            }));
        }
    }
    Ok(RunOutput {
        files,
        derived: json!({ "a": a, "omega_max": omega_max, "cases": derived }),
        failure: None,
    })
}

fn alpha_vs_epsilon(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let a = s.a();
    let omega_max = s.omega_max.unwrap_or_else(|| default_omega_max(a, None));
    let cols = [
        col("epsilon", "1"),
        col("alpha_numeric", "1"),
        col("alpha_asymptotic", "1"),
        col("ratio", "1"),
    ];
    let mut files = Vec::new();
    for &n in &s.overlaps {
        let rows = s
            .epsilons
            .iter()
            .map(|&eps| {
                let num = optimize_alpha_numeric_with(eps, n, a, omega_max, &options(s))
                    .map_err(numerical)?
                    .alpha_star;
                let asym = alpha_star_asymptotic(eps, n).map_err(numerical)?;
                Ok(vec![eps.into(), num.into(), asym.into(), (num / asym).into()])
            })
            .collect::<Result<Vec<Vec<Cell>>, ExperimentError>>()?;
        files.push(write_table(dir, &format!("alpha_vs_eps_n{n}.csv"), &cols, &rows)?);
    }
    Ok(RunOutput {
        files,
        derived: json!({ "a": a, "omega_max": omega_max }),
        failure: None,
    })
}

fn omega_vs_epsilon(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let a = s.a();
    let omega_max = s.omega_max.unwrap_or_else(|| default_omega_max(a, None));
    let cols = [
        col("epsilon", "1"),
        col("omega_numeric", "rad/s"),
        col("omega_asymptotic", "rad/s"),
        col("ratio", "1"),
    ];
    let mut files = Vec::new();
    for &n in &s.overlaps {
        let rows = s
            .epsilons
            .iter()
            .map(|&eps| {
                let res = optimize_alpha_numeric_with(eps, n, a, omega_max, &options(s)).map_err(numerical)?;
                let num = *res
                    .equioscillation_points
                    .get(1)
                    .ok_or_else(|| numerical(format!("no interior maximum at epsilon={eps}, n={n}")))?;
                let asym = omega_tilde_asymptotic(eps, n, a).map_err(numerical)?;
                Ok(vec![eps.into(), num.into(), asym.into(), (num / asym).into()])
            })
            .collect::<Result<Vec<Vec<Cell>>, ExperimentError>>()?;
        files.push(write_table(dir, &format!("omega_vs_eps_n{n}.csv"), &cols, &rows)?);
    }
    Ok(RunOutput {
        files,
        derived: json!({ "a": a, "omega_max": omega_max }),
        failure: None,
    })
}

fn run_settings(s: &Settings, ns: usize) -> Result<RunSettings, ExperimentError> {
    Ok(RunSettings {
        dt: s.dt,
        t_end: s.t_end,
        max_iter: s.budget(ns),
        tol: s.tol,
        sigma: s.sigma,
        seed: s.seed,
    })
}

/// Rows `iteration, error_l2, contraction_2step` of a report.
pub(crate) fn history_rows(r: &ConvergenceReport) -> Vec<Vec<Cell>> {
    r.per_iteration_error
        .iter()
        .zip(&r.contraction_estimates)
        .enumerate()
        .map(|(k, (&e, &c))| vec![Cell::from(k + 1), e.into(), c.into()])
        .collect()
}

fn run_one(
    system: &TridiagonalOde,
    s: &Settings,
    ns: usize,
    n: usize,
    tc: TcKind,
) -> Result<ConvergenceReport, ExperimentError> {
    let plan = make_partition(system.order(), ns, n, tc).map_err(config)?;
    let rs = run_settings(s, ns)?;
    let steps = rs.steps().map_err(config)?;
    let solver = WrSolver::new(&plan, system, &vec![0.0; system.order()], rs.dt, steps, rs.sigma)
        .map_err(numerical)?;
    solver
        .run(InitialGuess::Random { seed: rs.seed }, rs.max_iter, rs.tol)
        .map_err(numerical)
}

fn summary(r: &ConvergenceReport, s: &Settings) -> serde_json::Value {
    json!({
        "iterations": r.iterations(),
        "iterations_to_tol": r.iterations_to(s.tol),
        "final_error": r.final_error(),
        "converged": r.converged,
        "predicted_sup_rho": r.predicted_sup_rho,
    })
}

/// WR and OWR on the leaky ladder for every (N_s, n, α source).
fn time_domain(
    system: &TridiagonalOde,
    s: &Settings,
    dir: &Path,
    a: f64,
    eps: f64,
    prefix: &str,
) -> Result<(Vec<FileRecord>, Vec<serde_json::Value>), ExperimentError> {
    let mut files = Vec::new();
    let mut runs = Vec::new();
    let omega_max = std::f64::consts::PI / s.dt;
    for &ns in &s.subcircuits {
        for &n in &s.overlaps {
            let suffix = format!("ns{ns}_n{n}");
            let wr = run_one(system, s, ns, n, TcKind::Dirichlet)?;
            files.push(write_table(dir, &format!("{prefix}wr_{suffix}.csv"), &HISTORY_COLUMNS, &history_rows(&wr))?);
            runs.push(json!({"method": "wr", "subcircuits": ns, "overlap": n, "report": summary(&wr, s)}));
            for &src in &s.alpha_sources {
                let alpha = resolve_alpha(src, eps, n, a, omega_max, s)?;
                let beta = s.beta.unwrap_or(-alpha);
                let owr = run_one(system, s, ns, n, TcKind::Optimized { alpha, beta })?;
                let name = format!("{prefix}owr_{}_{suffix}.csv", src.label());
                files.push(write_table(dir, &name, &HISTORY_COLUMNS, &history_rows(&owr))?);
                runs.push(json!({
                    "method": "owr",
                    "alpha_source": src.label(),
                    "alpha": alpha,
                    "beta": beta,
                    "subcircuits": ns,
                    "overlap": n,
                    "report": summary(&owr, s),
                }));
            }
        }
    }
    Ok((files, runs))
}

struct Circuit {
    system: TridiagonalOde,
    a: f64,
    b: f64,
    source: String,
}

/// The ladder from the R/C/ε settings, or a netlist file when `netlist` is set.
/// For a netlist, `a` and `b` are read off the middle row.
fn circuit_system(s: &Settings) -> Result<Circuit, ExperimentError> {
    match &s.netlist {
        None => {
            let spec = CircuitSpec::new(s.resistance, s.capacitance, s.epsilon, s.nodes).map_err(config)?;
            Ok(Circuit {
                system: build_rc_ladder(&spec, s.closure).map_err(config)?,
                a: spec.a(),
                b: spec.b(),
                source: "ladder".into(),
            })
        }
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config(format!("cannot read netlist {path}: {e}")))?;
            let system = Netlist::parse(&text).and_then(|n| n.assemble()).map_err(config)?;
            if system.order() < 3 {
                return Err(config(format!("netlist {path} has fewer than 3 nodes")));
            }
            let mid = system.order() / 2;
            let a = system.sup[mid];
            let b = system.diag[mid];
            if !(a > 0.0 && -b / a - 2.0 > 0.0) {
                return Err(config(format!(
                    "netlist {path}: middle row a={a}, b={b} is not a leaky chain (need a > 0, -b/a > 2)"
                )));
            }
            Ok(Circuit { system, a, b, source: path.clone() })
        }
    }
}

fn circuit_runs(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let c = circuit_system(s)?;
    let eps = -c.b / c.a - 2.0;
    let (files, runs) = time_domain(&c.system, s, dir, c.a, eps, "")?;
    Ok(RunOutput {
        files,
        derived: json!({ "circuit": c.source, "a": c.a, "b": c.b, "epsilon_for_alpha": eps, "runs": runs }),
        failure: None,
    })
}

fn heat_crosscheck(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let dx = 1.0 / (s.nodes as f64 + 1.0);
    let system = heat_equation_system(s.nodes, dx).map_err(config)?;
    let a = 1.0 / (dx * dx);
    let (files, runs) = time_domain(&system, s, dir, a, s.epsilon, "heat_")?;
    Ok(RunOutput {
        files,
        derived: json!({ "dx": dx, "a": a, "epsilon_for_alpha": s.epsilon, "runs": runs }),
        failure: None,
    })
}

fn oracle_audit(s: &Settings, dir: &Path) -> Result<RunOutput, ExperimentError> {
    let report = audit_oracles(s.samples, s.seed)?;
    let cols = [
        col("check", "-"),
        col("case", "-"),
        col("measured", "1"),
        col("reference", "1"),
        col("deviation", "1"),
        col("tolerance", "1"),
        col("passed", "-"),
    ];
    let fmt = |v: f64| {
        if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
            format!("{v}")
        } else {
            format!("{v:e}")
        }
    };
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.check.clone(),
                c.case.clone(),
                fmt(c.measured),
                fmt(c.reference),
                fmt(c.deviation),
                fmt(c.tolerance),
                c.passed.to_string(),
            ]
        })
        .collect();
    let files = vec![write_records(dir, "audit.csv", &cols, &rows)?];
    let failing: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}[{}] deviation {:e} > {:e}", c.check, c.case, c.deviation, c.tolerance))
        .collect();
    Ok(RunOutput {
        files,
        derived: json!({
            "checks": report.checks.len(),
            "failed": failing.len(),
            "max_deviation_by_check": report.max_deviation_by_check(),
        }),
        failure: (!failing.is_empty()).then(|| format!("failing oracle checks: {}", failing.join("; "))),
    })
}
