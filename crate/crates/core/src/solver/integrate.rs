use crate::mna::TridiagonalOde;
use crate::tridiag::TridiagonalLu;

use super::{SolverError, Waveform};

/// Time series added to one row of the right-hand side, sampled at `t_1..t_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowForcing {
    pub row: usize,
    pub values: Vec<f64>,
}

/// Factor `I − dt·A` once for repeated implicit Euler steps.
pub fn factor_shifted(system: &TridiagonalOde, dt: f64) -> Result<TridiagonalLu<f64>, SolverError> {
    let lower: Vec<f64> = system.sub.iter().map(|x| -dt * x).collect();
    let upper: Vec<f64> = system.sup.iter().map(|x| -dt * x).collect();
    let diag: Vec<f64> = system.diag.iter().map(|x| 1.0 - dt * x).collect();
    TridiagonalLu::factor(&lower, &diag, &upper).ok_or(SolverError::SingularShiftedMatrix)
}

/// Backward Euler on `v' = A v + f(t) + g(t)` from `t0`, where `g` is given by
/// per-row forcing series.
pub fn backward_euler_window(
    system: &TridiagonalOde,
    initial: &[f64],
    forcing: &[RowForcing],
    t0: f64,
    dt: f64,
    steps: usize,
) -> Result<Waveform, SolverError> {
    check_step(dt, steps)?;
    let lu = factor_shifted(system, dt)?;
    integrate_factored(system, &lu, initial, forcing, t0, dt, steps)
}

pub(crate) fn check_step(dt: f64, steps: usize) -> Result<(), SolverError> {
    if !(dt.is_finite() && dt > 0.0) || steps == 0 {
        return Err(SolverError::InvalidSetting(format!(
            "need dt > 0 and at least one step, got dt={dt}, steps={steps}"
        )));
    }
    Ok(())
}

pub(crate) fn integrate_factored(
    system: &TridiagonalOde,
    lu: &TridiagonalLu<f64>,
    initial: &[f64],
    forcing: &[RowForcing],
    t0: f64,
    dt: f64,
    steps: usize,
) -> Result<Waveform, SolverError> {
    let n = system.order();
    if initial.len() != n {
        return Err(SolverError::Shape(format!(
            "initial data has {} values for {n} nodes",
            initial.len()
        )));
    }
    for f in forcing {
        if f.row >= n || f.values.len() != steps {
            return Err(SolverError::Shape(format!(
                "forcing on row {} has {} samples, expected row < {n} and {steps} samples",
                f.row,
                f.values.len()
            )));
        }
    }
    let mut out = Waveform::zeros(n, t0, dt, steps);
    out.sample_mut(0).copy_from_slice(initial);
    let mut rhs = vec![0.0; n];
    let has_source = system.has_source();
    for m in 0..steps {
        let t_next = t0 + (m + 1) as f64 * dt;
        if has_source {
            rhs.iter_mut().for_each(|x| *x = 0.0);
            system.add_source(t_next, &mut rhs);
            for f in forcing {
                rhs[f.row] += f.values[m];
            }
            let prev = out.sample(m);
            for (r, p) in rhs.iter_mut().zip(prev) {
                *r = p + dt * *r;
            }
        } else {
            rhs.copy_from_slice(out.sample(m));
            for f in forcing {
                rhs[f.row] += dt * f.values[m];
            }
        }
        lu.solve_in_place(&mut rhs);
        out.sample_mut(m + 1).copy_from_slice(&rhs);
    }
    if !out.is_finite() {
        return Err(SolverError::NonFinite);
    }
    Ok(out)
}
