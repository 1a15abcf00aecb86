use serde::{Deserialize, Serialize};

/// Node voltages on the uniform grid `t_m = t0 + m·dt`, `m = 0..=steps`.
///
/// Samples are stored time-major: `values[m·nodes + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
    nodes: usize,
    values: Vec<f64>,
}

impl Waveform {
    pub fn zeros(nodes: usize, t0: f64, dt: f64, steps: usize) -> Self {
        Self {
            t0,
            dt,
            steps,
            nodes,
            values: vec![0.0; nodes * (steps + 1)],
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn window_length(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn value(&self, node: usize, m: usize) -> f64 {
        self.values[m * self.nodes + node]
    }

    pub fn sample(&self, m: usize) -> &[f64] {
        &self.values[m * self.nodes..(m + 1) * self.nodes]
    }

    pub fn sample_mut(&mut self, m: usize) -> &mut [f64] {
        &mut self.values[m * self.nodes..(m + 1) * self.nodes]
    }

    /// Samples `1..=steps` of one node, the layout used for interface traces.
    pub fn trace(&self, node: usize) -> Vec<f64> {
        (1..=self.steps).map(|m| self.value(node, m)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Copy with every sample multiplied by `e^{−σ t}`.
    pub fn scaled_by_exp(&self, sigma: f64) -> Waveform {
        let mut out = self.clone();
        for m in 0..=self.steps {
            let w = (-sigma * self.time(m)).exp();
            for v in out.sample_mut(m) {
                *v *= w;
            }
        }
        out
    }
}

/// `sqrt(dt·Σ_{m≥1} e^{−2σ t_m} Σ_j e_j(t_m)²)` for per-step squared sums.
pub fn weighted_l2(step_sq_sums: &[f64], t0: f64, dt: f64, sigma: f64) -> f64 {
    let total: f64 = step_sq_sums
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let t = t0 + (i + 1) as f64 * dt;
            (-2.0 * sigma * t).exp() * s
        })
        .sum();
    (dt * total).sqrt()
}

/// σ-weighted L2 norm of a waveform over samples `1..=steps`.
pub fn weighted_norm(w: &Waveform, sigma: f64) -> f64 {
    let sums: Vec<f64> = (1..=w.steps)
        .map(|m| w.sample(m).iter().map(|v| v * v).sum())
        .collect();
    weighted_l2(&sums, w.t0, w.dt, sigma)
}
