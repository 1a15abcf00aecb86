//! Element stamps and assembly into the explicit tridiagonal ODE form.
//!
//! Stamps accumulate the descriptor form `M·v' = −K·v + rhs(t)`, where `M` holds
//! capacitances, `K` holds conductances (the usual resistor stamp pattern) and
//! `rhs` holds injected currents. [`StampMatrix::assemble`] turns this into
//! `v' = A·v + f(t)` with `A = −M⁻¹K` and `f = M⁻¹·rhs`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MnaError;

/// A node index after ground elimination, or `None` for ground.
pub type Terminal = Option<usize>;

/// Time dependence of an independent current source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SourceWaveform {
    Constant { value: f64 },
    /// Zero before `delay`, `amplitude` afterwards.
    Step { amplitude: f64, delay: f64 },
    Sine { amplitude: f64, angular_frequency: f64 },
}

impl SourceWaveform {
    pub fn constant(value: f64) -> Self {
        SourceWaveform::Constant { value }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            SourceWaveform::Constant { value } => value,
            SourceWaveform::Step { amplitude, delay } => {
                if t >= delay {
                    amplitude
                } else {
                    0.0
                }
            }
            SourceWaveform::Sine {
                amplitude,
                angular_frequency,
            } => amplitude * (angular_frequency * t).sin(),
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            SourceWaveform::Constant { value } => value == 0.0,
            SourceWaveform::Step { amplitude, .. } | SourceWaveform::Sine { amplitude, .. } => {
                amplitude == 0.0
            }
        }
    }
}

/// A scaled source contribution to one row of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceTerm {
    pub node: usize,
    pub scale: f64,
    pub waveform: SourceWaveform,
}

impl SourceTerm {
    pub fn value(&self, t: f64) -> f64 {
        self.scale * self.waveform.value(t)
    }
}

/// Sparse accumulator for the descriptor system.
#[derive(Debug, Clone, PartialEq)]
pub struct StampMatrix {
    order: usize,
    m_entries: BTreeMap<(usize, usize), f64>,
    k_entries: BTreeMap<(usize, usize), f64>,
    sources: Vec<SourceTerm>,
}

impl StampMatrix {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            m_entries: BTreeMap::new(),
            k_entries: BTreeMap::new(),
            sources: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn m_entries(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.m_entries
    }

    pub fn k_entries(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.k_entries
    }

    pub fn m(&self, row: usize, col: usize) -> f64 {
        self.m_entries.get(&(row, col)).copied().unwrap_or(0.0)
    }

    pub fn k(&self, row: usize, col: usize) -> f64 {
        self.k_entries.get(&(row, col)).copied().unwrap_or(0.0)
    }

    pub fn dense_m(&self) -> Vec<Vec<f64>> {
        densify(self.order, &self.m_entries)
    }

    pub fn dense_k(&self) -> Vec<Vec<f64>> {
        densify(self.order, &self.k_entries)
    }

    /// Injected currents at time `t`, one entry per node.
    pub fn rhs_at(&self, t: f64) -> Vec<f64> {
        let mut rhs = vec![0.0; self.order];
        for s in &self.sources {
            rhs[s.node] += s.value(t);
        }
        rhs
    }

    fn check_terminals(&self, p: Terminal, q: Terminal) -> Result<(), MnaError> {
        if p == q {
            return Err(MnaError::DegenerateElement { terminal: p });
        }
        for node in [p, q].into_iter().flatten() {
            if node >= self.order {
                return Err(MnaError::NodeOutOfRange {
                    node,
                    order: self.order,
                });
            }
        }
        Ok(())
    }

    /// Stamp a two-terminal conductance of either sign.
    ///
    /// Negative values represent the active branch that a controlled interface
    /// source presents to its sub-circuit.
    pub fn stamp_conductance(&mut self, g: f64, p: Terminal, q: Terminal) -> Result<(), MnaError> {
        if !g.is_finite() || g == 0.0 {
            return Err(MnaError::InvalidElement {
                kind: "conductance",
                value: g,
            });
        }
        self.check_terminals(p, q)?;
        add_pair(&mut self.k_entries, g, p, q);
        Ok(())
    }

    pub fn stamp_resistor(&mut self, r: f64, p: Terminal, q: Terminal) -> Result<(), MnaError> {
        if !(r.is_finite() && r > 0.0) {
            return Err(MnaError::InvalidElement {
                kind: "resistor",
                value: r,
            });
        }
        self.stamp_conductance(1.0 / r, p, q)
    }

    pub fn stamp_capacitor(&mut self, c: f64, p: Terminal, q: Terminal) -> Result<(), MnaError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(MnaError::InvalidElement {
                kind: "capacitor",
                value: c,
            });
        }
        self.check_terminals(p, q)?;
        add_pair(&mut self.m_entries, c, p, q);
        Ok(())
    }

    /// Current source driving `i` from `p` through the source to `q`:
    /// row `p` receives `−i`, row `q` receives `+i`.
    pub fn stamp_current_source(
        &mut self,
        i: SourceWaveform,
        p: Terminal,
        q: Terminal,
    ) -> Result<(), MnaError> {
        self.check_terminals(p, q)?;
        if i.is_zero() {
            return Ok(());
        }
        if let Some(p) = p {
            self.sources.push(SourceTerm {
                node: p,
                scale: -1.0,
                waveform: i,
            });
        }
        if let Some(q) = q {
            self.sources.push(SourceTerm {
                node: q,
                scale: 1.0,
                waveform: i,
            });
        }
        Ok(())
    }

    /// Convert to explicit form `v' = A·v + f(t)`.
    ///
    /// Requires a diagonal, nonsingular `M` (every node carries a grounded
    /// capacitor and no capacitor joins two nodes) and a tridiagonal `K`.
    pub fn assemble(&self) -> Result<TridiagonalOde, MnaError> {
        let n = self.order;
        if n == 0 {
            return Err(MnaError::TooSmall { nodes: 0, min: 1 });
        }
        for (&(i, j), &v) in &self.m_entries {
            if i != j && v != 0.0 {
                return Err(MnaError::UnsupportedTopology(format!(
                    "capacitive coupling between nodes {i} and {j}"
                )));
            }
        }
        for (&(i, j), &v) in &self.k_entries {
            if i.abs_diff(j) > 1 && v != 0.0 {
                return Err(MnaError::UnsupportedTopology(format!(
                    "resistive coupling between non-adjacent nodes {i} and {j}"
                )));
            }
        }
        let mass: Vec<f64> = (0..n).map(|i| self.m(i, i)).collect();
        if let Some(node) = mass.iter().position(|&m| m == 0.0) {
            return Err(MnaError::SingularMass { node });
        }
        let diag = (0..n).map(|i| -self.k(i, i) / mass[i]).collect();
        let sub = (1..n).map(|i| -self.k(i, i - 1) / mass[i]).collect();
        let sup = (0..n - 1).map(|i| -self.k(i, i + 1) / mass[i]).collect();
        let source = self
            .sources
            .iter()
            .map(|s| SourceTerm {
                scale: s.scale / mass[s.node],
                ..*s
            })
            .collect();
        Ok(TridiagonalOde {
            sub,
            diag,
            sup,
            source,
        })
    }
}

fn add_pair(map: &mut BTreeMap<(usize, usize), f64>, value: f64, p: Terminal, q: Terminal) {
    if let Some(p) = p {
        *map.entry((p, p)).or_insert(0.0) += value;
    }
    if let Some(q) = q {
        *map.entry((q, q)).or_insert(0.0) += value;
    }
    if let (Some(p), Some(q)) = (p, q) {
        *map.entry((p, q)).or_insert(0.0) -= value;
        *map.entry((q, p)).or_insert(0.0) -= value;
    }
}

fn densify(order: usize, map: &BTreeMap<(usize, usize), f64>) -> Vec<Vec<f64>> {
    let mut dense = vec![vec![0.0; order]; order];
    for (&(i, j), &v) in map {
        dense[i][j] = v;
    }
    dense
}

/// Explicit tridiagonal system `v' = A·v + f(t)`.
///
/// Row `i` reads `sub[i-1]·v[i-1] + diag[i]·v[i] + sup[i]·v[i+1]`, so `sub` and
/// `sup` are one shorter than `diag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalOde {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub source: Vec<SourceTerm>,
}

impl TridiagonalOde {
    /// Uniform system with constant coefficients and no source.
    pub fn uniform(order: usize, offdiag: f64, diag: f64) -> Self {
        Self {
            sub: vec![offdiag; order.saturating_sub(1)],
            diag: vec![diag; order],
            sup: vec![offdiag; order.saturating_sub(1)],
            source: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Coupling of row `i` to row `i-1`, or `None` on the first row.
    pub fn lower_coupling(&self, row: usize) -> Option<f64> {
        row.checked_sub(1).map(|r| self.sub[r])
    }

    pub fn upper_coupling(&self, row: usize) -> Option<f64> {
        self.sup.get(row).copied()
    }

    pub fn has_source(&self) -> bool {
        !self.source.is_empty()
    }

    /// Adds `f(t)` into `out`.
    pub fn add_source(&self, t: f64, out: &mut [f64]) {
        for s in &self.source {
            out[s.node] += s.value(t);
        }
    }

    pub fn source_at(&self, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.order()];
        self.add_source(t, &mut f);
        f
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        crate::tridiag::matvec(&self.sub, &self.diag, &self.sup, x)
    }

    /// Restriction to the inclusive node range `[first, last]`.
    ///
    /// Couplings that leave the range are dropped; sources are re-indexed.
    pub fn restrict(&self, first: usize, last: usize) -> TridiagonalOde {
        assert!(first <= last && last < self.order());
        TridiagonalOde {
            sub: self.sub[first..last].to_vec(),
            diag: self.diag[first..=last].to_vec(),
            sup: self.sup[first..last].to_vec(),
            source: self
                .source
                .iter()
                .filter(|s| (first..=last).contains(&s.node))
                .map(|s| SourceTerm {
                    node: s.node - first,
                    ..*s
                })
                .collect(),
        }
    }
}
