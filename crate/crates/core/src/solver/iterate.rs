use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mna::{BoundaryClosure, CircuitSpec, TridiagonalOde};
use crate::spectral::{rho_classical, rho_owr, sup_on_axis, LaplacePoint, OwrParams};
use crate::tridiag::TridiagonalLu;

use super::integrate::{check_step, factor_shifted, integrate_factored, RowForcing};
use super::interface::{
    dirichlet_interface, optimized_diagonal_shift, optimized_interface, Coupling,
    InterfaceTraces,
};
use super::partition::{Interface, PartitionPlan, TcKind};
use super::waveform::weighted_l2;
use super::{SolverError, Waveform};

/// Phantom-node series of one piece after a solve (`None` at the outer ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomTraces {
    /// Node `first − 1`.
    pub left: Option<Vec<f64>>,
    /// Node `last + 1`.
    pub right: Option<Vec<f64>>,
}

/// Iterate `k` of a Jacobi sweep. Traces are read-only while iterate `k+1`
/// is computed and replaced as a whole afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    pub iterate_index: usize,
    /// Empty at `k = 0`, where only guessed traces exist.
    pub sub_waveforms: Vec<Waveform>,
    pub phantoms: Vec<PhantomTraces>,
    pub interface_traces: Vec<InterfaceTraces>,
}

/// How interface traces of iterate 0 are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialGuess {
    /// Uniform in `[−1, 1]` per sample.
    Random { seed: u64 },
    Zero,
    /// Traces of the monolithic reference.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Error of iterates `1, 2, …` against the monolithic reference.
    pub per_iteration_error: Vec<f64>,
    /// `e_k / e_{k−2}`; undefined for the first two iterates.
    pub contraction_estimates: Vec<Option<f64>>,
    /// `sup_ω |ρ(σ+iω)|` over `0 ≤ ω ≤ π/Δt` for the interior coefficients.
    pub predicted_sup_rho: Option<f64>,
    pub weighted_sigma: f64,
    pub tol: f64,
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn iterations(&self) -> usize {
        self.per_iteration_error.len()
    }

    /// First iterate whose error is below `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.per_iteration_error.iter().position(|&e| e < tol).map(|i| i + 1)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.per_iteration_error.last().copied()
    }
}

struct PieceSystem {
    first: usize,
    last: usize,
    ode: TridiagonalOde,
    lu: TridiagonalLu<f64>,
    initial: Vec<f64>,
    left_interface: Option<usize>,
    right_interface: Option<usize>,
}

/// Drives WR sweeps for one partition of one system over one time window.
pub struct WrSolver {
    plan: PartitionPlan,
    interfaces: Vec<Interface>,
    couplings: Vec<Coupling>,
    pieces: Vec<PieceSystem>,
    global: TridiagonalOde,
    dt: f64,
    steps: usize,
    sigma: f64,
    reference: Waveform,
}

impl WrSolver {
    /// Builds the piece systems and the monolithic backward-Euler reference.
    pub fn new(
        plan: &PartitionPlan,
        global: &TridiagonalOde,
        initial: &[f64],
        dt: f64,
        steps: usize,
        sigma: f64,
    ) -> Result<Self, SolverError> {
        check_step(dt, steps)?;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(SolverError::InvalidSetting(format!("sigma must be >= 0, got {sigma}")));
        }
        let n = global.order();
        if plan.total_nodes != n || initial.len() != n {
            return Err(SolverError::Shape(format!(
                "plan has {} nodes, system {n}, initial data {}",
                plan.total_nodes,
                initial.len()
            )));
        }
        plan.tc_kind.validate()?;
        let interfaces = plan.interfaces();
        let couplings: Vec<Coupling> = interfaces
            .iter()
            .map(|i| Coupling {
                left: global.sup[i.wn()],
                right: global.sub[i.u0()],
            })
            .collect();
        let last_piece = plan.n_pieces() - 1;
        let mut pieces = Vec::with_capacity(plan.n_pieces());
        for (r, p) in plan.pieces.iter().enumerate() {
            let mut ode = global.restrict(p.first, p.last);
            let left_interface = (r > 0).then(|| r - 1);
            let right_interface = (r < last_piece).then_some(r);
            if let TcKind::Optimized { alpha, beta } = plan.tc_kind {
                if let Some(i) = right_interface {
                    let (shift, _) = optimized_diagonal_shift(couplings[i], alpha, beta)?;
                    let k = ode.order() - 1;
                    ode.diag[k] += shift;
                }
                if let Some(i) = left_interface {
                    let (_, shift) = optimized_diagonal_shift(couplings[i], alpha, beta)?;
                    ode.diag[0] += shift;
                }
            }
            let lu = factor_shifted(&ode, dt)?;
            pieces.push(PieceSystem {
                first: p.first,
                last: p.last,
                ode,
                lu,
                initial: initial[p.first..=p.last].to_vec(),
                left_interface,
                right_interface,
            });
        }
        let global_lu = factor_shifted(global, dt)?;
        let reference = integrate_factored(global, &global_lu, initial, &[], 0.0, dt, steps)?;
        Ok(Self {
            plan: plan.clone(),
            interfaces,
            couplings,
            pieces,
            global: global.clone(),
            dt,
            steps,
            sigma,
            reference,
        })
    }

    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    pub fn reference(&self) -> &Waveform {
        &self.reference
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    /// System matrix of piece `r`, including transmission-condition changes.
    pub fn piece_system(&self, r: usize) -> &TridiagonalOde {
        &self.pieces[r].ode
    }

    pub fn initial_state(&self, guess: InitialGuess) -> IterationState {
        let steps = self.steps;
        let interface_traces = match guess {
            InitialGuess::Zero => vec![InterfaceTraces::zeros(steps); self.interfaces.len()],
            InitialGuess::Exact => self
                .interfaces
                .iter()
                .map(|i| InterfaceTraces {
                    u0: self.reference.trace(i.u0()),
                    u1: self.reference.trace(i.u1()),
                    wn: self.reference.trace(i.wn()),
                    wn1: self.reference.trace(i.wn1()),
                })
                .collect(),
            InitialGuess::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut draw = |_| -> Vec<f64> { (0..steps).map(|_| rng.gen_range(-1.0..=1.0)).collect() };
                self.interfaces
                    .iter()
                    .map(|_| InterfaceTraces {
                        u0: draw(()),
                        u1: draw(()),
                        wn: draw(()),
                        wn1: draw(()),
                    })
                    .collect()
            }
        };
        IterationState {
            iterate_index: 0,
            sub_waveforms: Vec::new(),
            phantoms: Vec::new(),
            interface_traces,
        }
    }

    fn solve_piece(
        &self,
        r: usize,
        state: &IterationState,
    ) -> Result<(Waveform, PhantomTraces), SolverError> {
        let piece = &self.pieces[r];
        let mut forcing = Vec::with_capacity(2);
        let mut left_src = None;
        let mut right_src = None;
        if let Some(i) = piece.left_interface {
            right_src = Some(self.sources(state, i)?.right);
        }
        if let Some(i) = piece.right_interface {
            left_src = Some(self.sources(state, i)?.left);
        }
        if let Some(values) = right_src {
            forcing.push(RowForcing { row: 0, values });
        }
        if let Some(values) = left_src {
            forcing.push(RowForcing {
                row: piece.ode.order() - 1,
                values,
            });
        }
        let w = integrate_factored(
            &piece.ode,
            &piece.lu,
            &piece.initial,
            &forcing,
            0.0,
            self.dt,
            self.steps,
        )?;
        let last = piece.ode.order() - 1;
        // phantom values follow from the transmission condition just imposed
        let left = piece.left_interface.map(|i| {
            let tr = &state.interface_traces[i];
            match self.plan.tc_kind {
                TcKind::Dirichlet => tr.u0.clone(),
                TcKind::Optimized { beta, .. } => {
                    let kb = 1.0 / (beta - 1.0);
                    (0..self.steps)
                        .map(|m| -kb * w.value(0, m + 1) + tr.u0[m] + kb * tr.u1[m])
                        .collect()
                }
            }
        });
        let right = piece.right_interface.map(|i| {
            let tr = &state.interface_traces[i];
            match self.plan.tc_kind {
                TcKind::Dirichlet => tr.wn1.clone(),
                TcKind::Optimized { alpha, .. } => {
                    let ka = 1.0 / (1.0 + alpha);
                    (0..self.steps)
                        .map(|m| ka * w.value(last, m + 1) + tr.wn1[m] - ka * tr.wn[m])
                        .collect()
                }
            }
        });
        Ok((w, PhantomTraces { left, right }))
    }

    fn sources(
        &self,
        state: &IterationState,
        i: usize,
    ) -> Result<super::interface::InterfaceSources, SolverError> {
        let tr = state.interface_traces.get(i);
        if tr.map(|t| t.u0.len()) != Some(self.steps) {
            return Err(SolverError::Protocol(format!(
                "interface {i} traces do not match {} steps",
                self.steps
            )));
        }
        match self.plan.tc_kind {
            TcKind::Dirichlet => dirichlet_interface(state, i, self.couplings[i]),
            TcKind::Optimized { alpha, beta } => {
                optimized_interface(state, i, self.couplings[i], alpha, beta)
            }
        }
    }

    /// Value series of global `node` as seen by piece `r`, phantoms included.
    fn piece_trace(
        &self,
        r: usize,
        node: usize,
        waves: &[Waveform],
        phantoms: &[PhantomTraces],
    ) -> Vec<f64> {
        let p = &self.pieces[r];
        if (p.first..=p.last).contains(&node) {
            waves[r].trace(node - p.first)
        } else if node + 1 == p.first {
            phantoms[r].left.clone().expect("left phantom")
        } else {
            assert_eq!(node, p.last + 1);
            phantoms[r].right.clone().expect("right phantom")
        }
    }

    fn assemble(
        &self,
        state: &IterationState,
        results: Vec<(Waveform, PhantomTraces)>,
    ) -> IterationState {
        let (waves, phantoms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        let interface_traces = self
            .interfaces
            .iter()
            .map(|i| InterfaceTraces {
                u0: self.piece_trace(i.left, i.u0(), &waves, &phantoms),
                u1: self.piece_trace(i.left, i.u1(), &waves, &phantoms),
                wn: self.piece_trace(i.right(), i.wn(), &waves, &phantoms),
                wn1: self.piece_trace(i.right(), i.wn1(), &waves, &phantoms),
            })
            .collect();
        IterationState {
            iterate_index: state.iterate_index + 1,
            sub_waveforms: waves,
            phantoms,
            interface_traces,
        }
    }

    /// One Jacobi sweep; pieces are solved concurrently.
    pub fn sweep(&self, state: &IterationState) -> Result<IterationState, SolverError> {
        let results = (0..self.pieces.len())
            .into_par_iter()
            .map(|r| self.solve_piece(r, state))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.assemble(state, results))
    }

    /// One Jacobi sweep solving pieces sequentially in the given order.
    pub fn sweep_in_order(
        &self,
        state: &IterationState,
        order: &[usize],
    ) -> Result<IterationState, SolverError> {
        let mut slots: Vec<Option<(Waveform, PhantomTraces)>> = vec![None; self.pieces.len()];
        for &r in order {
            slots[r] = Some(self.solve_piece(r, state)?);
        }
        let results = slots
            .into_iter()
            .enumerate()
            .map(|(r, s)| s.ok_or_else(|| SolverError::Protocol(format!("piece {r} not solved"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.assemble(state, results))
    }

    /// Global waveform taking each node from the piece whose core owns it.
    pub fn compose(&self, state: &IterationState) -> Result<Waveform, SolverError> {
        if state.sub_waveforms.len() != self.pieces.len() {
            return Err(SolverError::Protocol("iterate has no sub-circuit waveforms".into()));
        }
        let mut out = Waveform::zeros(self.global.order(), 0.0, self.dt, self.steps);
        for m in 0..=self.steps {
            let row = out.sample_mut(m);
            for (r, w) in state.sub_waveforms.iter().enumerate() {
                let core = self.plan.core(r);
                let p = &self.pieces[r];
                for j in core.first..=core.last {
                    row[j] = w.value(j - p.first, m);
                }
            }
        }
        Ok(out)
    }

    /// σ-weighted L2 distance of the composed iterate to the reference.
    pub fn error(&self, state: &IterationState) -> Result<f64, SolverError> {
        if state.sub_waveforms.len() != self.pieces.len() {
            return Err(SolverError::Protocol("iterate has no sub-circuit waveforms".into()));
        }
        let sums: Vec<f64> = (1..=self.steps)
            .map(|m| {
                let reference = self.reference.sample(m);
                let mut acc = 0.0;
                for (r, w) in state.sub_waveforms.iter().enumerate() {
                    let core = self.plan.core(r);
                    let first = self.pieces[r].first;
                    let local = w.sample(m);
                    for j in core.first..=core.last {
                        let e = local[j - first] - reference[j];
                        acc += e * e;
                    }
                }
                acc
            })
            .collect();
        Ok(weighted_l2(&sums, 0.0, self.dt, self.sigma))
    }

    /// One sweep followed by its error against the reference.
    pub fn wr_iterate(&self, state: &IterationState) -> Result<(IterationState, f64), SolverError> {
        let next = self.sweep(state)?;
        let err = self.error(&next)?;
        if !err.is_finite() {
            return Err(SolverError::NonFinite);
        }
        Ok((next, err))
    }

    /// Iterates until the error drops below `tol` or `max_iter` sweeps ran.
    pub fn run(
        &self,
        guess: InitialGuess,
        max_iter: usize,
        tol: f64,
    ) -> Result<ConvergenceReport, SolverError> {
        if max_iter == 0 || !(tol >= 0.0) {
            return Err(SolverError::InvalidSetting(format!(
                "need max_iter >= 1 and tol >= 0, got {max_iter} and {tol}"
            )));
        }
        let mut state = self.initial_state(guess);
        let mut errors: Vec<f64> = Vec::new();
        let mut converged = false;
        for _ in 0..max_iter {
            let (next, err) = self.wr_iterate(&state)?;
            state = next;
            if let Some(&first) = errors.first() {
                if err > 1e6 * first {
                    return Err(SolverError::Diverged {
                        iteration: state.iterate_index,
                        error: err,
                        initial: first,
                    });
                }
            }
            errors.push(err);
            if err < tol {
                converged = true;
                break;
            }
        }
        let contraction_estimates = (0..errors.len())
            .map(|k| (k >= 2 && errors[k - 2] > 0.0).then(|| errors[k] / errors[k - 2]))
            .collect();
        Ok(ConvergenceReport {
            per_iteration_error: errors,
            contraction_estimates,
            predicted_sup_rho: self.predicted_sup_rho(),
            weighted_sigma: self.sigma,
            tol,
            converged,
        })
    }

    /// Laplace-domain bound from the coefficients of the middle row, `None`
    /// when they do not describe a uniform leaky chain.
    pub fn predicted_sup_rho(&self) -> Option<f64> {
        let n = self.global.order();
        let mid = n / 2;
        if mid == 0 || mid + 1 >= n {
            return None;
        }
        let a = self.global.sub[mid - 1];
        let b = self.global.diag[mid];
        let overlap = self.plan.overlap;
        let sigma = self.sigma;
        let tc = self.plan.tc_kind;
        let f = |w: f64| -> f64 {
            let s = match LaplacePoint::new(sigma, w) {
                Ok(s) => s,
                Err(_) => return f64::NAN,
            };
            let r = match tc {
                TcKind::Dirichlet => rho_classical(s, a, b, overlap),
                TcKind::Optimized { alpha, beta } => {
                    rho_owr(s, a, b, &OwrParams::new(alpha, beta, overlap))
                }
            };
            r.map(|z| z.norm()).unwrap_or(f64::NAN)
        };
        if f(0.0).is_nan() {
            return None;
        }
        let sup = sup_on_axis(f, std::f64::consts::PI / self.dt, 400).ok()?;
        sup.sup_value.is_finite().then_some(sup.sup_value)
    }
}

/// Window settings of a time-domain run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub dt: f64,
    pub t_end: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl RunSettings {
    pub fn steps(&self) -> Result<usize, SolverError> {
        if !(self.dt.is_finite() && self.dt > 0.0 && self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(SolverError::InvalidSetting(format!(
                "need dt > 0 and T > 0, got dt={}, T={}",
                self.dt, self.t_end
            )));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end || steps < 1.0 {
            return Err(SolverError::InvalidSetting(format!(
                "T={} is not a whole number of steps dt={}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }
}

/// Ladder run from zero initial voltages with seeded random interface guesses.
pub fn run_wr(
    plan: &PartitionPlan,
    spec: &CircuitSpec,
    closure: BoundaryClosure,
    settings: &RunSettings,
) -> Result<ConvergenceReport, SolverError> {
    let system = crate::mna::build_rc_ladder(spec, closure)?;
    run_wr_system(plan, &system, &vec![0.0; system.order()], settings)
}

pub fn run_wr_system(
    plan: &PartitionPlan,
    system: &TridiagonalOde,
    initial: &[f64],
    settings: &RunSettings,
) -> Result<ConvergenceReport, SolverError> {
    let steps = settings.steps()?;
    let solver = WrSolver::new(plan, system, initial, settings.dt, steps, settings.sigma)?;
    solver.run(
        InitialGuess::Random { seed: settings.seed },
        settings.max_iter,
        settings.tol,
    )
}
