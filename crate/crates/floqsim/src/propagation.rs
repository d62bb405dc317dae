//! Unitary time evolution of time-dependent Hamiltonians.
//!
//! The stepper is midpoint-exponential: over each substep of width `dt` the
//! state advances by `exp(-i H(t + dt/2) dt)`. Every step is exactly
//! unitary, so fidelities stay meaningful without renormalization; the norm
//! is asserted, never silently fixed. Stroboscopic samples land on exact
//! multiples of the drive period because the step grid is aligned to it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::models::{embed_qubit_state, qutrit_pauli_block, TimeDependentHamiltonian};
use crate::tensor::{
    eigh, embed_sum, expm_apply, fidelity, pauli, Axis, CVector, ChainSpec, Operator, StateVector,
    C64,
};

/// Norm drift allowed along a trajectory.
pub const TRAJECTORY_NORM_TOL: f64 = 1e-8;
/// Gap below which a ground space is reported as degenerate.
pub const DEGENERACY_GAP_TOL: f64 = 1e-10;
/// Minimum substeps per drive period.
pub const MIN_SUBSTEPS_PER_PERIOD: usize = 16;
/// Default substeps per drive period.
pub const DEFAULT_SUBSTEPS_PER_PERIOD: usize = 256;

/// Step-grid specification.
#[derive(Debug, Clone, Copy)]
pub enum StepResolution {
    /// Driven runs: `substeps` steps per drive `period`, grid aligned so
    /// that integer periods are hit exactly.
    PerPeriod { period: f64, substeps: usize },
    /// Non-periodic runs: a fixed total step count over [t0, t1].
    TotalSteps(usize),
}

/// Which intermediate states a trajectory keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplePolicy {
    /// Every substep.
    All,
    /// Only stroboscopic points (integer periods) plus the endpoints.
    StroboscopicOnly,
    /// Every k-th substep plus the endpoints.
    Stride(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct PropagationConfig {
    pub resolution: StepResolution,
    pub sample: SamplePolicy,
}

impl PropagationConfig {
    pub fn driven(period: f64, substeps: usize) -> Self {
        Self {
            resolution: StepResolution::PerPeriod { period, substeps },
            sample: SamplePolicy::StroboscopicOnly,
        }
    }

    pub fn total_steps(steps: usize) -> Self {
        Self {
            resolution: StepResolution::TotalSteps(steps),
            sample: SamplePolicy::All,
        }
    }

    pub fn with_sample(mut self, sample: SamplePolicy) -> Self {
        self.sample = sample;
        self
    }
}

/// Sampled trajectory. `stroboscopic_indices` point into `times`/`states`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub stroboscopic_indices: Vec<usize>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial time")
    }
}

/// Propagate `psi0` from `t0` to `t1` (either direction).
pub fn propagate(
    h: &TimeDependentHamiltonian,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    if psi0.dim() != h.chain().dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs chain dim {}",
            psi0.dim(),
            h.chain().dim()
        )));
    }
    let span = t1 - t0;
    let (dt_mag, substeps_per_period) = match cfg.resolution {
        StepResolution::PerPeriod { period, substeps } => {
            if substeps < MIN_SUBSTEPS_PER_PERIOD {
                return Err(Error::InvalidParams(format!(
                    "substeps_per_period must be >= {MIN_SUBSTEPS_PER_PERIOD}"
                )));
            }
            if !period.is_finite() || period <= 0.0 {
                return Err(Error::InvalidParams("period must be positive".into()));
            }
            (period / substeps as f64, Some(substeps))
        }
        StepResolution::TotalSteps(steps) => {
            if steps == 0 {
                return Err(Error::InvalidParams("steps must be >= 1".into()));
            }
            (span.abs() / steps as f64, None)
        }
    };
    if span == 0.0 {
        return Ok(Trajectory {
            times: vec![t0],
            states: vec![psi0.clone()],
            stroboscopic_indices: vec![0],
        });
    }
    let dir = span.signum();
    let dt = dir * dt_mag;
    let n_full = (span.abs() / dt_mag + 1e-9).floor() as usize;

    let keep_stride = match cfg.sample {
        SamplePolicy::All => 1,
        SamplePolicy::Stride(k) => k.max(1),
        SamplePolicy::StroboscopicOnly => substeps_per_period.unwrap_or(n_full.max(1)),
    };

    let mut psi = psi0.clone();
    let mut times = vec![t0];
    let mut states = vec![psi.clone()];
    let mut strob = vec![0usize];

    let record = |k: usize, t: f64, psi: &StateVector, times: &mut Vec<f64>, states: &mut Vec<StateVector>, strob: &mut Vec<usize>| {
        let is_strob = substeps_per_period.is_some_and(|m| k.is_multiple_of(m));
        if k.is_multiple_of(keep_stride) || is_strob || k == n_full {
            times.push(t);
            states.push(psi.clone());
            if is_strob {
                strob.push(states.len() - 1);
            }
        }
    };

    for k in 1..=n_full {
        let t_prev = t0 + (k - 1) as f64 * dt;
        psi = expm_apply(&h.evaluate(t_prev + dt / 2.0), dt, &psi)?;
        check_norm(&psi)?;
        let t = t0 + k as f64 * dt;
        record(k, t, &psi, &mut times, &mut states, &mut strob);
    }
    // shortened final step onto t1 exactly
    let t_reached = t0 + n_full as f64 * dt;
    let rem = t1 - t_reached;
    if rem.abs() > 1e-12 * dt_mag.max(1.0) {
        psi = expm_apply(&h.evaluate(t_reached + rem / 2.0), rem, &psi)?;
        check_norm(&psi)?;
        times.push(t1);
        states.push(psi);
    }
    Ok(Trajectory {
        times,
        states,
        stroboscopic_indices: strob,
    })
}

fn check_norm(psi: &StateVector) -> Result<()> {
    let norm = psi.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite("propagated amplitudes".into()));
    }
    if (norm - 1.0).abs() > TRAJECTORY_NORM_TOL {
        return Err(Error::NormDrift {
            norm,
            tol: TRAJECTORY_NORM_TOL,
        });
    }
    Ok(())
}

/// Fidelity of each stroboscopic sample against ideal evolution under a
/// static target Hamiltonian from the same initial state.
pub fn stroboscopic_fidelities(
    traj: &Trajectory,
    target_h: &Operator,
    psi0: &StateVector,
) -> Result<Vec<(f64, f64)>> {
    if traj.stroboscopic_indices.is_empty() {
        return Err(Error::InvalidParams(
            "trajectory has no stroboscopic samples".into(),
        ));
    }
    let (w, v) = eigh(target_h)?;
    let coeffs = v.adjoint() * psi0.amplitudes();
    let mut out = Vec::with_capacity(traj.stroboscopic_indices.len());
    for &idx in &traj.stroboscopic_indices {
        let t = traj.times[idx];
        let mut phased = coeffs.clone();
        for (k, wk) in w.iter().enumerate() {
            phased[k] *= C64::from_polar(1.0, -wk * t);
        }
        let ideal = StateVector::from_amplitudes(&v * phased)?;
        out.push((t, fidelity(&traj.states[idx], &ideal)?));
    }
    Ok(out)
}

/// Per-site-normalized magnetization `<sum_j s^a_j> / N`.
///
/// For qutrit chains the Pauli is taken on the qubit block, so leaked
/// population contributes zero.
pub fn magnetization(psi: &StateVector, chain: &ChainSpec, axis: Axis) -> Result<f64> {
    let local = match chain.local_dim() {
        2 => pauli(axis),
        3 => qutrit_pauli_block(axis),
        d => return Err(Error::UnsupportedLocalDim(d)),
    };
    let total = embed_sum(&local, 1..=chain.n_sites(), chain)?;
    Ok(total.expectation(psi)? / chain.n_sites() as f64)
}

/// Lowest eigenpair of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// Gap to the first excited level.
    pub gap: f64,
    /// Set when the gap is below [`DEGENERACY_GAP_TOL`]; the returned state
    /// is then one arbitrary member of the ground space.
    pub degenerate: bool,
}

/// Ground state with deterministic phase fixing (first nonzero amplitude
/// made real positive). Degeneracy is flagged, never resolved silently.
pub fn ground_state(h: &Operator) -> Result<GroundState> {
    let (w, v) = eigh(h)?;
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[a].partial_cmp(&w[b]).expect("finite eigenvalues"));
    let i0 = order[0];
    let energy = w[i0];
    let gap = if order.len() > 1 { w[order[1]] - energy } else { f64::INFINITY };
    let mut amps = CVector::from_iterator(v.nrows(), v.column(i0).iter().copied());
    if let Some(first) = amps.iter().position(|a| a.norm() > 1e-12) {
        let phase = amps[first] / amps[first].norm();
        amps /= phase;
    }
    Ok(GroundState {
        energy,
        state: StateVector::from_amplitudes(amps)?,
        gap,
        degenerate: gap < DEGENERACY_GAP_TOL,
    })
}

/// Total weight of `psi` in the ground space of `h` (eigenvalues within
/// `window` of the minimum). This is the fidelity measure used when the
/// target ground space is degenerate.
pub fn ground_space_weight(psi: &StateVector, h: &Operator, window: f64) -> Result<f64> {
    let (w, v) = eigh(h)?;
    let e0 = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut weight = 0.0;
    for (k, wk) in w.iter().enumerate() {
        if wk - e0 <= window {
            let col = v.column(k);
            let mut ov = C64::new(0.0, 0.0);
            for (a, b) in col.iter().zip(psi.amplitudes().iter()) {
                ov += a.conj() * b;
            }
            weight += ov.norm_sqr();
        }
    }
    Ok(weight)
}

/// GHZ-like annealing target `(|+>^N + |->^N)/sqrt(2)` with
/// `|+-> = (|down> +- |up>)/sqrt(2)`.
pub fn ghz_target(n_sites: usize) -> Result<StateVector> {
    if n_sites < 2 {
        return Err(Error::InvalidParams("GHZ target needs N >= 2".into()));
    }
    let up = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let down = CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let sqrt_half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let plus = (&down + &up) * sqrt_half;
    let minus = (&down - &up) * sqrt_half;
    let kron_pow = |s: &CVector| {
        let mut acc = CVector::from_element(1, C64::new(1.0, 0.0));
        for _ in 0..n_sites {
            let mut out = CVector::zeros(acc.len() * 2);
            for (i, ai) in acc.iter().enumerate() {
                for (j, bj) in s.iter().enumerate() {
                    out[i * 2 + j] = ai * bj;
                }
            }
            acc = out;
        }
        acc
    };
    let amps = (kron_pow(&plus) + kron_pow(&minus)) * sqrt_half;
    StateVector::from_amplitudes(amps)
}

/// All-spins-down product state on the chain (transmon vacuum for d = 3).
pub fn all_down_state(chain: &ChainSpec) -> Result<StateVector> {
    match chain.local_dim() {
        // |down> = basis index 1 on every site => last basis state
        2 => StateVector::basis_state(chain.dim(), chain.dim() - 1),
        // |0> occupation on every site => basis index 0
        3 => StateVector::basis_state(chain.dim(), 0),
        d => Err(Error::UnsupportedLocalDim(d)),
    }
}

/// Outcome of an annealing run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub times: Vec<f64>,
    /// Fidelity against the GHZ target at every stored sample.
    pub fidelities: Vec<f64>,
    /// (M_x, M_y, M_z) at every stored sample.
    pub magnetizations: Vec<[f64; 3]>,
    /// Indices of stroboscopic samples.
    pub stroboscopic_indices: Vec<usize>,
    pub final_fidelity: f64,
    /// Fidelity at the last stroboscopic sample (the protocol's readout
    /// point for driven runs).
    pub last_stroboscopic_fidelity: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

/// Anneal from `psi0` over [0, t_final] and score against the GHZ target.
///
/// For qutrit chains the target is the GHZ state embedded in the qubit
/// block, so leakage out of the block is a pure fidelity penalty.
pub fn run_anneal(
    h: &TimeDependentHamiltonian,
    t_final: f64,
    psi0: &StateVector,
    cfg: &PropagationConfig,
) -> Result<RunSummary> {
    let chain = *h.chain();
    let target = match chain.local_dim() {
        2 => ghz_target(chain.n_sites())?,
        3 => embed_qubit_state(&ghz_target(chain.n_sites())?, chain.n_sites())?,
        d => return Err(Error::UnsupportedLocalDim(d)),
    };
    let traj = propagate(h, psi0, 0.0, t_final, cfg)?;
    let mut fidelities = Vec::with_capacity(traj.states.len());
    let mut mags = Vec::with_capacity(traj.states.len());
    for psi in &traj.states {
        fidelities.push(fidelity(psi, &target)?);
        mags.push([
            magnetization(psi, &chain, Axis::X)?,
            magnetization(psi, &chain, Axis::Y)?,
            magnetization(psi, &chain, Axis::Z)?,
        ]);
    }
    for f in &fidelities {
        if !(0.0..=1.0 + 1e-12).contains(f) {
            return Err(Error::NonFinite("fidelity out of [0, 1]".into()));
        }
    }
    let final_fidelity = *fidelities.last().expect("at least the initial sample");
    let last_strob = traj
        .stroboscopic_indices
        .iter()
        .copied().rfind(|&i| i != 0)
        .map(|i| fidelities[i]);
    Ok(RunSummary {
        times: traj.times,
        fidelities,
        magnetizations: mags,
        stroboscopic_indices: traj.stroboscopic_indices,
        final_fidelity,
        last_stroboscopic_fidelity: last_strob,
        metadata: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        build_ising_driven, build_target_ising, build_xy_chain, AnnealSchedule, IsingDriveParams,
    };
    use crate::tensor::{expm_hermitian, kron};
    use approx::assert_abs_diff_eq;

    fn qubit_chain(n: usize) -> ChainSpec {
        ChainSpec::qubits(n).unwrap()
    }

    #[test]
    fn constant_hamiltonian_is_exact_for_any_step_count() {
        let chain = qubit_chain(3);
        let h0 = build_xy_chain(&chain, -1.0).unwrap();
        let td = TimeDependentHamiltonian::new(chain, h0.clone()).unwrap();
        let psi0 = all_down_state(&chain).unwrap();
        // make it non-trivial: start from a superposition
        let mut amps = psi0.amplitudes().clone();
        amps[1] = C64::new(0.6, 0.2);
        amps[6] = C64::new(-0.3, 0.4);
        let psi0 = StateVector::normalized(amps).unwrap();
        let t1 = 1.7;
        for steps in [1usize, 7, 64] {
            let traj = propagate(&td, &psi0, 0.0, t1, &PropagationConfig::total_steps(steps)).unwrap();
            let direct = expm_hermitian(&h0, t1).unwrap().apply(&psi0).unwrap();
            let dev = 1.0 - fidelity(traj.final_state(), &direct).unwrap();
            assert!(dev < 1e-10, "steps={steps}: deviation {dev:.2e}");
        }
    }

    #[test]
    fn driven_self_convergence_and_reference() {
        let chain = qubit_chain(2);
        let chi = crate::floquet::calibrate_ising_chi();
        let p = IsingDriveParams::new(-1.0, 1.0, chi, 30.0).unwrap();
        let h = build_ising_driven(&chain, &p, None).unwrap();
        let psi0 = all_down_state(&chain).unwrap();
        let period = p.period();
        let t1 = 10.0 * period;
        let run = |m: usize| {
            propagate(&h, &psi0, 0.0, t1, &PropagationConfig::driven(period, m))
                .unwrap()
                .final_state()
                .clone()
        };
        let (a, b) = (run(256), run(512));
        assert!(1.0 - fidelity(&a, &b).unwrap() < 1e-6);
        // against a reference at 8x resolution
        let reference = run(4096);
        assert!(1.0 - fidelity(&b, &reference).unwrap() < 1e-8);
    }

    #[test]
    fn backward_round_trip() {
        let chain = qubit_chain(3);
        let chi = crate::floquet::calibrate_ising_chi();
        let p = IsingDriveParams::new(-1.0, 1.5, chi, 25.0).unwrap();
        let h = build_ising_driven(&chain, &p, None).unwrap();
        let psi0 = all_down_state(&chain).unwrap();
        let period = p.period();
        let cfg = PropagationConfig::driven(period, 128);
        let fwd = propagate(&h, &psi0, 0.0, 5.0 * period, &cfg).unwrap();
        let back = propagate(&h, fwd.final_state(), 5.0 * period, 0.0, &cfg).unwrap();
        assert!(1.0 - fidelity(back.final_state(), &psi0).unwrap() < 1e-8);
    }

    #[test]
    fn energy_conserved_for_static_hamiltonian() {
        let chain = qubit_chain(3);
        let h0 = build_target_ising(&chain, -1.0, 0.8).unwrap();
        let td = TimeDependentHamiltonian::new(chain, h0.clone()).unwrap();
        let mut amps = CVector::zeros(chain.dim());
        amps[0] = C64::new(0.5, 0.0);
        amps[3] = C64::new(0.5, -0.5);
        amps[7] = C64::new(0.0, 0.5);
        let psi0 = StateVector::normalized(amps).unwrap();
        let traj = propagate(&td, &psi0, 0.0, 4.0, &PropagationConfig::total_steps(400)).unwrap();
        let e0 = h0.expectation(&psi0).unwrap();
        for psi in &traj.states {
            assert_abs_diff_eq!(h0.expectation(psi).unwrap(), e0, epsilon = 1e-9);
        }
    }

    #[test]
    fn stroboscopic_fidelity_zero_drive_is_unity() {
        let chain = qubit_chain(2);
        let p = IsingDriveParams::new(-1.0, 0.0, 1e-12, 20.0).unwrap();
        let h = build_ising_driven(&chain, &p, None).unwrap();
        let mut amps = CVector::zeros(4);
        amps[0] = C64::new(0.8, 0.0);
        amps[2] = C64::new(0.0, 0.6);
        let psi0 = StateVector::normalized(amps).unwrap();
        let period = p.period();
        let traj = propagate(&h, &psi0, 0.0, 6.0 * period, &PropagationConfig::driven(period, 64)).unwrap();
        let target = build_xy_chain(&chain, -1.0).unwrap();
        let series = stroboscopic_fidelities(&traj, &target, &psi0).unwrap();
        assert_eq!(series.len(), 7); // n = 0..6
        assert_abs_diff_eq!(series[0].1, 1.0, epsilon = 1e-12);
        for (_, f) in series {
            assert!(f > 1.0 - 1e-9);
        }
    }

    #[test]
    fn magnetization_product_states() {
        let chain = qubit_chain(3);
        let down = all_down_state(&chain).unwrap();
        assert_abs_diff_eq!(magnetization(&down, &chain, Axis::Z).unwrap(), -1.0, epsilon = 1e-14);

        // |+>^N along x
        let plus = CVector::from_vec(vec![
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ]);
        let psi = StateVector::product_state(&[plus.clone(), plus.clone(), plus]).unwrap();
        assert_abs_diff_eq!(magnetization(&psi, &chain, Axis::X).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn magnetization_fig2_initial_state() {
        // odd sites (|up> - i|down>)/sqrt(2)  (an eigenstate of sy with -1),
        // even sites |up>: M_z = 1/2, M_y = -1/2, M_x = 0 for N = 4
        let chain = qubit_chain(4);
        let up = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let odd = CVector::from_vec(vec![
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2),
        ]);
        let psi = StateVector::product_state(&[odd.clone(), up.clone(), odd, up]).unwrap();
        assert_abs_diff_eq!(magnetization(&psi, &chain, Axis::Z).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(magnetization(&psi, &chain, Axis::Y).unwrap(), -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(magnetization(&psi, &chain, Axis::X).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn ground_state_of_sigma_z() {
        let gs = ground_state(&pauli(Axis::Z)).unwrap();
        assert_abs_diff_eq!(gs.energy, -1.0, epsilon = 1e-14);
        assert!(!gs.degenerate);
        assert_abs_diff_eq!(gs.state.amplitudes()[1].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ground_state_flags_ising_degeneracy() {
        let chain = qubit_chain(4);
        let h = build_target_ising(&chain, -1.0, 0.0).unwrap();
        let gs = ground_state(&h).unwrap();
        assert!(gs.degenerate, "gap = {}", gs.gap);
    }

    #[test]
    fn ground_state_energy_against_power_iteration() {
        // independent oracle: inverse-shifted power iteration uses only
        // matrix-vector products, not the eigendecomposition path
        let chain = qubit_chain(4);
        let h = crate::models::build_target_xyz(&chain, -1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0).unwrap();
        let gs = ground_state(&h).unwrap();

        let shift = 10.0;
        let m = Operator::identity(chain.dim())
            .scale(shift)
            .add_scaled(-1.0, &h)
            .unwrap(); // shift - H: largest eigenvalue = shift - E0
        let mut v = CVector::from_element(chain.dim(), C64::new(1.0, 0.0));
        v /= C64::new(v.norm(), 0.0);
        let mut lambda = 0.0;
        for _ in 0..6000 {
            let w = m.matrix() * &v;
            lambda = w.norm();
            v = w / C64::new(lambda, 0.0);
        }
        let e0_oracle = shift - lambda;
        assert_abs_diff_eq!(gs.energy, e0_oracle, epsilon = 1e-6);
        assert_abs_diff_eq!(gs.energy, -3.263979859560194, epsilon = 1e-9);
    }

    #[test]
    fn ghz_properties() {
        let chain = qubit_chain(4);
        let ghz = ghz_target(4).unwrap();
        assert_abs_diff_eq!(ghz.norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(magnetization(&ghz, &chain, Axis::X).unwrap(), 0.0, epsilon = 1e-14);
        // GHZ lies entirely in the degenerate ground space of the hz -> 0 model
        let h = build_target_ising(&chain, -1.0, 0.0).unwrap();
        let w = ground_space_weight(&ghz, &h, 1e-9).unwrap();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn anneal_adiabatic_limit() {
        let chain = qubit_chain(4);
        let tf = 500.0;
        let sched = AnnealSchedule::linear(tf).unwrap();
        // ideal continuous annealer: static target with interpolating drives
        let hx = build_target_ising(&chain, -1.0, 0.0).unwrap();
        let z = embed_sum(&pauli(Axis::Z), 1..=4, &chain).unwrap();
        let mut td = TimeDependentHamiltonian::new(chain, hx.clone()).unwrap();
        let sc = sched;
        td.push_drive(std::sync::Arc::new(move |t| sc.s(t)), z).unwrap();
        td.push_drive(std::sync::Arc::new(move |t| -sc.s(t)), hx).unwrap();
        let psi0 = all_down_state(&chain).unwrap();
        let cfg = PropagationConfig::total_steps(20_000).with_sample(SamplePolicy::Stride(2000));
        let summary = run_anneal(&td, tf, &psi0, &cfg).unwrap();
        assert!(
            summary.final_fidelity > 0.999,
            "adiabatic limit F = {}",
            summary.final_fidelity
        );
    }

    #[test]
    fn floquet_consistency_omega_ladder() {
        // stroboscopic driven evolution approaches evolution under the
        // averaged effective Hamiltonian as omega grows
        let chain = qubit_chain(2);
        let chi = crate::floquet::calibrate_ising_chi();
        let t_total = 8.0;
        let psi0 = all_down_state(&chain).unwrap();
        let mut infids = Vec::new();
        for omega in [100.0, 200.0, 400.0] {
            let p = IsingDriveParams::new(-1.0, 1.0, chi, omega).unwrap();
            let h = build_ising_driven(&chain, &p, None).unwrap();
            let period = p.period();
            let n = (t_total / period).floor();
            let t_end = n * period;
            let traj = propagate(&h, &psi0, 0.0, t_end, &PropagationConfig::driven(period, 256)).unwrap();
            let cfg = crate::floquet::DriveConfig::ising(omega, chi).unwrap();
            let heff = crate::floquet::build_floquet_hamiltonian(
                &chain,
                -1.0,
                &crate::floquet::xi_averaged(&cfg),
            )
            .unwrap()
            .add_scaled(1.0, &embed_sum(&pauli(Axis::Z), 1..=2, &chain).unwrap())
            .unwrap();
            let ideal = expm_hermitian(&heff, t_end).unwrap().apply(&psi0).unwrap();
            infids.push(1.0 - fidelity(traj.final_state(), &ideal).unwrap());
        }
        assert!(infids[0] > infids[1] && infids[1] > infids[2], "{infids:?}");
        assert!(infids[2] < 1e-3, "{infids:?}");
    }

    #[test]
    fn rejects_too_few_substeps() {
        let chain = qubit_chain(2);
        let h = TimeDependentHamiltonian::new(chain, Operator::zeros(4)).unwrap();
        let psi0 = all_down_state(&chain).unwrap();
        let cfg = PropagationConfig::driven(1.0, 8);
        assert!(propagate(&h, &psi0, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn kron_sanity_for_product_states() {
        // product_state and kron agree on a 2-site example
        let up = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let down = CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let psi = StateVector::product_state(&[up, down]).unwrap();
        assert_abs_diff_eq!(psi.amplitudes()[1].re, 1.0, epsilon = 1e-15);
        let _ = kron(&pauli(Axis::X), &pauli(Axis::Z));
    }
}
