//! Digital (Trotterized) competitor circuits and the gate-error budget.
//!
//! The transverse-Ising step composes the native XY evolution with its
//! spin-echo-rotated copy (which flips the YY term) and a z-field layer.
//! Two compositions are provided: the literal first-order layer sequence
//! and a symmetrized (second-order) arrangement used for digitized
//! annealing. The XYZ step sequences XY/XZ/YZ/Z layers whose ordering is
//! optimized exhaustively over all 24 permutations.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::models::AnnealSchedule;
use crate::propagation::all_down_state;
use crate::tensor::{
    embed, embed_sum, expm_hermitian, fidelity, pauli, Axis, ChainSpec, Operator, StateVector,
};

/// Layer tags of the digital circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayerTag {
    Xy,
    Xz,
    Yz,
    Z,
    Rx,
    RxDag,
}

impl LayerTag {
    pub fn name(self) -> &'static str {
        match self {
            LayerTag::Xy => "XY",
            LayerTag::Xz => "XZ",
            LayerTag::Yz => "YZ",
            LayerTag::Z => "Z",
            LayerTag::Rx => "RX",
            LayerTag::RxDag => "RX_DAG",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "XY" => Ok(LayerTag::Xy),
            "XZ" => Ok(LayerTag::Xz),
            "YZ" => Ok(LayerTag::Yz),
            "Z" => Ok(LayerTag::Z),
            "RX" => Ok(LayerTag::Rx),
            "RX_DAG" => Ok(LayerTag::RxDag),
            other => Err(Error::InvalidLayer(other.to_string())),
        }
    }
}

/// Composition of the transverse-Ising Trotter step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOrder {
    /// Literal layer sequence: XY, rotated XY, Z.
    First,
    /// Symmetrized palindrome: Z/2, rotated-XY/2, XY, rotated-XY/2, Z/2.
    /// Second-order accurate; used for digitized annealing.
    Symmetric,
}

/// How the annealing schedule is sampled inside step k of `n` over [0, t_f].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleSampling {
    /// s((k - 1/2) dt) — matches the integrated phase of a linear ramp.
    Midpoint,
    /// s(k dt) — kept behind a flag for sensitivity checks.
    Endpoint,
}

impl ScheduleSampling {
    fn sample_time(self, k: usize, dt: f64) -> f64 {
        match self {
            ScheduleSampling::Midpoint => (k as f64 - 0.5) * dt,
            ScheduleSampling::Endpoint => k as f64 * dt,
        }
    }
}

/// Interaction-layer strengths (alpha_xy, alpha_xz, alpha_yz) in units of J.
pub type Alphas = [f64; 3];

/// Sum over nearest-neighbor pairs of `coeff * (s^a s^a + s^b s^b)`,
/// restricted to odd-starting or even-starting bonds.
fn pair_sum(
    chain: &ChainSpec,
    coeff: f64,
    axes: (Axis, Axis),
    odd_pairs: bool,
) -> Result<Operator> {
    let mut h = Operator::zeros(chain.dim());
    let start = if odd_pairs { 1 } else { 2 };
    let (a, b) = axes;
    let mut site = start;
    while site < chain.n_sites() {
        for axis in [a, b] {
            let bond = embed(&pauli(axis), site, chain)?.mul(&embed(&pauli(axis), site + 1, chain)?)?;
            h = h.add_scaled(coeff, &bond)?;
        }
        site += 2;
    }
    Operator::hermitian_from_matrix(h.into_matrix())
}

/// One two-axis interaction layer: even-starting bonds then odd-starting
/// bonds, each as a single exact exponential of the bond sum.
fn interaction_layer(
    chain: &ChainSpec,
    coeff: f64,
    axes: (Axis, Axis),
    dt: f64,
) -> Result<Operator> {
    let u_odd = expm_hermitian(&pair_sum(chain, coeff, axes, true)?, dt)?;
    let u_even = expm_hermitian(&pair_sum(chain, coeff, axes, false)?, dt)?;
    u_odd.mul(&u_even)
}

fn z_layer(chain: &ChainSpec, hz_eff: f64, dt: f64) -> Result<Operator> {
    let z = embed_sum(&pauli(Axis::Z), 1..=chain.n_sites(), chain)?;
    expm_hermitian(&z, dt * hz_eff)
}

/// pi x-rotation on the even sublattice, `exp(-i (pi/2) sum_even sx)`.
fn even_pi_x(chain: &ChainSpec) -> Result<Operator> {
    let x = embed_sum(&pauli(Axis::X), chain.even_sites(), chain)?;
    expm_hermitian(&x, std::f64::consts::FRAC_PI_2)
}

/// One transverse-Ising Trotter step of width `dt`.
///
/// Layers: `U_xy` applies the native XY interaction with J/2 per bond; its
/// copy conjugated by even-site pi x-rotations carries the YY term with
/// flipped sign, so the product accumulates the pure XX coupling at J plus
/// the z-field layer. The large-step-count limit is the transverse-Ising
/// evolution.
pub fn trotter_step_ising(
    chain: &ChainSpec,
    j: f64,
    hz_eff: f64,
    dt: f64,
    order: StepOrder,
) -> Result<Operator> {
    if chain.local_dim() != 2 {
        return Err(Error::UnsupportedLocalDim(chain.local_dim()));
    }
    let rx = even_pi_x(chain)?;
    let rx_dag = rx.adjoint();
    match order {
        StepOrder::First => {
            let u_xy = interaction_layer(chain, j / 2.0, (Axis::X, Axis::Y), dt)?;
            let rotated = rx_dag.mul(&u_xy)?.mul(&rx)?;
            let uz = z_layer(chain, hz_eff, dt)?;
            // temporal order: XY, rotated XY, Z
            uz.mul(&rotated)?.mul(&u_xy)
        }
        StepOrder::Symmetric => {
            let u_xy = interaction_layer(chain, j / 2.0, (Axis::X, Axis::Y), dt)?;
            let rotated_half = rx_dag
                .mul(&interaction_layer(chain, j / 2.0, (Axis::X, Axis::Y), dt / 2.0)?)?
                .mul(&rx)?;
            let uz_half = z_layer(chain, hz_eff, dt / 2.0)?;
            uz_half
                .mul(&rotated_half)?
                .mul(&u_xy)?
                .mul(&rotated_half)?
                .mul(&uz_half)
        }
    }
}

/// One XYZ Trotter step: the layers in `layer_order` (temporal order),
/// with interaction strengths `alphas * j` and z-field `hz_eff`.
pub fn trotter_step_xyz(
    chain: &ChainSpec,
    j: f64,
    alphas: Alphas,
    hz_eff: f64,
    dt: f64,
    layer_order: &[LayerTag],
) -> Result<Operator> {
    if chain.local_dim() != 2 {
        return Err(Error::UnsupportedLocalDim(chain.local_dim()));
    }
    if !alphas.iter().all(|a| a.is_finite()) {
        return Err(Error::NonFinite("alphas".into()));
    }
    let mut u = Operator::identity(chain.dim());
    for tag in layer_order {
        let layer = xyz_layer(chain, j, alphas, hz_eff, dt, *tag)?;
        u = layer.mul(&u)?;
    }
    Ok(u)
}

fn xyz_layer(
    chain: &ChainSpec,
    j: f64,
    alphas: Alphas,
    hz_eff: f64,
    dt: f64,
    tag: LayerTag,
) -> Result<Operator> {
    match tag {
        LayerTag::Xy => interaction_layer(chain, alphas[0] * j, (Axis::X, Axis::Y), dt),
        LayerTag::Xz => interaction_layer(chain, alphas[1] * j, (Axis::X, Axis::Z), dt),
        LayerTag::Yz => interaction_layer(chain, alphas[2] * j, (Axis::Y, Axis::Z), dt),
        LayerTag::Z => z_layer(chain, hz_eff, dt),
        other => Err(Error::InvalidLayer(other.name().to_string())),
    }
}

/// Digital step plan.
#[derive(Debug, Clone)]
pub struct TrotterPlan {
    pub n_steps: usize,
    pub composition: StepComposition,
    pub sampling: ScheduleSampling,
}

/// What one Trotter step is made of.
#[derive(Debug, Clone)]
pub enum StepComposition {
    Ising(StepOrder),
    Xyz { alphas: Alphas, layer_order: Vec<LayerTag> },
}

impl TrotterPlan {
    pub fn ising(n_steps: usize, order: StepOrder) -> Self {
        Self {
            n_steps,
            composition: StepComposition::Ising(order),
            sampling: ScheduleSampling::Midpoint,
        }
    }

    pub fn xyz(n_steps: usize, alphas: Alphas, layer_order: Vec<LayerTag>) -> Self {
        Self {
            n_steps,
            composition: StepComposition::Xyz { alphas, layer_order },
            sampling: ScheduleSampling::Midpoint,
        }
    }

    pub fn dt(&self, t_total: f64) -> f64 {
        t_total / self.n_steps as f64
    }
}

/// Result of a digitized annealing run.
#[derive(Debug, Clone)]
pub struct DigitalRun {
    pub final_state: StateVector,
    /// Fidelity against the supplied target after each step (index 0 is the
    /// initial state).
    pub fidelities: Vec<f64>,
    pub final_fidelity: f64,
}

/// Digitized annealing from `|down>^N`: step k uses the interpolated
/// couplings `J_k = (1 - s) J`, `hz_k = s hz` with `s` sampled per the plan.
pub fn digital_anneal(
    chain: &ChainSpec,
    plan: &TrotterPlan,
    schedule: &AnnealSchedule,
    hz: f64,
    j: f64,
    target: &StateVector,
) -> Result<DigitalRun> {
    if plan.n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be >= 1".into()));
    }
    let dt = plan.dt(schedule.t_final());
    let mut psi = all_down_state(chain)?;
    let mut fids = Vec::with_capacity(plan.n_steps + 1);
    fids.push(fidelity(&psi, target)?);
    for k in 1..=plan.n_steps {
        let s = schedule.s(plan.sampling.sample_time(k, dt));
        let (jk, hzk) = ((1.0 - s) * j, s * hz);
        let step = match &plan.composition {
            StepComposition::Ising(order) => trotter_step_ising(chain, jk, hzk, dt, *order)?,
            StepComposition::Xyz { alphas, layer_order } => {
                trotter_step_xyz(chain, jk, *alphas, hzk, dt, layer_order)?
            }
        };
        psi = step.apply(&psi)?;
        fids.push(fidelity(&psi, target)?);
    }
    let final_fidelity = *fids.last().expect("at least the initial fidelity");
    Ok(DigitalRun {
        final_state: psi,
        fidelities: fids,
        final_fidelity,
    })
}

/// Exhaustive search over the 24 permutations of {XY, XZ, YZ, Z} for the
/// XYZ digitized anneal. Ties (identical fidelity) resolve to the
/// lexicographically first order.
pub fn optimize_step_order(
    chain: &ChainSpec,
    j: f64,
    alphas: Alphas,
    hz: f64,
    schedule: &AnnealSchedule,
    n_steps: usize,
    target: &StateVector,
) -> Result<(Vec<LayerTag>, f64)> {
    if n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be >= 1".into()));
    }
    let dt = schedule.t_final() / n_steps as f64;
    let tags = [LayerTag::Xy, LayerTag::Xz, LayerTag::Yz, LayerTag::Z];

    // per-step layer cache shared by all permutations
    let mut cache: Vec<[Operator; 4]> = Vec::with_capacity(n_steps);
    for k in 1..=n_steps {
        let s = schedule.s((k as f64 - 0.5) * dt);
        let (jk, hzk) = ((1.0 - s) * j, s * hz);
        let row = [
            xyz_layer(chain, jk, alphas, hzk, dt, LayerTag::Xy)?,
            xyz_layer(chain, jk, alphas, hzk, dt, LayerTag::Xz)?,
            xyz_layer(chain, jk, alphas, hzk, dt, LayerTag::Yz)?,
            xyz_layer(chain, jk, alphas, hzk, dt, LayerTag::Z)?,
        ];
        cache.push(row);
    }
    let idx_of = |t: LayerTag| tags.iter().position(|x| *x == t).expect("tag in set");

    let psi0 = all_down_state(chain)?;
    let mut best: Option<(Vec<LayerTag>, f64)> = None;
    let mut count = 0usize;
    for perm in tags.iter().copied().permutations(4) {
        count += 1;
        let mut psi = psi0.clone();
        for row in &cache {
            for tag in &perm {
                psi = row[idx_of(*tag)].apply(&psi)?;
            }
        }
        let f = fidelity(&psi, target)?;
        match &best {
            Some((_, fb)) if f <= *fb => {}
            _ => best = Some((perm.clone(), f)),
        }
    }
    debug_assert_eq!(count, 24);
    best.ok_or_else(|| Error::InvalidParams("empty permutation set".into()))
}

/// Gate-error budget: identical error `eps` for single- and two-qubit gates.
#[derive(Debug, Clone, Copy)]
pub struct ErrorModel {
    pub eps: f64,
}

impl ErrorModel {
    /// Gate-time constant: `t_gate = C_GATE / A`.
    pub const C_GATE: f64 = 35.0;

    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParams("eps must lie in [0, 1)".into()));
        }
        Ok(Self { eps })
    }

    /// Gates per Trotter step, `5N - 4`.
    pub fn gates_per_step(n_sites: usize) -> usize {
        5 * n_sites - 4
    }

    /// Minimal gate time at anharmonicity `a`.
    pub fn t_gate(a: f64) -> f64 {
        Self::C_GATE / a
    }

    /// Wall-clock duration of one Trotter step: serial two-qubit gates over
    /// the N-1 bonds, twice per step, plus three single-qubit layers.
    pub fn t_trotter(n_sites: usize, t_gate: f64) -> f64 {
        (2 * (n_sites - 1) + 3) as f64 * t_gate
    }

    /// Error of a single Trotter step, `(5N - 4) eps`.
    pub fn step_error(&self, n_sites: usize) -> f64 {
        Self::gates_per_step(n_sites) as f64 * self.eps
    }

    /// `F_tot = (1 - eps_Tr)^{n_steps} (1 - eps_dig)`.
    pub fn total_fidelity(&self, n_sites: usize, n_steps: usize, eps_dig: f64) -> f64 {
        (1.0 - self.step_error(n_sites)).powi(n_steps as i32) * (1.0 - eps_dig)
    }
}

/// Free-function form of the budget formula.
pub fn total_fidelity(em: &ErrorModel, n_sites: usize, n_steps: usize, eps_dig: f64) -> f64 {
    em.total_fidelity(n_sites, n_steps, eps_dig)
}

/// Minimize `1 - F_tot` over a table of digitization errors, honoring an
/// optional step budget. Ties resolve to the smaller step count.
pub fn optimize_n_trotter(
    em: &ErrorModel,
    n_sites: usize,
    eps_dig_table: &BTreeMap<usize, f64>,
    budget: Option<usize>,
) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (&n_steps, &eps_dig) in eps_dig_table {
        if budget.is_some_and(|b| n_steps > b) {
            continue;
        }
        let infid = 1.0 - em.total_fidelity(n_sites, n_steps, eps_dig);
        match best {
            Some((_, b)) if infid >= b => {}
            _ => best = Some((n_steps, infid)),
        }
    }
    best.ok_or(Error::NoFeasibleProtocol(budget.unwrap_or(0)))
}
