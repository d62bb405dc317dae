//! Hamiltonian builders: the static XY chain, the driven chains that
//! engineer transverse-Ising and XYZ dynamics, the ideal target models,
//! annealing schedules, and the three-level transmon chain with finite
//! anharmonicity.
//!
//! Annealing convention used throughout: the schedule interpolates the
//! Hamiltonian, ramping the coupling up as `1 - s(t)` while the transverse
//! field is turned off as `s(t) = 1 - t/t_f`. The trivial initial state
//! `|down>^N` is then the exact ground state at `t = 0`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::floquet::bessel_j0;
use crate::tensor::{embed, embed_sum, ladder, pauli, Axis, ChainSpec, Operator, C64};

/// Scalar drive coefficient as a function of time.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One time-dependent term `c(t) * O` with Hermitian `O`.
pub struct DriveTerm {
    coeff: Coefficient,
    op: Operator,
}

impl DriveTerm {
    pub fn new(coeff: Coefficient, op: Operator) -> Result<Self> {
        if !op.is_hermitian() {
            return Err(Error::NotHermitian(op.hermiticity_deviation()));
        }
        Ok(Self { coeff, op })
    }

    pub fn coeff_at(&self, t: f64) -> f64 {
        (self.coeff)(t)
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }
}

/// `H(t) = H_static + sum_k c_k(t) O_k` on a fixed chain.
pub struct TimeDependentHamiltonian {
    chain: ChainSpec,
    static_part: Operator,
    drive_terms: Vec<DriveTerm>,
}

impl TimeDependentHamiltonian {
    pub fn new(chain: ChainSpec, static_part: Operator) -> Result<Self> {
        if static_part.dim() != chain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "static part dim {} vs chain dim {}",
                static_part.dim(),
                chain.dim()
            )));
        }
        if !static_part.is_hermitian() {
            return Err(Error::NotHermitian(static_part.hermiticity_deviation()));
        }
        Ok(Self {
            chain,
            static_part,
            drive_terms: Vec::new(),
        })
    }

    pub fn push_drive(&mut self, coeff: Coefficient, op: Operator) -> Result<()> {
        if op.dim() != self.chain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "drive operator dim {} vs chain dim {}",
                op.dim(),
                self.chain.dim()
            )));
        }
        self.drive_terms.push(DriveTerm::new(coeff, op)?);
        Ok(())
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn drive_terms(&self) -> &[DriveTerm] {
        &self.drive_terms
    }

    /// Assemble `H(t)`. The parts are verified Hermitian at construction and
    /// the coefficients are real, so the sum is Hermitian by closure.
    pub fn evaluate(&self, t: f64) -> Operator {
        let mut mat = self.static_part.matrix().clone();
        for term in &self.drive_terms {
            let c = term.coeff_at(t);
            if c != 0.0 {
                mat += term.operator().matrix() * C64::new(c, 0.0);
            }
        }
        Operator::hermitian_unchecked(mat)
    }
}

/// Linear annealing ramp `s(t) = 1 - t/t_f`, clamped to [0, 1] so that
/// trajectories may overrun slightly without sign flips.
#[derive(Debug, Clone, Copy)]
pub struct AnnealSchedule {
    t_final: f64,
}

impl AnnealSchedule {
    pub fn linear(t_final: f64) -> Result<Self> {
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(Error::InvalidParams("t_final must be positive".into()));
        }
        Ok(Self { t_final })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Ramp value `s(t)`, 1 at t = 0, 0 at t = t_f, clamped outside.
    pub fn s(&self, t: f64) -> f64 {
        (1.0 - t / self.t_final).clamp(0.0, 1.0)
    }
}

/// Drive parameters for the transverse-Ising recipe.
///
/// `chi` is the rotation-angle amplitude of the even-sublattice x drive
/// (`main_text` convention: `lambda = chi / 2`). The conversion is explicit:
/// use [`IsingDriveParams::from_main_text_lambda`] for numbers quoted in
/// that convention.
#[derive(Debug, Clone, Copy)]
pub struct IsingDriveParams {
    pub j: f64,
    pub hz: f64,
    pub chi: f64,
    pub omega: f64,
}

impl IsingDriveParams {
    pub fn new(j: f64, hz: f64, chi: f64, omega: f64) -> Result<Self> {
        if !chi.is_finite() || chi <= 0.0 {
            return Err(Error::InvalidParams("chi must be positive".into()));
        }
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParams("omega must be positive".into()));
        }
        if !(j.is_finite() && hz.is_finite()) {
            return Err(Error::NonFinite("IsingDriveParams".into()));
        }
        Ok(Self { j, hz, chi, omega })
    }

    /// Same parameters with the drive amplitude quoted in the `main_text`
    /// convention.
    pub fn from_main_text_lambda(j: f64, hz: f64, lambda: f64, omega: f64) -> Result<Self> {
        Self::new(j, hz, 2.0 * lambda, omega)
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Drive parameters for the XYZ recipe (uniform x drive on all sites).
#[derive(Debug, Clone, Copy)]
pub struct XYZDriveParams {
    pub j: f64,
    pub chi: f64,
    pub omega: f64,
    pub hz: f64,
}

impl XYZDriveParams {
    pub fn new(j: f64, chi: f64, omega: f64, hz: f64) -> Result<Self> {
        if !chi.is_finite() || chi <= 0.0 {
            return Err(Error::InvalidParams("chi must be positive".into()));
        }
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParams("omega must be positive".into()));
        }
        if !(j.is_finite() && hz.is_finite()) {
            return Err(Error::NonFinite("XYZDriveParams".into()));
        }
        Ok(Self { j, chi, omega, hz })
    }
}

/// Transmon chain parameters (three-level sites).
pub struct TransmonParams {
    pub j: f64,
    pub anharmonicity: f64,
    /// Per-site detuning Delta_j(t) multiplying n_j.
    pub detuning: Vec<Coefficient>,
    /// Per-site real drive Omega_j(t) multiplying (a_j + a_j^dag).
    pub drive: Vec<Coefficient>,
}

/// Isotropic XY chain `sum_j J (sx_j sx_{j+1} + sy_j sy_{j+1})`.
///
/// Conserves total sigma^z; requires N >= 2.
pub fn build_xy_chain(chain: &ChainSpec, j: f64) -> Result<Operator> {
    if chain.local_dim() != 2 {
        return Err(Error::UnsupportedLocalDim(chain.local_dim()));
    }
    if chain.n_sites() < 2 {
        return Err(Error::InvalidParams("XY chain needs N >= 2".into()));
    }
    let sx = pauli(Axis::X);
    let sy = pauli(Axis::Y);
    let mut h = Operator::zeros(chain.dim());
    for site in 1..chain.n_sites() {
        let xx = embed(&sx, site, chain)?.mul(&embed(&sx, site + 1, chain)?)?;
        let yy = embed(&sy, site, chain)?.mul(&embed(&sy, site + 1, chain)?)?;
        h = h.add_scaled(j, &xx)?.add_scaled(j, &yy)?;
    }
    Operator::hermitian_from_matrix(h.into_matrix())
}

/// Transverse Ising target `J_sim sum sx sx + hz sum sz`.
pub fn build_target_ising(chain: &ChainSpec, j_sim: f64, hz: f64) -> Result<Operator> {
    build_target_xyz(chain, j_sim, 0.0, 0.0, hz)
}

/// XYZ target `sum (Jx sx sx + Jy sy sy + Jz sz sz) + hz sum sz`.
pub fn build_target_xyz(chain: &ChainSpec, jx: f64, jy: f64, jz: f64, hz: f64) -> Result<Operator> {
    if chain.local_dim() != 2 {
        return Err(Error::UnsupportedLocalDim(chain.local_dim()));
    }
    if chain.n_sites() < 2 {
        return Err(Error::InvalidParams("target model needs N >= 2".into()));
    }
    let mut h = Operator::zeros(chain.dim());
    for (axis, coupling) in [(Axis::X, jx), (Axis::Y, jy), (Axis::Z, jz)] {
        if coupling == 0.0 {
            continue;
        }
        let s = pauli(axis);
        for site in 1..chain.n_sites() {
            let bond = embed(&s, site, chain)?.mul(&embed(&s, site + 1, chain)?)?;
            h = h.add_scaled(coupling, &bond)?;
        }
    }
    if hz != 0.0 {
        let z_sum = embed_sum(&pauli(Axis::Z), 1..=chain.n_sites(), chain)?;
        h = h.add_scaled(hz, &z_sum)?;
    }
    Operator::hermitian_from_matrix(h.into_matrix())
}

/// Driven chain realizing transverse-Ising dynamics in the rotating frame.
///
/// Static part: the XY chain. Drive terms: even-site sx with coefficient
/// `(chi/2) omega cos(omega t)`, even-site sz with the Bessel-compensated
/// envelope `2 hz / (1 + J0(2 chi)) * cos(chi sin(omega t))`, odd-site sz
/// with constant `hz`.
///
/// With a schedule, both `hz` pieces are multiplied by `s(t)` and the XY
/// coupling is ramped by `1 - s(t)` (annealing by interpolation).
pub fn build_ising_driven(
    chain: &ChainSpec,
    p: &IsingDriveParams,
    schedule: Option<&AnnealSchedule>,
) -> Result<TimeDependentHamiltonian> {
    let static_part = build_xy_chain(chain, p.j)?;
    let mut h = TimeDependentHamiltonian::new(*chain, static_part)?;

    let x_even = embed_sum(&pauli(Axis::X), chain.even_sites(), chain)?;
    let z_even = embed_sum(&pauli(Axis::Z), chain.even_sites(), chain)?;
    let z_odd = embed_sum(&pauli(Axis::Z), chain.odd_sites(), chain)?;

    let (chi, omega, hz) = (p.chi, p.omega, p.hz);
    let prefactor = 2.0 * hz / (1.0 + bessel_j0(2.0 * chi)?);
    let sched = schedule.copied();
    let s_of = move |t: f64| sched.map_or(1.0, |sc| sc.s(t));

    h.push_drive(
        Arc::new(move |t| (chi / 2.0) * omega * (omega * t).cos()),
        x_even,
    )?;
    h.push_drive(
        Arc::new(move |t| s_of(t) * prefactor * (chi * (omega * t).sin()).cos()),
        z_even,
    )?;
    h.push_drive(Arc::new(move |t| s_of(t) * hz), z_odd)?;
    if schedule.is_some() {
        // interpolation ramp on the coupling, expressed as a drive correction
        // so the static part remains the bare XY chain
        let xy = build_xy_chain(chain, p.j)?;
        h.push_drive(Arc::new(move |t| -s_of(t)), xy)?;
    }
    Ok(h)
}

/// Driven chain realizing XYZ dynamics: uniform x drive on all sites with
/// coefficient `(chi/2) omega cos(omega t)`, plus the scheduled annealing
/// field `s(t) hz sum sz` and the interpolation ramp on the XY coupling.
pub fn build_xyz_driven(
    chain: &ChainSpec,
    p: &XYZDriveParams,
    schedule: Option<&AnnealSchedule>,
) -> Result<TimeDependentHamiltonian> {
    let static_part = build_xy_chain(chain, p.j)?;
    let mut h = TimeDependentHamiltonian::new(*chain, static_part)?;

    let x_all = embed_sum(&pauli(Axis::X), 1..=chain.n_sites(), chain)?;
    let z_all = embed_sum(&pauli(Axis::Z), 1..=chain.n_sites(), chain)?;

    let (chi, omega, hz) = (p.chi, p.omega, p.hz);
    let sched = schedule.copied();
    let s_of = move |t: f64| sched.map_or(1.0, |sc| sc.s(t));

    if chi > 0.0 {
        h.push_drive(
            Arc::new(move |t| (chi / 2.0) * omega * (omega * t).cos()),
            x_all,
        )?;
    }
    if hz != 0.0 {
        h.push_drive(Arc::new(move |t| s_of(t) * hz), z_all)?;
    }
    if schedule.is_some() {
        let xy = build_xy_chain(chain, p.j)?;
        h.push_drive(Arc::new(move |t| -s_of(t)), xy)?;
    }
    Ok(h)
}

/// Ideal continuous annealer for the transverse-Ising target:
/// `H(t) = (1 - s(t)) J_sim sum sx sx + s(t) hz sum sz`.
pub fn build_ising_anneal_target(
    chain: &ChainSpec,
    j_sim: f64,
    hz: f64,
    schedule: &AnnealSchedule,
) -> Result<TimeDependentHamiltonian> {
    build_xyz_anneal_target(chain, j_sim, 0.0, 0.0, hz, schedule)
}

/// Ideal continuous annealer for an XYZ target:
/// `H(t) = (1 - s(t)) sum (Jx sxsx + Jy sysy + Jz szsz) + s(t) hz sum sz`.
pub fn build_xyz_anneal_target(
    chain: &ChainSpec,
    jx: f64,
    jy: f64,
    jz: f64,
    hz: f64,
    schedule: &AnnealSchedule,
) -> Result<TimeDependentHamiltonian> {
    let couplings = build_target_xyz(chain, jx, jy, jz, 0.0)?;
    let mut h = TimeDependentHamiltonian::new(*chain, couplings.clone())?;
    let z_sum = embed_sum(&pauli(Axis::Z), 1..=chain.n_sites(), chain)?;
    let sc = *schedule;
    h.push_drive(Arc::new(move |t| sc.s(t) * hz), z_sum)?;
    h.push_drive(Arc::new(move |t| -sc.s(t)), couplings)?;
    Ok(h)
}

fn number_op() -> Operator {
    let (low, raise) = ladder(3).expect("d=3 supported");
    Operator::hermitian_from_matrix(raise.mul(&low).unwrap().into_matrix()).unwrap()
}

fn quadrature_x() -> Operator {
    let (low, raise) = ladder(3).expect("d=3 supported");
    Operator::hermitian_from_matrix(low.add_scaled(1.0, &raise).unwrap().into_matrix()).unwrap()
}

fn anharmonic_op() -> Operator {
    // a^dag a^dag a a / ... on d=3: diag(0, 0, 2); the builder scales by A/2.
    let (low, raise) = ladder(3).expect("d=3 supported");
    let n2 = raise.mul(&raise).unwrap().mul(&low).unwrap().mul(&low).unwrap();
    Operator::hermitian_from_matrix(n2.into_matrix()).unwrap()
}

/// Transmon chain with finite anharmonicity:
/// `2J sum (a^dag_j a_{j+1} + h.c.) + sum [Delta_j(t) n_j + Omega_j(t)(a_j + a_j^dag)]
///  + sum (A/2) a^dag a^dag a a`.
pub fn build_transmon_chain(chain: &ChainSpec, p: &TransmonParams) -> Result<TimeDependentHamiltonian> {
    if chain.local_dim() != 3 {
        return Err(Error::UnsupportedLocalDim(chain.local_dim()));
    }
    if p.detuning.len() != chain.n_sites() || p.drive.len() != chain.n_sites() {
        return Err(Error::InvalidParams(
            "detuning/drive must have one entry per site".into(),
        ));
    }
    if !p.anharmonicity.is_finite() || p.anharmonicity <= 0.0 {
        return Err(Error::InvalidParams("anharmonicity must be positive".into()));
    }

    let (low, raise) = ladder(3)?;
    let mut static_mat = Operator::zeros(chain.dim());
    for site in 1..chain.n_sites() {
        let al = embed(&low, site, chain)?;
        let ar = embed(&low, site + 1, chain)?;
        let hop = embed(&raise, site, chain)?
            .mul(&ar)?
            .add_scaled(1.0, &al.mul(&embed(&raise, site + 1, chain)?)?)?;
        static_mat = static_mat.add_scaled(2.0 * p.j, &hop)?;
    }
    let anh = anharmonic_op();
    for site in 1..=chain.n_sites() {
        static_mat = static_mat.add_scaled(p.anharmonicity / 2.0, &embed(&anh, site, chain)?)?;
    }
    let mut h = TimeDependentHamiltonian::new(
        *chain,
        Operator::hermitian_from_matrix(static_mat.into_matrix())?,
    )?;

    let n_op = number_op();
    let x_op = quadrature_x();
    for site in 1..=chain.n_sites() {
        h.push_drive(p.detuning[site - 1].clone(), embed(&n_op, site, chain)?)?;
        h.push_drive(p.drive[site - 1].clone(), embed(&x_op, site, chain)?)?;
    }
    Ok(h)
}

/// Transmon image of the driven Ising anneal under the dictionary
/// `Omega = h^x`, `Delta = 2 h^z` (both fixed by qubit-subspace projection).
///
/// The hopping is ramped by `1 - s(t)` like the qubit XY coupling; the
/// anharmonicity is hardware and stays constant.
pub fn build_transmon_ising_anneal(
    chain: &ChainSpec,
    p: &IsingDriveParams,
    schedule: &AnnealSchedule,
    anharmonicity: f64,
) -> Result<TimeDependentHamiltonian> {
    if chain.local_dim() != 3 {
        return Err(Error::UnsupportedLocalDim(chain.local_dim()));
    }
    let (chi, omega, hz) = (p.chi, p.omega, p.hz);
    let prefactor = 2.0 * hz / (1.0 + bessel_j0(2.0 * chi)?);
    let sc = *schedule;

    let mut detuning: Vec<Coefficient> = Vec::with_capacity(chain.n_sites());
    let mut drive: Vec<Coefficient> = Vec::with_capacity(chain.n_sites());
    for site in 1..=chain.n_sites() {
        if site % 2 == 0 {
            detuning.push(Arc::new(move |t| {
                2.0 * sc.s(t) * prefactor * (chi * (omega * t).sin()).cos()
            }));
            drive.push(Arc::new(move |t| (chi / 2.0) * omega * (omega * t).cos()));
        } else {
            detuning.push(Arc::new(move |t| 2.0 * sc.s(t) * hz));
            drive.push(Arc::new(|_| 0.0));
        }
    }

    let params = TransmonParams {
        j: p.j,
        anharmonicity,
        detuning,
        drive,
    };
    let mut h = build_transmon_chain(chain, &params)?;

    // interpolation ramp on the hopping (the anharmonicity term must not ramp,
    // so the correction is built from the hopping alone)
    let (low, raise) = ladder(3)?;
    let mut hop_sum = Operator::zeros(chain.dim());
    for site in 1..chain.n_sites() {
        let al = embed(&low, site, chain)?;
        let hop = embed(&raise, site, chain)?
            .mul(&embed(&low, site + 1, chain)?)?
            .add_scaled(1.0, &al.mul(&embed(&raise, site + 1, chain)?)?)?;
        hop_sum = hop_sum.add_scaled(2.0 * p.j, &hop)?;
    }
    let hop_sum = Operator::hermitian_from_matrix(hop_sum.into_matrix())?;
    h.push_drive(Arc::new(move |t| -sc.s(t)), hop_sum)?;
    Ok(h)
}

/// Isometry mapping the qubit chain into the zero/one-excitation block of
/// the qutrit chain: spin down -> |0>, spin up -> |1>, site order preserved.
pub fn qubit_to_qutrit_index(qubit_index: usize, n_sites: usize) -> usize {
    let mut t = 0usize;
    for k in 0..n_sites {
        let bit = (qubit_index >> (n_sites - 1 - k)) & 1;
        // basis convention: bit 0 = spin up = one excitation
        t = t * 3 + (1 - bit);
    }
    t
}

/// Embed a qubit-chain state into the qutrit chain Hilbert space.
pub fn embed_qubit_state(
    psi: &crate::tensor::StateVector,
    n_sites: usize,
) -> Result<crate::tensor::StateVector> {
    if psi.dim() != 1 << n_sites {
        return Err(Error::DimensionMismatch(format!(
            "qubit state dim {} vs 2^{}",
            psi.dim(),
            n_sites
        )));
    }
    let mut amps = nalgebra::DVector::zeros(3usize.pow(n_sites as u32));
    for idx in 0..psi.dim() {
        amps[qubit_to_qutrit_index(idx, n_sites)] = psi.amplitudes()[idx];
    }
    crate::tensor::StateVector::from_amplitudes(amps)
}

/// Qubit-block image of a Pauli on a qutrit site (|2> row/column zero).
pub fn qutrit_pauli_block(axis: Axis) -> Operator {
    let p = pauli(axis);
    let mut m = nalgebra::DMatrix::zeros(3, 3);
    // spin up = |1>, spin down = |0>
    let map = [1usize, 0usize];
    for r in 0..2 {
        for c in 0..2 {
            m[(map[r], map[c])] = p.matrix()[(r, c)];
        }
    }
    Operator::hermitian_from_matrix(m).unwrap()
}

/// Convenience: `sum_sites op` for a local operator given per local_dim.
pub fn site_operator_sum(op: &Operator, chain: &ChainSpec) -> Result<Operator> {
    embed_sum(op, 1..=chain.n_sites(), chain)
}

/// Project a qutrit-chain operator onto the qubit block (for dictionary checks).
pub fn project_to_qubit_block(op: &Operator, n_sites: usize) -> Result<Operator> {
    let qdim = 1usize << n_sites;
    let mut m = nalgebra::DMatrix::zeros(qdim, qdim);
    for r in 0..qdim {
        for c in 0..qdim {
            m[(r, c)] = op.matrix()[(
                qubit_to_qutrit_index(r, n_sites),
                qubit_to_qutrit_index(c, n_sites),
            )];
        }
    }
    Operator::from_matrix(m)
}
