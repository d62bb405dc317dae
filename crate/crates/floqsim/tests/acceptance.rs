//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible under `--nocapture`). Tolerances are pinned in
//! code next to each assertion.

use floqsim::digital::{
    digital_anneal, optimize_step_order, trotter_step_ising, ErrorModel, StepOrder, TrotterPlan,
};
use floqsim::floquet::{
    assemble_xi_hamiltonian, build_floquet_hamiltonian, calibrate_ising_chi, calibrate_xyz_chi,
    floquet_from_propagator, xi_averaged, xi_instantaneous, DriveConfig, SublatticeDrive,
};
use floqsim::models::{
    build_ising_anneal_target, build_ising_driven, build_target_ising, build_target_xyz,
    build_xy_chain, build_xyz_anneal_target, build_xyz_driven, AnnealSchedule, IsingDriveParams,
    XYZDriveParams,
};
use floqsim::propagation::{
    all_down_state, ghz_target, ground_state, propagate, stroboscopic_fidelities, magnetization,
    PropagationConfig, SamplePolicy,
};
use floqsim::scenarios::{estimates_scenario, run_scenario, ExperimentConfig, Scenario};
use floqsim::tensor::{
    eigh, embed_sum, expm_hermitian, fidelity, kron, pauli, Axis, CVector, ChainSpec, Operator,
    StateVector, C64,
};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, detail: &str, pass: bool) {
    println!(
        "ACCEPTANCE {:02} {:<28} {} [{}]",
        id,
        name,
        detail,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn random_drive_config(rng: &mut impl Rng) -> DriveConfig {
    DriveConfig::new(
        rng.gen_range(5.0..50.0),
        SublatticeDrive::new(
            rng.gen_range(0.0..std::f64::consts::PI),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..5.0),
        )
        .unwrap(),
        SublatticeDrive::new(
            rng.gen_range(0.0..std::f64::consts::PI),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..5.0),
        )
        .unwrap(),
    )
    .unwrap()
}

/// Rotation unitary of the drive frame at time t (site 1 leftmost).
fn rotation_unitary(chain: &ChainSpec, cfg: &DriveConfig, t: f64) -> Operator {
    let mut u = Operator::identity(1);
    for site in 1..=chain.n_sites() {
        let d = if site % 2 == 0 { &cfg.even } else { &cfg.odd };
        let [nx, ny, nz] = d.axis();
        let axis_op = pauli(Axis::X)
            .scale(nx)
            .add_scaled(ny, &pauli(Axis::Y))
            .unwrap()
            .add_scaled(nz, &pauli(Axis::Z))
            .unwrap();
        let axis_op = Operator::hermitian_from_matrix(axis_op.into_matrix()).unwrap();
        let r = expm_hermitian(&axis_op, d.g(cfg.omega, t) / 2.0).unwrap();
        u = kron(&u, &r);
    }
    u
}

#[test]
fn criterion_01_coefficient_correctness() {
    let chain = ChainSpec::qubits(3).unwrap();
    let h0 = build_xy_chain(&chain, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let cfg = random_drive_config(&mut rng);
        let t = rng.gen_range(0.0..cfg.period());
        let xi = xi_instantaneous(&cfg, t);
        let assembled = assemble_xi_hamiltonian(&chain, 1.0, &xi).unwrap();
        let u = rotation_unitary(&chain, &cfg, t);
        let direct = u.adjoint().mul(&h0).unwrap().mul(&u).unwrap();
        worst = worst.max(assembled.max_abs_diff(&direct));
    }
    report(
        1,
        "coefficient correctness",
        &format!("max element error {worst:.2e} (bound 1e-9, 200 configs)"),
        worst < 1e-9,
    );
}

#[test]
fn criterion_02_closed_form_averages() {
    // averaged coefficients vs adaptive Simpson quadrature of the
    // instantaneous ones, all nine entries per config
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let cfg = random_drive_config(&mut rng);
        let avg = xi_averaged(&cfg);
        // integrate all nine entries simultaneously
        let sample = |tau: f64| *xi_instantaneous(&cfg, tau / cfg.omega).entries();
        let simpson = |n: usize| -> [[f64; 3]; 3] {
            let h = std::f64::consts::TAU / n as f64;
            let mut acc = [[0.0; 3]; 3];
            let add = |acc: &mut [[f64; 3]; 3], m: [[f64; 3]; 3], w: f64| {
                for i in 0..3 {
                    for j in 0..3 {
                        acc[i][j] += w * m[i][j];
                    }
                }
            };
            add(&mut acc, sample(0.0), 1.0);
            add(&mut acc, sample(std::f64::consts::TAU), 1.0);
            for k in 1..n {
                add(&mut acc, sample(k as f64 * h), if k % 2 == 1 { 4.0 } else { 2.0 });
            }
            for row in &mut acc {
                for v in row {
                    *v *= h / 3.0 / std::f64::consts::TAU;
                }
            }
            acc
        };
        let mut n = 64;
        let mut prev = simpson(n);
        let quad = loop {
            n *= 2;
            let cur = simpson(n);
            let dev = prev
                .iter()
                .flatten()
                .zip(cur.iter().flatten())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if dev < 1e-10 || n >= (1 << 18) {
                break cur;
            }
            prev = cur;
        };
        for (row_q, row_a) in quad.iter().zip(avg.entries().iter()) {
            for (q, a) in row_q.iter().zip(row_a.iter()) {
                worst = worst.max((q - a).abs());
            }
        }
    }
    report(
        2,
        "closed-form averages",
        &format!("max entry error {worst:.2e} (bound 1e-8, 200 configs)"),
        worst < 1e-8,
    );
}

#[test]
fn criterion_03_calibration_constants() {
    let chi_ising = calibrate_ising_chi();
    let lambda_err = (chi_ising / 2.0 - 1.20241).abs();
    let chi_xyz = calibrate_xyz_chi();
    let xyz_err = (2.0 * chi_xyz - 1.81144).abs();
    let xi = xi_averaged(&DriveConfig::uniform_x(1.0, chi_xyz).unwrap());
    let yy_err = (xi.get(Axis::Y, Axis::Y) - 2.0 / 3.0).abs();
    let zz_err = (xi.get(Axis::Z, Axis::Z) - 1.0 / 3.0).abs();
    let mut cross: f64 = 0.0;
    for ea in Axis::ALL {
        for oa in Axis::ALL {
            if ea != oa {
                cross = cross.max(xi.get(ea, oa).abs());
            }
        }
    }
    let pass = lambda_err < 1e-4 && xyz_err < 2e-3 && yy_err < 1e-9 && zz_err < 1e-9 && cross < 1e-10;
    report(
        3,
        "calibration constants",
        &format!(
            "lambda err {lambda_err:.1e} (<1e-4), 2chi err {xyz_err:.1e} (<2e-3), \
             yy/zz err {yy_err:.1e}/{zz_err:.1e} (<1e-9), cross {cross:.1e} (<1e-10)"
        ),
        pass,
    );
}

#[test]
fn criterion_04_propagator_log_oracle() {
    let chain = ChainSpec::qubits(2).unwrap();
    let chi = calibrate_ising_chi();
    let target = build_target_ising(&chain, -1.0, 1.0).unwrap();
    let scale = target.max_abs();
    let mut devs = Vec::new();
    for omega in [100.0, 200.0, 400.0] {
        let p = IsingDriveParams::new(-1.0, 1.0, chi, omega).unwrap();
        let h = build_ising_driven(&chain, &p, None).unwrap();
        let cfg = DriveConfig::ising(omega, chi).unwrap();
        let hf = floquet_from_propagator(&h, &cfg, 4096).unwrap();
        devs.push(hf.max_abs_diff(&target) / scale);
    }
    let monotone = devs[0] > devs[1] && devs[1] > devs[2];
    let pass = monotone && devs[2] < 0.03;
    report(
        4,
        "propagator-log oracle",
        &format!(
            "rel dev {:.4} > {:.4} > {:.4}, final < 0.03",
            devs[0], devs[1], devs[2]
        ),
        pass,
    );
}

#[test]
fn criterion_05_fig2_dynamics() {
    let mut cfg = ExperimentConfig::defaults(Scenario::Dynamics);
    cfg.n_sites = 4;
    cfg.hz_ratio = 1.5;
    cfg.omega_ratio = 50.0;
    cfg.periods = 20;
    let record = run_scenario(&cfg).unwrap();
    let max_dm = record.headline["max_abs_dm"];
    let f_flq = record.headline["floquet_final_infidelity"];
    let f_dig = record.headline["digital_final_infidelity"];
    let pass = max_dm < 0.05 && f_flq < f_dig;
    report(
        5,
        "Fig.2 dynamics",
        &format!(
            "max|dM| {max_dm:.4} (<0.05), Floquet infid {f_flq:.4} < digital(N_Tr=20) {f_dig:.4}"
        ),
        pass,
    );
}

#[test]
fn criterion_06_continuous_anneal_number() {
    let chain = ChainSpec::qubits(4).unwrap();
    let tf = 15.08;
    let schedule = AnnealSchedule::linear(tf).unwrap();
    let h = build_ising_anneal_target(&chain, -1.0, 1.0, &schedule).unwrap();
    let psi0 = all_down_state(&chain).unwrap();
    let run = |steps: usize| -> f64 {
        let traj = propagate(
            &h,
            &psi0,
            0.0,
            tf,
            &PropagationConfig::total_steps(steps).with_sample(SamplePolicy::Stride(usize::MAX)),
        )
        .unwrap();
        1.0 - fidelity(traj.final_state(), &ghz_target(4).unwrap()).unwrap()
    };
    let infid = run(16_000);
    let infid_fine = run(32_000);
    let converged = (infid - infid_fine).abs() < 1e-6;
    let pass = converged && (infid_fine - 0.00616).abs() <= 0.1 * 0.00616;
    report(
        6,
        "continuous-anneal number",
        &format!("1-F = {infid_fine:.5} (target 0.00616 +- 10%)"),
        pass,
    );
}

#[test]
fn criterion_07_estimates_scenario() {
    // qutrit Floquet anneal at A = 2pi*300 MHz, omega = 2pi*9.8 MHz,
    // J = 2pi*1 MHz, t_f = 2.4 us; report under both amplitude conventions
    let cfg = ExperimentConfig::defaults(Scenario::Estimates);
    let record = estimates_scenario(&cfg).unwrap();
    assert!(record.converged(), "certificates: {:?}", record.convergence);
    let qutrit = record.headline["qutrit_rotation_angle_infidelity"];
    let misread = record.headline["qutrit_main_text_misread_infidelity"];
    let qubit = record.headline["qubit_limit_infidelity"];
    let in_band = (qutrit - 0.037).abs() <= 0.30 * 0.037;
    let leakage_penalty = qubit < qutrit;
    report(
        7,
        "estimates scenario",
        &format!(
            "qutrit 1-F = {qutrit:.4} (target 0.037 +- 30%), qubit-limit {qubit:.4} < qutrit, \
             misread-convention value {misread:.4} (reported)"
        ),
        in_band && leakage_penalty,
    );
}

#[test]
fn criterion_08_digitization_number() {
    // N_Tr = 14 with the annealing schedule of Fig. 3(a) (t_f = 12.5/|J|)
    let chain = ChainSpec::qubits(4).unwrap();
    let schedule = AnnealSchedule::linear(12.5).unwrap();
    let plan = TrotterPlan::ising(14, StepOrder::Symmetric);
    let ghz = ghz_target(4).unwrap();
    let run = digital_anneal(&chain, &plan, &schedule, 1.0, -1.0, &ghz).unwrap();
    let eps_dig = 1.0 - run.final_fidelity;
    let pass = (eps_dig - 0.041).abs() <= 0.20 * 0.041;
    report(
        8,
        "digitization number",
        &format!("eps_dig = {eps_dig:.4} (target 0.041 +- 20%)"),
        pass,
    );
}

#[test]
fn criterion_09_trotter_timing() {
    let t_tr_ns = (2 * (4 - 1) + 3) * 18u64;
    let gates = ErrorModel::gates_per_step(4);
    let t_tr = ErrorModel::t_trotter(4, 0.018);
    let pass = t_tr_ns == 162 && gates == 16 && (t_tr - 0.162).abs() < 1e-15;
    report(
        9,
        "Trotter timing calibration",
        &format!("t_Tr = {t_tr_ns} ns (= 0.162 us exactly), gates/step = {gates} (= 16)"),
        pass,
    );
}

#[test]
fn criterion_10_convergence_trends() {
    // Floquet infidelity decreases with omega and digital infidelity
    // decreases with N_Tr, both against the continuous anneal, for
    // N in {4, 5, 6}
    let mut all_pass = true;
    let mut detail = String::new();
    for n_sites in [4usize, 5, 6] {
        let mut cfg = ExperimentConfig::defaults(Scenario::SweepOmega);
        cfg.n_sites = n_sites;
        cfg.t_final = 15.0;
        cfg.sweep_start = 50.0;
        cfg.sweep_stop = 200.0;
        cfg.sweep_points = 3;
        cfg.substeps = if n_sites == 6 { 128 } else { 256 };
        let record = run_scenario(&cfg).unwrap();
        let table = &record.tables[0];
        let infids: Vec<f64> = table
            .rows
            .iter()
            .map(|r| r[2].parse::<f64>().unwrap())
            .collect();
        let mono_f = infids.windows(2).all(|w| w[1] < w[0] * 1.05 + 1e-7);

        let mut dcfg = ExperimentConfig::defaults(Scenario::SweepNtrotter);
        dcfg.n_sites = n_sites;
        dcfg.t_final = 15.0;
        dcfg.sweep_start = 10.0;
        dcfg.sweep_stop = 80.0;
        dcfg.sweep_points = 4;
        let drec = run_scenario(&dcfg).unwrap();
        let dinfids: Vec<f64> = drec.tables[0]
            .rows
            .iter()
            .map(|r| r[1].parse::<f64>().unwrap())
            .collect();
        let mono_d = dinfids.windows(2).all(|w| w[1] < w[0] * 1.05 + 1e-7);

        all_pass &= mono_f && mono_d;
        detail.push_str(&format!(
            "N={n_sites}: omega {:?} dig {:?}; ",
            infids.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>(),
            dinfids.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>(),
        ));
    }
    report(10, "convergence trends", detail.trim_end(), all_pass);
}

#[test]
fn criterion_11_xyz_benchmark() {
    // N = 4, t_f = 200/|J|, 954 stroboscopic periods, digital N_Tr = 477:
    // the Floquet run must beat the best of the 24 layer orderings
    let cfg = ExperimentConfig::defaults(Scenario::XyzAnneal);
    let record = run_scenario(&cfg).unwrap();
    let flq = record.headline["floquet_final_infidelity"];
    let dig = record.headline["digital_best_infidelity"];
    report(
        11,
        "XYZ benchmark",
        &format!("Floquet infid {flq:.4} < best-of-24 digital {dig:.4} (N_Tr = 477)"),
        flq < dig,
    );
}

#[test]
fn criterion_12_unitarity_suite() {
    let chain = ChainSpec::qubits(3).unwrap();
    let chi = calibrate_ising_chi();
    let p = IsingDriveParams::new(-1.0, 1.5, chi, 25.0).unwrap();
    let h = build_ising_driven(&chain, &p, None).unwrap();
    let psi0 = all_down_state(&chain).unwrap();
    let period = p.period();
    let cfg = PropagationConfig::driven(period, 128).with_sample(SamplePolicy::All);

    // norm preservation along the trajectory
    let fwd = propagate(&h, &psi0, 0.0, 6.0 * period, &cfg).unwrap();
    let norm_dev = fwd
        .states
        .iter()
        .fold(0.0f64, |m, s| m.max((s.norm() - 1.0).abs()));

    // backward round trip
    let back = propagate(&h, fwd.final_state(), 6.0 * period, 0.0, &cfg).unwrap();
    let round_trip = 1.0 - fidelity(back.final_state(), &psi0).unwrap();

    // energy conservation for static H
    let h_static = build_target_ising(&chain, -1.0, 0.7).unwrap();
    let td = floqsim::models::TimeDependentHamiltonian::new(chain, h_static.clone()).unwrap();
    let mut amps = CVector::zeros(chain.dim());
    amps[0] = C64::new(0.6, 0.0);
    amps[5] = C64::new(0.0, 0.8);
    let psi1 = StateVector::normalized(amps).unwrap();
    let traj = propagate(&td, &psi1, 0.0, 5.0, &PropagationConfig::total_steps(500)).unwrap();
    let e0 = h_static.expectation(&psi1).unwrap();
    let energy_dev = traj
        .states
        .iter()
        .fold(0.0f64, |m, s| m.max((h_static.expectation(s).unwrap() - e0).abs()));

    // every Trotter step unitary
    let mut unit_dev: f64 = 0.0;
    for order in [StepOrder::First, StepOrder::Symmetric] {
        let u = trotter_step_ising(&chain, -1.0, 1.3, 0.7, order).unwrap();
        unit_dev = unit_dev.max(u.unitarity_deviation());
    }

    let pass = norm_dev < 1e-8 && round_trip < 1e-8 && energy_dev < 1e-9 && unit_dev < 1e-10;
    report(
        12,
        "unitarity/conservation",
        &format!(
            "norm {norm_dev:.1e} (<1e-8), round trip {round_trip:.1e} (<1e-8), \
             energy {energy_dev:.1e} (<1e-9), step unitarity {unit_dev:.1e} (<1e-10)"
        ),
        pass,
    );
}

// keep the less-used imports exercised
#[test]
fn acceptance_support_sanity() {
    let chain = ChainSpec::qubits(2).unwrap();
    let gs = ground_state(&build_target_xyz(&chain, -1.0, -0.5, -0.2, 0.3).unwrap()).unwrap();
    assert!(gs.energy.is_finite());
    let sched = AnnealSchedule::linear(5.0).unwrap();
    let hx = build_xyz_anneal_target(&chain, -1.0, -0.5, -0.2, 1.0, &sched).unwrap();
    let _ = hx.evaluate(1.0);
    let p = XYZDriveParams::new(-1.0, 0.9, 30.0, 1.0).unwrap();
    let hd = build_xyz_driven(&chain, &p, Some(&sched)).unwrap();
    let psi0 = all_down_state(&chain).unwrap();
    let traj = propagate(
        &hd,
        &psi0,
        0.0,
        sched.t_final(),
        &PropagationConfig::driven(std::f64::consts::TAU / 30.0, 64),
    )
    .unwrap();
    let series = stroboscopic_fidelities(&traj, &build_target_ising(&chain, -1.0, 0.5).unwrap(), &psi0);
    assert!(series.is_ok());
    let m = magnetization(&psi0, &chain, Axis::Z).unwrap();
    assert!((m + 1.0).abs() < 1e-12);
    let (w, _) = eigh(&build_xy_chain(&chain, 1.0).unwrap()).unwrap();
    assert!(w.len() == 4);
    let xi = xi_averaged(&DriveConfig::ising(30.0, 1.0).unwrap());
    let hf = build_floquet_hamiltonian(&chain, -1.0, &xi).unwrap();
    assert!(hf.max_abs() > 0.0);
    let ghz = ghz_target(2).unwrap();
    let sum = embed_sum(&pauli(Axis::Z), 1..=2, &chain).unwrap();
    assert!(sum.expectation(&ghz).unwrap().abs() < 1e-12);
    let _ = optimize_step_order(
        &chain,
        -1.0,
        [2.0 / 3.0, 1.0 / 3.0, 0.0],
        1.0,
        &sched,
        4,
        &ghz,
    )
    .unwrap();
}
