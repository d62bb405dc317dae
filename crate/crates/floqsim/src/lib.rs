//! Floquet-engineered spin-chain simulation at desk scale.
//!
//! A chain of superconducting qubits with always-on isotropic XY coupling
//! can be steered into effective transverse-Ising or XYZ dynamics by fast
//! periodic local driving. This crate implements that protocol end to end:
//!
//! - [`tensor`]: dense operators, states, exponentials on small chains;
//! - [`models`]: the static and driven chain Hamiltonians, annealing
//!   schedules, and the three-level (transmon) chain with finite
//!   anharmonicity;
//! - [`floquet`]: rotated-frame coupling coefficients, their period
//!   averages, effective-Hamiltonian assembly, drive calibration, and a
//!   propagator-log oracle;
//! - [`propagation`]: unitary midpoint-exponential time evolution,
//!   stroboscopic sampling, observables, annealing runs;
//! - [`digital`]: the Trotterized competitor circuits, step-ordering
//!   optimization, and the gate-error budget model;
//! - [`scenarios`]: reproducible named experiments behind the `floqsim` CLI.

pub mod digital;
pub mod error;
pub mod floquet;
pub mod models;
pub mod propagation;
pub mod scenarios;
pub mod tensor;

pub use error::{Error, Result};
