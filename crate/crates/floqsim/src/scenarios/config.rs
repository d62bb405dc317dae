//! Flat key-value experiment configuration with lossless round-tripping.
//!
//! The config file format is one `key = value` pair per line, `#` comments,
//! blank lines ignored. Unknown keys are errors (reported with the field
//! path), so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Dynamics,
    Anneal,
    SweepOmega,
    SweepNtrotter,
    SweepAnharmonicity,
    XyzAnneal,
    XiTable,
    Estimates,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dynamics" => Ok(Self::Dynamics),
            "anneal" => Ok(Self::Anneal),
            "sweep_omega" => Ok(Self::SweepOmega),
            "sweep_ntrotter" => Ok(Self::SweepNtrotter),
            "sweep_anharmonicity" => Ok(Self::SweepAnharmonicity),
            "xyz_anneal" => Ok(Self::XyzAnneal),
            "xi_table" => Ok(Self::XiTable),
            "estimates" => Ok(Self::Estimates),
            other => Err(Error::Config {
                field: "scenario".into(),
                message: format!("unknown scenario `{other}`"),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dynamics => "dynamics",
            Self::Anneal => "anneal",
            Self::SweepOmega => "sweep_omega",
            Self::SweepNtrotter => "sweep_ntrotter",
            Self::SweepAnharmonicity => "sweep_anharmonicity",
            Self::XyzAnneal => "xyz_anneal",
            Self::XiTable => "xi_table",
            Self::Estimates => "estimates",
        }
    }
}

/// Interpretation of the `drive_amplitude` config value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaConvention {
    /// The value is the rotation-angle amplitude chi (canonical).
    RotationAngle,
    /// The value is a field-strength lambda; chi = 2 lambda.
    MainText,
}

impl LambdaConvention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rotation_angle" => Ok(Self::RotationAngle),
            "main_text" => Ok(Self::MainText),
            other => Err(Error::Config {
                field: "lambda_convention".into(),
                message: format!("unknown convention `{other}` (expected rotation_angle | main_text)"),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RotationAngle => "rotation_angle",
            Self::MainText => "main_text",
        }
    }

    /// Convert a drive amplitude in this convention to chi.
    pub fn to_chi(&self, value: f64) -> f64 {
        match self {
            Self::RotationAngle => value,
            Self::MainText => 2.0 * value,
        }
    }
}

/// Full scenario configuration. Dimensionless |J| = 1 units everywhere
/// except the Estimates scenario, which takes MHz and microseconds and
/// converts once at the boundary.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Number of chain sites.
    pub n_sites: usize,
    /// Coupling in |J| = 1 units (sign matters; ferromagnetic-x is j < 0).
    pub j: f64,
    /// Transverse field over |J|.
    pub hz_ratio: f64,
    /// Drive frequency over |J| (ignored where `periods` applies).
    pub omega_ratio: f64,
    /// Total time in 1/|J| units (annealing time for anneal scenarios).
    pub t_final: f64,
    /// Stroboscopic periods for dynamics runs.
    pub periods: usize,
    /// Substeps per drive period.
    pub substeps: usize,
    /// Drive amplitude; interpreted per `lambda_convention`. 0 = calibrated.
    pub drive_amplitude: f64,
    pub lambda_convention: LambdaConvention,
    /// Trotter steps for digital comparators.
    pub n_trotter: usize,
    /// Log-spaced sweep grid (omega sweep: periods; ntrotter sweep: steps).
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_points: usize,
    /// Anharmonicity over |J| (qutrit scenarios).
    pub a_ratio: f64,
    /// Physical inputs for the Estimates scenario.
    pub a_mhz: f64,
    pub omega_mhz: f64,
    pub j_mhz: f64,
    pub t_final_us: f64,
    /// Gate errors for digital-budget overlays.
    pub gate_errors: Vec<f64>,
}

impl ExperimentConfig {
    /// Scenario defaults.
    pub fn defaults(scenario: Scenario) -> Self {
        let base = Self {
            scenario,
            n_sites: 4,
            j: -1.0,
            hz_ratio: 1.0,
            omega_ratio: 20.0,
            t_final: 15.0,
            periods: 20,
            substeps: 256,
            drive_amplitude: 0.0,
            lambda_convention: LambdaConvention::RotationAngle,
            n_trotter: 20,
            sweep_start: 50.0,
            sweep_stop: 400.0,
            sweep_points: 4,
            a_ratio: 300.0,
            a_mhz: 300.0,
            omega_mhz: 9.8,
            j_mhz: 1.0,
            t_final_us: 2.4,
            gate_errors: vec![1e-2, 1e-3, 1e-4, 1e-5],
        };
        match scenario {
            // the strong x drive at omega/|J| = 50 needs a finer grid to
            // certify at 1e-6; the chain is small so this stays cheap
            Scenario::Dynamics => Self {
                hz_ratio: 1.5,
                omega_ratio: 50.0,
                substeps: 1024,
                ..base
            },
            Scenario::SweepNtrotter => Self {
                sweep_start: 10.0,
                sweep_stop: 320.0,
                sweep_points: 6,
                ..base
            },
            Scenario::XyzAnneal => Self {
                t_final: 200.0,
                periods: 954,
                n_trotter: 477,
                ..base
            },
            Scenario::SweepAnharmonicity => Self {
                sweep_start: 150.0,
                sweep_stop: 1000.0,
                sweep_points: 5,
                t_final: 15.0,
                ..base
            },
            Scenario::XiTable => Self {
                sweep_start: 0.0,
                sweep_stop: 3.0,
                sweep_points: 13,
                ..base
            },
            _ => base,
        }
    }

    /// Parse the flat key-value text format, starting from the scenario's
    /// defaults. Unknown keys are errors.
    pub fn from_kv_text(scenario: Scenario, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(scenario);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                field: format!("line {}", lineno + 1),
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set_field(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply one `key=value` override.
    pub fn set_field(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |msg: String| Error::Config {
            field: key.to_string(),
            message: msg,
        };
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|e| bad(format!("invalid number `{v}`: {e}")))
        };
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|e| bad(format!("invalid integer `{v}`: {e}")))
        };
        match key {
            "scenario" => {
                let s = Scenario::parse(value)?;
                if s != self.scenario {
                    return Err(bad(format!(
                        "config file is for `{}` but the CLI asked for `{}`",
                        value,
                        self.scenario.name()
                    )));
                }
            }
            "n_sites" => self.n_sites = parse_usize(value)?,
            "j" => self.j = parse_f64(value)?,
            "hz_ratio" => self.hz_ratio = parse_f64(value)?,
            "omega_ratio" => self.omega_ratio = parse_f64(value)?,
            "t_final" => self.t_final = parse_f64(value)?,
            "periods" => self.periods = parse_usize(value)?,
            "substeps" => self.substeps = parse_usize(value)?,
            "drive_amplitude" => self.drive_amplitude = parse_f64(value)?,
            "lambda_convention" => self.lambda_convention = LambdaConvention::parse(value)?,
            "n_trotter" => self.n_trotter = parse_usize(value)?,
            "sweep_start" => self.sweep_start = parse_f64(value)?,
            "sweep_stop" => self.sweep_stop = parse_f64(value)?,
            "sweep_points" => self.sweep_points = parse_usize(value)?,
            "a_ratio" => self.a_ratio = parse_f64(value)?,
            "a_mhz" => self.a_mhz = parse_f64(value)?,
            "omega_mhz" => self.omega_mhz = parse_f64(value)?,
            "j_mhz" => self.j_mhz = parse_f64(value)?,
            "t_final_us" => self.t_final_us = parse_f64(value)?,
            "gate_errors" => {
                let mut errs = Vec::new();
                for part in value.split(',') {
                    errs.push(parse_f64(part.trim())?);
                }
                self.gate_errors = errs;
            }
            other => {
                return Err(Error::Config {
                    field: other.to_string(),
                    message: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    /// Serialize to the flat key-value format (keys in fixed order). Parsing
    /// this text back reproduces the config exactly.
    pub fn to_kv_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario.name());
        let _ = writeln!(s, "n_sites = {}", self.n_sites);
        let _ = writeln!(s, "j = {}", self.j);
        let _ = writeln!(s, "hz_ratio = {}", self.hz_ratio);
        let _ = writeln!(s, "omega_ratio = {}", self.omega_ratio);
        let _ = writeln!(s, "t_final = {}", self.t_final);
        let _ = writeln!(s, "periods = {}", self.periods);
        let _ = writeln!(s, "substeps = {}", self.substeps);
        let _ = writeln!(s, "drive_amplitude = {}", self.drive_amplitude);
        let _ = writeln!(s, "lambda_convention = {}", self.lambda_convention.name());
        let _ = writeln!(s, "n_trotter = {}", self.n_trotter);
        let _ = writeln!(s, "sweep_start = {}", self.sweep_start);
        let _ = writeln!(s, "sweep_stop = {}", self.sweep_stop);
        let _ = writeln!(s, "sweep_points = {}", self.sweep_points);
        let _ = writeln!(s, "a_ratio = {}", self.a_ratio);
        let _ = writeln!(s, "a_mhz = {}", self.a_mhz);
        let _ = writeln!(s, "omega_mhz = {}", self.omega_mhz);
        let _ = writeln!(s, "j_mhz = {}", self.j_mhz);
        let _ = writeln!(s, "t_final_us = {}", self.t_final_us);
        let _ = writeln!(
            s,
            "gate_errors = {}",
            self.gate_errors
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        s
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, field: &str, message: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Config {
                    field: field.into(),
                    message: message.into(),
                })
            }
        };
        check(
            (1..=6).contains(&self.n_sites),
            "n_sites",
            "must lie in 1..=6 (desk scale)",
        )?;
        check(self.j != 0.0 && self.j.is_finite(), "j", "must be nonzero")?;
        check(self.hz_ratio >= 0.0, "hz_ratio", "must be nonnegative")?;
        check(self.omega_ratio > 0.0, "omega_ratio", "must be positive")?;
        check(self.t_final > 0.0, "t_final", "must be positive")?;
        check(self.substeps >= 16, "substeps", "must be >= 16")?;
        check(self.periods >= 1, "periods", "must be >= 1")?;
        check(self.n_trotter >= 1, "n_trotter", "must be >= 1")?;
        check(self.sweep_points >= 1, "sweep_points", "must be >= 1")?;
        check(
            self.sweep_stop >= self.sweep_start,
            "sweep_stop",
            "must be >= sweep_start",
        )?;
        check(self.a_ratio > 0.0, "a_ratio", "must be positive")?;
        check(self.a_mhz > 0.0, "a_mhz", "must be positive")?;
        check(self.omega_mhz > 0.0, "omega_mhz", "must be positive")?;
        check(self.j_mhz > 0.0, "j_mhz", "must be positive")?;
        check(self.t_final_us > 0.0, "t_final_us", "must be positive")?;
        check(
            self.gate_errors.iter().all(|e| (0.0..1.0).contains(e)),
            "gate_errors",
            "entries must lie in [0, 1)",
        )?;
        Ok(())
    }

    /// Effective chi: the calibrated value when `drive_amplitude` = 0,
    /// otherwise the explicit value converted per the convention.
    pub fn chi_ising(&self) -> f64 {
        if self.drive_amplitude == 0.0 {
            crate::floquet::calibrate_ising_chi()
        } else {
            self.lambda_convention.to_chi(self.drive_amplitude)
        }
    }

    pub fn chi_xyz(&self) -> f64 {
        if self.drive_amplitude == 0.0 {
            crate::floquet::calibrate_xyz_chi()
        } else {
            self.lambda_convention.to_chi(self.drive_amplitude)
        }
    }

    /// Echo as a sorted string map (for JSON summaries).
    pub fn echo_map(&self) -> BTreeMap<String, String> {
        self.to_kv_text()
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::defaults(Scenario::Anneal);
        cfg.t_final = 15.08;
        cfg.hz_ratio = 1.25;
        cfg.gate_errors = vec![0.01, 0.0001];
        let text = cfg.to_kv_text();
        let back = ExperimentConfig::from_kv_text(Scenario::Anneal, &text).unwrap();
        assert_eq!(back.to_kv_text(), text);
    }

    #[test]
    fn unknown_key_is_an_error_with_path() {
        let err = ExperimentConfig::from_kv_text(Scenario::Anneal, "bogus_key = 3\n").unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "bogus_key"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut cfg = ExperimentConfig::defaults(Scenario::Anneal);
        cfg.substeps = 4;
        assert!(cfg.validate().is_err());
        cfg.substeps = 256;
        cfg.n_sites = 9;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn lambda_convention_conversion() {
        assert_eq!(LambdaConvention::MainText.to_chi(1.20241), 2.40482);
        assert_eq!(LambdaConvention::RotationAngle.to_chi(2.4), 2.4);
        let mut cfg = ExperimentConfig::defaults(Scenario::Anneal);
        cfg.drive_amplitude = 1.20241;
        cfg.lambda_convention = LambdaConvention::MainText;
        assert!((cfg.chi_ising() - 2.40482).abs() < 1e-12);
        cfg.drive_amplitude = 0.0;
        assert!((cfg.chi_ising() - 2.404825557695773).abs() < 1e-9);
    }
}
