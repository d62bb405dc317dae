//! Deterministic result files: versioned CSV tables plus one JSON summary.
//!
//! CSV bodies are byte-identical across runs of the same config; anything
//! time-dependent (wall-clock stamp) goes to a separate `meta.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::Result;

/// One CSV series with a versioned schema line.
#[derive(Debug, Clone)]
pub struct CsvTable {
    /// Basename (without extension) of the emitted file.
    pub name: String,
    /// Schema identifier written as the first line, `#schema=<id>`.
    pub schema: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, schema: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            schema: schema.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#schema={}", self.schema);
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Deterministic float formatting shared by all tables.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.12e}")
    }
}

/// M-versus-2M (or steps-versus-2x-steps) convergence check attached to an
/// emitted number.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConvergenceCertificate {
    pub metric: String,
    pub coarse: usize,
    pub fine: usize,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ConvergenceCertificate {
    pub fn check(metric: &str, coarse: usize, fine: usize, a: f64, b: f64, tol: f64) -> Self {
        let deviation = (a - b).abs();
        Self {
            metric: metric.to_string(),
            coarse,
            fine,
            deviation,
            tolerance: tol,
            passed: deviation <= tol,
        }
    }
}

/// Everything a scenario produces.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub scenario: String,
    pub config_echo: BTreeMap<String, String>,
    /// Named headline numbers (infidelities, calibration constants, ...).
    pub headline: BTreeMap<String, f64>,
    pub convergence: Vec<ConvergenceCertificate>,
    pub tables: Vec<CsvTable>,
}

impl ResultRecord {
    pub fn new(scenario: &str, config_echo: BTreeMap<String, String>) -> Self {
        Self {
            scenario: scenario.to_string(),
            config_echo,
            headline: BTreeMap::new(),
            convergence: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "scenario": self.scenario,
            "config_echo": self.config_echo,
            "headline_numbers": self.headline,
            "convergence": self.convergence,
            "tables": self.tables.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
        })
    }

    /// Whether every certificate passed.
    pub fn converged(&self) -> bool {
        self.convergence.iter().all(|c| c.passed)
    }

    /// Write CSV tables, the JSON summary, and a non-deterministic meta file.
    pub fn write_to(&self, dir: &Path) -> Result<OutputFiles> {
        fs::create_dir_all(dir)?;
        let mut csv_paths = Vec::new();
        for table in &self.tables {
            let path = dir.join(format!("{}_{}.csv", self.scenario, table.name));
            fs::write(&path, table.render())?;
            csv_paths.push(path);
        }
        let summary_path = dir.join(format!("{}_summary.json", self.scenario));
        fs::write(
            &summary_path,
            serde_json::to_string_pretty(&self.summary_json()).expect("valid JSON") + "\n",
        )?;
        let meta_path = dir.join("meta.txt");
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_else(|_| "unknown".to_string());
        fs::write(
            &meta_path,
            format!("scenario: {}\nunix_time: {}\n", self.scenario, stamp),
        )?;
        Ok(OutputFiles {
            csv_paths,
            summary_path,
            meta_path,
        })
    }
}

#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub csv_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub meta_path: PathBuf,
}
