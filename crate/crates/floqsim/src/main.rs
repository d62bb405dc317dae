//! `floqsim` — reproducible experiment runner.
//!
//! Exit codes: 0 success, 2 configuration error, 3 convergence failure,
//! 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use floqsim::scenarios::{run_scenario, ExperimentConfig, Scenario};
use floqsim::Error;

#[derive(Parser, Debug)]
#[command(
    name = "floqsim",
    about = "Floquet-engineered spin-chain simulator and digital benchmark",
    after_help = "Scenarios: dynamics | anneal | sweep_omega | sweep_ntrotter | \
                  sweep_anharmonicity | xyz_anneal | xi_table | estimates\n\n\
                  Config keys (flat `key = value` lines, also usable with --override):\n  \
                  n_sites, j, hz_ratio, omega_ratio, t_final, periods, substeps,\n  \
                  drive_amplitude, lambda_convention (rotation_angle|main_text), n_trotter,\n  \
                  sweep_start, sweep_stop, sweep_points, a_ratio, a_mhz, omega_mhz, j_mhz,\n  \
                  t_final_us, gate_errors (comma-separated)\n\n\
                  All quantities are in |J| = 1 units except the estimates scenario,\n  \
                  which takes MHz and microseconds."
)]
struct Cli {
    /// Scenario name.
    scenario: String,

    /// Config file (flat `key = value` lines; defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON results.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweep parallelism (default: all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Config overrides, `key=value`, applied after the config file.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: &Cli) -> floqsim::Result<()> {
    let scenario = Scenario::parse(&cli.scenario)?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            ExperimentConfig::from_kv_text(scenario, &text)?
        }
        None => ExperimentConfig::defaults(scenario),
    };
    for item in &cli.overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| Error::Config {
            field: item.clone(),
            message: "override must have the form key=value".into(),
        })?;
        cfg.set_field(key.trim(), value.trim())?;
    }
    cfg.validate()?;

    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
    }

    let record = run_scenario(&cfg)?;
    let files = record.write_to(&cli.out)?;
    println!("scenario {} done", record.scenario);
    for (name, value) in &record.headline {
        println!("  {name} = {value:.6e}");
    }
    for path in &files.csv_paths {
        println!("  wrote {}", path.display());
    }
    println!("  wrote {}", files.summary_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config { .. } | Error::InvalidParams(_) => ExitCode::from(2),
                Error::ConvergenceFailure(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
