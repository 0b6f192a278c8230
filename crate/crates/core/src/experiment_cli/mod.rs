//! Experiment configuration, orchestration and output.

pub mod checks;
pub mod config;
pub mod output;
pub mod runs;

pub use checks::{band_limited_data, derivative_rows, modified_energy, predicted_derivative, run_derivative_check, run_verify_identities};
pub use config::{derivative_grid, parse_config, parse_config_for, parse_config_str, Experiment, ExperimentConfig, InitialData};
pub use output::{emit_outputs, format_float, Cell, CheckOutcome, ExperimentOutput, RunManifest, Series};
pub use runs::{
    loglog_slope, radius_series, run_conservation_sweep, run_energies, run_radius_decay, run_scaling_check,
    run_simulate, smallness_lambda, sweep_initial_field,
};

use crate::error::{Error, Result};
use std::path::Path;
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::VerifyIdentities => run_verify_identities(cfg),
        Experiment::Simulate => run_simulate(cfg),
        Experiment::Energies => run_energies(cfg),
        Experiment::ConservationSweep => run_conservation_sweep(cfg),
        Experiment::RadiusDecay => run_radius_decay(cfg),
        Experiment::ScalingCheck => run_scaling_check(cfg),
        Experiment::DerivativeCheck => run_derivative_check(cfg),
    }
}

/// Runs inside a dedicated pool of `threads` workers (all cores if `None`).
pub fn run_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<(ExperimentOutput, RunManifest)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut manifest = RunManifest::new(cfg, pool.current_num_threads());
    let start = Instant::now();
    let out = pool.install(|| run_experiment(cfg))?;
    manifest.wall_clock_secs = start.elapsed().as_secs_f64();
    Ok((out, manifest))
}

/// Runs one experiment and writes its outputs; returns whether every check passed.
pub fn execute(cfg: &ExperimentConfig, threads: Option<usize>, output_dir: &Path) -> Result<bool> {
    let (out, manifest) = run_with_threads(cfg, threads)?;
    emit_outputs(std::slice::from_ref(&out), &manifest, output_dir)?;
    Ok(out.passed())
}

pub fn exit_code(result: &Result<bool>) -> i32 {
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILURE,
        Err(Error::Config(_)) | Err(Error::PrecisionBudget { .. }) => EXIT_CONFIG,
        Err(_) => EXIT_CHECK_FAILURE,
    }
}
