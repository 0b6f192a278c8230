use clap::{Parser, Subcommand};
use kdv_gevrey::experiment_cli::{exit_code, execute, parse_config_for, Experiment, ExperimentConfig, EXIT_CONFIG};
use kdv_gevrey::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kdv-lab", version, about = "KdV Gevrey-radius and modified-energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration; defaults apply to omitted fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Exact polynomial identities, factorial inequality and multiplier bounds.
    VerifyIdentities,
    /// Evolve initial data and record the trajectory.
    Simulate,
    /// Modified energies along a trajectory.
    Energies,
    /// Growth of the quartic modified energy against sigma.
    ConservationSweep,
    /// Estimated analyticity radius along a trajectory.
    RadiusDecay,
    /// Norm and dynamic consistency of the KdV scaling.
    ScalingCheck,
    /// Finite-difference check of the energy derivatives.
    DerivativeCheck,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::VerifyIdentities => Experiment::VerifyIdentities,
            Command::Simulate => Experiment::Simulate,
            Command::Energies => Experiment::Energies,
            Command::ConservationSweep => Experiment::ConservationSweep,
            Command::RadiusDecay => Experiment::RadiusDecay,
            Command::ScalingCheck => Experiment::ScalingCheck,
            Command::DerivativeCheck => Experiment::DerivativeCheck,
        }
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let experiment = cli.command.experiment();
    let mut cfg = match &cli.config {
        Some(path) => parse_config_for(path, Some(experiment))?,
        None => ExperimentConfig::defaults(experiment),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let result = execute(&cfg, cli.threads, &cfg.output_dir);
    match &result {
        Ok(true) => println!("{}: all checks passed ({})", cfg.experiment, cfg.output_dir.display()),
        Ok(false) => println!("{}: check failures, see {}", cfg.experiment, cfg.output_dir.join("summary.json").display()),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
