use crate::error::{Error, Result};
use crate::gevrey_ops::{DEFAULT_RELATIVE_NOISE_FLOOR, DEFAULT_TAIL_FRACTION, PRECISION_BUDGET};
use crate::spectral_field::Grid;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifyIdentities,
    Simulate,
    Energies,
    ConservationSweep,
    RadiusDecay,
    ScalingCheck,
    DerivativeCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::VerifyIdentities,
        Experiment::Simulate,
        Experiment::Energies,
        Experiment::ConservationSweep,
        Experiment::RadiusDecay,
        Experiment::ScalingCheck,
        Experiment::DerivativeCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyIdentities => "verify-identities",
            Experiment::Simulate => "simulate",
            Experiment::Energies => "energies",
            Experiment::ConservationSweep => "conservation-sweep",
            Experiment::RadiusDecay => "radius-decay",
            Experiment::ScalingCheck => "scaling-check",
            Experiment::DerivativeCheck => "derivative-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    GevreyRandom,
    Soliton,
}

/// A fully resolved experiment configuration. Serializes to the same schema
/// [`parse_config`] reads, so a manifest snapshot can be fed back in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub checkpoint_every: f64,
    pub sigma_list: Vec<f64>,
    /// Target `‖Iu₀‖` at the largest σ of the conservation sweep, and the
    /// smallness target of the scaling check.
    pub epsilon0: f64,
    /// Window of the conservation sweep.
    pub delta: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub tail_fraction: f64,
    /// Estimator floor relative to `max|û|`.
    pub noise_floor: f64,
    pub initial_data: InitialData,
    /// Decay rate of the random Gevrey data.
    pub sigma0: f64,
    /// Coefficient scale of the random Gevrey data.
    pub amplitude: f64,
    pub kappa: f64,
    pub lambdas: Vec<u32>,
    /// Coarser finite-difference step; the check also runs at half of it.
    pub dt_fd: f64,
    /// Grid sizes for the `E², E³, E⁴` derivative levels.
    pub derivative_grids: [usize; 3],
    pub bound_samples: usize,
}

/// File schema: every field optional except `experiment`. Field-level type
/// errors, unknown keys and duplicate keys are all rejected by serde.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    n: Option<usize>,
    #[serde(rename = "L")]
    length: Option<f64>,
    dt: Option<f64>,
    t_end: Option<f64>,
    checkpoint_every: Option<f64>,
    sigma: Option<f64>,
    sigma_list: Option<Vec<f64>>,
    epsilon0: Option<f64>,
    delta: Option<f64>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    tail_fraction: Option<f64>,
    noise_floor: Option<f64>,
    initial_data: Option<InitialData>,
    sigma0: Option<f64>,
    amplitude: Option<f64>,
    kappa: Option<f64>,
    lambdas: Option<Vec<u32>>,
    dt_fd: Option<f64>,
    derivative_grids: Option<[usize; 3]>,
    bound_samples: Option<usize>,
}

impl ExperimentConfig {
    /// The default configuration of one experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            n: 256,
            length: 64.0,
            dt: 1e-3,
            t_end: 1.0,
            checkpoint_every: 0.1,
            sigma_list: vec![0.05, 0.1, 0.2, 0.4],
            epsilon0: 0.1,
            delta: 0.1,
            seed: 1,
            output_dir: PathBuf::from("kdv-lab-out").join(experiment.name()),
            tail_fraction: DEFAULT_TAIL_FRACTION,
            noise_floor: DEFAULT_RELATIVE_NOISE_FLOOR,
            initial_data: InitialData::GevreyRandom,
            sigma0: 2.0,
            amplitude: 0.2,
            kappa: 0.5,
            lambdas: vec![1, 2, 4],
            dt_fd: 1e-3,
            derivative_grids: [128, 64, 32],
            bound_samples: 10_000,
        };
        match experiment {
            Experiment::ConservationSweep => Self { n: 128, length: 16.0, sigma0: 1.0, ..base },
            Experiment::Energies => Self { sigma_list: vec![0.1, 0.4], t_end: 0.5, ..base },
            Experiment::RadiusDecay => {
                Self { sigma0: 1.0, dt: 5e-3, t_end: 20.0, checkpoint_every: 1.0, ..base }
            }
            Experiment::ScalingCheck => Self { sigma0: 1.0, sigma_list: vec![0.1, 0.5], dt: 2e-3, ..base },
            Experiment::DerivativeCheck => Self { sigma_list: vec![0.2], sigma0: 1.0, amplitude: 1.0, ..base },
            _ => base,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length)
    }

    /// Largest `σ` used anywhere in the run.
    pub fn sigma_max(&self) -> f64 {
        self.sigma_list.iter().copied().fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        let grid = self.grid().map_err(|e| Error::Config(format!("n/L: {e}")))?;
        for (name, v) in [("dt", self.dt), ("checkpoint_every", self.checkpoint_every), ("dt_fd", self.dt_fd)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, format!("{v} must be positive"));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("{} must be nonnegative", self.t_end));
        }
        if self.checkpoint_every < self.dt {
            return bad("checkpoint_every", format!("{} is below dt = {}", self.checkpoint_every, self.dt));
        }
        if self.sigma_list.is_empty() {
            return bad("sigma_list", "must not be empty".into());
        }
        for &s in &self.sigma_list {
            if !(s >= 0.0 && s.is_finite()) {
                return bad("sigma", format!("{s} must be nonnegative"));
            }
            let product = s * grid.xi_max();
            if product > PRECISION_BUDGET {
                return bad("sigma", format!("sigma*xi_max = {product} exceeds {PRECISION_BUDGET}"));
            }
        }
        if self.experiment == Experiment::DerivativeCheck {
            for &n in &self.derivative_grids {
                let g = derivative_grid(n).map_err(|e| Error::Config(format!("derivative_grids: {e}")))?;
                for &s in &self.sigma_list {
                    let product = s * g.xi_max();
                    if product > PRECISION_BUDGET {
                        return bad("sigma", format!("sigma*xi_max = {product} exceeds {PRECISION_BUDGET} at n = {n}"));
                    }
                }
            }
        }
        if !(self.epsilon0 >= 0.0 && self.epsilon0.is_finite()) {
            return bad("epsilon0", format!("{} must be nonnegative", self.epsilon0));
        }
        if !(self.delta > 0.0) {
            return bad("delta", format!("{} must be positive", self.delta));
        }
        let ratio = self.delta / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return bad("delta", format!("{} is not a multiple of dt = {}", self.delta, self.dt));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return bad("tail_fraction", format!("{} must lie in (0, 1]", self.tail_fraction));
        }
        if !(self.noise_floor > 0.0 && self.noise_floor < 1.0) {
            return bad("noise_floor", format!("{} must lie in (0, 1)", self.noise_floor));
        }
        if !(self.sigma0 > 0.0) {
            return bad("sigma0", format!("{} must be positive", self.sigma0));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return bad("amplitude", format!("{} must be nonnegative", self.amplitude));
        }
        if !(self.kappa > 0.0) {
            return bad("kappa", format!("{} must be positive", self.kappa));
        }
        if self.lambdas.contains(&0) {
            return bad("lambdas", "every lambda must be at least 1".into());
        }
        Ok(())
    }
}

/// Grid of one derivative-check level: `L = Nπ/8`, so the lattice spacing
/// halves as `N` doubles and the data band stays at `|ξ| ≤ 8π/N · N/6`.
pub fn derivative_grid(n: usize) -> Result<Grid> {
    Grid::new(n, n as f64 * std::f64::consts::PI / 8.0)
}

fn overlay(raw: RawConfig, experiment: Experiment) -> Result<ExperimentConfig> {
    let d = ExperimentConfig::defaults(experiment);
    let sigma_list = match (raw.sigma, raw.sigma_list) {
        (Some(_), Some(_)) => return Err(Error::Config("sigma and sigma_list are mutually exclusive".into())),
        (Some(s), None) => vec![s],
        (None, Some(l)) => l,
        (None, None) => d.sigma_list,
    };
    let cfg = ExperimentConfig {
        experiment,
        n: raw.n.unwrap_or(d.n),
        length: raw.length.unwrap_or(d.length),
        dt: raw.dt.unwrap_or(d.dt),
        t_end: raw.t_end.unwrap_or(d.t_end),
        checkpoint_every: raw.checkpoint_every.unwrap_or(d.checkpoint_every),
        sigma_list,
        epsilon0: raw.epsilon0.unwrap_or(d.epsilon0),
        delta: raw.delta.unwrap_or(d.delta),
        seed: raw.seed.unwrap_or(d.seed),
        output_dir: raw.output_dir.unwrap_or(d.output_dir),
        tail_fraction: raw.tail_fraction.unwrap_or(d.tail_fraction),
        noise_floor: raw.noise_floor.unwrap_or(d.noise_floor),
        initial_data: raw.initial_data.unwrap_or(d.initial_data),
        sigma0: raw.sigma0.unwrap_or(d.sigma0),
        amplitude: raw.amplitude.unwrap_or(d.amplitude),
        kappa: raw.kappa.unwrap_or(d.kappa),
        lambdas: raw.lambdas.unwrap_or(d.lambdas),
        dt_fd: raw.dt_fd.unwrap_or(d.dt_fd),
        derivative_grids: raw.derivative_grids.unwrap_or(d.derivative_grids),
        bound_samples: raw.bound_samples.unwrap_or(d.bound_samples),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a JSON config. `experiment` may be omitted when `expected` names
/// it; if both are given they must agree.
pub fn parse_config_str(text: &str, expected: Option<Experiment>) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("schema violation: {e}")))?;
    let experiment = match (raw.experiment, expected) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!("config is for {a}, but {b} was requested")));
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::Config("experiment: missing field".into())),
    };
    overlay(raw, experiment)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config_for(path, None)
}

pub fn parse_config_for(path: &Path, expected: Option<Experiment>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for e in Experiment::ALL {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn snapshot_round_trips() {
        let cfg = ExperimentConfig::defaults(Experiment::ConservationSweep);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config_str(&text, None).unwrap(), cfg);
    }
}
