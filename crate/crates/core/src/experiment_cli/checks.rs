use super::config::{derivative_grid, ExperimentConfig};
use super::output::{ExperimentOutput, Series};
use crate::error::Result;
use crate::identity_lab::{
    check_beta_bounds, check_factorial, check_quartic_consistency, run_identity_suite, BoundConfig, CheckReport,
    IdentitySuiteConfig,
};
use crate::kdv_solver::{gevrey_random_data, Stepper};
use crate::multilinear_energies::{
    beta3_multiplier, energy2_multiplier, lambda4_fast, lambda_k, m3_multiplier, m4_multiplier, m5_multiplier,
    HIERARCHY_C,
};
use crate::spectral_field::SpectralField;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::time::Instant;

pub const DERIVATIVE_REL_TOL: f64 = 1e-4;
/// Accepted range of the error ratio when the finite-difference step halves.
pub const SECOND_ORDER_RATIO: (f64, f64) = (3.2, 4.8);
/// Largest integrator step used to reach `±h`.
const FD_SUBSTEP: f64 = 1e-4;
/// At `σ = 0` the derivative must vanish relative to the energy itself.
const ZERO_SIGMA_TOL: f64 = 1e-9;

/// Random Gevrey data restricted to `|k| ≤ cut/2`, so every pair sum stays
/// on the dealiased band and the Galerkin system obeys the exact identities.
pub fn band_limited_data(sigma0: f64, amplitude: f64, seed: u64, n: usize) -> Result<SpectralField> {
    let grid = derivative_grid(n)?;
    let mut f = gevrey_random_data(sigma0, amplitude, seed, &grid);
    let half = grid.dealias_cut() as i64 / 2;
    for k in half + 1..=grid.dealias_cut() as i64 {
        f.set_mode(k, Complex64::new(0.0, 0.0));
    }
    Ok(f)
}

/// `u(t)` for `t = ±h` with integrator steps of at most [`FD_SUBSTEP`].
fn flow(u: &SpectralField, t: f64) -> Result<SpectralField> {
    let steps = (t.abs() / FD_SUBSTEP).ceil().max(1.0) as usize;
    Stepper::new(u.grid(), t / steps as f64).advance_span(u, 0.0, steps)
}

/// `E²`, `E³` or `E⁴` for `level` 2, 3 or 4.
pub fn modified_energy(level: usize, sigma: f64, u: &SpectralField) -> Result<f64> {
    let mut e = lambda_k(&energy2_multiplier(sigma), u, 2)?.re;
    if level >= 3 {
        e += lambda_k(&beta3_multiplier(sigma), u, 3)?.re;
    }
    if level >= 4 {
        e += lambda4_fast(u, sigma)?.re;
    }
    Ok(e)
}

/// `Λ₃(M₃)`, `Λ₄(M₄)` or `Λ₅(M₅)`, the predicted `dE^level/dt`.
pub fn predicted_derivative(level: usize, sigma: f64, u: &SpectralField) -> Result<f64> {
    let v = match level {
        2 => lambda_k(&m3_multiplier(sigma), u, 3)?,
        3 => lambda_k(&m4_multiplier(sigma), u, 4)?,
        _ => lambda_k(&m5_multiplier(sigma), u, 5)?,
    };
    Ok(v.re)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeRow {
    pub level: usize,
    pub n: usize,
    pub sigma: f64,
    pub h: f64,
    pub finite_difference: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

/// Centered differences at steps `h` and `h/2` for one level and `σ`.
pub fn derivative_rows(level: usize, n: usize, sigma: f64, h: f64, u: &SpectralField) -> Result<Vec<DerivativeRow>> {
    let predicted = predicted_derivative(level, sigma, u)?;
    let energy = modified_energy(level, sigma, u)?;
    let mut rows = Vec::new();
    for step in [h, 0.5 * h] {
        let plus = modified_energy(level, sigma, &flow(u, step)?)?;
        let minus = modified_energy(level, sigma, &flow(u, -step)?)?;
        let fd = (plus - minus) / (2.0 * step);
        let relative_error = if sigma == 0.0 {
            (fd - predicted).abs() / energy.abs().max(f64::MIN_POSITIVE)
        } else {
            (fd - predicted).abs() / predicted.abs()
        };
        rows.push(DerivativeRow { level, n, sigma, h: step, finite_difference: fd, predicted, relative_error });
    }
    Ok(rows)
}

pub fn run_derivative_check(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    let mut series =
        Series::new("derivatives.csv", &["level", "n", "sigma", "dt_fd", "finite_difference", "predicted", "relative_error"]);
    let mut levels = Vec::new();
    for (i, &n) in cfg.derivative_grids.iter().enumerate() {
        let level = i + 2;
        let u = band_limited_data(cfg.sigma0, cfg.amplitude, cfg.seed, n)?;
        let start = Instant::now();
        for &s in &cfg.sigma_list {
            let rows = derivative_rows(level, n, s, cfg.dt_fd, &u)?;
            for r in &rows {
                series.push(vec![
                    r.level.into(),
                    r.n.into(),
                    r.sigma.into(),
                    r.h.into(),
                    r.finite_difference.into(),
                    r.predicted.into(),
                    r.relative_error.into(),
                ]);
            }
            let (coarse, fine) = (rows[0].relative_error, rows[1].relative_error);
            let ratio = coarse / fine;
            let name = format!("level {level} (n = {n}, sigma = {s})");
            if s == 0.0 {
                let ok = fine <= ZERO_SIGMA_TOL && rows[0].predicted.abs() <= ZERO_SIGMA_TOL;
                out.check(&name, ok, format!("|dE/dt|/E = {fine:e}, prediction {:e}", rows[0].predicted));
            } else {
                let ok = fine <= DERIVATIVE_REL_TOL
                    && coarse <= DERIVATIVE_REL_TOL
                    && ratio >= SECOND_ORDER_RATIO.0
                    && ratio <= SECOND_ORDER_RATIO.1;
                out.check(&name, ok, format!("errors {coarse:e}, {fine:e}; ratio {ratio}"));
            }
            levels.push(json!({
                "level": level, "n": n, "sigma": s,
                "relative_error_coarse": coarse, "relative_error_fine": fine, "ratio": ratio,
            }));
        }
        out.timing(&format!("level{level}_secs"), start.elapsed().as_secs_f64());
    }
    out.series = vec![series];
    out.metric("levels", levels);
    Ok(out)
}

fn report_value(r: &CheckReport) -> Value {
    json!({
        "samples_run": r.samples_run,
        "failure_count": r.failure_count,
        "passed": r.passed(),
        "worst_ratio": r.worst_ratio,
    })
}

/// Tolerance-free identity and bound checks. `sigma_list` is not used: the
/// bound suite carries its own `σ` grid.
pub fn run_verify_identities(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    let mut exact = run_identity_suite(&IdentitySuiteConfig { seed: cfg.seed, ..Default::default() });
    exact.push(check_factorial(6, 25));
    let consistency = check_quartic_consistency(cfg.seed, 100, &[0.1, 0.5, 1.0]);
    let c = consistency.constant.map(|e| e.value()).unwrap_or(HIERARCHY_C);
    let bounds = check_beta_bounds(
        &BoundConfig { samples: cfg.bound_samples, seed: cfg.seed, ..Default::default() },
        c,
    )?;

    let gated: Vec<&CheckReport> =
        exact.iter().chain(consistency.reports()).chain(bounds.families()).collect();
    let mut table = Series::new("checks.csv", &["check", "samples_run", "failure_count", "passed", "worst_ratio", "gating"]);
    let mut failures = Series::new("failures.csv", &["check", "tuple", "lhs", "rhs"]);
    let mut summary = serde_json::Map::new();
    let all = gated.iter().map(|r| (*r, true)).chain([(&bounds.theta_majorant_doubled, false)]);
    for (r, gating) in all {
        let worst = r.worst_ratio.map(super::output::format_float).unwrap_or_default();
        table.push(vec![
            r.check_name.clone().into(),
            r.samples_run.into(),
            r.failure_count.into(),
            r.passed().into(),
            worst.into(),
            gating.into(),
        ]);
        for f in &r.failures {
            failures.push(vec![r.check_name.clone().into(), f.tuple.join(" ").into(), f.lhs.clone().into(), f.rhs.clone().into()]);
        }
        summary.insert(r.check_name.clone(), report_value(r));
        out.timing(&r.check_name, r.elapsed_secs);
        if gating {
            out.check(&r.check_name, r.passed(), format!("{} failures in {} samples", r.failure_count, r.samples_run));
        }
    }
    out.series = vec![table, failures];
    out.metric("constant", consistency.constant);
    out.metric("reports", summary);
    Ok(out)
}
