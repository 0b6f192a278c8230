use super::config::{ExperimentConfig, InitialData};
use super::output::{ExperimentOutput, Series};
use crate::error::{Error, Result};
use crate::gevrey_ops::{apply_i, estimate_radius, gevrey_norm, rescale_field};
use crate::kdv_solver::{evolve, gevrey_random_data, soliton, SolverConfig};
use crate::multilinear_energies::energy_report;
use crate::spectral_field::{inverse_transform, l2_norm, Grid, SpectralField};
use std::time::Instant;

/// Slope threshold of `log Δ₄` against `log σ`.
pub const CONSERVATION_SLOPE_MIN: f64 = 3.5;
/// Relative change of `‖u‖²` allowed over the sweep window.
pub const L2_RESIDUAL_TOL: f64 = 1e-8;
pub const NORM_IDENTITY_TOL: f64 = 1e-12;
/// Rescaled-then-evolved against evolved-then-rescaled, relative to `max|û|`.
pub const DYNAMIC_TOL: f64 = 1e-10;
pub const SOLITON_FLATNESS_TOL: f64 = 0.02;
pub const SOLITON_RADIUS_TOL: f64 = 0.05;

pub fn initial_field(cfg: &ExperimentConfig, grid: &Grid) -> Result<SpectralField> {
    match cfg.initial_data {
        InitialData::GevreyRandom => Ok(gevrey_random_data(cfg.sigma0, cfg.amplitude, cfg.seed, grid)),
        InitialData::Soliton => soliton(cfg.kappa, 0.5 * grid.length(), grid),
    }
}

fn solver(cfg: &ExperimentConfig) -> Result<SolverConfig> {
    SolverConfig::new(cfg.dt, cfg.t_end, cfg.checkpoint_every)
}

/// Least-squares slope of `log y` against `log x` over points with `x, y > 0`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid()?;
    let u0 = initial_field(cfg, &grid)?;
    let start = Instant::now();
    let traj = evolve(&u0, &solver(cfg)?)?;
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    out.timing("evolve_secs", start.elapsed().as_secs_f64());
    let l2_0 = l2_norm(&traj.checkpoints[0].field);
    let mut series = Series::new("trajectory.csv", &["t", "l2_norm", "l2_relative_change", "max_abs_u", "max_abs_coeff"]);
    for cp in &traj.checkpoints {
        let l2 = l2_norm(&cp.field);
        let change = if l2_0 > 0.0 { (l2 - l2_0) / l2_0 } else { 0.0 };
        let umax = inverse_transform(&cp.field)?.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        series.push(vec![cp.t.into(), l2.into(), change.into(), umax.into(), cp.field.max_abs().into()]);
    }
    let last = &traj.last().field;
    let mut field = Series::new("final_field.csv", &["k", "xi", "re", "im"]);
    for k in 0..=grid.dealias_cut() as i64 {
        let c = last.coeff(k);
        field.push(vec![k.into(), grid.xi(k).into(), c.re.into(), c.im.into()]);
    }
    out.series = vec![series, field];
    out.metric("l2_drift", traj.l2_drift);
    out.metric("t_end", traj.last().t);
    out.metric("checkpoints", traj.checkpoints.len());
    Ok(out)
}

pub fn run_energies(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid()?;
    let u0 = initial_field(cfg, &grid)?;
    let start = Instant::now();
    let traj = evolve(&u0, &solver(cfg)?)?;
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    out.timing("evolve_secs", start.elapsed().as_secs_f64());
    let start = Instant::now();
    let mut series = Series::new(
        "energies.csv",
        &["t", "sigma", "e2", "e3", "e4", "lambda3_beta3", "lambda4_beta4", "gevrey_norm", "imag_residual"],
    );
    let mut max_e4_change = 0.0f64;
    for &s in &cfg.sigma_list {
        let mut e4_0 = None;
        for cp in &traj.checkpoints {
            let r = energy_report(s, &cp.field, cp.t)?;
            let base = *e4_0.get_or_insert(r.e4);
            max_e4_change = max_e4_change.max((r.e4 - base).abs());
            series.push(vec![
                r.t.into(),
                r.sigma.into(),
                r.e2.into(),
                r.e3.into(),
                r.e4.into(),
                r.lambda3_beta3.into(),
                r.lambda4_beta4.into(),
                r.gevrey_norm.into(),
                r.imag_residual.into(),
            ]);
        }
    }
    out.timing("energy_secs", start.elapsed().as_secs_f64());
    out.series = vec![series];
    out.metric("l2_drift", traj.l2_drift);
    out.metric("max_abs_e4_change", max_e4_change);
    Ok(out)
}

/// Rows of the conservation sweep, one per `σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub e4_0: f64,
    pub e4_delta: f64,
    pub delta4: f64,
    pub e2_0: f64,
    pub e2_delta: f64,
    pub delta2: f64,
    pub max_e4_minus_e2: f64,
}

/// Fixed random Gevrey data scaled so `‖Iu₀‖ = ε₀` at the largest `σ`.
pub fn sweep_initial_field(cfg: &ExperimentConfig, grid: &Grid) -> Result<SpectralField> {
    let raw = match cfg.initial_data {
        InitialData::GevreyRandom => gevrey_random_data(cfg.sigma0, 1.0, cfg.seed, grid),
        InitialData::Soliton => soliton(cfg.kappa, 0.5 * grid.length(), grid)?,
    };
    let norm = l2_norm(&apply_i(cfg.sigma_max(), &raw)?);
    if norm == 0.0 || cfg.epsilon0 == 0.0 {
        return Ok(SpectralField::zeros(grid));
    }
    Ok(raw.scaled(cfg.epsilon0 / norm))
}

pub fn run_conservation_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid()?;
    let u0 = sweep_initial_field(cfg, &grid)?;
    let start = Instant::now();
    let traj = evolve(&u0, &SolverConfig::new(cfg.dt, cfg.delta, cfg.delta)?)?;
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    out.timing("evolve_secs", start.elapsed().as_secs_f64());
    let (a, b) = (&traj.checkpoints[0].field, &traj.last().field);
    let start = Instant::now();
    let mut rows = Vec::new();
    for &s in &cfg.sigma_list {
        let r0 = energy_report(s, a, 0.0)?;
        let r1 = energy_report(s, b, cfg.delta)?;
        rows.push(SweepRow {
            sigma: s,
            e4_0: r0.e4,
            e4_delta: r1.e4,
            delta4: (r1.e4 - r0.e4).abs(),
            e2_0: r0.e2,
            e2_delta: r1.e2,
            delta2: (r1.e2 - r0.e2).abs(),
            max_e4_minus_e2: (r0.e4 - r0.e2).abs().max((r1.e4 - r1.e2).abs()),
        });
    }
    out.timing("energy_secs", start.elapsed().as_secs_f64());

    let mut series = Series::new("conservation.csv", &["sigma", "E4_0", "E4_delta", "delta4", "E2_0", "E2_delta", "delta2"]);
    for r in &rows {
        series.push(vec![
            r.sigma.into(),
            r.e4_0.into(),
            r.e4_delta.into(),
            r.delta4.into(),
            r.e2_0.into(),
            r.e2_delta.into(),
            r.delta2.into(),
        ]);
    }
    out.series = vec![series];

    let l2a = l2_norm(a).powi(2);
    let l2_residual = if l2a > 0.0 { (l2_norm(b).powi(2) - l2a).abs() / l2a } else { 0.0 };
    let eps = cfg.epsilon0;
    let slope = loglog_slope(&rows.iter().map(|r| (r.sigma, r.delta4)).collect::<Vec<_>>());
    let eps5 = eps.powi(5);
    let positive: Vec<&SweepRow> = rows.iter().filter(|r| r.sigma > 0.0).collect();
    let delta4_over_eps5 = positive.iter().map(|r| r.delta4 / eps5).fold(0.0, f64::max);
    let sigma4_constant = positive.iter().map(|r| r.delta4 / (eps5 * r.sigma.powi(4))).fold(0.0, f64::max);
    let comparability = rows.iter().map(|r| r.max_e4_minus_e2).fold(0.0, f64::max) / (eps.powi(3) + eps.powi(4));

    // differences within a few dozen ulps of E⁴ are rounding, not dynamics
    let floor = 32.0 * f64::EPSILON * rows.iter().map(|r| r.e4_0.abs()).fold(0.0, f64::max);
    let resolved: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.delta4 > floor).map(|r| (r.sigma, r.delta4)).collect();
    out.metric("delta4_noise_floor", floor);
    out.metric("points_above_floor", resolved.len());
    out.metric("slope_delta4_above_floor", loglog_slope(&resolved));
    out.metric("epsilon0", eps);
    out.metric("delta", cfg.delta);
    out.metric("l2_relative_residual", l2_residual);
    out.metric("slope_delta4", slope);
    out.metric("delta4_over_eps0_5", if eps > 0.0 { delta4_over_eps5 } else { 0.0 });
    out.metric("delta4_over_eps0_5_sigma4", if eps > 0.0 { sigma4_constant } else { 0.0 });
    out.metric("comparability_constant", if eps > 0.0 { comparability } else { 0.0 });

    out.check("l2 residual", l2_residual <= L2_RESIDUAL_TOL, format!("{l2_residual:e} <= {L2_RESIDUAL_TOL:e}"));
    if u0.is_zero() {
        let all_zero = rows.iter().all(|r| r.delta4 == 0.0 && r.delta2 == 0.0);
        out.check("zero data", all_zero, "every delta vanishes");
    } else {
        match slope {
            Some(p) => out.check("delta4 slope", p >= CONSERVATION_SLOPE_MIN, format!("{p} >= {CONSERVATION_SLOPE_MIN}")),
            None => out.check("delta4 slope", false, "fewer than two positive (sigma, delta4) points"),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusRow {
    pub t: f64,
    pub sigma_hat: f64,
    pub fit_rms: f64,
    pub compensated: f64,
    pub flagged: bool,
}

pub fn radius_series(cfg: &ExperimentConfig, u0: &SpectralField) -> Result<Vec<RadiusRow>> {
    let traj = evolve(u0, &solver(cfg)?)?;
    let mut rows = Vec::with_capacity(traj.checkpoints.len());
    for cp in &traj.checkpoints {
        let floor = cfg.noise_floor * cp.field.max_abs();
        let row = match estimate_radius(&cp.field, cfg.tail_fraction, if floor > 0.0 { floor } else { f64::MIN_POSITIVE })
        {
            Ok(est) => RadiusRow {
                t: cp.t,
                sigma_hat: est.sigma_hat,
                fit_rms: est.fit_rms,
                compensated: est.sigma_hat * cp.t.powf(0.25),
                flagged: est.noise_floor_hit,
            },
            Err(Error::Estimation(_)) => {
                RadiusRow { t: cp.t, sigma_hat: f64::NAN, fit_rms: f64::NAN, compensated: f64::NAN, flagged: true }
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_radius_decay(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid()?;
    let u0 = initial_field(cfg, &grid)?;
    let start = Instant::now();
    let rows = radius_series(cfg, &u0)?;
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    out.timing("run_secs", start.elapsed().as_secs_f64());
    let mut series = Series::new("radius.csv", &["t", "sigma_hat", "fit_rms", "compensated", "flagged"]);
    for r in &rows {
        series.push(vec![r.t.into(), r.sigma_hat.into(), r.fit_rms.into(), r.compensated.into(), r.flagged.into()]);
    }
    out.series = vec![series];

    let valid: Vec<&RadiusRow> = rows.iter().filter(|r| r.sigma_hat.is_finite()).collect();
    let hi = valid.iter().map(|r| r.sigma_hat).fold(f64::NEG_INFINITY, f64::max);
    let lo = valid.iter().map(|r| r.sigma_hat).fold(f64::INFINITY, f64::min);
    let mean = valid.iter().map(|r| r.sigma_hat).sum::<f64>() / valid.len().max(1) as f64;
    let spread = if valid.is_empty() { f64::NAN } else { (hi - lo) / mean };
    let late: Vec<f64> = valid.iter().filter(|r| r.t >= 1.0).map(|r| r.compensated).collect();
    let empirical_c = late.iter().copied().fold(f64::INFINITY, f64::min);
    out.metric("sigma_hat_initial", rows.first().map(|r| r.sigma_hat));
    out.metric("sigma_hat_min", lo);
    out.metric("sigma_hat_max", hi);
    out.metric("sigma_hat_relative_spread", spread);
    out.metric("flagged_rows", rows.iter().filter(|r| r.flagged).count());
    out.metric("min_compensated_t_ge_1", if late.is_empty() { None } else { Some(empirical_c) });

    out.check("estimates available", !valid.is_empty(), format!("{} of {} rows estimated", valid.len(), rows.len()));
    match cfg.initial_data {
        InitialData::Soliton => {
            let expected = std::f64::consts::PI / (2.0 * cfg.kappa);
            let worst = valid.iter().map(|r| (r.sigma_hat - expected).abs() / expected).fold(0.0, f64::max);
            out.metric("soliton_radius", expected);
            out.metric("soliton_radius_worst_relative_error", worst);
            out.check("soliton radius", worst <= SOLITON_RADIUS_TOL, format!("{worst} <= {SOLITON_RADIUS_TOL}"));
            out.check("soliton flatness", spread <= SOLITON_FLATNESS_TOL, format!("{spread} <= {SOLITON_FLATNESS_TOL}"));
        }
        InitialData::GevreyRandom => {
            if !late.is_empty() {
                out.check("compensated radius positive", empirical_c > 0.0, format!("min sigma_hat t^(1/4) = {empirical_c}"));
            }
        }
    }
    Ok(out)
}

/// `λ = (1 + ‖u₀‖_{G^{σ₀}}/ε₀)^{2/3}`, rounded up to an integer.
pub fn smallness_lambda(norm: f64, epsilon0: f64) -> Result<u32> {
    if !(epsilon0 > 0.0) {
        return Err(Error::Domain(format!("epsilon0 = {epsilon0} must be positive")));
    }
    let l = (1.0 + norm / epsilon0).powf(2.0 / 3.0).ceil();
    if l > u32::MAX as f64 {
        return Err(Error::Domain(format!("lambda = {l} out of range")));
    }
    Ok(l as u32)
}

pub fn run_scaling_check(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid()?;
    let u0 = initial_field(cfg, &grid)?;
    let mut out = ExperimentOutput::new(cfg.experiment.name());
    let start = Instant::now();
    let mut norms = Series::new("scaling_norms.csv", &["lambda", "sigma", "rescaled_norm", "predicted_norm", "relative_error"]);
    let mut dynamics = Series::new("scaling_dynamics.csv", &["lambda", "t", "max_abs_difference", "relative_difference"]);
    let mut worst_norm = 0.0f64;
    let mut worst_dynamic = 0.0f64;
    let base = evolve(&u0, &SolverConfig::new(cfg.dt, cfg.t_end, cfg.t_end.max(cfg.dt))?)?;
    for &lam in &cfg.lambdas {
        let l = lam as f64;
        let scaled = rescale_field(&u0, l)?;
        for &s in &cfg.sigma_list {
            let lhs = gevrey_norm(s, &scaled)?;
            let rhs = l.powf(-1.5) * gevrey_norm(s / l, &u0)?;
            let rel = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs.abs() };
            worst_norm = worst_norm.max(rel);
            norms.push(vec![(lam as i64).into(), s.into(), lhs.into(), rhs.into(), rel.into()]);
        }
        let l3 = l.powi(3);
        let a = rescale_field(&base.last().field, l)?;
        let t = l3 * cfg.t_end;
        let b = evolve(&scaled, &SolverConfig::new(l3 * cfg.dt, t, t.max(l3 * cfg.dt))?)?;
        let b = &b.last().field;
        let diff = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let scale = a.max_abs();
        let rel = if scale > 0.0 { diff / scale } else { diff };
        worst_dynamic = worst_dynamic.max(rel);
        dynamics.push(vec![(lam as i64).into(), t.into(), diff.into(), rel.into()]);
    }
    out.timing("run_secs", start.elapsed().as_secs_f64());

    let norm0 = gevrey_norm(cfg.sigma0, &u0)?;
    let lam_star = smallness_lambda(norm0, cfg.epsilon0)?;
    let small = gevrey_norm(cfg.sigma0, &rescale_field(&u0, lam_star as f64)?)?;
    out.series = vec![norms, dynamics];
    out.metric("worst_norm_identity_error", worst_norm);
    out.metric("worst_dynamic_difference", worst_dynamic);
    out.metric("initial_gevrey_norm", norm0);
    out.metric("smallness_lambda", lam_star);
    out.metric("rescaled_gevrey_norm", small);
    out.check("norm identity", worst_norm <= NORM_IDENTITY_TOL, format!("{worst_norm:e} <= {NORM_IDENTITY_TOL:e}"));
    out.check("dynamic consistency", worst_dynamic <= DYNAMIC_TOL, format!("{worst_dynamic:e} <= {DYNAMIC_TOL:e}"));
    out.check(
        "smallness after rescaling",
        small <= cfg.epsilon0,
        format!("lambda = {lam_star}: {small} <= {}", cfg.epsilon0),
    );
    Ok(out)
}
