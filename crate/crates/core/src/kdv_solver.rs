//! Integrating-factor RK4 for `u_t + u_xxx + u u_x = 0` on the periodic grid,
//! plus the soliton and Gevrey-random initial data generators.

use crate::error::{Error, Result};
use crate::spectral_field::{dealias, forward_transform, inverse_transform, l2_norm, Grid, SpectralField};
use num_complex::Complex64;
use rand_core::RngCore;
use rand_xoshiro::SplitMix64;
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    #[serde(rename = "integrating-factor RK4")]
    IntegratingFactorRk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub checkpoint_every: f64,
    pub integrator: Integrator,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, checkpoint_every: f64) -> Result<Self> {
        let cfg = Self { dt, t_end, checkpoint_every, integrator: Integrator::IntegratingFactorRk4 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        if !(self.checkpoint_every >= self.dt) {
            return Err(Error::Config(format!(
                "checkpoint_every = {} must be at least dt = {}",
                self.checkpoint_every, self.dt
            )));
        }
        Ok(())
    }
}

/// Advective step limit `c_cfl / (ξ_cut · max|u|)`.
pub fn stable_dt(field: &SpectralField, c_cfl: f64) -> Result<f64> {
    let g = field.grid();
    let umax = inverse_transform(field)?.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let xi_cut = g.xi(g.dealias_cut() as i64);
    if umax == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(c_cfl / (xi_cut * umax))
}

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub t: f64,
    pub field: SpectralField,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub checkpoints: Vec<Checkpoint>,
    /// `max_t |‖u(t)‖ - ‖u₀‖| / ‖u₀‖` over the checkpoints.
    pub l2_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("trajectory always holds the initial state")
    }
}

/// Fourier coefficients of `-u u_x = -(1/2)(u²)_x`, dealiased.
pub fn rhs_nonlinear(field: &SpectralField) -> SpectralField {
    let g = field.grid();
    let mut buf = field.coeffs().to_vec();
    g.fft_inverse(&mut buf);
    let inv_n = 1.0 / g.n() as f64;
    for c in buf.iter_mut() {
        *c = Complex64::new(c.re * c.re * inv_n, 0.0);
    }
    g.fft_forward(&mut buf);
    let cut = g.dealias_cut() as i64;
    for (slot, c) in buf.iter_mut().enumerate() {
        let k = g.k_of_slot(slot);
        if k == 0 || k.abs() > cut {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, -0.5 * g.xi(k));
        }
    }
    let mut out = SpectralField::from_coeffs_unchecked(g, buf);
    out.symmetrize_in_place();
    out
}

/// Precomputed integrating factors for one step size.
#[derive(Clone, Debug)]
pub struct Stepper {
    dt: f64,
    nonlinear: bool,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: &Grid, dt: f64) -> Self {
        let phase = |k: i64, h: f64| {
            let xi = grid.xi(k);
            Complex64::from_polar(1.0, xi * xi * xi * h)
        };
        let full = (0..grid.n()).map(|s| phase(grid.k_of_slot(s), dt)).collect();
        let half = (0..grid.n()).map(|s| phase(grid.k_of_slot(s), 0.5 * dt)).collect();
        Self { dt, nonlinear: true, full, half }
    }

    /// Test hook: drop the nonlinear term and keep only the exact linear flow.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nl(&self, v: &[Complex64], grid: &Grid) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![Complex64::new(0.0, 0.0); v.len()];
        }
        let f = SpectralField::from_coeffs_unchecked(grid, v.to_vec());
        rhs_nonlinear(&f).coeffs().iter().map(|c| c * self.dt).collect()
    }

    /// One step; `t` is only used to label a blow-up error.
    pub fn advance(&self, field: &SpectralField, t: f64) -> Result<SpectralField> {
        let g = field.grid();
        let u = field.coeffs();
        let n = u.len();
        let (e, e2) = (&self.full, &self.half);
        let a = self.nl(u, g);
        let tmp: Vec<Complex64> = (0..n).map(|i| e2[i] * (u[i] + a[i] * 0.5)).collect();
        let b = self.nl(&tmp, g);
        let tmp: Vec<Complex64> = (0..n).map(|i| e2[i] * u[i] + b[i] * 0.5).collect();
        let c = self.nl(&tmp, g);
        let tmp: Vec<Complex64> = (0..n).map(|i| e[i] * u[i] + e2[i] * c[i]).collect();
        let d = self.nl(&tmp, g);
        let out: Vec<Complex64> = (0..n)
            .map(|i| e[i] * u[i] + (e[i] * a[i] + e2[i] * (b[i] + c[i]) * 2.0 + d[i]) / 6.0)
            .collect();
        if out.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            let max_coeff = u.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            return Err(Error::BlowUp { t: t + self.dt, max_coeff });
        }
        let mut f = SpectralField::from_coeffs_unchecked(g, out);
        f.symmetrize_in_place();
        Ok(f)
    }
}

impl Stepper {
    /// `steps` steps from `field`, carried in the interaction variable
    /// `v = e^{-iξ³τ} û` with `τ` measured from the start of the span. The
    /// linear phases are recomputed from `τ` rather than compounded, so the
    /// exact linear flow adds one rounding per span instead of one per step.
    pub fn advance_span(&self, field: &SpectralField, t0: f64, steps: usize) -> Result<SpectralField> {
        let g = field.grid();
        let n = g.n();
        let w: Vec<f64> = (0..n)
            .map(|s| {
                let x = g.xi(g.k_of_slot(s));
                x * x * x
            })
            .collect();
        let phase = |tau: f64| -> Vec<Complex64> { w.iter().map(|&wi| Complex64::from_polar(1.0, wi * tau)).collect() };
        let (e, e2) = (&self.full, &self.half);
        let mut v = field.coeffs().to_vec();
        for step in 0..steps {
            let tau = step as f64 * self.dt;
            let now = phase(tau);
            let back = phase(-(tau + self.dt));
            let u: Vec<Complex64> = (0..n).map(|i| now[i] * v[i]).collect();
            let a = self.nl(&u, g);
            let tmp: Vec<Complex64> = (0..n).map(|i| e2[i] * (u[i] + a[i] * 0.5)).collect();
            let b = self.nl(&tmp, g);
            let tmp: Vec<Complex64> = (0..n).map(|i| e2[i] * u[i] + b[i] * 0.5).collect();
            let c = self.nl(&tmp, g);
            let tmp: Vec<Complex64> = (0..n).map(|i| e[i] * u[i] + e2[i] * c[i]).collect();
            let d = self.nl(&tmp, g);
            for i in 0..n {
                v[i] += back[i] * (e[i] * a[i] + e2[i] * (b[i] + c[i]) * 2.0 + d[i]) / 6.0;
            }
            if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                let max_coeff = u.iter().fold(0.0f64, |m, c| m.max(c.norm()));
                return Err(Error::BlowUp { t: t0 + tau + self.dt, max_coeff });
            }
        }
        let end = phase(steps as f64 * self.dt);
        let out = (0..n).map(|i| end[i] * v[i]).collect();
        let mut f = SpectralField::from_coeffs_unchecked(g, out);
        f.symmetrize_in_place();
        Ok(f)
    }
}

pub fn step(field: &SpectralField, dt: f64) -> Result<SpectralField> {
    Stepper::new(field.grid(), dt).advance(field, 0.0)
}

pub fn evolve(field: &SpectralField, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let limit = stable_dt(field, DEFAULT_CFL)?;
    if config.dt > limit {
        return Err(Error::Config(format!("dt = {} exceeds the advective limit {limit:.3e}", config.dt)));
    }
    let l2_0 = l2_norm(field);
    let mut checkpoints = vec![Checkpoint { t: 0.0, field: dealias(field) }];
    let mut drift = 0.0f64;
    if config.t_end == 0.0 {
        return Ok(Trajectory { checkpoints, l2_drift: 0.0 });
    }
    let mut times = Vec::new();
    let mut i = 1u64;
    loop {
        let t = i as f64 * config.checkpoint_every;
        if t >= config.t_end * (1.0 - 1e-12) {
            times.push(config.t_end);
            break;
        }
        times.push(t);
        i += 1;
    }
    let mut t_prev = 0.0;
    let mut u = checkpoints[0].field.clone();
    for &t in &times {
        let span = t - t_prev;
        let steps = (span / config.dt - 1e-9).ceil().max(1.0) as usize;
        let stepper = Stepper::new(u.grid(), span / steps as f64);
        u = stepper.advance_span(&u, t_prev, steps)?;
        if l2_0 > 0.0 {
            drift = drift.max((l2_norm(&u) - l2_0).abs() / l2_0);
        }
        checkpoints.push(Checkpoint { t, field: u.clone() });
        t_prev = t;
    }
    Ok(Trajectory { checkpoints, l2_drift: drift })
}

/// Samples of `12κ² sech²(κ(x - x0))`, mean removed.
pub fn soliton(kappa: f64, x0: f64, grid: &Grid) -> Result<SpectralField> {
    if !(kappa > 0.0) {
        return Err(Error::Config(format!("kappa = {kappa} must be positive")));
    }
    let l = grid.length();
    let x0 = x0.rem_euclid(l);
    let reach = x0.min(l - x0);
    let edge = 1.0 / (kappa * reach).cosh().powi(2);
    if edge > 1e-12 {
        return Err(Error::Config(format!(
            "soliton wraps the period: sech² at the boundary is {edge:e}"
        )));
    }
    let samples: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|x| {
            // nearest periodic image
            let mut d = x - x0;
            d -= l * (d / l).round();
            12.0 * kappa * kappa / (kappa * d).cosh().powi(2)
        })
        .collect();
    Ok(dealias(&forward_transform(&samples, grid)?))
}

/// `û(k) = A e^{-σ₀|ξ_k|} e^{iθ_k}` on the dealiased band with seeded phases.
pub fn gevrey_random_data(sigma0: f64, amplitude: f64, seed: u64, grid: &Grid) -> SpectralField {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid);
    for k in 1..=grid.dealias_cut() as i64 {
        // 53 random bits to a uniform in [0, 1)
        let unif = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let theta = 2.0 * std::f64::consts::PI * unif;
        let mag = amplitude * (-sigma0 * grid.xi(k).abs()).exp();
        f.set_mode(k, Complex64::from_polar(mag, theta));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_field::make_grid;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 1.0, 0.1).is_err());
        assert!(SolverConfig::new(0.1, 1.0, 0.01).is_err());
        assert!(SolverConfig::new(0.01, 1.0, 0.1).is_ok());
    }

    #[test]
    fn zero_rhs() {
        let g = make_grid(16, 5.0).unwrap();
        assert!(rhs_nonlinear(&SpectralField::zeros(&g)).is_zero());
    }

    #[test]
    fn t_end_zero_returns_initial_state() {
        let g = make_grid(32, 64.0).unwrap();
        let u0 = gevrey_random_data(1.0, 0.1, 3, &g);
        let tr = evolve(&u0, &SolverConfig::new(0.01, 0.0, 0.01).unwrap()).unwrap();
        assert_eq!(tr.checkpoints.len(), 1);
        assert_eq!(tr.checkpoints[0].field, u0);
    }

    #[test]
    fn soliton_rejects_wrapping() {
        let g = make_grid(64, 10.0).unwrap();
        assert!(soliton(0.5, 5.0, &g).is_err());
        assert!(soliton(-1.0, 5.0, &g).is_err());
    }
}
