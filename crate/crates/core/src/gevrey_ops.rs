//! The symbol `m(ξ) = cosh(σξ)`, the operator `I`, Gevrey norms, the
//! tail-fit radius estimator and the KdV scaling transform.

use crate::error::{Error, Result};
use crate::spectral_field::{Grid, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest admissible `σ·ξ_max`.
pub const PRECISION_BUDGET: f64 = 25.0;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;
/// Noise floor relative to `max|û|`.
pub const DEFAULT_RELATIVE_NOISE_FLOOR: f64 = 1e-12;
const MIN_FIT_MODES: usize = 8;

pub fn symbol_m(sigma: f64, xi: f64) -> Result<f64> {
    let arg = sigma * xi.abs();
    if arg > 700.0 {
        return Err(Error::Overflow(arg));
    }
    Ok(arg.cosh())
}

pub fn check_budget(sigma: f64, grid: &Grid) -> Result<()> {
    let product = sigma * grid.xi_max();
    if product > PRECISION_BUDGET {
        return Err(Error::PrecisionBudget { product, budget: PRECISION_BUDGET });
    }
    Ok(())
}

pub fn apply_i(sigma: f64, field: &SpectralField) -> Result<SpectralField> {
    check_budget(sigma, field.grid())?;
    Ok(field.scale_by(|xi| (sigma * xi).cosh()))
}

pub fn gevrey_norm(sigma: f64, field: &SpectralField) -> Result<f64> {
    check_budget(sigma, field.grid())?;
    let g = field.grid();
    let terms: Vec<f64> = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(slot, c)| (2.0 * sigma * g.xi(g.k_of_slot(slot)).abs()).exp() * c.norm_sqr())
        .collect();
    Ok((g.length() * crate::summation::pairwise_sum(&terms)).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub sigma_hat: f64,
    pub fit_rms: f64,
    /// Inclusive index range `(k_lo, k_hi)` of the fitted modes.
    pub k_window: (i64, i64),
    pub noise_floor_hit: bool,
}

/// Least-squares fit of `log|û(k)|` against `ξ_k` over the upper tail of the
/// retained positive band; `sigma_hat` is minus the slope.
pub fn estimate_radius(field: &SpectralField, tail_fraction: f64, noise_floor: f64) -> Result<RadiusEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(Error::Config(format!("tail_fraction = {tail_fraction} outside (0, 1/2]")));
    }
    if !(noise_floor > 0.0) {
        return Err(Error::Config(format!("noise_floor = {noise_floor} must be positive")));
    }
    if field.is_zero() {
        return Err(Error::Estimation("zero field".into()));
    }
    let g = field.grid();
    let cut = g.dealias_cut() as i64;
    let usable: Vec<i64> = (1..=cut).filter(|&k| field.coeff(k).norm() > noise_floor).collect();
    if usable.len() < 2 {
        return Err(Error::Estimation("fewer than two modes above the noise floor".into()));
    }
    let lo = ((cut as f64) * (1.0 - tail_fraction)).floor() as i64 + 1;
    let mut window: Vec<i64> = usable.iter().copied().filter(|&k| k >= lo).collect();
    let mut hit = false;
    if window.len() < MIN_FIT_MODES {
        hit = true;
        // contiguous band above the floor, then its own upper tail
        let top = usable.iter().zip(1..).take_while(|(&k, i)| k == *i).count() as i64;
        let band: Vec<i64> = if top >= 2 { (1..=top).collect() } else { usable.clone() };
        let k_hi = *band.last().unwrap();
        let k_lo = ((k_hi as f64) * (1.0 - tail_fraction)).floor() as i64 + 1;
        window = band.iter().copied().filter(|&k| k >= k_lo).collect();
        if window.len() < MIN_FIT_MODES {
            let keep = band.len().min(MIN_FIT_MODES);
            window = band[band.len() - keep..].to_vec();
        }
    }
    let pts: Vec<(f64, f64)> = window.iter().map(|&k| (g.xi(k), field.coeff(k).norm().ln())).collect();
    let (slope, rms) = linear_fit(&pts);
    Ok(RadiusEstimate {
        sigma_hat: (-slope).max(0.0),
        fit_rms: rms,
        k_window: (window[0], *window.last().unwrap()),
        noise_floor_hit: hit,
    })
}

/// Default estimator: tail fraction 1/4, floor `1e-12·max|û|`.
pub fn estimate_radius_default(field: &SpectralField) -> Result<RadiusEstimate> {
    let floor = DEFAULT_RELATIVE_NOISE_FLOOR * field.max_abs();
    estimate_radius(field, DEFAULT_TAIL_FRACTION, if floor > 0.0 { floor } else { f64::MIN_POSITIVE })
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

/// `u_λ(x) = λ^{-2} u(x/λ)` on the period `λL`.
///
/// Index `k` keeps its slot while its frequency becomes `ξ_k/λ`. Fourier-series
/// coefficients pick up `λ^{-2}`, which is `λ^{-1}` on the continuum transform
/// once the longer period is accounted for.
pub fn rescale_field(field: &SpectralField, lambda: f64) -> Result<SpectralField> {
    if !(lambda >= 1.0) || lambda.fract() != 0.0 {
        return Err(Error::Domain(format!("lambda = {lambda} must be an integer >= 1")));
    }
    let g = field.grid();
    let target = Grid::new(g.n(), g.length() * lambda)?;
    let factor = lambda.powi(-2);
    let coeffs: Vec<Complex64> = field.coeffs().iter().map(|c| c * factor).collect();
    Ok(SpectralField::from_coeffs_unchecked(&target, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_guard() {
        assert!(symbol_m(1.0, 701.0).is_err());
        assert!(symbol_m(1.0, -700.0).is_ok());
    }

    #[test]
    fn fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 - 0.7 * i as f64)).collect();
        let (s, r) = linear_fit(&pts);
        assert!((s + 0.7).abs() < 1e-14);
        assert!(r < 1e-14);
    }

    #[test]
    fn non_integer_lambda_rejected() {
        let g = Grid::new(16, 8.0).unwrap();
        let f = SpectralField::zeros(&g);
        assert!(rescale_field(&f, 1.5).is_err());
        assert!(rescale_field(&f, 0.0).is_err());
    }
}
