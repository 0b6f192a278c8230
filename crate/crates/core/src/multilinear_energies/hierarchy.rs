//! The multiplier hierarchy `M₃ → β₃ → M₄ → β₄ → M₅`.
//!
//! All tuples lie on `ξ₁ + … + ξ_k = 0`. With `α_k = i Σ ξⱼ³`:
//!
//! ```text
//! M₃ = -i [m(ξ₁) m(ξ₂+ξ₃) (ξ₂+ξ₃)]_sym        β₃ = -M₃/α₃
//! M₄ = -(3i/2) [β₃(ξ₁,ξ₂,ξ₃+ξ₄) (ξ₃+ξ₄)]_sym   β₄ = -M₄/α₄
//! M₅ = -2i [β₄(ξ₁,ξ₂,ξ₃,ξ₄+ξ₅) (ξ₄+ξ₅)]_sym
//! ```
//!
//! `β₃` and `β₄` are only ever evaluated through the series in [`super::series`],
//! which stay finite where `α₃` or `α₄` vanish on the lattice.

use super::multiplier::{permutations, Label, Multiplier};
use super::series::{cubic_series, quartic_series, DEFAULT_SERIES_TOL};
use crate::error::{Error, Result};
use crate::gevrey_ops::symbol_m;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The constant in the closed form of `M₄` for which it agrees with the
/// symmetrized definition; [`infer_constant_c`] recovers it from samples.
pub const HIERARCHY_C: Complex64 = Complex64::new(0.0, -1.0);

/// Largest relative spread accepted by [`infer_constant_c`].
pub const CONSTANT_SPREAD_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn check_hyperplane(xi: &[f64]) -> Result<()> {
    let scale = xi.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let s: f64 = xi.iter().sum();
    if s.abs() > 1e-10 * scale {
        return Err(Error::Domain(format!("frequencies {xi:?} do not sum to zero (sum {s:e})")));
    }
    Ok(())
}

fn m_sq(sigma: f64, xi: f64) -> Result<f64> {
    Ok(symbol_m(sigma, xi)?.powi(2))
}

/// `M₃` through the closed form `(i/3) Σ ξⱼ m²(ξⱼ)`.
pub fn m3(sigma: f64, xi: &[f64; 3]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let mut s = 0.0;
    for &x in xi {
        s += x * m_sq(sigma, x)?;
    }
    Ok(I * (s / 3.0))
}

/// `M₃` by averaging the unsymmetrized product over all six orderings.
pub fn m3_definition(sigma: f64, xi: &[f64; 3]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let mut acc = 0.0;
    for p in permutations(3) {
        let pair = xi[p[1]] + xi[p[2]];
        acc += symbol_m(sigma, xi[p[0]])? * symbol_m(sigma, pair)? * pair;
    }
    Ok(-I * (acc / 6.0))
}

pub fn beta3(sigma: f64, xi: &[f64; 3]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    Ok(Complex64::new(cubic_series(sigma, *xi, DEFAULT_SERIES_TOL)?.value, 0.0))
}

/// `M₄` by the full 24-term symmetrization.
pub fn m4_definition(sigma: f64, xi: &[f64; 4]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let mut acc = 0.0;
    for p in permutations(4) {
        let pair = xi[p[2]] + xi[p[3]];
        acc += cubic_series(sigma, [xi[p[0]], xi[p[1]], pair], DEFAULT_SERIES_TOL)?.value * pair;
    }
    Ok(-1.5 * I * (acc / 24.0))
}

const PAIRS4: [((usize, usize), (usize, usize)); 6] =
    [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)), ((1, 2), (0, 3)), ((1, 3), (0, 2)), ((2, 3), (0, 1))];

/// `M₄` as an average over the six ways of merging two arguments; equal to
/// [`m4_definition`] because `β₃` is symmetric.
pub fn m4(sigma: f64, xi: &[f64; 4]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let mut acc = 0.0;
    for ((a, b), (c, d)) in PAIRS4 {
        let pair = xi[c] + xi[d];
        acc += cubic_series(sigma, [xi[a], xi[b], pair], DEFAULT_SERIES_TOL)?.value * pair;
    }
    Ok(-1.5 * I * (acc / 6.0))
}

/// `3(ξ₁+ξ₂)(ξ₁+ξ₃)(ξ₁+ξ₄)`, equal to `Σ ξⱼ³` on the hyperplane.
pub fn alpha4_real(xi: &[f64; 4]) -> f64 {
    3.0 * (xi[0] + xi[1]) * (xi[0] + xi[2]) * (xi[0] + xi[3])
}

/// Closed form of `M₄` in terms of `m²`, parametrized by the constant `c`:
///
/// ```text
/// -(c/108) α₄/(ξ₁ξ₂ξ₃ξ₄) [Σ m²(ξᵢ) - m²(ξ₁+ξ₂) - m²(ξ₁+ξ₃) - m²(ξ₁+ξ₄)] + (c/36) Σ m²(ξᵢ)/ξᵢ
/// ```
pub fn m4_identity(sigma: f64, xi: &[f64; 4], c: Complex64) -> Result<Complex64> {
    check_hyperplane(xi)?;
    if xi.contains(&0.0) {
        return Err(Error::Domain(format!("zero frequency in {xi:?}; use m4_definition")));
    }
    let prod: f64 = xi.iter().product();
    let mut bracket = 0.0;
    let mut recip = 0.0;
    for &x in xi {
        let m2 = m_sq(sigma, x)?;
        bracket += m2;
        recip += m2 / x;
    }
    for j in 1..4 {
        bracket -= m_sq(sigma, xi[0] + xi[j])?;
    }
    Ok(c * (-(alpha4_real(xi) / prod) * bracket / 108.0 + recip / 36.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub c_re: f64,
    pub c_im: f64,
    /// `max |cᵢ - mean| / |mean|` over all samples.
    pub relative_spread: f64,
    pub samples: usize,
}

impl ConstantEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.c_re, self.c_im)
    }
}

/// Solves `m4_definition = m4_identity(c)` for `c` on every (σ, tuple) pair
/// and returns the mean; tuples must avoid zero components and zero pair sums.
pub fn infer_constant_c(sigmas: &[f64], tuples: &[[f64; 4]]) -> Result<ConstantEstimate> {
    let one = Complex64::new(1.0, 0.0);
    let mut values = Vec::with_capacity(sigmas.len() * tuples.len());
    for xi in tuples {
        let scale = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let degenerate = xi.iter().any(|x| x.abs() <= 1e-12 * scale)
            || (0..4).any(|i| (i + 1..4).any(|j| (xi[i] + xi[j]).abs() <= 1e-12 * scale));
        if degenerate {
            return Err(Error::Domain(format!("degenerate tuple {xi:?}")));
        }
        for &s in sigmas {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("sigma = {s} must be positive")));
            }
            let unit = m4_identity(s, xi, one)?;
            values.push(m4_definition(s, xi)? / unit);
        }
    }
    if values.is_empty() {
        return Err(Error::Domain("no samples".into()));
    }
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let spread = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm();
    if !(spread <= CONSTANT_SPREAD_TOL) {
        return Err(Error::IdentityViolation(format!(
            "constant spread {spread:e} exceeds {CONSTANT_SPREAD_TOL:e} (mean {mean})"
        )));
    }
    Ok(ConstantEstimate { c_re: mean.re, c_im: mean.im, relative_spread: spread, samples: values.len() })
}

/// `β₄ = c/(108 i) · S₄` from the quartic series.
pub fn beta4_series(sigma: f64, xi: &[f64; 4], c: Complex64, tol: f64) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let s = quartic_series(sigma, *xi, tol)?;
    Ok(c / (108.0 * I) * s.value)
}

pub fn beta4(sigma: f64, xi: &[f64; 4]) -> Result<Complex64> {
    beta4_series(sigma, xi, HIERARCHY_C, DEFAULT_SERIES_TOL)
}

/// `M₅` by the full 120-term symmetrization.
pub fn m5_definition(sigma: f64, xi: &[f64; 5]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in permutations(5) {
        let pair = xi[p[3]] + xi[p[4]];
        acc += beta4(sigma, &[xi[p[0]], xi[p[1]], xi[p[2]], pair])? * pair;
    }
    Ok(-2.0 * I * acc / 120.0)
}

/// `M₅` as an average over the ten merged pairs.
pub fn m5(sigma: f64, xi: &[f64; 5]) -> Result<Complex64> {
    check_hyperplane(xi)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..5 {
        for b in a + 1..5 {
            let rest: Vec<f64> = (0..5).filter(|&i| i != a && i != b).map(|i| xi[i]).collect();
            let pair = xi[a] + xi[b];
            acc += beta4(sigma, &[rest[0], rest[1], rest[2], pair])? * pair;
        }
    }
    Ok(-2.0 * I * acc / 10.0)
}

/// `m(ξ₁) m(ξ₂)`, the multiplier of `‖Iu‖²`.
pub fn energy2_multiplier(sigma: f64) -> Multiplier {
    Multiplier::new(2, Label::Custom("M2".into()), true, move |xi| {
        Ok(Complex64::new(symbol_m(sigma, xi[0])? * symbol_m(sigma, xi[1])?, 0.0))
    })
}

pub fn m3_multiplier(sigma: f64) -> Multiplier {
    Multiplier::new(3, Label::M3, true, move |xi| m3(sigma, &[xi[0], xi[1], xi[2]]))
}

pub fn beta3_multiplier(sigma: f64) -> Multiplier {
    Multiplier::new(3, Label::Beta3, true, move |xi| beta3(sigma, &[xi[0], xi[1], xi[2]]))
}

pub fn m4_multiplier(sigma: f64) -> Multiplier {
    Multiplier::new(4, Label::M4, true, move |xi| m4(sigma, &[xi[0], xi[1], xi[2], xi[3]]))
}

pub fn beta4_multiplier(sigma: f64) -> Multiplier {
    Multiplier::new(4, Label::Beta4, true, move |xi| beta4(sigma, &[xi[0], xi[1], xi[2], xi[3]]))
}

pub fn m5_multiplier(sigma: f64) -> Multiplier {
    Multiplier::new(5, Label::M5, true, move |xi| m5(sigma, &[xi[0], xi[1], xi[2], xi[3], xi[4]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m3_vanishes_on_antipodal_pair() {
        assert!(m3(0.7, &[1.0, -1.0, 0.0]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn off_hyperplane_rejected() {
        assert!(m3(0.1, &[1.0, 1.0, 1.0]).is_err());
        assert!(beta4(0.1, &[1.0, 1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn identity_needs_nonzero_components() {
        assert!(m4_identity(0.5, &[1.0, -1.0, 0.0, 0.0], HIERARCHY_C).is_err());
    }

    #[test]
    fn alpha4_example() {
        assert_eq!(alpha4_real(&[1.0, 2.0, 3.0, -6.0]), -180.0);
    }
}
