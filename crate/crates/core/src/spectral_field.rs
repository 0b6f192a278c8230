//! Periodic grid, Fourier transforms, 2/3-rule dealiasing and L² norms.
//!
//! Coefficients follow `û(k) = (1/n) Σ_j u(x_j) e^{-2πikj/n}` and are stored in
//! FFT order: slot `k` for `0 ≤ k ≤ n/2`, slot `n + k` for `-n/2 < k < 0`.
//! With this convention `‖u‖²_{L²[0,L)} = L Σ_k |û(k)|²`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Relative tolerance for conjugate symmetry and discarded imaginary parts.
pub const REALITY_TOL: f64 = 1e-12;

#[derive(Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    dealias_cut: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("dealias_cut", &self.dealias_cut)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Config(format!("n = {n} must be a power of two >= 8")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Config(format!("period L = {length} must be positive")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            length,
            dealias_cut: n / 3,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dealias_cut(&self) -> usize {
        self.dealias_cut
    }

    /// Lattice spacing `2π/L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn xi(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.length
    }

    /// Largest stored frequency, `ξ_{n/2}`.
    pub fn xi_max(&self) -> f64 {
        self.xi((self.n / 2) as i64)
    }

    pub fn k_min(&self) -> i64 {
        -(self.n as i64) / 2 + 1
    }

    pub fn k_max(&self) -> i64 {
        self.n as i64 / 2
    }

    pub fn slot(&self, k: i64) -> usize {
        debug_assert!(k >= self.k_min() && k <= self.k_max());
        if k >= 0 {
            k as usize
        } else {
            (self.n as i64 + k) as usize
        }
    }

    pub fn k_of_slot(&self, slot: usize) -> i64 {
        if slot <= self.n / 2 {
            slot as i64
        } else {
            slot as i64 - self.n as i64
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.length * j as f64 / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

pub fn make_grid(n: usize, length: f64) -> Result<Grid> {
    Grid::new(n, length)
}

/// Fourier coefficients of a real mean-zero field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.n()] }
    }

    /// Wraps FFT-ordered coefficients after checking reality and the zero mode.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::LengthMismatch { expected: grid.n(), got: coeffs.len() });
        }
        let field = Self { grid: grid.clone(), coeffs };
        field.check_symmetry()?;
        if field.coeffs[0].norm() > REALITY_TOL * field.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Integrity("nonzero mean mode".into()));
        }
        Ok(field)
    }

    pub(crate) fn from_coeffs_unchecked(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        Self { grid: grid.clone(), coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.grid.k_min() || k > self.grid.k_max() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[self.grid.slot(k)]
    }

    /// Sets `û(k)` and its conjugate partner `û(-k)`.
    pub fn set_mode(&mut self, k: i64, value: Complex64) {
        if k == 0 {
            return;
        }
        let kmax = self.grid.k_max();
        if k.abs() == kmax {
            self.coeffs[self.grid.slot(kmax)] = Complex64::new(value.re, 0.0);
            return;
        }
        let (k, value) = if k < 0 { (-k, value.conj()) } else { (k, value) };
        let s = self.grid.slot(k);
        let t = self.grid.slot(-k);
        self.coeffs[s] = value;
        self.coeffs[t] = value.conj();
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Applies a real even multiplier `w(ξ_k)` coefficientwise.
    pub fn scale_by<F: Fn(f64) -> f64>(&self, w: F) -> Self {
        let g = &self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(slot, c)| c * w(g.xi(g.k_of_slot(slot))))
            .collect();
        Self::from_coeffs_unchecked(g, coeffs)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_coeffs_unchecked(&self.grid, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Largest `|û(k) - conj(û(-k))|` relative to the largest coefficient.
    pub fn symmetry_defect(&self) -> f64 {
        let g = &self.grid;
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for k in 1..g.k_max() {
            let d = (self.coeff(k) - self.coeff(-k).conj()).norm();
            worst = worst.max(d);
        }
        worst = worst.max(self.coeff(g.k_max()).im.abs());
        worst / scale
    }

    fn check_symmetry(&self) -> Result<()> {
        let d = self.symmetry_defect();
        if d > REALITY_TOL {
            return Err(Error::Integrity(format!("conjugate symmetry violated (relative defect {d:e})")));
        }
        Ok(())
    }

    pub(crate) fn symmetrize_in_place(&mut self) {
        let kmax = self.grid.k_max();
        for k in 1..kmax {
            let s = self.grid.slot(k);
            let t = self.grid.slot(-k);
            let avg = (self.coeffs[s] + self.coeffs[t].conj()) * 0.5;
            self.coeffs[s] = avg;
            self.coeffs[t] = avg.conj();
        }
        let ny = self.grid.slot(kmax);
        self.coeffs[ny].im = 0.0;
        self.coeffs[0] = Complex64::new(0.0, 0.0);
    }
}

pub fn forward_transform(samples: &[f64], grid: &Grid) -> Result<SpectralField> {
    if samples.len() != grid.n() {
        return Err(Error::LengthMismatch { expected: grid.n(), got: samples.len() });
    }
    let inv_n = 1.0 / grid.n() as f64;
    let mut buf: Vec<Complex64> = samples.iter().map(|&u| Complex64::new(u * inv_n, 0.0)).collect();
    grid.fft_forward(&mut buf);
    let mut field = SpectralField::from_coeffs_unchecked(grid, buf);
    field.symmetrize_in_place();
    Ok(field)
}

pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    field.check_symmetry()?;
    let mut buf = field.coeffs.clone();
    field.grid.fft_inverse(&mut buf);
    let re_max = buf.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    let im_max = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if im_max > REALITY_TOL * re_max.max(f64::MIN_POSITIVE) && im_max > 0.0 {
        return Err(Error::Integrity(format!("imaginary residue {im_max:e} against {re_max:e}")));
    }
    Ok(buf.into_iter().map(|c| c.re).collect())
}

pub fn l2_norm(field: &SpectralField) -> f64 {
    let s: f64 = crate::summation::pairwise_sum(&field.coeffs.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>());
    (field.grid.length() * s).sqrt()
}

pub fn dealias(field: &SpectralField) -> SpectralField {
    let g = &field.grid;
    let cut = g.dealias_cut() as i64;
    let coeffs = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(slot, &c)| if g.k_of_slot(slot).abs() > cut { Complex64::new(0.0, 0.0) } else { c })
        .collect();
    SpectralField::from_coeffs_unchecked(g, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(make_grid(12, 1.0).is_err());
        assert!(make_grid(4, 1.0).is_err());
        assert!(make_grid(8, 0.0).is_err());
        let g = make_grid(8, 2.0 * PI).unwrap();
        assert_eq!(g.k_min(), -3);
        assert_eq!(g.k_max(), 4);
        assert_eq!(g.dealias_cut(), 2);
        assert!((g.xi(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slots_roundtrip() {
        let g = make_grid(16, 3.0).unwrap();
        for k in g.k_min()..=g.k_max() {
            assert_eq!(g.k_of_slot(g.slot(k)), k);
        }
    }

    #[test]
    fn set_mode_keeps_symmetry() {
        let g = make_grid(16, 3.0).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_mode(-3, Complex64::new(0.5, 0.25));
        assert_eq!(f.coeff(3), Complex64::new(0.5, -0.25));
        assert_eq!(f.symmetry_defect(), 0.0);
    }
}
