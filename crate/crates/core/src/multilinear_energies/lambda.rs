use super::fast::lambda4_fast;
use super::hierarchy::{beta3_multiplier, energy2_multiplier};
use super::multiplier::Multiplier;
use crate::error::{Error, Result};
use crate::gevrey_ops::{check_budget, gevrey_norm};
use crate::spectral_field::SpectralField;
use crate::summation::pairwise_sum_complex;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `L · Σ_{k₁+…+k_k=0, |kᵢ| ≤ cut} m(ξ_{k₁},…,ξ_{k_k}) Π û(kᵢ)`.
///
/// Free indices run lexicographically; the last index is fixed by the sum.
/// Work is split over the first index and each slice is reduced with the
/// fixed pairwise tree, so the value does not depend on the thread count.
pub fn lambda_k(mult: &Multiplier, field: &SpectralField, k: usize) -> Result<Complex64> {
    if !(2..=5).contains(&k) || mult.arity != k {
        return Err(Error::Arity { expected: k, got: mult.arity });
    }
    let g = field.grid();
    let cut = g.dealias_cut() as i64;
    let width = (2 * cut + 1) as usize;
    let coeff: Vec<Complex64> = (-cut..=cut).map(|j| field.coeff(j)).collect();
    let xi: Vec<f64> = (-cut..=cut).map(|j| g.xi(j)).collect();
    let free = k - 1;

    let partials: Vec<Result<Complex64>> = (0..width)
        .into_par_iter()
        .map(|first| {
            let mut terms = Vec::new();
            let mut idx = vec![0usize; free];
            idx[0] = first;
            let mut args = vec![0.0; k];
            let inner = width.pow(free as u32 - 1);
            for flat in 0..inner {
                let mut r = flat;
                for slot in (1..free).rev() {
                    idx[slot] = r % width;
                    r /= width;
                }
                let s: i64 = idx.iter().map(|&i| i as i64 - cut).sum();
                let last = -s;
                if last.abs() > cut {
                    continue;
                }
                let last_i = (last + cut) as usize;
                let mut prod = coeff[last_i];
                for &i in &idx {
                    prod *= coeff[i];
                }
                if prod.re == 0.0 && prod.im == 0.0 {
                    continue;
                }
                for (a, &i) in args.iter_mut().zip(idx.iter()) {
                    *a = xi[i];
                }
                args[free] = xi[last_i];
                terms.push(mult.eval(&args)? * prod);
            }
            Ok(pairwise_sum_complex(&terms))
        })
        .collect();
    let partials: Vec<Complex64> = partials.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum_complex(&partials) * g.length())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub sigma: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub lambda3_beta3: f64,
    pub lambda4_beta4: f64,
    pub gevrey_norm: f64,
    /// Largest imaginary part discarded from the three functionals.
    pub imag_residual: f64,
}

/// `E²`, `E³ = E² + Λ₃(β₃)` and `E⁴ = E³ + Λ₄(β₄)` at one time.
pub fn energy_report(sigma: f64, field: &SpectralField, t: f64) -> Result<EnergyReport> {
    check_budget(sigma, field.grid())?;
    let l2 = lambda_k(&energy2_multiplier(sigma), field, 2)?;
    let l3 = lambda_k(&beta3_multiplier(sigma), field, 3)?;
    let l4 = lambda4_fast(field, sigma)?;
    let imag = l2.im.abs().max(l3.im.abs()).max(l4.im.abs());
    let e2 = l2.re;
    if imag > 1e-8 * e2.abs().max(1.0) {
        return Err(Error::Integrity(format!("imaginary residue {imag:e} in modified energies (E2 = {e2})")));
    }
    let e3 = e2 + l3.re;
    Ok(EnergyReport {
        t,
        sigma,
        e2,
        e3,
        e4: e3 + l4.re,
        lambda3_beta3: l3.re,
        lambda4_beta4: l4.re,
        gevrey_norm: gevrey_norm(sigma, field)?,
        imag_residual: imag,
    })
}
