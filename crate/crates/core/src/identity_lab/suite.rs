//! The full exact identity suite and the floating-point consistency checks of
//! the quartic multiplier.

use super::polynomials::{
    check_alpha4, check_cubic_identity, check_low_order_vanishing, check_omega1, check_omega1_leading, check_omega2,
};
use super::{timed, CheckReport, Failure, RationalTuple, TupleSampler};
use crate::multilinear_energies::{beta4_series, infer_constant_c, m4_definition, ConstantEstimate, DEFAULT_SERIES_TOL};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuiteConfig {
    pub seed: u64,
    pub omega_samples: usize,
    pub omega1_k_max: usize,
    pub omega2_k_max: usize,
    pub alpha_samples: usize,
    pub leading_samples: usize,
    pub cubic_samples: usize,
    pub cubic_k_max: usize,
    pub low_order_samples: usize,
    /// Components are `p/q` with `|p| ≤ 40` and `1 ≤ q ≤ max_denominator`.
    pub max_denominator: i64,
}

impl Default for IdentitySuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0x1d,
            omega_samples: 500,
            omega1_k_max: 6,
            omega2_k_max: 6,
            alpha_samples: 1000,
            leading_samples: 200,
            cubic_samples: 500,
            cubic_k_max: 6,
            low_order_samples: 200,
            max_denominator: 7,
        }
    }
}

/// Tuples with no zero component; zero pair sums are kept.
fn without_zero_components(sampler: &mut TupleSampler, n: usize) -> Vec<RationalTuple> {
    let mut out = Vec::with_capacity(n);
    let mut variant = 1;
    while out.len() < n {
        let t = if out.len() % 5 == 4 {
            variant += 3;
            sampler.degenerate(4, variant)
        } else {
            sampler.random(4)
        };
        if !t.has_zero_component {
            out.push(t);
        }
    }
    out
}

/// Every exact polynomial identity, each on its own seeded sample.
pub fn run_identity_suite(cfg: &IdentitySuiteConfig) -> Vec<CheckReport> {
    let mut sampler = TupleSampler::new(cfg.seed).with_denominators(cfg.max_denominator);
    let omega1 = sampler.mixed(4, cfg.omega_samples);
    let omega2 = sampler.mixed(4, cfg.omega_samples);
    let alpha = sampler.mixed(4, cfg.alpha_samples);
    let leading = sampler.mixed(4, cfg.leading_samples);
    let triples = sampler.mixed(3, cfg.cubic_samples);
    let low = without_zero_components(&mut sampler, cfg.low_order_samples);
    vec![
        check_omega1(cfg.omega1_k_max, &omega1),
        check_omega2(cfg.omega2_k_max, &omega2),
        check_alpha4(&alpha),
        check_omega1_leading(&leading),
        check_cubic_identity(cfg.cubic_k_max, &triples),
        check_low_order_vanishing(&low),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticConsistency {
    pub constant: Option<ConstantEstimate>,
    pub constant_check: CheckReport,
    pub quotient_check: CheckReport,
    pub collision_check: CheckReport,
}

impl QuarticConsistency {
    pub fn reports(&self) -> [&CheckReport; 3] {
        [&self.constant_check, &self.quotient_check, &self.collision_check]
    }

    pub fn passed(&self) -> bool {
        self.reports().iter().all(|r| r.passed())
    }
}

pub const QUOTIENT_TOL: f64 = 1e-9;

fn as_quad(t: &RationalTuple) -> [f64; 4] {
    let v = t.to_f64();
    [v[0], v[1], v[2], v[3]]
}

fn tuple_strings(xi: &[f64], sigma: f64) -> Vec<String> {
    xi.iter().map(|x| x.to_string()).chain([format!("sigma={sigma}")]).collect()
}

/// Infers the normalizing constant, then checks the series form of `β₄`
/// against `-M₄/α₄` away from resonances and for finiteness on them.
pub fn check_quartic_consistency(seed: u64, samples: usize, sigmas: &[f64]) -> QuarticConsistency {
    let mut sampler = TupleSampler::new(seed);
    let quads: Vec<[f64; 4]> = sampler.nondegenerate(4, samples).iter().map(as_quad).collect();
    let collisions: Vec<[f64; 4]> = (0..samples)
        .map(|i| as_quad(&sampler.degenerate(4, if i % 2 == 0 { 1 } else { 2 })))
        .collect();

    let mut constant = None;
    let constant_check = timed("normalizing constant spread", |report| match infer_constant_c(sigmas, &quads) {
        Ok(est) => {
            report.record_passes(est.samples);
            report.observe_ratio(est.relative_spread);
            constant = Some(est);
        }
        Err(e) => report.record(false, || Failure { tuple: Vec::new(), lhs: e.to_string(), rhs: String::new() }),
    });
    let c = constant.map(|e| e.value()).unwrap_or(Complex64::new(f64::NAN, f64::NAN));

    let quotient_check = timed("beta4 series against quotient", |report| {
        let rows: Vec<Vec<(bool, f64, String, String)>> = quads
            .par_iter()
            .map(|xi| {
                let alpha4 = Complex64::new(0.0, xi.iter().map(|x| x * x * x).sum::<f64>());
                sigmas
                    .iter()
                    .map(|&s| match (beta4_series(s, xi, c, DEFAULT_SERIES_TOL), m4_definition(s, xi)) {
                        (Ok(series), Ok(m4)) => {
                            let quotient = -m4 / alpha4;
                            let rel = (series - quotient).norm() / quotient.norm();
                            (rel <= QUOTIENT_TOL, rel, series.to_string(), quotient.to_string())
                        }
                        (a, b) => {
                            let msg = a.err().or(b.err()).map(|e| e.to_string()).unwrap_or_default();
                            (false, f64::INFINITY, msg, String::new())
                        }
                    })
                    .collect()
            })
            .collect();
        for (xi, row) in quads.iter().zip(rows) {
            for (&s, (ok, rel, lhs, rhs)) in sigmas.iter().zip(row) {
                report.observe_ratio(rel);
                report.record(ok, || Failure { tuple: tuple_strings(xi, s), lhs, rhs });
            }
        }
    });

    let collision_check = timed("beta4 finite on resonances", |report| {
        for xi in &collisions {
            for &s in sigmas {
                let v = beta4_series(s, xi, c, DEFAULT_SERIES_TOL);
                let ok = matches!(&v, Ok(z) if z.re.is_finite() && z.im.is_finite());
                report.record(ok, || Failure {
                    tuple: tuple_strings(xi, s),
                    lhs: format!("{v:?}"),
                    rhs: "finite".into(),
                });
            }
        }
    });

    QuarticConsistency { constant, constant_check, quotient_check, collision_check }
}
