//! The majorants `Θ₁`, `Θ₂` and sampled checks of the pointwise bounds on
//! `β₃`, `β₄` and `M₅`.

use super::{q, timed, CheckReport, Failure, RationalTuple, TupleSampler, Q};
use crate::error::Result;
use crate::multilinear_energies::series::{cubic_series, quartic_series, Chain, DEFAULT_SERIES_TOL};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ordered triples of distinct indices, lexicographic.
fn distinct_triples() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                if a != b && b != c && a != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

struct Pw(Vec<Q>);

impl Pw {
    fn new(x: &Q, max: usize) -> Self {
        let mut v = vec![Q::one()];
        for i in 1..=max {
            let next = &v[i - 1] * x;
            v.push(next);
        }
        Pw(v)
    }
}

/// `Σ_{m+l=n} a^m b^l`.
fn h2(a: &Pw, b: &Pw, n: usize) -> Q {
    (0..=n).fold(Q::zero(), |acc, m| acc + &a.0[m] * &b.0[n - m])
}

/// `Σ_{i+j=n} a^i Σ_{m+l=j} b^m c^l`.
fn h3(a: &Pw, b: &Pw, c: &Pw, n: usize) -> Q {
    (0..=n).fold(Q::zero(), |acc, i| acc + &a.0[i] * h2(b, c, n - i))
}

/// `Σ_{i+j=n} (Σ_{m+l=i} a^m b^l)(Σ_{m+l=j} c^m d^l)`.
fn h4(a: &Pw, b: &Pw, c: &Pw, d: &Pw, n: usize) -> Q {
    (0..=n).fold(Q::zero(), |acc, i| acc + h2(a, b, i) * h2(c, d, n - i))
}

/// Exact `(Θ₁(k), Θ₂(k))` from the absolute values of the components and of
/// their pair sums.
pub fn theta_bounds(k: usize, t: &RationalTuple) -> Result<(Q, Q)> {
    t.expect_arity(4)?;
    let c = t.components();
    let a: Vec<Pw> = c.iter().map(|x| Pw::new(&x.abs(), k)).collect();
    let pair = |i: usize, j: usize| Pw::new(&(&c[i] + &c[j]).abs(), k);
    let s14 = pair(0, 3);
    let s24 = pair(1, 3);
    let s34 = pair(2, 3);
    let mut theta1 = h2(&a[0], &s14, k) + h2(&a[1], &s24, k) + h2(&a[2], &s34, k) + h2(&a[3], &s34, k);
    for [p1, p2, p3] in distinct_triples() {
        theta1 += h3(&a[p1], &a[p2], &pair(p2, p3), k);
    }
    let (a1, a2, a3, a4) = (&a[0], &a[1], &a[2], &a[3]);
    let mut theta2 = h2(a1, a4, k) + h2(a2, a3, k) + h3(a3, a1, a4, k) + h3(a4, a2, a3, k) + h3(a4, a4, a1, k);
    theta2 += h4(a1, a4, a2, a4, k);
    for i in 0..=k {
        let j = k - i;
        let mut inner = Q::zero();
        for m in 0..=j {
            let l = j - m;
            inner += &a1.0[l] * h2(a3, a2, m) + &a2.0[m] * h2(a4, a1, l);
        }
        theta2 += &a4.0[i] * inner;
    }
    Ok((theta1, theta2))
}

/// Chains whose complete homogeneous polynomials sum to `Θ₁ + Θ₂`, in
/// variables scaled by `r`.
fn theta_chains(xi: &[f64; 4], r: f64) -> Vec<Chain> {
    let a: Vec<f64> = xi.iter().map(|x| x.abs() / r).collect();
    let s = |i: usize, j: usize| (xi[i] + xi[j]).abs() / r;
    let mut out = vec![
        Chain::new(&[a[0], s(0, 3)]),
        Chain::new(&[a[1], s(1, 3)]),
        Chain::new(&[a[2], s(2, 3)]),
        Chain::new(&[a[3], s(2, 3)]),
    ];
    for [p1, p2, p3] in distinct_triples() {
        out.push(Chain::new(&[a[p1], a[p2], s(p2, p3)]));
    }
    out.extend([
        Chain::new(&[a[0], a[3]]),
        Chain::new(&[a[1], a[2]]),
        Chain::new(&[a[2], a[0], a[3]]),
        Chain::new(&[a[3], a[1], a[2]]),
        Chain::new(&[a[3], a[3], a[0]]),
        Chain::new(&[a[0], a[3], a[1], a[3]]),
        Chain::new(&[a[3], a[0], a[2], a[1]]),
        Chain::new(&[a[3], a[1], a[3], a[0]]),
    ]);
    out
}

const THETA_CHAINS: f64 = 36.0;

fn binom3(n: usize) -> f64 {
    let n = n as f64;
    (n + 1.0) * (n + 2.0) * (n + 3.0) / 6.0
}

/// `Σ_k s^{k+4}/(k+4)! (Θ₁(k) + Θ₂(k))`, summed until the remaining terms
/// are below `1e-17` of the partial sum. Every term is positive, so the
/// truncated value never exceeds the full majorant.
pub fn theta_majorant(s: f64, xi: &[f64; 4]) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let mut r = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (i, j) in [(0, 3), (1, 3), (2, 3), (0, 1), (0, 2), (1, 2)] {
        r = r.max((xi[i] + xi[j]).abs());
    }
    if r == 0.0 {
        // only the k = 0 terms survive: 28 + 8 ones
        return s.powi(4) / 24.0 * 36.0;
    }
    let mut chains = theta_chains(xi, r);
    let (ls, lr) = (s.ln(), r.ln());
    let mut lnf = (1..=4).map(|i| (i as f64).ln()).sum::<f64>();
    let mut sum = 0.0;
    for k in 0..100_000usize {
        if k > 0 {
            chains.iter_mut().for_each(|c| c.advance());
            lnf += ((k + 4) as f64).ln();
        }
        let theta: f64 = chains.iter().map(|c| c.value()).sum();
        let coef = ((k + 4) as f64 * ls + k as f64 * lr - lnf).exp();
        sum += coef * theta;
        // each of the 36 chains has at most four unit-bounded variables, so
        // its value is at most C(k+3, 3)
        let next = coef * s * r / (k + 5) as f64 * THETA_CHAINS * binom3(k + 1);
        let ratio = s * r / (k + 6) as f64 * binom3(k + 2) / binom3(k + 1);
        if ratio < 0.5 && next / (1.0 - ratio) <= 1e-17 * sum {
            break;
        }
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub samples: usize,
    pub sigmas: Vec<f64>,
    pub max_abs: i64,
    pub seed: u64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self { samples: 10_000, sigmas: vec![0.01, 0.1, 0.5, 1.0], max_abs: 40, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSuite {
    /// `|β₄| ≤ (|c|/54) Σ σ^{k+4}/(k+4)! (Θ₁+Θ₂)`.
    pub theta_majorant: CheckReport,
    /// `|β₄| ≤ (43|c|/54) σ⁴ e^{σΣ|ξᵢ|}`.
    pub exponential: CheckReport,
    /// `|β₄| ≤ (|c|/9) Σ_{p≠q} e^{σΣ|ξᵢ|} / ((1+|ξ_p|)(1+|ξ_q|))`.
    pub pairwise_reciprocal: CheckReport,
    /// `|β₃| ≤ Σᵢ e^{σΣ|ξᵢ|} / (1+|ξᵢ|)`.
    pub cubic: CheckReport,
    /// `|M₅| ≤ (86|c|/27) σ⁴ e^{σΣ|ξᵢ|} max|ξᵢ|`.
    pub quintic: CheckReport,
    /// Informational: `(|c|/108) Σ (2σ)^{k+4}/(k+4)! (Θ₁+Θ₂)`, the majorant
    /// that follows from the `m²` expansion of `β₄`.
    pub theta_majorant_doubled: CheckReport,
}

impl BoundSuite {
    /// The five bound families, excluding the informational majorant.
    pub fn families(&self) -> [&CheckReport; 5] {
        [&self.theta_majorant, &self.exponential, &self.pairwise_reciprocal, &self.cubic, &self.quintic]
    }

    pub fn passed(&self) -> bool {
        self.families().iter().all(|r| r.passed())
    }
}

fn bounded_tuples(sampler: &mut TupleSampler, k: usize, n: usize) -> Vec<Vec<f64>> {
    let bound = q(sampler.max_numerator);
    let mut out = Vec::with_capacity(n);
    let mut variant = 0;
    while out.len() < n {
        let t = if out.len() % 10 == 9 {
            variant += 1;
            sampler.degenerate(k, variant)
        } else {
            sampler.random_bounded(k)
        };
        if t.components().iter().all(|x| x.abs() <= bound) {
            out.push(t.to_f64());
        }
    }
    out
}

/// One comparison: `value ± err` against `bound`.
#[derive(Clone, Copy)]
struct Outcome {
    value: f64,
    err: f64,
    bound: f64,
}

impl Outcome {
    fn holds(&self) -> bool {
        self.bound - self.value > self.err || (self.value == 0.0 && self.bound == 0.0)
    }
}

fn fold(report: &mut CheckReport, tuple: &[f64], sigma: f64, o: Outcome) {
    if o.bound > 0.0 {
        report.observe_ratio((o.value + o.err) / o.bound);
    }
    report.record(o.holds(), || Failure {
        tuple: tuple.iter().map(|x| x.to_string()).chain([format!("sigma={sigma}")]).collect(),
        lhs: format!("{:e} (+{:e})", o.value, o.err),
        rhs: format!("{:e}", o.bound),
    });
}

type QuarticRow = Vec<[Outcome; 4]>;

/// Samples integer tuples with `|ξᵢ| ≤ max_abs` (every tenth one degenerate)
/// and checks each bound family at every `σ` in the grid.
pub fn check_beta_bounds(cfg: &BoundConfig, c: Complex64) -> Result<BoundSuite> {
    let c_abs = c.norm();
    let mut sampler = TupleSampler::new(cfg.seed);
    sampler.max_numerator = cfg.max_abs;
    let quads = bounded_tuples(&mut sampler, 4, cfg.samples);
    let triples = bounded_tuples(&mut sampler, 3, cfg.samples);
    let quints = bounded_tuples(&mut sampler, 5, cfg.samples);
    let sigmas = &cfg.sigmas;

    let mut theta = CheckReport::new("beta4 theta majorant");
    let mut expo = CheckReport::new("beta4 exponential bound");
    let mut recip = CheckReport::new("beta4 pairwise reciprocal bound");
    let mut doubled = CheckReport::new("beta4 doubled-argument theta majorant");
    let start = std::time::Instant::now();
    let rows: Vec<Result<QuarticRow>> = quads
        .par_iter()
        .map(|xi| {
            let x = [xi[0], xi[1], xi[2], xi[3]];
            let abs_sum: f64 = x.iter().map(|v| v.abs()).sum();
            let mut recip_sum = 0.0;
            for p in 0..4 {
                for r in 0..4 {
                    if p != r {
                        recip_sum += 1.0 / ((1.0 + x[p].abs()) * (1.0 + x[r].abs()));
                    }
                }
            }
            sigmas
                .iter()
                .map(|&s| {
                    let series = quartic_series(s, x, DEFAULT_SERIES_TOL)?;
                    let value = c_abs / 108.0 * series.value.abs();
                    let err = c_abs / 108.0 * series.error_bound;
                    let e = (s * abs_sum).exp();
                    Ok([
                        Outcome { value, err, bound: c_abs / 54.0 * theta_majorant(s, &x) },
                        Outcome { value, err, bound: 43.0 * c_abs / 54.0 * s.powi(4) * e },
                        Outcome { value, err, bound: c_abs / 9.0 * recip_sum * e },
                        Outcome { value, err, bound: c_abs / 108.0 * theta_majorant(2.0 * s, &x) },
                    ])
                })
                .collect()
        })
        .collect();
    for (xi, row) in quads.iter().zip(rows) {
        for (&s, o) in sigmas.iter().zip(row?) {
            fold(&mut theta, xi, s, o[0]);
            fold(&mut expo, xi, s, o[1]);
            if s <= 1.0 {
                fold(&mut recip, xi, s, o[2]);
            }
            fold(&mut doubled, xi, s, o[3]);
        }
    }
    let quartic_secs = start.elapsed().as_secs_f64();
    for r in [&mut theta, &mut expo, &mut recip, &mut doubled] {
        r.elapsed_secs = quartic_secs;
    }

    let mut failure = None;
    let cubic = timed("beta3 reciprocal bound", |report| {
        let rows: Vec<Result<Vec<Outcome>>> = triples
            .par_iter()
            .map(|xi| {
                let x = [xi[0], xi[1], xi[2]];
                let abs_sum: f64 = x.iter().map(|v| v.abs()).sum();
                let r: f64 = x.iter().map(|v| 1.0 / (1.0 + v.abs())).sum();
                sigmas
                    .iter()
                    .map(|&s| {
                        let b = cubic_series(s, x, DEFAULT_SERIES_TOL)?;
                        Ok(Outcome { value: b.value.abs(), err: b.error_bound, bound: r * (s * abs_sum).exp() })
                    })
                    .collect()
            })
            .collect();
        for (xi, row) in triples.iter().zip(rows) {
            match row {
                Ok(row) => {
                    for (&s, o) in sigmas.iter().zip(row) {
                        fold(report, xi, s, o);
                    }
                }
                Err(e) => failure = Some(e),
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let quintic = timed("M5 bound", |report| {
        let rows: Vec<Result<Vec<Outcome>>> = quints
            .par_iter()
            .map(|xi| {
                let abs_sum: f64 = xi.iter().map(|v| v.abs()).sum();
                let max = xi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                sigmas
                    .iter()
                    .map(|&s| {
                        let (value, err) = m5_with_error(s, xi, c_abs)?;
                        let bound = 86.0 * c_abs / 27.0 * s.powi(4) * (s * abs_sum).exp() * max;
                        Ok(Outcome { value, err, bound })
                    })
                    .collect()
            })
            .collect();
        for (xi, row) in quints.iter().zip(rows) {
            match row {
                Ok(row) => {
                    for (&s, o) in sigmas.iter().zip(row) {
                        fold(report, xi, s, o);
                    }
                }
                Err(e) => failure = Some(e),
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    Ok(BoundSuite {
        theta_majorant: theta,
        exponential: expo,
        pairwise_reciprocal: recip,
        cubic,
        quintic,
        theta_majorant_doubled: doubled,
    })
}

/// `|M₅|` through the ten merged pairs, with the propagated series error.
fn m5_with_error(sigma: f64, xi: &[f64], c_abs: f64) -> Result<(f64, f64)> {
    let mut acc = 0.0;
    let mut err = 0.0;
    for a in 0..5 {
        for b in a + 1..5 {
            let rest: Vec<f64> = (0..5).filter(|&i| i != a && i != b).map(|i| xi[i]).collect();
            let pair = xi[a] + xi[b];
            let s = quartic_series(sigma, [rest[0], rest[1], rest[2], pair], DEFAULT_SERIES_TOL)?;
            acc += s.value * pair;
            err += s.error_bound * pair.abs();
        }
    }
    // |M₅| = 2/10 · |c|/108 · |Σ S₄ · pair|
    let scale = 0.2 * c_abs / 108.0;
    Ok((scale * acc.abs(), scale * err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn theta_vanishes_at_origin() {
        let t = RationalTuple::from_ints(&[0, 0, 0, 0]).unwrap();
        for k in 1..4 {
            let (a, b) = theta_bounds(k, &t).unwrap();
            assert!(a.is_zero() && b.is_zero());
        }
    }

    #[test]
    fn theta_k0_counts_terms() {
        let t = RationalTuple::from_ints(&[1, 2, 3, -6]).unwrap();
        let (a, b) = theta_bounds(0, &t).unwrap();
        assert_eq!(a, q(28));
        assert_eq!(b, q(8));
    }

    #[test]
    fn float_chains_match_exact_theta() {
        let t = RationalTuple::from_ints(&[3, -5, 4, -2]).unwrap();
        let xi = [3.0, -5.0, 4.0, -2.0];
        let mut chains = theta_chains(&xi, 1.0);
        for k in 0..8 {
            if k > 0 {
                chains.iter_mut().for_each(|c| c.advance());
            }
            let (a, b) = theta_bounds(k, &t).unwrap();
            let exact = (a + b).to_f64().unwrap();
            let float: f64 = chains.iter().map(|c| c.value()).sum();
            assert!((float - exact).abs() <= 1e-12 * exact, "k={k}: {float} vs {exact}");
        }
    }
}
