//! Singularity-free power series for the cubic and quartic correction
//! multipliers.
//!
//! With `m² = (1 + cosh 2σξ)/2` both corrections expand in even powers of `2σ`:
//!
//! ```text
//! β₃ = -(1/18) Σ_{k≥1} (2σ)^{2k}/(2k)! · P₃,k(ξ)
//! S₄ =         Σ_{k≥0} ½(2σ)^{2k+4}/(2k+4)! · P₄,k(ξ),     β₄ = c/(108 i) · S₄
//! ```
//!
//! `P₃,k` and `P₄,k` are the quotients of the power sums by `ξ₁ξ₂ξ₃` and by
//! `ξ₁ξ₂ξ₃ξ₄`, `(ξ₁+ξ₂)(ξ₁+ξ₃)(ξ₁+ξ₄)`; each is a signed sum of complete
//! homogeneous polynomials `h_n` in single frequencies and pair sums, listed in
//! [`QUARTIC_TERMS`]. `h_n` is advanced one degree at a time through
//! `h_n(v₁..v_j) = v_j h_{n-1}(v₁..v_j) + h_n(v₁..v_{j-1})`.
//!
//! Arguments are scaled by `R`, the largest single or pair-sum magnitude, so
//! every `h_n` stays `O(n³)` and the powers `R^{2k}` are folded into the
//! coefficients in log space.

use crate::error::{Error, Result};

/// Degree cap, in units of `k`, for the series loops.
pub const MAX_SERIES_TERMS: usize = 600;
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// A chain variable: a signed single frequency or a signed pair sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Var {
    S(usize, i8),
    P(usize, usize, i8),
}

use Var::{P, S};

/// `gamma · Π y_i^{pref_i} · h_{2k+off}(vars)`, one summand of `P₄,k`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub gamma: f64,
    pub pref: [u8; 4],
    pub vars: &'static [Var],
    pub off: i32,
    /// Index pair grouped together by the convolution path; the pair sum of
    /// any `P` variable is one of the two groups.
    pub part: (usize, usize),
}

const fn t(gamma: f64, pref: [u8; 4], vars: &'static [Var], off: i32, part: (usize, usize)) -> Term {
    Term { gamma, pref, vars, off, part }
}

/// `P₄,k = Ω₁(k+2)/(ξ₁ξ₂ξ₃ξ₄) - Ω₂(k+1)/((ξ₁+ξ₂)(ξ₁+ξ₃)(ξ₁+ξ₄))`.
pub(crate) static QUARTIC_TERMS: [Term; 26] = [
    // first quotient, odd-degree block
    t(-1.0, [1, 0, 0, 0], &[S(0, 1), S(2, -1), P(2, 3, -1)], -1, (2, 3)),
    t(-1.0, [0, 1, 0, 0], &[S(1, 1), S(2, -1), P(2, 3, -1)], -1, (2, 3)),
    t(1.0, [1, 0, 0, 0], &[S(0, -1), S(1, 1), P(1, 3, 1)], -1, (1, 3)),
    t(1.0, [0, 0, 1, 0], &[S(2, -1), S(1, 1), P(1, 3, 1)], -1, (1, 3)),
    t(1.0, [0, 1, 0, 0], &[S(1, -1), S(0, 1), P(0, 3, 1)], -1, (0, 3)),
    t(1.0, [0, 0, 1, 0], &[S(2, -1), S(0, 1), P(0, 3, 1)], -1, (0, 3)),
    t(1.0, [1, 0, 0, 0], &[S(0, -1), S(3, 1), P(2, 3, 1)], -1, (2, 3)),
    t(1.0, [0, 1, 0, 0], &[S(1, -1), S(3, 1), P(2, 3, 1)], -1, (2, 3)),
    // first quotient, even-degree block
    t(-2.0, [0; 4], &[S(0, 1), P(0, 3, 1)], 0, (0, 3)),
    t(-2.0, [0; 4], &[S(1, 1), P(1, 3, 1)], 0, (1, 3)),
    t(-2.0, [0; 4], &[S(2, 1), P(2, 3, 1)], 0, (2, 3)),
    t(-2.0, [0; 4], &[S(3, 1), P(2, 3, 1)], 0, (2, 3)),
    t(-1.0, [0; 4], &[S(3, -1), S(0, 1), P(0, 2, 1)], 0, (0, 2)),
    t(-1.0, [0; 4], &[S(2, -1), S(3, 1), P(1, 3, 1)], 0, (1, 3)),
    t(-1.0, [0; 4], &[S(3, -1), S(1, 1), P(1, 2, 1)], 0, (1, 2)),
    t(-1.0, [0; 4], &[S(3, -1), S(2, 1), P(1, 2, 1)], 0, (1, 2)),
    // second quotient, entering with a minus sign
    t(-2.0, [0; 4], &[S(0, -1), S(3, 1)], 0, (0, 3)),
    t(-1.0, [0; 4], &[S(1, -1), S(2, 1)], 0, (1, 2)),
    t(1.0, [0, 0, 1, 0], &[S(2, -1), S(0, 1), S(3, -1)], -1, (0, 3)),
    t(-1.0, [0, 0, 0, 1], &[S(3, 1), S(1, -1), S(2, 1)], -1, (1, 3)),
    t(-1.0, [0; 4], &[S(0, -1), S(3, 1), S(1, 1), S(3, -1)], 0, (1, 3)),
    t(1.0, [0; 4], &[S(0, -1), S(3, 1)], 0, (0, 3)),
    t(1.0, [0, 0, 0, 1], &[S(3, -1), S(2, 1), S(1, -1)], -1, (1, 3)),
    t(1.0, [0, 0, 0, 1], &[S(3, -1), S(3, 1), S(0, -1)], -1, (0, 3)),
    t(-1.0, [1, 0, 0, 1], &[S(3, -1), S(0, -1), S(2, 1), S(1, -1)], -2, (0, 3)),
    t(-1.0, [0, 1, 0, 1], &[S(3, -1), S(1, -1), S(3, 1), S(0, -1)], -2, (0, 3)),
];

/// `|P₄,k(y)| ≤ QUARTIC_WEIGHT · C(2k+3, 3)` whenever all `|y|`, `|y_i+y_j|` are ≤ 1.
const QUARTIC_WEIGHT: f64 = 36.0;

pub(crate) fn var_value(v: Var, y: &[f64; 4]) -> f64 {
    match v {
        S(i, s) => s as f64 * y[i],
        P(i, j, s) => s as f64 * (y[i] + y[j]),
    }
}

/// Complete homogeneous polynomial of up to four variables, one degree per step.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Chain {
    v: [f64; 4],
    h: [f64; 4],
    len: usize,
}

impl Chain {
    pub fn new(vars: &[f64]) -> Self {
        let mut v = [0.0; 4];
        v[..vars.len()].copy_from_slice(vars);
        Self { v, h: [1.0; 4], len: vars.len() }
    }

    #[inline]
    pub fn advance(&mut self) {
        let mut prev = 0.0;
        for j in 0..self.len {
            self.h[j] = self.v[j] * self.h[j] + prev;
            prev = self.h[j];
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.h[self.len - 1]
    }
}

/// A truncated series value with a bound on its rounding and truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
    pub terms: usize,
}

fn ln_factorial_table(max: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(max + 1);
    t.push(0.0);
    for i in 1..=max {
        t.push(t[i - 1] + (i as f64).ln());
    }
    t
}

fn binom3(n: usize) -> f64 {
    // C(n+3, 3)
    let n = n as f64;
    (n + 1.0) * (n + 2.0) * (n + 3.0) / 6.0
}

/// Stop once the geometric tail of the majorant is below `tol` relative to the
/// partial sum, or below the rounding floor when the sum itself cancels.
fn converged(tail: f64, sum: f64, abs_sum: f64, tol: f64) -> bool {
    tail <= tol * sum.abs().max(f64::EPSILON * abs_sum) || tail < 1e-300
}

/// `S₄(σ, ξ)`; the quartic correction is `c/(108 i) · S₄`.
pub fn quartic_series(sigma: f64, xi: [f64; 4], tol: f64) -> Result<SeriesValue> {
    quartic_series_capped(sigma, xi, tol, MAX_SERIES_TERMS)
}

pub fn quartic_series_capped(sigma: f64, xi: [f64; 4], tol: f64, max_terms: usize) -> Result<SeriesValue> {
    if sigma == 0.0 {
        return Ok(SeriesValue { value: 0.0, error_bound: 0.0, terms: 0 });
    }
    let r = scale_of(&xi);
    let y = [xi[0] / r, xi[1] / r, xi[2] / r, xi[3] / r];
    let mut chains: Vec<Chain> = QUARTIC_TERMS
        .iter()
        .map(|t| Chain::new(&t.vars.iter().map(|&v| var_value(v, &y)).collect::<Vec<_>>()))
        .collect();
    let prefs: Vec<f64> = QUARTIC_TERMS
        .iter()
        .map(|t| t.gamma * (0..4).map(|i| y[i].powi(t.pref[i] as i32)).product::<f64>())
        .collect();
    let lnf = ln_factorial_table(2 * max_terms + 8);
    let ln2s = (2.0 * sigma).ln();
    let lnr = r.ln();
    let coef = |k: usize| (0.5f64).ln() + (2 * k + 4) as f64 * ln2s + (2 * k) as f64 * lnr - lnf[2 * k + 4];

    let mut pk = vec![0.0f64; 3];
    let mut sum = 0.0f64;
    let mut abs_sum = 0.0f64;
    for n in 0..=2 * max_terms {
        if n > 0 {
            for c in chains.iter_mut() {
                c.advance();
            }
        }
        for (ti, term) in QUARTIC_TERMS.iter().enumerate() {
            let deg = n as i32 - term.off;
            if deg < 0 || deg % 2 != 0 {
                continue;
            }
            let k = (deg / 2) as usize;
            if pk.len() <= k {
                pk.resize(k + 1, 0.0);
            }
            pk[k] += prefs[ti] * chains[ti].value();
        }
        if n % 2 == 1 {
            continue;
        }
        let k = n / 2;
        let ck = coef(k).exp();
        let term = ck * pk[k];
        sum += term;
        let maj = ck * QUARTIC_WEIGHT * binom3(n);
        abs_sum += maj;
        // next majorant term and its ratio bound
        let next = coef(k + 1).exp() * QUARTIC_WEIGHT * binom3(n + 2);
        let q = next / maj;
        if q < 0.5 {
            let tail = next / (1.0 - q);
            if converged(tail, sum, abs_sum, tol) {
                let err = tail + rounding_allowance(n, abs_sum);
                return Ok(SeriesValue { value: sum, error_bound: err, terms: k + 1 });
            }
        }
    }
    Err(Error::Truncation { tol, max_terms })
}

fn rounding_allowance(degree: usize, abs_sum: f64) -> f64 {
    4.0 * (degree as f64 + 16.0) * f64::EPSILON * abs_sum
}

/// Largest magnitude among singles and pair sums; 1 for the zero tuple.
pub(crate) fn scale_of(xi: &[f64; 4]) -> f64 {
    let mut r = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        r = r.max((xi[i] + xi[j]).abs());
    }
    if r == 0.0 {
        1.0
    } else {
        r
    }
}

/// The cubic correction `β₃(σ, ξ)` on a triple with zero sum.
pub fn cubic_series(sigma: f64, xi: [f64; 3], tol: f64) -> Result<SeriesValue> {
    if sigma == 0.0 {
        return Ok(SeriesValue { value: 0.0, error_bound: 0.0, terms: 0 });
    }
    let r = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let r = if r == 0.0 { 1.0 } else { r };
    let y = [xi[0] / r, xi[1] / r, xi[2] / r];
    // h(-y1, y3) + h(-y2, y3) + h(y1, -y2)
    let mut ch = [Chain::new(&[-y[0], y[2]]), Chain::new(&[-y[1], y[2]]), Chain::new(&[y[0], -y[1]])];
    let lnf = ln_factorial_table(2 * MAX_SERIES_TERMS + 4);
    let ln2s = (2.0 * sigma).ln();
    let lnr = r.ln();
    let coef = |k: usize| (2 * k) as f64 * ln2s + (2 * k - 2) as f64 * lnr - lnf[2 * k];
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for k in 1..=MAX_SERIES_TERMS {
        let n = 2 * k - 2;
        if n > 0 {
            for c in ch.iter_mut() {
                c.advance();
                c.advance();
            }
        }
        let p = ch[0].value() + ch[1].value() + ch[2].value();
        let ck = coef(k).exp();
        sum += ck * p;
        let maj = ck * 3.0 * (n as f64 + 1.0);
        abs_sum += maj;
        let next = coef(k + 1).exp() * 3.0 * (n as f64 + 3.0);
        let q = next / maj;
        if q < 0.5 {
            let tail = next / (1.0 - q);
            if converged(tail, sum, abs_sum, tol) {
                let scale = 1.0 / 18.0;
                return Ok(SeriesValue {
                    value: -scale * sum,
                    error_bound: scale * (tail + rounding_allowance(n, abs_sum)),
                    terms: k,
                });
            }
        }
    }
    Err(Error::Truncation { tol, max_terms: MAX_SERIES_TERMS })
}

/// `P₄,k` at one tuple for `k ≤ k_max`, without scaling; used to cross-check
/// the term table against the exact decompositions.
pub fn quartic_polynomials(xi: [f64; 4], k_max: usize) -> Vec<f64> {
    let mut chains: Vec<Chain> = QUARTIC_TERMS
        .iter()
        .map(|t| Chain::new(&t.vars.iter().map(|&v| var_value(v, &xi)).collect::<Vec<_>>()))
        .collect();
    let mut pk = vec![0.0f64; k_max + 2];
    for n in 0..=2 * k_max {
        if n > 0 {
            for c in chains.iter_mut() {
                c.advance();
            }
        }
        for (ti, term) in QUARTIC_TERMS.iter().enumerate() {
            let deg = n as i32 - term.off;
            if deg < 0 || deg % 2 != 0 || (deg / 2) as usize > k_max {
                continue;
            }
            let pref: f64 = (0..4).map(|i| xi[i].powi(term.pref[i] as i32)).product();
            pk[(deg / 2) as usize] += term.gamma * pref * chains[ti].value();
        }
    }
    pk.truncate(k_max + 1);
    pk
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_matches_closed_form() {
        // h_n(a, b) = (a^{n+1} - b^{n+1}) / (a - b)
        let (a, b) = (1.5, -0.25);
        let mut c = Chain::new(&[a, b]);
        for n in 1..12 {
            c.advance();
            let expect = (a.powi(n + 1) - b.powi(n + 1)) / (a - b);
            assert!((c.value() - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn leading_quartic_polynomial_is_minus_fifteen() {
        let p = quartic_polynomials([1.0, 2.0, 3.0, -6.0], 0);
        assert_eq!(p[0], -15.0);
    }

    #[test]
    fn zero_sigma_gives_zero() {
        assert_eq!(quartic_series(0.0, [1.0, 2.0, 3.0, -6.0], 1e-12).unwrap().value, 0.0);
        assert_eq!(cubic_series(0.0, [1.0, 2.0, -3.0], 1e-12).unwrap().value, 0.0);
    }
}
