//! Exact verification of the polynomial identities behind the correction
//! multipliers, and sampled floating-point checks of their bounds.

pub mod bounds;
pub mod polynomials;
pub mod suite;

pub use bounds::{check_beta_bounds, theta_bounds, BoundConfig, BoundSuite};
pub use polynomials::*;
pub use suite::{check_quartic_consistency, run_identity_suite, IdentitySuiteConfig, QuarticConsistency};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Frequencies `ξ₁..ξ_k` with `Σ ξᵢ = 0` held exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalTuple {
    components: Vec<Q>,
    pub has_zero_component: bool,
    pub has_zero_pair_sum: bool,
}

impl RationalTuple {
    /// Builds the tuple from `k - 1` free components; the last is their negated sum.
    pub fn from_free(free: Vec<Q>) -> Self {
        let last = -free.iter().fold(Q::zero(), |acc, x| acc + x);
        let mut components = free;
        components.push(last);
        let has_zero_component = components.iter().any(|x| x.is_zero());
        let k = components.len();
        let has_zero_pair_sum =
            (0..k).any(|i| (i + 1..k).any(|j| (&components[i] + &components[j]).is_zero()));
        Self { components, has_zero_component, has_zero_pair_sum }
    }

    pub fn from_components(components: Vec<Q>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::Arity { expected: 2, got: components.len() });
        }
        let sum = components.iter().fold(Q::zero(), |acc, x| acc + x);
        if !sum.is_zero() {
            return Err(Error::Domain(format!("components sum to {sum}, not 0")));
        }
        let k = components.len();
        Ok(Self::from_free(components[..k - 1].to_vec()))
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::from_components(values.iter().map(|&v| q(v)).collect())
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Q] {
        &self.components
    }

    pub fn is_degenerate(&self) -> bool {
        self.has_zero_component || self.has_zero_pair_sum
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.components.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.components.iter().map(|x| x.to_string()).collect()
    }

    pub(crate) fn expect_arity(&self, k: usize) -> Result<()> {
        if self.arity() != k {
            return Err(Error::Arity { expected: k, got: self.arity() });
        }
        Ok(())
    }
}

/// Seeded generator of random and deliberately degenerate tuples.
pub struct TupleSampler {
    rng: SplitMix64,
    pub max_numerator: i64,
    pub max_denominator: i64,
}

impl TupleSampler {
    /// Numerators uniform in `[-40, 40]`, denominator 1.
    pub fn new(seed: u64) -> Self {
        Self { rng: SplitMix64::seed_from_u64(seed), max_numerator: 40, max_denominator: 1 }
    }

    pub fn with_denominators(mut self, max_denominator: i64) -> Self {
        self.max_denominator = max_denominator.max(1);
        self
    }

    fn component(&mut self) -> Q {
        let num = self.rng.gen_range(-self.max_numerator..=self.max_numerator);
        let den = self.rng.gen_range(1..=self.max_denominator);
        Q::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn random(&mut self, k: usize) -> RationalTuple {
        RationalTuple::from_free((0..k - 1).map(|_| self.component()).collect())
    }

    /// Random tuple whose last component also lies in `[-max, max]`.
    pub fn random_bounded(&mut self, k: usize) -> RationalTuple {
        let bound = q(self.max_numerator);
        loop {
            let t = self.random(k);
            if t.components.last().unwrap().abs() <= bound {
                return t;
            }
        }
    }

    /// Cycles through a zero component, a zero pair sum, and both at once.
    pub fn degenerate(&mut self, k: usize, variant: usize) -> RationalTuple {
        let mut free: Vec<Q> = (0..k - 1).map(|_| self.component()).collect();
        let pick = self.rng.gen_range(0..k - 1);
        match variant % 3 {
            0 => free[pick] = Q::zero(),
            1 => {
                if k >= 3 {
                    let other = (pick + 1) % (k - 1);
                    free[other] = -free[pick].clone();
                } else {
                    free[0] = Q::zero();
                }
            }
            _ => {
                free[pick] = Q::zero();
                if k >= 4 {
                    let a = (pick + 1) % (k - 1);
                    let b = (pick + 2) % (k - 1);
                    free[b] = -free[a].clone();
                }
            }
        }
        let t = RationalTuple::from_free(free);
        debug_assert!(t.is_degenerate());
        t
    }

    /// `n` tuples, every fifth one degenerate.
    pub fn mixed(&mut self, k: usize, n: usize) -> Vec<RationalTuple> {
        (0..n).map(|i| if i % 5 == 4 { self.degenerate(k, i / 5) } else { self.random(k) }).collect()
    }

    /// `n` tuples avoiding zero components and zero pair sums.
    pub fn nondegenerate(&mut self, k: usize, n: usize) -> Vec<RationalTuple> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let t = self.random(k);
            if !t.is_degenerate() {
                out.push(t);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub tuple: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub samples_run: usize,
    pub failure_count: usize,
    /// Witnesses, truncated to the first [`MAX_WITNESSES`].
    pub failures: Vec<Failure>,
    pub elapsed_secs: f64,
    /// Largest `lhs / rhs` seen, for inequality checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_ratio: Option<f64>,
}

pub const MAX_WITNESSES: usize = 20;

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            check_name: name.into(),
            samples_run: 0,
            failure_count: 0,
            failures: Vec::new(),
            elapsed_secs: 0.0,
            worst_ratio: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Failure) {
        self.samples_run += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(witness());
            }
        }
    }

    pub fn record_passes(&mut self, n: usize) {
        self.samples_run += n;
    }

    pub fn observe_ratio(&mut self, ratio: f64) {
        self.worst_ratio = Some(self.worst_ratio.map_or(ratio, |r| r.max(ratio)));
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs `check` on every item and stamps the wall-clock time.
pub(crate) fn timed<F: FnOnce(&mut CheckReport)>(name: &str, check: F) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(name);
    check(&mut report);
    report.elapsed_secs = start.elapsed().as_secs_f64();
    report
}
