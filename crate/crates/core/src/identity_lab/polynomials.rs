//! Direct and decomposed forms of the power-sum polynomials, evaluated in
//! exact rational arithmetic.

use super::{q, timed, CheckReport, Failure, RationalTuple, Q};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// Power table `x^0 ..= x^max`.
struct Pw(Vec<Q>);

impl Pw {
    fn new(x: &Q, max: usize) -> Self {
        let mut v = Vec::with_capacity(max + 1);
        v.push(Q::one());
        for i in 1..=max {
            let next = &v[i - 1] * x;
            v.push(next);
        }
        Pw(v)
    }

    fn get(&self, n: usize) -> &Q {
        &self.0[n]
    }
}

/// `Σ_{m+l=n} a^m b^l`, zero for negative `n`.
fn sum2(a: &Pw, b: &Pw, n: i64) -> Q {
    if n < 0 {
        return Q::zero();
    }
    let n = n as usize;
    (0..=n).fold(Q::zero(), |acc, m| acc + a.get(m) * b.get(n - m))
}

fn sign(i: i64) -> Q {
    if i % 2 == 0 {
        q(1)
    } else {
        q(-1)
    }
}

fn pow(x: &Q, n: usize) -> Q {
    num_traits::pow(x.clone(), n)
}

fn four(t: &RationalTuple) -> Result<[&Q; 4]> {
    t.expect_arity(4)?;
    let c = t.components();
    Ok([&c[0], &c[1], &c[2], &c[3]])
}

/// `ξ₁^{2k} + ξ₂^{2k} + ξ₃^{2k} + ξ₄^{2k} - (ξ₁+ξ₂)^{2k} - (ξ₁+ξ₃)^{2k} - (ξ₁+ξ₄)^{2k}`.
pub fn omega1_direct(k: usize, t: &RationalTuple) -> Result<Q> {
    if k < 2 {
        return Err(Error::Domain(format!("k = {k} must be at least 2")));
    }
    let [x1, x2, x3, x4] = four(t)?;
    let e = 2 * k;
    Ok(pow(x1, e) + pow(x2, e) + pow(x3, e) + pow(x4, e)
        - pow(&(x1 + x2), e)
        - pow(&(x1 + x3), e)
        - pow(&(x1 + x4), e))
}

/// The decomposition of `Ω₁(k)` as `ξ₁ξ₂ξ₃ξ₄` times a polynomial, built from
/// nested sums over single frequencies and pair sums.
pub fn omega1_decomposed(k: usize, t: &RationalTuple) -> Result<Q> {
    if k < 2 {
        return Err(Error::Domain(format!("k = {k} must be at least 2")));
    }
    let [x1, x2, x3, x4] = four(t)?;
    let k = k as i64;
    let d = (2 * k) as usize;
    let p = |x: &Q| Pw::new(x, d);
    let (p1, p2, p3, p4) = (p(x1), p(x2), p(x3), p(x4));
    let p34 = p(&(x3 + x4));
    let p24 = p(&(x2 + x4));
    let p14 = p(&(x1 + x4));
    let p13 = p(&(x1 + x3));
    let p23 = p(&(x2 + x3));

    let mut total = Q::zero();
    let top = 2 * k - 5;
    for i in 0..=top {
        let j = top - i;
        let (iu, ju) = (i as usize, j as usize);
        let term = -(p1.get(ju + 1) + p2.get(ju + 1)) * sum2(&p3, &p34, i)
            + (p1.get(iu + 1) + p3.get(iu + 1)) * sum2(&p2, &p24, j)
            + (p2.get(iu + 1) + p3.get(iu + 1)) * sum2(&p1, &p14, j)
            + (p1.get(iu + 1) + p2.get(iu + 1)) * sum2(&p4, &p34, j);
        total += sign(i) * term;
    }
    let top = 2 * k - 4;
    for i in 0..=top {
        let j = top - i;
        let (iu, ju) = (i as usize, j as usize);
        let plain = p1.get(iu) * p14.get(ju) + p2.get(iu) * p24.get(ju) + p3.get(iu) * p34.get(ju)
            + p4.get(iu) * p34.get(ju);
        total -= q(2) * plain;
        total -= sign(i) * (p4.get(iu) * sum2(&p1, &p13, j) + p3.get(iu) * sum2(&p4, &p24, j));
        total -= sign(i) * p4.get(iu) * (sum2(&p2, &p23, j) + sum2(&p3, &p23, j));
    }
    Ok(total * x1 * x2 * x3 * x4)
}

/// `ξ₁^{2k+1} + ξ₂^{2k+1} + ξ₃^{2k+1} + ξ₄^{2k+1}`.
pub fn omega2_direct(k: usize, t: &RationalTuple) -> Result<Q> {
    if k < 1 {
        return Err(Error::Domain(format!("k = {k} must be at least 1")));
    }
    let xs = four(t)?;
    Ok(xs.iter().fold(Q::zero(), |acc, x| acc + pow(x, 2 * k + 1)))
}

/// The decomposition of `Ω₂(k)` as `(ξ₁+ξ₂)(ξ₁+ξ₃)(ξ₁+ξ₄)` times a polynomial.
pub fn omega2_decomposed(k: usize, t: &RationalTuple) -> Result<Q> {
    if k < 1 {
        return Err(Error::Domain(format!("k = {k} must be at least 1")));
    }
    let [x1, x2, x3, x4] = four(t)?;
    let k = k as i64;
    let d = (2 * k) as usize;
    let p = |x: &Q| Pw::new(x, d);
    let (p1, p2, p3, p4) = (p(x1), p(x2), p(x3), p(x4));
    let (n1, n2, n3, n4) = (p(&-x1), p(&-x2), p(&-x3), p(&-x4));

    let mut total = Q::zero();
    let top = 2 * k - 2;
    for i in 0..=top {
        let j = top - i;
        let (iu, ju) = (i as usize, j as usize);
        total += sign(i) * (q(2) * p1.get(iu) * p4.get(ju) + p2.get(iu) * p3.get(ju));
    }
    let top = 2 * k - 1;
    for i in 1..top {
        let j = top - i;
        total += n3.get(i as usize) * sum2(&p1, &n4, j - 1) + p4.get(j as usize) * sum2(&n2, &p3, i - 1);
    }
    let top = 2 * k - 2;
    for i in 0..top {
        let j = top - i;
        total += sign(i) * sum2(&p1, &n4, i) * sum2(&p2, &n4, j);
        let mut inner = sum2(&p3, &n2, j - 1) + sum2(&p4, &n1, j - 1);
        for m in 1..j {
            let l = j - m;
            inner += n1.get(l as usize) * sum2(&p3, &n2, m - 1) + n2.get(m as usize) * sum2(&p4, &n1, l - 1);
        }
        total += sign(i + 1) * p4.get(i as usize + 1) * inner;
    }
    Ok(total * (x1 + x2) * (x1 + x3) * (x1 + x4))
}

/// The three forms `Σ ξᵢ³`, `3 Σ_{i<j<l} ξᵢξⱼξₗ`, `3(ξ₁+ξ₂)(ξ₁+ξ₃)(ξ₁+ξ₄)`.
pub fn alpha4_forms(t: &RationalTuple) -> Result<[Q; 3]> {
    let [x1, x2, x3, x4] = four(t)?;
    let cubes = pow(x1, 3) + pow(x2, 3) + pow(x3, 3) + pow(x4, 3);
    let e3 = x1 * x2 * x3 + x1 * x2 * x4 + x1 * x3 * x4 + x2 * x3 * x4;
    let factored = q(3) * (x1 + x2) * (x1 + x3) * (x1 + x4);
    Ok([cubes, q(3) * e3, factored])
}

fn witness(t: &RationalTuple, lhs: &Q, rhs: &Q) -> Failure {
    Failure { tuple: t.to_strings(), lhs: lhs.to_string(), rhs: rhs.to_string() }
}

/// Applies `pair` to every tuple in parallel and records `lhs == rhs`.
fn exact_check<F>(name: &str, tuples: &[RationalTuple], pair: F) -> CheckReport
where
    F: Fn(&RationalTuple) -> Result<Vec<(Q, Q)>> + Sync,
{
    timed(name, |report| {
        let results: Vec<Result<Vec<(Q, Q)>>> = tuples.par_iter().map(&pair).collect();
        for (t, r) in tuples.iter().zip(results) {
            match r {
                Ok(pairs) => {
                    for (l, r) in pairs {
                        report.record(l == r, || witness(t, &l, &r));
                    }
                }
                Err(e) => report.record(false, || Failure {
                    tuple: t.to_strings(),
                    lhs: e.to_string(),
                    rhs: String::new(),
                }),
            }
        }
    })
}

pub fn check_omega1(k_max: usize, tuples: &[RationalTuple]) -> CheckReport {
    exact_check("omega1 decomposition", tuples, |t| {
        (2..=k_max).map(|k| Ok((omega1_decomposed(k, t)?, omega1_direct(k, t)?))).collect()
    })
}

pub fn check_omega2(k_max: usize, tuples: &[RationalTuple]) -> CheckReport {
    exact_check("omega2 decomposition", tuples, |t| {
        (1..=k_max).map(|k| Ok((omega2_decomposed(k, t)?, omega2_direct(k, t)?))).collect()
    })
}

/// `Ω₁(2) = -12 ξ₁ξ₂ξ₃ξ₄`.
pub fn check_omega1_leading(tuples: &[RationalTuple]) -> CheckReport {
    exact_check("omega1 leading term", tuples, |t| {
        let c = t.components();
        let prod = q(-12) * &c[0] * &c[1] * &c[2] * &c[3];
        Ok(vec![(omega1_direct(2, t)?, prod.clone()), (omega1_decomposed(2, t)?, prod)])
    })
}

pub fn check_alpha4(tuples: &[RationalTuple]) -> CheckReport {
    exact_check("alpha4 factorizations", tuples, |t| {
        let [a, b, c] = alpha4_forms(t)?;
        Ok(vec![(a.clone(), b), (a, c)])
    })
}

/// The `k = 0` and `k = 1` coefficients of the power-series form of the
/// quartic multiplier, with the common factors `c σ^{2k}/(2k)!` removed:
///
/// ```text
/// -(1/108) α₄/(ξ₁ξ₂ξ₃ξ₄) [Σ ξᵢ^{2k} - (ξ₁+ξ₂)^{2k} - (ξ₁+ξ₃)^{2k} - (ξ₁+ξ₄)^{2k}] + (1/36) Σ ξᵢ^{2k-1}
/// ```
pub fn low_order_coefficient(k: usize, t: &RationalTuple) -> Result<Q> {
    if t.has_zero_component {
        return Err(Error::Domain("zero component".into()));
    }
    let [x1, x2, x3, x4] = four(t)?;
    let alpha = alpha4_forms(t)?[0].clone();
    let prod = x1 * x2 * x3 * x4;
    let e = 2 * k;
    let bracket = pow(x1, e) + pow(x2, e) + pow(x3, e) + pow(x4, e)
        - pow(&(x1 + x2), e)
        - pow(&(x1 + x3), e)
        - pow(&(x1 + x4), e);
    let odd = |x: &Q| if k == 0 { Q::one() / x } else { pow(x, e - 1) };
    let recip = odd(x1) + odd(x2) + odd(x3) + odd(x4);
    Ok(-(alpha / prod) * bracket / q(108) + recip / q(36))
}

pub fn check_low_order_vanishing(tuples: &[RationalTuple]) -> CheckReport {
    exact_check("low-order vanishing", tuples, |t| {
        Ok(vec![(low_order_coefficient(0, t)?, Q::zero()), (low_order_coefficient(1, t)?, Q::zero())])
    })
}

/// Right side of `ξ₁^{2k+1} + ξ₂^{2k+1} + ξ₃^{2k+1} = ξ₁ξ₂ξ₃ Σ_{i+j=2k-2} (ξ₃^j((-ξ₁)^i + (-ξ₂)^i) + ξ₁^i(-ξ₂)^j)`.
pub fn cubic_decomposed(k: usize, t: &RationalTuple) -> Result<Q> {
    t.expect_arity(3)?;
    if k < 1 {
        return Err(Error::Domain(format!("k = {k} must be at least 1")));
    }
    let c = t.components();
    let d = 2 * k;
    let p1 = Pw::new(&c[0], d);
    let p3 = Pw::new(&c[2], d);
    let n1 = Pw::new(&-&c[0], d);
    let n2 = Pw::new(&-&c[1], d);
    let top = 2 * k - 2;
    let mut s = Q::zero();
    for i in 0..=top {
        let j = top - i;
        s += p3.get(j) * (n1.get(i) + n2.get(i)) + p1.get(i) * n2.get(j);
    }
    Ok(s * &c[0] * &c[1] * &c[2])
}

pub fn cubic_direct(k: usize, t: &RationalTuple) -> Result<Q> {
    t.expect_arity(3)?;
    Ok(t.components().iter().fold(Q::zero(), |acc, x| acc + pow(x, 2 * k + 1)))
}

pub fn check_cubic_identity(k_max: usize, triples: &[RationalTuple]) -> CheckReport {
    exact_check("cubic power-sum identity", triples, |t| {
        (1..=k_max).map(|k| Ok((cubic_direct(k, t)?, cubic_decomposed(k, t)?))).collect()
    })
}

/// Exhaustive check of `n₂!⋯n_{p-1}! ≤ n₁! n_p!` over all
/// `0 ≤ n₁ ≤ nᵢ ≤ n_p ≤ n_max` with `n₁ + n_p = n₂ + … + n_{p-1}`, `4 ≤ p ≤ p_max`.
pub fn check_factorial(p_max: usize, n_max: usize) -> CheckReport {
    let mut fact = vec![BigUint::one()];
    for i in 1..=n_max {
        let next = &fact[i - 1] * BigUint::from(i);
        fact.push(next);
    }
    timed("factorial inequality", |report| {
        for p in 4..=p_max.max(3) {
            let inner = p - 2;
            let per_pair: Vec<(usize, Vec<Failure>)> = (0..=n_max)
                .into_par_iter()
                .map(|n1| {
                    let mut count = 0usize;
                    let mut bad = Vec::new();
                    for np in n1..=n_max {
                        let rhs = &fact[n1] * &fact[np];
                        let target = n1 + np;
                        let mut mids = vec![n1; inner];
                        // all middle entries but the last range freely; the last is fixed by the sum
                        loop {
                            let partial: usize = mids[..inner - 1].iter().sum();
                            if partial <= target {
                                let last = target - partial;
                                if last >= n1 && last <= np {
                                    mids[inner - 1] = last;
                                    count += 1;
                                    let lhs = mids.iter().fold(BigUint::one(), |acc, &m| acc * &fact[m]);
                                    if lhs > rhs {
                                        let mut tuple = vec![n1.to_string()];
                                        tuple.extend(mids.iter().map(|m| m.to_string()));
                                        tuple.push(np.to_string());
                                        bad.push(Failure { tuple, lhs: lhs.to_string(), rhs: rhs.to_string() });
                                    }
                                }
                            }
                            // odometer over mids[0..inner-1] in [n1, np]
                            let mut pos = 0;
                            loop {
                                if pos == inner - 1 {
                                    break;
                                }
                                if mids[pos] < np {
                                    mids[pos] += 1;
                                    break;
                                }
                                mids[pos] = n1;
                                pos += 1;
                            }
                            if pos == inner - 1 {
                                break;
                            }
                        }
                    }
                    (count, bad)
                })
                .collect();
            for (count, bad) in per_pair {
                report.record_passes(count - bad.len());
                for f in bad {
                    report.record(false, || f);
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> RationalTuple {
        RationalTuple::from_ints(v).unwrap()
    }

    #[test]
    fn omega1_examples() {
        assert_eq!(omega1_direct(2, &t(&[1, 1, 1, -3])).unwrap(), q(36));
        assert_eq!(omega1_direct(2, &t(&[1, 2, 3, -6])).unwrap(), q(432));
        assert!(omega1_direct(1, &t(&[1, 2, 3, -6])).is_err());
    }

    #[test]
    fn omega2_k1_is_alpha4() {
        assert_eq!(omega2_direct(1, &t(&[1, 2, 3, -6])).unwrap(), q(-180));
        assert_eq!(omega2_decomposed(1, &t(&[1, 2, 3, -6])).unwrap(), q(-180));
    }

    #[test]
    fn cubic_k1_example() {
        assert_eq!(cubic_direct(1, &t(&[1, 2, -3])).unwrap(), q(-18));
        assert_eq!(cubic_decomposed(1, &t(&[1, 2, -3])).unwrap(), q(-18));
    }

    #[test]
    fn small_factorial_sweep() {
        let r = check_factorial(5, 6);
        assert!(r.passed());
        assert!(r.samples_run > 0);
    }
}
