use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

pub type EvalFn = dyn Fn(&[f64]) -> Result<Complex64> + Send + Sync;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    M3,
    Beta3,
    M4,
    Beta4,
    M5,
    Custom(String),
}

/// A function on frequency tuples lying on the hyperplane `ξ₁ + … + ξ_k = 0`.
#[derive(Clone)]
pub struct Multiplier {
    pub arity: usize,
    pub symmetric: bool,
    pub label: Label,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("arity", &self.arity)
            .field("symmetric", &self.symmetric)
            .field("label", &self.label)
            .finish()
    }
}

impl Multiplier {
    pub fn new<F>(arity: usize, label: Label, symmetric: bool, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self { arity, symmetric, label, eval: Arc::new(f) }
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: xi.len() });
        }
        (self.eval)(xi)
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Average over all `k!` argument orderings.
pub fn symmetrize(mult: &Multiplier) -> Result<Multiplier> {
    let k = mult.arity;
    if k > 5 {
        return Err(Error::Arity { expected: 5, got: k });
    }
    let perms = permutations(k);
    let inner = mult.clone();
    let scale = 1.0 / perms.len() as f64;
    Ok(Multiplier::new(k, mult.label.clone(), true, move |xi| {
        let mut buf = vec![0.0; xi.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &perms {
            for (slot, &src) in p.iter().enumerate() {
                buf[slot] = xi[src];
            }
            acc += inner.eval(&buf)?;
        }
        Ok(acc * scale)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(5).len(), 120);
        assert_eq!(permutations(0).len(), 1);
    }

    #[test]
    fn arity_is_checked() {
        let m = Multiplier::new(2, Label::Custom("one".into()), true, |_| Ok(Complex64::new(1.0, 0.0)));
        assert!(m.eval(&[1.0]).is_err());
        assert!(m.eval(&[1.0, -1.0]).is_ok());
    }
}
