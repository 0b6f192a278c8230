//! Fixed-shape pairwise summation.
//!
//! The reduction tree depends only on the slice length, so the same input
//! always produces the same bits no matter how the partial values were
//! computed or scheduled.

use num_complex::Complex64;
use std::ops::Add;

const LEAF: usize = 8;

fn tree<T: Copy + Add<Output = T>>(xs: &[T], zero: T) -> T {
    if xs.len() <= LEAF {
        let mut acc = zero;
        for &x in xs {
            acc = acc + x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    tree(&xs[..mid], zero) + tree(&xs[mid..], zero)
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    tree(xs, 0.0)
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    tree(xs, Complex64::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_integer_sums() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn complex_sum_is_componentwise() {
        let xs: Vec<Complex64> = (0..37).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let s = pairwise_sum_complex(&xs);
        assert_eq!(s, Complex64::new(666.0, -666.0));
    }
}
