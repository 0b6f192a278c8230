//! Pseudo-spectral KdV simulation on a periodic domain, Gevrey-norm and
//! analyticity-radius diagnostics, the modified-energy hierarchy
//! `E2, E3, E4` built from multilinear Fourier forms, and an exact-arithmetic
//! laboratory for the polynomial identities behind the hierarchy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment_cli;
pub mod gevrey_ops;
pub mod identity_lab;
pub mod kdv_solver;
pub mod multilinear_energies;
pub mod spectral_field;
pub mod summation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
