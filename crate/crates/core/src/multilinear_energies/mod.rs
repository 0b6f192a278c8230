//! Λ_k functionals, the correction multipliers and the modified energies.

pub mod fast;
pub mod hierarchy;
pub mod lambda;
pub mod multiplier;
pub mod series;

pub use fast::lambda4_fast;
pub use hierarchy::*;
pub use lambda::{energy_report, lambda_k, EnergyReport};
pub use multiplier::{permutations, symmetrize, Label, Multiplier};
pub use series::{cubic_series, quartic_series, SeriesValue, DEFAULT_SERIES_TOL, MAX_SERIES_TERMS};
