use kdv_gevrey::gevrey_ops::{apply_i, estimate_radius, estimate_radius_default, gevrey_norm, rescale_field, symbol_m};
use kdv_gevrey::kdv_solver::{gevrey_random_data, soliton};
use kdv_gevrey::spectral_field::{dealias, forward_transform, inverse_transform, l2_norm, make_grid, SpectralField};
use kdv_gevrey::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

fn cos_field(l: f64, n: usize) -> SpectralField {
    let g = make_grid(n, l).unwrap();
    let samples: Vec<f64> = g.points().iter().map(|x| (2.0 * PI * x / l).cos()).collect();
    forward_transform(&samples, &g).unwrap()
}

#[test]
fn grid_frequencies() {
    let g = make_grid(256, 64.0).unwrap();
    assert!((g.xi(1) - 0.098_174_770_424_681).abs() < 1e-14);
    assert!(make_grid(12, 1.0).is_err());
}

#[test]
fn single_harmonic_transform() {
    let f = cos_field(7.0, 32);
    for k in f.grid().k_min()..=f.grid().k_max() {
        let expect = if k.abs() == 1 { 0.5 } else { 0.0 };
        assert!((f.coeff(k) - Complex64::new(expect, 0.0)).norm() < 1e-15, "k = {k}");
    }
    let back = inverse_transform(&f).unwrap();
    for (x, u) in f.grid().points().iter().zip(&back) {
        assert!((u - (2.0 * PI * x / 7.0).cos()).abs() < 1e-14);
    }
}

#[test]
fn constant_has_no_coefficients() {
    let g = make_grid(16, 3.0).unwrap();
    assert!(forward_transform(&[3.0; 16], &g).unwrap().is_zero());
    assert!(inverse_transform(&SpectralField::zeros(&g)).unwrap().iter().all(|&u| u == 0.0));
}

#[test]
fn broken_symmetry_is_rejected() {
    let g = make_grid(8, 1.0).unwrap();
    let mut c = vec![Complex64::new(0.0, 0.0); 8];
    c[g.slot(1)] = Complex64::new(1.0, 0.0);
    assert!(matches!(SpectralField::from_coeffs(&g, c), Err(Error::Integrity(_))));
}

#[test]
fn l2_norm_examples() {
    let f = cos_field(2.0 * PI, 16);
    assert!((l2_norm(&f) - PI.sqrt()).abs() < 1e-14);
    let g = make_grid(16, 2.0 * PI).unwrap();
    let mut two = SpectralField::zeros(&g);
    two.set_mode(2, Complex64::new(1.0, 0.0));
    assert!((l2_norm(&two) - 2.0 * PI.sqrt()).abs() < 1e-14);
    assert_eq!(l2_norm(&SpectralField::zeros(&g)), 0.0);
}

#[test]
fn dealias_zeroes_the_top_third() {
    let g = make_grid(16, 1.0).unwrap();
    let mut f = SpectralField::zeros(&g);
    f.set_mode(2, Complex64::new(1.0, 1.0));
    assert_eq!(dealias(&f), f);
    f.set_mode(8, Complex64::new(1.0, 0.0));
    let d = dealias(&f);
    assert_eq!(d.coeff(8), Complex64::new(0.0, 0.0));
    assert_eq!(d.coeff(2), Complex64::new(1.0, 1.0));
    assert_eq!(dealias(&d), d);
}

#[test]
fn symbol_examples() {
    assert_eq!(symbol_m(3.0, 0.0).unwrap(), 1.0);
    assert!((symbol_m(0.5, 2.0).unwrap() - 1.543_080_634_815_244).abs() < 1e-14);
}

#[test]
fn single_mode_weights() {
    let f = cos_field(2.0 * PI, 32);
    assert_eq!(apply_i(0.0, &f).unwrap(), f);
    let s = 0.7;
    let w = apply_i(s, &f).unwrap();
    assert!((w.coeff(1).re - 0.5 * s.cosh()).abs() < 1e-15);
    let norm = gevrey_norm(s, &f).unwrap();
    assert!((norm * norm - PI * (2.0 * s).exp()).abs() < 1e-12);
    assert_eq!(gevrey_norm(0.0, &f).unwrap(), l2_norm(&f));
}

#[test]
fn radius_of_pure_exponential() {
    let g = make_grid(128, 32.0).unwrap();
    for s0 in [0.1, 0.5, 1.0, 2.0] {
        let f = gevrey_random_data(s0, 1.0, 9, &g);
        let r = estimate_radius_default(&f).unwrap();
        assert!((r.sigma_hat - s0).abs() < 1e-10 * s0, "{s0}: {}", r.sigma_hat);
        assert!(r.fit_rms < 1e-10);
    }
    assert!(estimate_radius(&SpectralField::zeros(&g), 0.25, 1e-12).is_err());
}

#[test]
fn radius_of_soliton() {
    let g = make_grid(256, 64.0).unwrap();
    let kappa = 0.5;
    let r = estimate_radius_default(&soliton(kappa, 32.0, &g).unwrap()).unwrap();
    let exact = PI / (2.0 * kappa);
    assert!((r.sigma_hat - exact).abs() <= 0.05 * exact, "{}", r.sigma_hat);
}

#[test]
fn rescale_halves_the_frequency() {
    let f = cos_field(5.0, 32);
    assert_eq!(rescale_field(&f, 1.0).unwrap(), f);
    let r = rescale_field(&f, 2.0).unwrap();
    assert_eq!(r.grid().length(), 10.0);
    assert!((r.grid().xi(1) - 0.5 * f.grid().xi(1)).abs() < 1e-15);
    assert!((r.coeff(1).re - 0.125).abs() < 1e-16);
}

#[test]
fn random_data_is_deterministic() {
    let g = make_grid(64, 16.0).unwrap();
    assert_eq!(gevrey_random_data(1.0, 0.3, 5, &g), gevrey_random_data(1.0, 0.3, 5, &g));
    assert!(gevrey_random_data(1.0, 0.0, 5, &g).is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_roundtrip(samples in prop::collection::vec(-10.0f64..10.0, 32)) {
        let g = make_grid(32, 4.0).unwrap();
        let back = inverse_transform(&forward_transform(&samples, &g).unwrap()).unwrap();
        let mean = samples.iter().sum::<f64>() / 32.0;
        let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!((a - mean - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn symbol_sandwich(s in 0.0f64..5.0, xi in -100.0f64..100.0) {
        let m = symbol_m(s, xi).unwrap();
        let e = (s * xi.abs()).exp();
        prop_assert!(m >= 0.5 * e * (1.0 - 1e-15) && m <= e * (1.0 + 1e-15));
        prop_assert_eq!(m, symbol_m(s, -xi).unwrap());
    }

    #[test]
    fn norm_sandwich_and_monotonicity(seed in 0u64..1000, s in 0.0f64..1.0, s0 in 0.2f64..2.0) {
        let g = make_grid(64, 16.0).unwrap();
        let f = gevrey_random_data(s0, 1.0, seed, &g);
        let norm = gevrey_norm(s, &f).unwrap();
        let weighted = l2_norm(&apply_i(s, &f).unwrap());
        prop_assert!(weighted >= 0.5 * norm && weighted <= norm * (1.0 + 1e-14));
        prop_assert!(gevrey_norm(s + 0.1, &f).unwrap() >= norm);
    }

    #[test]
    fn rescaled_norm_relation(seed in 0u64..1000, lambda in prop::sample::select(vec![2.0, 4.0]), s in 0.0f64..1.0) {
        let g = make_grid(64, 16.0).unwrap();
        let f = gevrey_random_data(1.0, 1.0, seed, &g);
        let lhs = gevrey_norm(s, &rescale_field(&f, lambda).unwrap()).unwrap();
        let rhs = lambda.powf(-1.5) * gevrey_norm(s / lambda, &f).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }
}
