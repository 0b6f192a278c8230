use kdv_gevrey::kdv_solver::{evolve, gevrey_random_data, rhs_nonlinear, soliton, step, SolverConfig, Stepper};
use kdv_gevrey::spectral_field::{forward_transform, inverse_transform, l2_norm, make_grid, SpectralField};
use kdv_gevrey::Complex64;
use std::f64::consts::PI;

fn difference(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn relative_difference(a: &SpectralField, b: &SpectralField) -> f64 {
    difference(a, b) / l2_norm(b) * b.grid().length().sqrt().recip()
}

#[test]
fn nonlinear_term_of_cosine() {
    let g = make_grid(16, 2.0 * PI).unwrap();
    let samples: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
    let r = rhs_nonlinear(&forward_transform(&samples, &g).unwrap());
    for k in g.k_min()..=g.k_max() {
        let expect = match k {
            2 => Complex64::new(0.0, -0.25),
            -2 => Complex64::new(0.0, 0.25),
            _ => Complex64::new(0.0, 0.0),
        };
        assert!((r.coeff(k) - expect).norm() < 1e-15, "k = {k}");
    }
    assert_eq!(r.symmetry_defect(), 0.0);
}

#[test]
fn linear_flow_is_exact() {
    let g = make_grid(64, 10.0).unwrap();
    let u = gevrey_random_data(0.5, 1.0, 4, &g);
    let dt = 0.013;
    let v = Stepper::new(&g, dt).linear_only().advance(&u, 0.0).unwrap();
    for k in 1..=g.dealias_cut() as i64 {
        let phase = Complex64::from_polar(1.0, g.xi(k).powi(3) * dt);
        assert!((v.coeff(k) - phase * u.coeff(k)).norm() < 1e-15, "k = {k}");
    }
    let long = Stepper::new(&g, dt).linear_only().advance_span(&u, 0.0, 500).unwrap();
    assert!((l2_norm(&long) - l2_norm(&u)).abs() <= 1e-15 * l2_norm(&u));
}

#[test]
fn soliton_peak() {
    let g = make_grid(256, 64.0).unwrap();
    let u = soliton(0.5, 32.0, &g).unwrap();
    let x = inverse_transform(&u).unwrap();
    let mean = 24.0 * 0.5 / 64.0;
    assert!((x[128] + mean - 3.0).abs() < 1e-9);
}

#[test]
fn soliton_translates() {
    let (kappa, l, x0, t) = (0.5, 64.0, 30.0, 4.0);
    let g = make_grid(256, l).unwrap();
    let u0 = soliton(kappa, x0, &g).unwrap();
    let tr = evolve(&u0, &SolverConfig::new(1e-3, t, 1.0).unwrap()).unwrap();
    // the mean-zero profile drifts at 4κ² minus the removed mean
    let speed = 4.0 * kappa * kappa - 24.0 * kappa / l;
    let exact = soliton(kappa, x0 + speed * t, &g).unwrap();
    let err = difference(&tr.last().field, &exact) / difference(&exact, &SpectralField::zeros(&g));
    assert!(err <= 1e-6, "shape error {err:e}");
}

#[test]
fn l2_norm_is_conserved() {
    let g = make_grid(256, 64.0).unwrap();
    let u0 = gevrey_random_data(2.0, 0.2, 1, &g);
    let tr = evolve(&u0, &SolverConfig::new(1e-3, 1.0, 0.1).unwrap()).unwrap();
    assert_eq!(tr.checkpoints.len(), 11);
    assert!(tr.l2_drift <= 1e-8, "{:e}", tr.l2_drift);
    assert!(tr.checkpoints.iter().all(|c| c.field.coeff(0) == Complex64::new(0.0, 0.0)));
}

#[test]
fn fourth_order_in_time() {
    let g = make_grid(128, 64.0).unwrap();
    let u0 = soliton(0.5, 32.0, &g).unwrap();
    let run = |dt: f64| evolve(&u0, &SolverConfig::new(dt, 1.0, 1.0).unwrap()).unwrap().last().field.clone();
    let (a, b, c) = (run(0.02), run(0.01), run(0.005));
    let ratio = difference(&a, &b) / difference(&b, &c);
    assert!((ratio - 16.0).abs() <= 0.2 * 16.0, "ratio {ratio}");
}

#[test]
fn step_matches_stepper() {
    let g = make_grid(32, 8.0).unwrap();
    let u = gevrey_random_data(1.0, 0.5, 2, &g);
    assert_eq!(step(&u, 1e-3).unwrap(), Stepper::new(&g, 1e-3).advance(&u, 0.0).unwrap());
    assert!(relative_difference(&step(&u, 1e-3).unwrap(), &u) < 1e-2);
}

#[test]
fn unstable_step_is_rejected() {
    let g = make_grid(64, 16.0).unwrap();
    let u = gevrey_random_data(0.5, 10.0, 3, &g);
    assert!(evolve(&u, &SolverConfig::new(0.5, 1.0, 0.5).unwrap()).is_err());
}

#[test]
fn evolve_is_deterministic() {
    let g = make_grid(64, 16.0).unwrap();
    let u = gevrey_random_data(1.0, 0.5, 8, &g);
    let cfg = SolverConfig::new(1e-3, 0.2, 0.1).unwrap();
    let a = evolve(&u, &cfg).unwrap();
    let b = evolve(&u, &cfg).unwrap();
    assert_eq!(a.last().field, b.last().field);
}
