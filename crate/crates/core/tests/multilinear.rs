use kdv_gevrey::gevrey_ops::apply_i;
use kdv_gevrey::kdv_solver::gevrey_random_data;
use kdv_gevrey::multilinear_energies::*;
use kdv_gevrey::spectral_field::{l2_norm, make_grid, SpectralField};
use kdv_gevrey::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Deterministic tuples with components in `±[0.5, 4]` and no zero pair sums.
fn nondegenerate_quads(n: usize) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    while out.len() < n {
        let mut v = [0.0; 3];
        for x in v.iter_mut() {
            let mag = 0.5 + 3.5 * next();
            *x = if next() < 0.5 { -mag } else { mag };
        }
        let t = [v[0], v[1], v[2], -(v[0] + v[1] + v[2])];
        let min_single = t.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        let min_pair = [(0, 1), (0, 2), (0, 3)].iter().fold(f64::INFINITY, |m, &(i, j)| m.min((t[i] + t[j]).abs()));
        if min_single > 0.3 && min_pair > 0.3 {
            out.push(t);
        }
    }
    out
}

#[test]
fn symmetrize_examples() {
    let first = Multiplier::new(2, Label::Custom("xi1".into()), false, |xi| Ok(Complex64::new(xi[0], 0.0)));
    let s = symmetrize(&first).unwrap();
    assert!(s.symmetric);
    assert!(s.eval(&[1.7, -1.7]).unwrap().norm() < 1e-15);

    let sq = Multiplier::new(3, Label::Custom("xi1^2".into()), false, |xi| Ok(Complex64::new(xi[0] * xi[0], 0.0)));
    let s = symmetrize(&sq).unwrap();
    let v = s.eval(&[1.0, 2.0, -3.0]).unwrap();
    assert!((v.re - 14.0 / 3.0).abs() < 1e-14);
}

#[test]
fn symmetrize_is_idempotent() {
    let m = m3_multiplier(0.4);
    let once = symmetrize(&m).unwrap();
    let twice = symmetrize(&once).unwrap();
    let xi = [0.3, 1.1, -1.4];
    assert!(rel(twice.eval(&xi).unwrap(), once.eval(&xi).unwrap()) < 1e-14);
    assert!(rel(once.eval(&xi).unwrap(), m.eval(&xi).unwrap()) < 1e-14);
}

#[test]
fn m3_closed_form_matches_symmetrized_definition() {
    for (s, xi) in [(0.3, [1.0, 2.5, -3.5]), (1.0, [-0.7, 0.2, 0.5]), (0.05, [4.0, -1.0, -3.0])] {
        assert!(rel(m3(s, &xi).unwrap(), m3_definition(s, &xi).unwrap()) < 1e-13);
    }
    assert!(m3(0.0, &[1.0, 2.0, -3.0]).unwrap().norm() < 1e-15);
}

#[test]
fn beta3_matches_quotient() {
    for (s, xi) in [(0.3, [1.0, 2.5, -3.5]), (1.0, [-0.7, 0.2, 0.5]), (0.5, [4.0, -1.0, -3.0])] {
        let alpha3 = Complex64::new(0.0, 3.0 * xi[0] * xi[1] * xi[2]);
        let quotient = -m3(s, &xi).unwrap() / alpha3;
        assert!(rel(beta3(s, &xi).unwrap(), quotient) < 1e-10);
    }
}

#[test]
fn beta3_at_antipodal_pair() {
    // m²-based closed form: -(2 sinh 2 + cosh 2 - 1)/18
    let expect = -(2.0 * 2f64.sinh() + 2f64.cosh() - 1.0) / 18.0;
    let v = beta3(1.0, &[1.0, -1.0, 0.0]).unwrap();
    assert!((v.re - expect).abs() < 1e-13, "{} vs {expect}", v.re);
    assert_eq!(beta3(0.0, &[1.0, -1.0, 0.0]).unwrap().re, 0.0);
}

#[test]
fn m4_pairs_match_full_symmetrization() {
    for xi in nondegenerate_quads(5) {
        for s in [0.2, 0.9] {
            assert!(rel(m4(s, &xi).unwrap(), m4_definition(s, &xi).unwrap()) < 1e-12);
        }
    }
}

#[test]
fn inferred_constant_is_stable() {
    let tuples = nondegenerate_quads(100);
    let est = infer_constant_c(&[0.1, 0.5, 1.0], &tuples).unwrap();
    assert!(est.relative_spread <= 1e-8, "spread {}", est.relative_spread);
    assert!((est.value() - HIERARCHY_C).norm() < 1e-8);
    let a = infer_constant_c(&[0.3], &tuples[..20]).unwrap().value();
    let b = infer_constant_c(&[0.7], &tuples[..20]).unwrap().value();
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn inferred_constant_rejects_degenerate_tuples() {
    assert!(infer_constant_c(&[0.5], &[[1.0, -1.0, 2.0, -2.0]]).is_err());
}

#[test]
fn identity_vanishes_at_zero_sigma() {
    let v = m4_identity(0.0, &[1.0, 2.0, 3.0, -6.0], HIERARCHY_C).unwrap();
    assert!(v.norm() < 1e-15);
}

#[test]
fn identity_matches_definition() {
    for xi in nondegenerate_quads(10) {
        for s in [0.1, 0.6] {
            let def = m4_definition(s, &xi).unwrap();
            let id = m4_identity(s, &xi, HIERARCHY_C).unwrap();
            assert!(rel(id, def) < 1e-8);
        }
    }
}

#[test]
fn beta4_series_matches_quotient() {
    for xi in nondegenerate_quads(30) {
        for s in [0.1, 0.5, 1.0] {
            let alpha4 = Complex64::new(0.0, xi.iter().map(|x| x * x * x).sum::<f64>());
            let quotient = -m4_definition(s, &xi).unwrap() / alpha4;
            let series = beta4(s, &xi).unwrap();
            assert!(rel(series, quotient) < 1e-9, "sigma {s} xi {xi:?}: {series} vs {quotient}");
        }
    }
}

#[test]
fn beta4_is_finite_on_resonant_tuples() {
    let v = beta4(0.5, &[1.0, -1.0, 2.0, -2.0]).unwrap();
    assert!(v.re.is_finite() && v.im == 0.0);
    // limit along a perturbation path approaches the series value
    let eps = 1e-3;
    let xi = [1.0 + eps, -1.0, 2.0, -2.0 - eps];
    let alpha4 = Complex64::new(0.0, xi.iter().map(|x| x * x * x).sum::<f64>());
    let quotient = -m4_definition(0.5, &xi).unwrap() / alpha4;
    assert!(rel(quotient, v) < 1e-2);
    assert_eq!(beta4(0.0, &[1.0, -1.0, 2.0, -2.0]).unwrap().norm(), 0.0);
}

#[test]
fn m5_pairs_match_full_symmetrization() {
    let xi = [0.4, -1.3, 2.1, 0.9, -2.1];
    for s in [0.0, 0.3] {
        let a = m5(s, &xi).unwrap();
        let b = m5_definition(s, &xi).unwrap();
        assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300) || (s == 0.0 && a.norm() == 0.0));
    }
}

#[test]
fn m5_is_permutation_invariant() {
    let xi = [0.4, -1.3, 2.1, 0.9, -2.1];
    let base = m5(0.3, &xi).unwrap();
    for p in permutations(5).iter().step_by(12) {
        let perm: Vec<f64> = p.iter().map(|&i| xi[i]).collect();
        let v = m5(0.3, &[perm[0], perm[1], perm[2], perm[3], perm[4]]).unwrap();
        assert!(rel(v, base) < 1e-12);
    }
}

fn cos_field() -> SpectralField {
    let g = make_grid(16, 2.0 * PI).unwrap();
    let mut f = SpectralField::zeros(&g);
    f.set_mode(1, Complex64::new(0.5, 0.0));
    f
}

#[test]
fn lambda2_is_weighted_l2() {
    let g = make_grid(64, 64.0).unwrap();
    let u = gevrey_random_data(1.0, 0.2, 4, &g);
    let s = 0.4;
    let l2 = lambda_k(&energy2_multiplier(s), &u, 2).unwrap();
    let direct = l2_norm(&apply_i(s, &u).unwrap()).powi(2);
    assert!((l2.re - direct).abs() <= 1e-10 * direct);
}

#[test]
fn lambda3_of_single_mode_vanishes() {
    let one = Multiplier::new(3, Label::Custom("one".into()), true, |_| Ok(Complex64::new(1.0, 0.0)));
    assert_eq!(lambda_k(&one, &cos_field(), 3).unwrap().norm(), 0.0);
}

#[test]
fn lambda_rejects_arity_mismatch() {
    assert!(lambda_k(&m3_multiplier(0.1), &cos_field(), 4).is_err());
}

#[test]
fn energy_report_on_single_mode() {
    let r = energy_report(0.3, &cos_field(), 0.0).unwrap();
    assert!((r.e2 - PI * 0.3f64.cosh().powi(2)).abs() < 1e-12);
    assert!((r.e3 - (r.e2 + r.lambda3_beta3)).abs() < 1e-15);
    assert!((r.e4 - (r.e3 + r.lambda4_beta4)).abs() < 1e-15);
}

#[test]
fn energies_coincide_at_zero_sigma() {
    let g = make_grid(32, 64.0).unwrap();
    let u = gevrey_random_data(1.0, 0.2, 8, &g);
    let r = energy_report(0.0, &u, 0.0).unwrap();
    let l2 = l2_norm(&u).powi(2);
    for e in [r.e2, r.e3, r.e4] {
        assert!((e - l2).abs() <= 1e-12 * l2);
    }
}

#[test]
fn fast_lambda4_matches_direct() {
    let g = make_grid(32, 16.0).unwrap();
    let u = gevrey_random_data(0.5, 0.3, 21, &g);
    for s in [0.2, 0.7] {
        let direct = lambda_k(&beta4_multiplier(s), &u, 4).unwrap();
        let fast = lambda4_fast(&u, s).unwrap();
        assert!(rel(fast, direct) < 1e-9, "sigma {s}: {fast} vs {direct}");
    }
    assert_eq!(lambda4_fast(&SpectralField::zeros(&g), 0.5).unwrap().norm(), 0.0);
    assert_eq!(lambda4_fast(&u, 0.0).unwrap().norm(), 0.0);
}

#[test]
fn lambda_is_thread_count_independent() {
    let g = make_grid(32, 16.0).unwrap();
    let u = gevrey_random_data(0.5, 0.3, 5, &g);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (lambda_k(&beta3_multiplier(0.4), &u, 3).unwrap(), lambda4_fast(&u, 0.4).unwrap()))
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.0.re.to_bits(), b.0.re.to_bits());
    assert_eq!(a.0.im.to_bits(), b.0.im.to_bits());
    assert_eq!(a.1.re.to_bits(), b.1.re.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symmetrized_m4_is_permutation_invariant(
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, s in 0.0f64..1.0, pi in 0usize..24
    ) {
        let xi = [a, b, c, -(a + b + c)];
        let p = &permutations(4)[pi];
        let perm = [xi[p[0]], xi[p[1]], xi[p[2]], xi[p[3]]];
        let x = m4_definition(s, &xi).unwrap();
        let y = m4_definition(s, &perm).unwrap();
        // the summands are O(σ²) while their sum is O(σ⁴)
        let scale = xi.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!((x - y).norm() <= 1e-12 * x.norm() + 1e-14 * s * s * scale.powi(2));
    }

    #[test]
    fn beta4_is_real_and_symmetric(
        a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, s in 0.0f64..1.0
    ) {
        let xi = [a, b, c, -(a + b + c)];
        let x = beta4(s, &xi).unwrap();
        let y = beta4(s, &[xi[2], xi[0], xi[3], xi[1]]).unwrap();
        prop_assert_eq!(x.im, 0.0);
        prop_assert!((x - y).norm() <= 1e-12 * x.norm().max(1e-300));
    }
}
