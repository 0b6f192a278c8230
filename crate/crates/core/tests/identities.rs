use kdv_gevrey::identity_lab::polynomials::{
    alpha4_forms, cubic_decomposed, cubic_direct, low_order_coefficient, omega1_decomposed, omega1_direct,
    omega2_decomposed, omega2_direct,
};
use kdv_gevrey::identity_lab::{
    check_factorial, check_quartic_consistency, q, run_identity_suite, CheckReport, Failure, IdentitySuiteConfig,
    RationalTuple, TupleSampler, Q,
};
use proptest::prelude::*;

fn t(v: &[i64]) -> RationalTuple {
    RationalTuple::from_ints(v).unwrap()
}

fn rational(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}

#[test]
fn omega1_k2_is_the_product() {
    for v in [[1, 1, 1, -3], [1, 2, 3, -6]] {
        let tuple = t(&v);
        let prod = -12 * v.iter().product::<i64>();
        assert_eq!(omega1_direct(2, &tuple).unwrap(), q(prod));
        assert_eq!(omega1_decomposed(2, &tuple).unwrap(), q(prod));
    }
}

#[test]
fn omega1_k3_cross_evaluation() {
    let tuple = t(&[1, 2, 3, -6]);
    assert_eq!(omega1_decomposed(3, &tuple).unwrap(), omega1_direct(3, &tuple).unwrap());
    let zero = t(&[0, 2, 3, -5]);
    for k in 2..=6 {
        assert_eq!(omega1_decomposed(k, &zero).unwrap(), omega1_direct(k, &zero).unwrap());
    }
}

#[test]
fn omega2_examples() {
    assert_eq!(omega2_direct(1, &t(&[1, 2, 3, -6])).unwrap(), q(-180));
    assert_eq!(omega2_direct(1, &t(&[0, 0, 0, 0])).unwrap(), q(0));
    let pair = t(&[3, -3, 5, -5]);
    for k in 1..=6 {
        assert_eq!(omega2_decomposed(k, &pair).unwrap(), omega2_direct(k, &pair).unwrap());
    }
}

#[test]
fn alpha4_examples() {
    assert_eq!(alpha4_forms(&t(&[1, 2, 3, -6])).unwrap(), [q(-180), q(-180), q(-180)]);
    assert_eq!(alpha4_forms(&t(&[4, -4, 7, -7])).unwrap(), [q(0), q(0), q(0)]);
}

#[test]
fn low_order_terms_vanish() {
    let tuple = t(&[1, 2, 3, -6]);
    assert_eq!(low_order_coefficient(0, &tuple).unwrap(), q(0));
    assert_eq!(low_order_coefficient(1, &tuple).unwrap(), q(0));
    assert!(low_order_coefficient(0, &t(&[0, 2, 3, -5])).is_err());
}

#[test]
fn cubic_examples() {
    assert_eq!(cubic_direct(1, &t(&[1, 2, -3])).unwrap(), q(-18));
    let zero = t(&[1, -1, 0]);
    for k in 1..=6 {
        assert_eq!(cubic_direct(k, &zero).unwrap(), q(0));
        assert_eq!(cubic_decomposed(k, &zero).unwrap(), q(0));
    }
}

#[test]
fn components_must_close() {
    assert!(RationalTuple::from_ints(&[1, 2, 3]).is_err());
    assert!(RationalTuple::from_ints(&[1]).is_err());
    let free = RationalTuple::from_free(vec![rational(1, 2), rational(1, 3)]);
    assert_eq!(free.components()[2], rational(-5, 6));
}

#[test]
fn failures_are_recorded() {
    let mut r = CheckReport::new("negative control");
    r.record(true, || unreachable!());
    r.record(false, || Failure { tuple: vec!["1".into()], lhs: "2".into(), rhs: "3".into() });
    assert_eq!((r.samples_run, r.failure_count), (2, 1));
    assert!(!r.passed());
    assert_eq!(r.failures[0].lhs, "2");
}

#[test]
fn reduced_suite_passes() {
    let cfg = IdentitySuiteConfig {
        omega_samples: 40,
        alpha_samples: 40,
        leading_samples: 20,
        cubic_samples: 40,
        low_order_samples: 20,
        ..Default::default()
    };
    let reports = run_identity_suite(&cfg);
    assert_eq!(reports.len(), 6);
    for r in &reports {
        assert!(r.passed() && r.samples_run > 0, "{}", r.check_name);
    }
}

#[test]
fn factorial_small_sweep() {
    let r = check_factorial(5, 10);
    assert!(r.passed());
}

#[test]
fn quartic_consistency_small() {
    let c = check_quartic_consistency(3, 20, &[0.3, 0.7]);
    assert!(c.passed());
    let value = c.constant.unwrap().value();
    assert!(value.re.abs() < 1e-10 && (value.im + 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decompositions_hold_on_random_rationals(seed in any::<u64>(), k in 2usize..=6) {
        let mut s = TupleSampler::new(seed).with_denominators(9);
        let tuple = s.random(4);
        prop_assert_eq!(omega1_decomposed(k, &tuple).unwrap(), omega1_direct(k, &tuple).unwrap());
        prop_assert_eq!(omega2_decomposed(k, &tuple).unwrap(), omega2_direct(k, &tuple).unwrap());
        let [a, b, c] = alpha4_forms(&tuple).unwrap();
        prop_assert!(a == b && b == c);
        let triple = s.random(3);
        prop_assert_eq!(cubic_decomposed(k, &triple).unwrap(), cubic_direct(k, &triple).unwrap());
    }

    #[test]
    fn degenerate_tuples_are_flagged(seed in any::<u64>(), variant in 0usize..3) {
        let mut s = TupleSampler::new(seed);
        let tuple = s.degenerate(4, variant);
        prop_assert!(tuple.is_degenerate());
        prop_assert_eq!(omega2_decomposed(3, &tuple).unwrap(), omega2_direct(3, &tuple).unwrap());
    }
}
