mod common;

use approx::assert_abs_diff_eq;
use ldp_eigen::entry_law::{
    check_sharp_subgaussian, moment_criterion, sparse_rademacher, ternary_law, EntryLaw, Field,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SQRT3: f64 = 1.7320508075688772;

fn builtins() -> Vec<EntryLaw> {
    vec![EntryLaw::rademacher(), EntryLaw::uniform_sqrt3(), EntryLaw::gaussian()]
}

fn c(t: f64) -> Complex64 {
    Complex64::new(t, 0.0)
}

#[test]
fn rademacher_log_mgf() {
    let r = EntryLaw::rademacher();
    assert_eq!(r.log_mgf(0.0).unwrap(), 0.0);
    assert_abs_diff_eq!(r.log_mgf(1.0).unwrap(), 1f64.cosh().ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(r.log_mgf(1.0).unwrap(), 0.4337808304830271, epsilon = 1e-15);
}

#[test]
fn uniform_log_mgf_matches_quadrature() {
    let oracle = common::tanh_sinh(|x| (2.0 * x).exp() / (2.0 * SQRT3), -SQRT3, SQRT3).ln();
    let v = EntryLaw::uniform_sqrt3().log_mgf(2.0).unwrap();
    assert_abs_diff_eq!(v, oracle, epsilon = 1e-13);
    assert_abs_diff_eq!(v, 1.527520869715181, epsilon = 1e-14);
}

#[test]
fn log_mgf_rejects_huge_arguments() {
    assert!(EntryLaw::rademacher().log_mgf(1e4).is_err());
    let t = EntryLaw::discrete(vec![(-2.0, 0.5), (2.0, 0.5)]).unwrap();
    assert!(t.log_mgf(351.0).is_err());
    assert!(t.log_mgf(349.0).is_ok());
}

#[test]
fn builtin_laws_are_sharp_subgaussian() {
    for law in [EntryLaw::rademacher(), EntryLaw::uniform_sqrt3()] {
        let r = check_sharp_subgaussian(&law, 10.0, 1001).unwrap();
        assert!(r.passed && r.max_gap <= 1e-12, "{r:?}");
    }
    for law in builtins() {
        let r = check_sharp_subgaussian(&law, 20.0, 4001).unwrap();
        assert!(r.passed, "{law:?}: {r:?}");
        let rc = check_sharp_subgaussian(&law.clone().with_field(Field::Complex), 20.0, 401).unwrap();
        assert!(rc.passed, "complex {law:?}: {rc:?}");
    }
}

#[test]
fn scaled_two_point_table_is_rademacher() {
    let t = EntryLaw::discrete(vec![(-2.0, 0.5), (2.0, 0.5)]).unwrap();
    assert_abs_diff_eq!(t.variance, 4.0, epsilon = 1e-15);
    let s = t.with_variance(1.0);
    for &x in &[0.3, 1.0, 5.0] {
        assert_abs_diff_eq!(s.log_mgf(x).unwrap(), x.cosh().ln(), epsilon = 1e-13);
    }
    assert!(check_sharp_subgaussian(&s, 10.0, 1001).unwrap().passed);
}

/// The table {(−√2,¼),(0,½),(√2,¼)} is the law of (r₁+r₂)/√2, whose Laplace
/// transform is cosh²(t/√2) ≤ e^{t²/2}. The grid certification reports that truth.
#[test]
fn ternary_table_is_in_fact_sharp() {
    let law = ternary_law();
    for &t in &[0.5, 2.0, 5.0] {
        let exact = 2.0 * (t / std::f64::consts::SQRT_2).cosh().ln();
        assert_abs_diff_eq!(law.log_mgf(t).unwrap(), exact, epsilon = 1e-13);
    }
    let r = check_sharp_subgaussian(&law, 5.0, 1001).unwrap();
    assert!(r.passed);
    assert_abs_diff_eq!(r.max_gap, 0.0, epsilon = 1e-15);
}

#[test]
fn sparse_law_is_not_sharp() {
    let law = sparse_rademacher(0.25).unwrap();
    let r = check_sharp_subgaussian(&law, 5.0, 1001).unwrap();
    assert!(!r.passed && r.max_gap > 0.01, "{r:?}");
}

#[test]
fn moment_criterion_examples() {
    assert!(moment_criterion(&[1.0, 1.0, 1.0, 1.0]).unwrap());
    assert!(moment_criterion(&[1.0, 3.0, 15.0, 105.0]).unwrap());
    assert!(!moment_criterion(&[1.0, 4.0]).unwrap());
    assert!(moment_criterion(&[]).is_err());
    assert!(moment_criterion(&EntryLaw::uniform_sqrt3().even_moments(6)).unwrap());
}

#[test]
fn rademacher_tilt_closed_form() {
    let r = EntryLaw::rademacher();
    for &t in &[-2.0, -0.3, 0.7, 3.0] {
        let tl = r.tilt(c(t)).unwrap();
        let p = tl.atom_probability(1.0).unwrap();
        assert_abs_diff_eq!(p, t.exp() / (2.0 * t.cosh()), epsilon = 1e-15);
        assert_abs_diff_eq!(tl.tilted_mean().re, t.tanh(), epsilon = 1e-15);
        // Brute-force normalization of the exponential family.
        let z = 0.5 * (t.exp() + (-t).exp());
        assert_abs_diff_eq!(tl.log_likelihood_ratio(c(1.0)), (z / t.exp()).ln(), epsilon = 1e-14);
    }
}

#[test]
fn zero_tilt_is_identity() {
    for law in builtins() {
        let tl = law.tilt(c(0.0)).unwrap();
        assert_eq!(tl.tilted_mean(), c(0.0));
        assert_eq!(tl.log_likelihood_ratio(c(0.37)), 0.0);
    }
}

#[test]
fn uniform_tilted_mean() {
    let u = EntryLaw::uniform_sqrt3();
    let m = u.tilted_mean(c(1.0)).re;
    assert_abs_diff_eq!(m, SQRT3 / SQRT3.tanh() - 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(m, 0.8439846999578731, epsilon = 1e-15);
    let h = 1e-5;
    let fd = (u.log_mgf(1.0 + h).unwrap() - u.log_mgf(1.0 - h).unwrap()) / (2.0 * h);
    assert_abs_diff_eq!(m, fd, epsilon = 1e-9);
}

#[test]
fn derivatives_at_zero() {
    let laws = [
        EntryLaw::rademacher(),
        EntryLaw::uniform_sqrt3(),
        EntryLaw::gaussian(),
        ternary_law(),
        EntryLaw::rademacher().diagonal(1),
    ];
    for law in laws {
        assert_eq!(law.log_mgf(0.0).unwrap(), 0.0);
        let d1 = |h: f64| (law.log_mgf(h).unwrap() - law.log_mgf(-h).unwrap()) / (2.0 * h);
        let d2 = |h: f64| (law.log_mgf(h).unwrap() - 2.0 * law.log_mgf(0.0).unwrap() + law.log_mgf(-h).unwrap()) / (h * h);
        assert!(d1(1e-4).abs() < 1e-12 && d1(1e-5).abs() < 1e-12);
        let rich = (4.0 * d2(1e-4) - d2(2e-4)) / 3.0;
        assert!((rich - law.variance).abs() < 1e-6, "{law:?}: {rich}");
        assert!((d2(1e-4) - d2(1e-5)).abs() < 1e-6 * law.variance.max(1.0) + 1e-5);
    }
}

#[test]
fn lower_bound_near_zero() {
    for law in [EntryLaw::rademacher(), EntryLaw::uniform_sqrt3(), EntryLaw::gaussian(), ternary_law()] {
        for k in 1..=100 {
            let t = 0.001 * k as f64;
            let v = law.log_mgf(t).unwrap();
            assert!(v >= 0.95 * t * t * law.variance / 2.0, "{law:?} at {t}");
        }
    }
}

#[test]
fn tilted_sampling_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (law, t) in [(EntryLaw::rademacher(), 0.8), (EntryLaw::uniform_sqrt3(), 1.0), (ternary_law(), -1.5)] {
        let tl = law.tilt(c(t)).unwrap();
        let xs: Vec<f64> = (0..1_000_000).map(|_| tl.sample(&mut rng).re).collect();
        let (m, se) = common::mean_se(&xs);
        let target = tl.tilted_mean().re;
        assert!((m - target).abs() < 4.0 * se, "{law:?}: {m} vs {target} (se {se})");
        let var_target = law.tilted_variance(t);
        let var: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((var - var_target).abs() < 0.01 * var_target);
    }
}

#[test]
fn likelihood_ratio_reweighting_is_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for law in [EntryLaw::rademacher(), EntryLaw::uniform_sqrt3(), EntryLaw::gaussian()] {
        let tl = law.tilt(c(0.9)).unwrap();
        let draws: Vec<(f64, f64)> = (0..400_000)
            .map(|_| {
                let a = tl.sample(&mut rng);
                (a.re, tl.log_likelihood_ratio(a).exp())
            })
            .collect();
        let first: Vec<f64> = draws.iter().map(|(a, w)| a * w).collect();
        let second: Vec<f64> = draws.iter().map(|(a, w)| a * a * w).collect();
        let (m1, s1) = common::mean_se(&first);
        let (m2, s2) = common::mean_se(&second);
        assert!(m1.abs() < 4.0 * s1, "{law:?}: E[a] = {m1} ± {s1}");
        assert!((m2 - 1.0).abs() < 4.0 * s2, "{law:?}: E[a²] = {m2} ± {s2}");
    }
}

#[test]
fn complex_law_splits_into_components() {
    let law = EntryLaw::rademacher().with_field(Field::Complex);
    let t = Complex64::new(0.8, -1.1);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let expected = (0.8 * half).cosh().ln() + (1.1 * half).cosh().ln();
    assert_abs_diff_eq!(law.log_mgf_complex(t).unwrap(), expected, epsilon = 1e-15);
    let m = law.tilted_mean(t);
    assert_abs_diff_eq!(m.re, half * (0.8 * half).tanh(), epsilon = 1e-15);
    assert_abs_diff_eq!(m.im, -half * (1.1 * half).tanh(), epsilon = 1e-15);
}

#[test]
fn json_shape() {
    let v = serde_json::to_value(EntryLaw::discrete(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()).unwrap();
    assert_eq!(v["kind"], "discrete_table");
    assert_eq!(v["params"]["atoms"][0], serde_json::json!([-1.0, 0.5]));
    assert_eq!(v["variance"], 1.0);
    assert_eq!(v["field"], "real");
    let back: EntryLaw = serde_json::from_value(v).unwrap();
    assert_eq!(back.log_mgf(0.4).unwrap(), EntryLaw::rademacher().log_mgf(0.4).unwrap());
}

#[test]
fn invalid_tables_rejected() {
    assert!(EntryLaw::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).is_err());
    assert!(EntryLaw::discrete(vec![(-1.0, 0.6), (1.0, 0.6)]).is_err());
    assert!(EntryLaw::discrete(vec![(-1.0, -0.5), (1.0, 1.5)]).is_err());
}

proptest! {
    #[test]
    fn sharp_bound_holds_pointwise(t in -20.0f64..20.0) {
        for law in builtins() {
            let v = law.log_mgf(t).unwrap();
            prop_assert!(v <= t * t / 2.0 + 1e-12, "{:?} at {}: {}", law, t, v);
            prop_assert!(v >= 0.0);
        }
    }

    #[test]
    fn complex_bound_holds_pointwise(r in 0.0f64..20.0, phase in 0.0f64..std::f64::consts::TAU) {
        for law in builtins() {
            let law = law.with_field(Field::Complex);
            let t = Complex64::from_polar(r, phase);
            prop_assert!(law.log_mgf_complex(t).unwrap() <= r * r / 4.0 + 1e-12);
        }
    }

    #[test]
    fn tilted_mean_is_log_mgf_derivative(t in -8.0f64..8.0) {
        for law in [EntryLaw::rademacher(), EntryLaw::uniform_sqrt3(), ternary_law()] {
            let h = 1e-5;
            let fd = (law.log_mgf(t + h).unwrap() - law.log_mgf(t - h).unwrap()) / (2.0 * h);
            prop_assert!((law.tilted_mean(c(t)).re - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn log_mgf_is_even(t in 0.0f64..30.0) {
        for law in builtins() {
            prop_assert_eq!(law.log_mgf(t).unwrap(), law.log_mgf(-t).unwrap());
        }
    }
}
