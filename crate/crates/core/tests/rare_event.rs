mod common;

use approx::assert_abs_diff_eq;
use ldp_eigen::ensemble::{eigenvalues, EnsembleKind, EnsembleSpec, Hermitian};
use ldp_eigen::entry_law::{EntryLaw, Field};
use ldp_eigen::rare_event::{
    estimate_tail, naive_tail_mc, rho_theta_wigner, sample_tilted, spike_location_wishart, theta_x_wigner,
    theta_x_wishart, tilted_mean_matrix, TailConfig, TiltPlan, WeightScheme,
};
use ldp_eigen::rate::{rate_variational, VariationalTarget};
use ldp_eigen::spectral_law::{block_edge, SpectralLaw};
use ldp_eigen::spherical::{deloc_check, sample_sphere, SphereVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn wigner(n: usize) -> EnsembleSpec {
    EnsembleSpec::wigner(EnsembleKind::Wigner1, n, EntryLaw::rademacher()).unwrap()
}

fn flat_direction(n: usize) -> SphereVector {
    let v: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    SphereVector::from_real(&v).unwrap()
}

#[test]
fn wigner_spike_examples() {
    assert_abs_diff_eq!(rho_theta_wigner(1.0, 1).unwrap().location, 2.5, epsilon = 1e-15);
    let edge = rho_theta_wigner(0.5, 1).unwrap();
    assert_eq!(edge.location, 2.0);
    assert!(!edge.supercritical);
    assert_eq!(rho_theta_wigner(1.0, 2).unwrap().location, 2.0);
    assert_abs_diff_eq!(rho_theta_wigner(2.0, 2).unwrap().location, 2.5, epsilon = 1e-15);
    assert!(rho_theta_wigner(0.0, 1).is_err());

    assert_abs_diff_eq!(theta_x_wigner(2.5, 1).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(theta_x_wigner(2.0 + 1e-14, 2).unwrap(), 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(theta_x_wigner(3.0, 2).unwrap(), (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-15);
    assert!(theta_x_wigner(1.9, 1).is_err());
}

#[test]
fn wigner_round_trip_on_grid() {
    for beta in [1u8, 2] {
        for k in 1..=400 {
            let x = 2.0 + 0.02 * k as f64;
            let back = rho_theta_wigner(theta_x_wigner(x, beta).unwrap(), beta).unwrap().location;
            assert!((back - x).abs() < 1e-12, "β={beta} x={x}: {back}");
        }
    }
}

#[test]
fn wishart_round_trip_and_edge_limit() {
    for (i, alpha) in [(1u8, 1.0), (2, 1.0), (1, 4.0), (2, 2.5)] {
        let edge = block_edge(alpha);
        for k in 1..=10 {
            let x = edge + 0.1 * k as f64;
            let theta = theta_x_wishart(x, i, alpha).unwrap();
            let back = spike_location_wishart(theta, i, alpha).unwrap();
            assert!(back.supercritical);
            assert!((back.location - x).abs() < 1e-8, "i={i} α={alpha} x={x}: {}", back.location);
        }
        let h = SpectralLaw::block(alpha).unwrap().h_max(edge).unwrap();
        let near = theta_x_wishart(edge + 1e-10, i, alpha).unwrap();
        assert!((near - 0.5 * i as f64 * h).abs() < 1e-3, "edge limit {near} vs {}", 0.5 * i as f64 * h);
        assert!(theta_x_wishart(edge - 0.01, i, alpha).is_err());
    }
}

#[test]
fn wishart_spike_increases_with_theta() {
    let mut prev = 0.0;
    for k in 1..100 {
        let z = spike_location_wishart(0.1 * k as f64, 1, 3.0).unwrap().location;
        assert!(z >= prev);
        prev = z;
    }
    let low = spike_location_wishart(0.05, 1, 3.0).unwrap();
    assert!(!low.supercritical);
    assert_eq!(low.location, block_edge(3.0));
}

#[test]
fn square_spike_matches_quadrature_root() {
    // α = 1, i = 1: x* = 1/2, so 4z²·G_MP(1)(2z²)² = 1/θ².
    let lhs = |z: f64| {
        let u = 2.0 * z * z;
        let g = common::mp_integral(1.0, |t| 1.0 / (u - t));
        4.0 * z * z * g * g
    };
    for theta in [1.2, 2.0, 3.5] {
        let rhs = 1.0 / (theta * theta);
        let (mut lo, mut hi) = (2f64.sqrt() + 1e-9, 50.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if lhs(mid) > rhs {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = spike_location_wishart(theta, 1, 1.0).unwrap().location;
        assert!((z - 0.5 * (lo + hi)).abs() < 1e-7, "θ={theta}: {z} vs {}", 0.5 * (lo + hi));
    }
}

#[test]
fn wishart_theta_matches_variational_optimizer() {
    let theta = theta_x_wishart(2.0, 1, 1.0).unwrap();
    assert!(theta > 0.0 && theta.is_finite());
    let r = rate_variational(2.0, VariationalTarget::Block { i: 1, alpha: 1.0 }).unwrap();
    assert!((theta - r.theta_star).abs() < 1e-4, "{theta} vs {}", r.theta_star);
}

#[test]
fn tilted_mean_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in [EnsembleKind::Wigner1, EnsembleKind::Wigner2] {
        let spec = EnsembleSpec::wigner(kind, 30, EntryLaw::gaussian()).unwrap();
        let e = sample_sphere(30, kind.field(), &mut rng);
        let m = tilted_mean_matrix(&TiltPlan::new(&spec, e.clone(), 0.9, 0.1).unwrap(), &spec.law).unwrap();
        assert!(m.delta_norm < 1e-14, "{kind:?}: {}", m.delta_norm);
        let beta = kind.beta() as f64;
        assert!((m.mean.get(2, 7) - 2.0 * 0.9 / beta * e.components[2] * e.components[7].conj()).norm() < 1e-15);

        let zero = tilted_mean_matrix(&TiltPlan::new(&spec, e, 0.0, 0.1).unwrap(), &spec.law).unwrap();
        assert_eq!(zero.mean.norm().unwrap(), 0.0);
    }
    // Uniform-magnitude directions: Σe⁴ = 1/N, so the bound is C/√N, and C
    // (the cubic bound over the tilt arguments used) does not grow with N.
    let mut scaled = Vec::new();
    for n in [100, 400] {
        let spec = wigner(n);
        let plan = TiltPlan::new(&spec, flat_direction(n), 1.0, 0.1).unwrap();
        let m = tilted_mean_matrix(&plan, &spec.law).unwrap();
        assert!(m.delta_norm > 0.0 && m.delta_norm <= m.delta_bound, "{} > {}", m.delta_norm, m.delta_bound);
        scaled.push(m.delta_bound * (n as f64).sqrt());
    }
    assert!(scaled[1] <= scaled[0], "{scaled:?}");
}

#[test]
fn zero_tilt_sampling_is_plain() {
    let spec = wigner(10);
    let plan = TiltPlan::new(&spec, flat_direction(10), 0.0, 0.1).unwrap();
    let (x, llr) = sample_tilted(&spec, &plan, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let plain = ldp_eigen::ensemble::sample_matrix(&spec, &mut ChaCha8Rng::seed_from_u64(3));
    assert_eq!(llr, 0.0);
    assert_eq!(x, plain);
}

#[test]
fn reweighted_entries_have_untilted_moments() {
    let n = 6;
    let spec = wigner(n);
    let plan = TiltPlan::new(&spec, SphereVector::from_real(&[0.5, 0.5, 0.5, 0.3, 0.3, 0.2]).unwrap(), 0.6, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws: Vec<(f64, f64)> = (0..200_000)
        .map(|_| {
            let (x, llr) = sample_tilted(&spec, &plan, &mut rng).unwrap();
            (x.get(0, 1).re * (n as f64).sqrt(), llr.exp())
        })
        .collect();
    let weighted: Vec<f64> = draws.iter().map(|(a, w)| a * w).collect();
    let weights: Vec<f64> = draws.iter().map(|(_, w)| *w).collect();
    let (m, se) = common::mean_se(&weighted);
    assert!(m.abs() < 4.0 * se, "{m} ± {se}");
    let (w, wse) = common::mean_se(&weights);
    assert!((w - 1.0).abs() < 4.0 * wse, "{w} ± {wse}");
    // The tilt itself moves the entry.
    let raw: Vec<f64> = draws.iter().map(|(a, _)| *a).collect();
    assert!(common::mean_se(&raw).0 > 0.1);
}

#[test]
fn bbp_spike_at_n600() {
    let spec = wigner(600);
    let mut tops = Vec::new();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let e = sample_sphere(600, Field::Real, &mut rng);
        let plan = TiltPlan::new(&spec, e, 1.0, 0.1).unwrap();
        let (x, _) = sample_tilted(&spec, &plan, &mut rng).unwrap();
        tops.push(eigenvalues(&x).unwrap().lambda_max());
    }
    let mean = tops.iter().sum::<f64>() / tops.len() as f64;
    assert!((mean - 2.5).abs() < 0.1, "mean λ_max = {mean}");
    // Every replica separates from the bulk edge.
    assert!(tops.iter().all(|&t| t > 2.2), "{tops:?}");
}

#[test]
fn tilted_bulk_still_semicircle() {
    let spec = wigner(600);
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let e = sample_sphere(600, Field::Real, &mut rng);
    let plan = TiltPlan::new(&spec, e, 1.0, 0.1).unwrap();
    let (x, _) = sample_tilted(&spec, &plan, &mut rng).unwrap();
    let s = eigenvalues(&x).unwrap();
    let cdf = |x: f64| {
        let x = x.clamp(-2.0, 2.0);
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    };
    let n = s.n() as f64;
    let ks = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &v)| (cdf(v) - k as f64 / n).abs().max(((k + 1) as f64 / n - cdf(v)).abs()))
        .fold(0.0, f64::max);
    assert!(ks < 0.07, "{ks}");
}

#[test]
fn tilted_entry_variance_near_one_for_delocalized_directions() {
    let law = EntryLaw::rademacher();
    let (theta, eps) = (1.0, 0.1);
    let mut prev = f64::INFINITY;
    for n in [100usize, 400, 1600] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let e = loop {
            let e = sample_sphere(n, Field::Real, &mut rng);
            if deloc_check(&e, eps) {
                break e;
            }
        };
        let spec = wigner(n);
        let plan = TiltPlan::new(&spec, e, theta, eps).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..j {
                worst = worst.max((law.tilted_variance(plan.tilt_arg(i, j).re) - 1.0).abs());
            }
        }
        let bound = (2.0 * theta * (n as f64).powf(-2.0 * eps)).powi(2);
        assert!(worst <= bound, "N={n}: {worst} > {bound}");
        assert!(worst < prev);
        prev = worst;
    }
}

#[test]
fn hit_rate_at_n400() {
    let mut cfg = TailConfig::new(2.5, 0.1, 200, 5);
    cfg.scheme = WeightScheme::PerDirection;
    let est = estimate_tail(&wigner(400), &cfg).unwrap();
    assert!(est.hit_rate > 0.5, "{}", est.hit_rate);
}

#[test]
fn importance_sampling_matches_naive_mc_at_n60() {
    let spec = wigner(60);
    let naive = naive_tail_mc(&spec, 2.15, 0.1, 40_000, 11).unwrap();
    let est = estimate_tail(&spec, &TailConfig::new(2.15, 0.1, 2000, 12)).unwrap();
    let nf = 60.0;
    let p_is = (nf * est.log_prob_per_n).exp();
    let se_is = p_is * nf * est.std_err;
    let joint = (se_is * se_is + naive.std_err * naive.std_err).sqrt();
    assert!((p_is - naive.prob).abs() < 2.0 * joint, "IS {p_is} ± {se_is}, naive {} ± {}", naive.prob, naive.std_err);
}

#[test]
fn wide_window_has_probability_one() {
    let est = estimate_tail(&wigner(40), &TailConfig::new(2.5, 100.0, 400, 2)).unwrap();
    assert_eq!(est.hit_rate, 1.0);
    assert!(est.log_prob_per_n.abs() < 3.0 * est.std_err + 1e-3, "{} ± {}", est.log_prob_per_n, est.std_err);
    assert!(!est.degenerate);
}

#[test]
fn tail_rejects_bad_input() {
    assert!(estimate_tail(&wigner(20), &TailConfig::new(2.5, 0.0, 10, 1)).is_err());
    assert!(estimate_tail(&wigner(20), &TailConfig::new(1.5, 0.1, 10, 1)).is_err());
    assert!(estimate_tail(&wigner(20), &TailConfig::new(2.5, 0.1, 1, 1)).is_err());
}

#[test]
fn tail_estimate_json_fields() {
    let est = estimate_tail(&wigner(20), &TailConfig::new(2.5, 0.2, 20, 1)).unwrap();
    let v = serde_json::to_value(&est).unwrap();
    for key in ["x", "delta", "log_prob_per_n", "std_err", "hit_rate", "n_samples", "N", "reference"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((0.0..=1.0).contains(&est.hit_rate) && est.std_err >= 0.0);
}

#[test]
fn plan_rejects_mismatched_direction() {
    let spec = wigner(10);
    assert!(TiltPlan::new(&spec, flat_direction(9), 1.0, 0.1).is_err());
    let c = SphereVector::new(vec![num_complex::Complex64::new(1.0, 0.0); 10], Field::Complex).unwrap();
    assert!(TiltPlan::new(&spec, c, 1.0, 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn llr_is_minus_quadratic_form_plus_normalizer(seed in 0u64..10_000, theta in 0.0f64..2.0, n in 2usize..12, complex in any::<bool>()) {
        let kind = if complex { EnsembleKind::Wigner2 } else { EnsembleKind::Wigner1 };
        let spec = EnsembleSpec::wigner(kind, n, EntryLaw::uniform_sqrt3()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = sample_sphere(n, kind.field(), &mut rng);
        let plan = TiltPlan::new(&spec, e.clone(), theta, 0.1).unwrap();
        let (x, llr) = sample_tilted(&spec, &plan, &mut rng).unwrap();
        let expected = -theta * n as f64 * x.quadratic_form(&e.components) + n as f64 * plan.log_normalizer(&spec.law);
        prop_assert!((llr - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        prop_assert!(matches!((complex, &x), (true, Hermitian::Complex(_)) | (false, Hermitian::Real(_))));
    }

    #[test]
    fn tilt_arguments_are_self_adjoint(seed in 0u64..10_000, n in 2usize..10) {
        let spec = EnsembleSpec::block(EnsembleKind::WishartBlock2, 1 + n / 3, n - n / 3, EntryLaw::rademacher()).unwrap();
        let e = sample_sphere(spec.n(), Field::Complex, &mut ChaCha8Rng::seed_from_u64(seed));
        let plan = TiltPlan::new(&spec, e, 1.5, 0.1).unwrap();
        let l = 1 + n / 3;
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                prop_assert!((plan.tilt_arg(i, j) - plan.tilt_arg(j, i).conj()).norm() < 1e-14);
                if (i < l) == (j < l) {
                    prop_assert_eq!(plan.tilt_arg(i, j).norm(), 0.0);
                }
            }
        }
    }
}
