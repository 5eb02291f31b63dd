use approx::assert_abs_diff_eq;
use ldp_eigen::ensemble::{
    block_from_rect, block_spectrum_from_rect, eigenvalues, esd, rect_from_block, sample_matrix, sample_rect,
    wishart_eigs_from_block, wishart_spectrum, Dims, EnsembleKind, EnsembleSpec, Hermitian, RectMatrix, Spectrum,
};
use ldp_eigen::entry_law::EntryLaw;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}

/// Kolmogorov–Smirnov distance of sorted atoms to a continuous CDF.
fn ks(atoms: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = atoms.len() as f64;
    atoms
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn small_wigner_layout() {
    let spec = EnsembleSpec::wigner(EnsembleKind::Wigner1, 2, EntryLaw::rademacher()).unwrap();
    for seed in 0..20 {
        let x = sample_matrix(&spec, &mut rng(seed));
        let off = x.get(0, 1).re;
        assert_abs_diff_eq!(off.abs(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(x.get(0, 1), x.get(1, 0));
        // Diagonal of Wigner1 is √2 × Rademacher, divided by √N = √2.
        assert_abs_diff_eq!(x.get(0, 0).re.abs(), 1.0, epsilon = 1e-15);
    }
}

#[test]
fn complex_wigner_is_hermitian_with_real_diagonal() {
    let spec = EnsembleSpec::wigner(EnsembleKind::Wigner2, 30, EntryLaw::gaussian()).unwrap();
    let x = sample_matrix(&spec, &mut rng(4));
    assert!(matches!(x, Hermitian::Complex(_)));
    assert!(x.asymmetry() < 1e-15);
    for i in 0..30 {
        assert_eq!(x.get(i, i).im, 0.0);
    }
}

#[test]
fn block_layout() {
    let spec = EnsembleSpec::block(EnsembleKind::WishartBlock1, 1, 2, EntryLaw::rademacher()).unwrap();
    assert_eq!(spec.dims, Dims::Rect { l: 1, m: 2 });
    let x = sample_matrix(&spec, &mut rng(0));
    assert_eq!(x.n(), 3);
    assert_eq!(x.get(0, 0), Complex64::new(0.0, 0.0));
    for i in 1..3 {
        for j in 1..3 {
            assert_eq!(x.get(i, j), Complex64::new(0.0, 0.0));
        }
        assert_abs_diff_eq!(x.get(0, i).re.abs(), 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    }
}

#[test]
fn sampling_order_matches_rect_sampling() {
    for kind in [EnsembleKind::WishartBlock1, EnsembleKind::WishartBlock2] {
        let spec = EnsembleSpec::block(kind, 3, 5, EntryLaw::uniform_sqrt3()).unwrap();
        let x = sample_matrix(&spec, &mut rng(9));
        let g = sample_rect(&spec, &mut rng(9)).unwrap();
        let y = block_from_rect(&g);
        for i in 0..8 {
            for j in 0..8 {
                assert!((x.get(i, j) - y.get(i, j)).norm() < 1e-15);
            }
        }
        let back = block_from_rect(&rect_from_block(&x, 3));
        for i in 0..8 {
            for j in 0..8 {
                assert!((x.get(i, j) - back.get(i, j)).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn invalid_specs_rejected() {
    assert!(EnsembleSpec::wigner(EnsembleKind::Wigner1, 1, EntryLaw::rademacher()).is_err());
    assert!(EnsembleSpec::block(EnsembleKind::WishartBlock1, 3, 2, EntryLaw::rademacher()).is_err());
    assert!(EnsembleSpec::block(EnsembleKind::WishartBlock1, 0, 2, EntryLaw::rademacher()).is_err());
    assert!(EnsembleSpec::wigner(EnsembleKind::WishartBlock1, 4, EntryLaw::rademacher()).is_err());
    let wide = EntryLaw::discrete(vec![(-2.0, 0.5), (2.0, 0.5)]).unwrap();
    assert!(EnsembleSpec::wigner(EnsembleKind::Wigner1, 4, wide).is_err());
}

#[test]
fn eigenvalue_examples() {
    let swap = Hermitian::Real(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    assert_eq!(eigenvalues(&swap).unwrap().eigenvalues, vec![-1.0, 1.0]);
    let d = Hermitian::Real(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0])));
    let s = eigenvalues(&d).unwrap();
    assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
    assert_eq!((s.lambda_min(), s.lambda_max()), (1.0, 3.0));
    assert_eq!(esd(&s).atoms, vec![1.0, 2.0, 3.0]);

    // Rank-one spike θ e eᵀ with a unit vector e.
    let n = 6;
    let theta = 2.5;
    let e: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    let spike = DMatrix::from_fn(n, n, |i, j| theta * e[i] * e[j] / (norm * norm));
    let s = eigenvalues(&Hermitian::Real(spike)).unwrap();
    assert_abs_diff_eq!(s.lambda_max(), theta, epsilon = 1e-13);
    for &v in &s.eigenvalues[..n - 1] {
        assert!(v.abs() < 1e-13);
    }

    let skew = Hermitian::Real(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]));
    assert!(eigenvalues(&skew).is_err());
}

#[test]
fn wigner_eigenvalue_mean_concentrates() {
    let spec = EnsembleSpec::wigner(EnsembleKind::Wigner1, 500, EntryLaw::rademacher()).unwrap();
    let s = eigenvalues(&sample_matrix(&spec, &mut rng(2))).unwrap();
    let mean = s.eigenvalues.iter().sum::<f64>() / 500.0;
    assert!(mean.abs() < 0.01, "{mean}");
}

#[test]
fn wishart_mapping_examples() {
    // L = M = N/2: W λ_max = 2·λ_max(block)².
    let block = Spectrum::new(vec![-1.5, -0.5, 0.5, 1.5]);
    let w = wishart_eigs_from_block(&block, 2, 2).unwrap();
    assert_abs_diff_eq!(w.lambda_max(), 4.5, epsilon = 1e-15);

    let zero = RectMatrix::Real(DMatrix::zeros(2, 3));
    let bs = block_spectrum_from_rect(&zero).unwrap();
    let w = wishart_eigs_from_block(&bs, 2, 3).unwrap();
    assert!(w.eigenvalues.iter().all(|&v| v == 0.0));

    for (kind, seed) in [(EnsembleKind::WishartBlock1, 1), (EnsembleKind::WishartBlock2, 2)] {
        let spec = EnsembleSpec::block(kind, 2, 3, EntryLaw::gaussian()).unwrap();
        let g = sample_rect(&spec, &mut rng(seed)).unwrap();
        let direct = wishart_spectrum(&g).unwrap();
        let via_block = eigenvalues(&block_from_rect(&g)).unwrap();
        let mapped = wishart_eigs_from_block(&via_block, 2, 3).unwrap();
        for (a, b) in direct.eigenvalues.iter().zip(&mapped.eigenvalues) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
    assert!(wishart_eigs_from_block(&Spectrum::new(vec![0.0, 1.0, 2.0]), 1, 2).is_err());
}

#[test]
fn block_spectrum_is_chiral() {
    for (kind, l, m) in [(EnsembleKind::WishartBlock1, 7, 12), (EnsembleKind::WishartBlock2, 5, 5)] {
        let spec = EnsembleSpec::block(kind, l, m, EntryLaw::rademacher()).unwrap();
        let s = eigenvalues(&sample_matrix(&spec, &mut rng(3))).unwrap();
        let n = s.n();
        for k in 0..n {
            assert!((s.eigenvalues[k] + s.eigenvalues[n - 1 - k]).abs() < 1e-10);
        }
        let g = sample_rect(&spec, &mut rng(3)).unwrap();
        let fast = block_spectrum_from_rect(&g).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(&fast.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn wigner_esd_and_edge_at_n1000() {
    let spec = EnsembleSpec::wigner(EnsembleKind::Wigner1, 1000, EntryLaw::rademacher()).unwrap();
    for seed in 0..10 {
        let s = eigenvalues(&sample_matrix(&spec, &mut rng(100 + seed))).unwrap();
        let d = ks(&s.eigenvalues, semicircle_cdf);
        assert!(d < 0.05, "seed {seed}: KS {d}");
        assert!((1.9..=2.2).contains(&s.lambda_max()), "seed {seed}: λ_max {}", s.lambda_max());
    }
}

#[test]
fn wishart_edge_at_alpha_4() {
    let spec = EnsembleSpec::block(EnsembleKind::WishartBlock1, 500, 2000, EntryLaw::rademacher()).unwrap();
    let g = sample_rect(&spec, &mut rng(8)).unwrap();
    let top = wishart_spectrum(&g).unwrap().lambda_max();
    assert!((8.5..=9.5).contains(&top), "{top}");
}

#[test]
fn same_seed_same_matrix() {
    let spec = EnsembleSpec::wigner(EnsembleKind::Wigner2, 12, EntryLaw::uniform_sqrt3()).unwrap();
    let a = sample_matrix(&spec, &mut rng(77));
    let b = sample_matrix(&spec, &mut rng(77));
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_is_sum_of_eigenvalues(seed in 0u64..1000, n in 2usize..30) {
        let spec = EnsembleSpec::wigner(EnsembleKind::Wigner1, n, EntryLaw::rademacher()).unwrap();
        let x = sample_matrix(&spec, &mut rng(seed));
        let trace: f64 = (0..n).map(|i| x.get(i, i).re).sum();
        let s = eigenvalues(&x).unwrap();
        prop_assert!((s.eigenvalues.iter().sum::<f64>() - trace).abs() < 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn wishart_mapping_agrees_with_direct(seed in 0u64..1000, l in 1usize..6, extra in 0usize..6) {
        let m = l + extra;
        let spec = EnsembleSpec::block(EnsembleKind::WishartBlock2, l, m, EntryLaw::rademacher()).unwrap();
        let g = sample_rect(&spec, &mut rng(seed)).unwrap();
        let direct = wishart_spectrum(&g).unwrap();
        let mapped = wishart_eigs_from_block(&eigenvalues(&block_from_rect(&g)).unwrap(), l, m).unwrap();
        for (a, b) in direct.eigenvalues.iter().zip(&mapped.eigenvalues) {
            prop_assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
        }
    }
}
