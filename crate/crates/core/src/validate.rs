//! Numerical self-checks grouped into suites, shared by the `validate`
//! subcommand and the test suite. Each check records what was measured and
//! the threshold it was held to.

use crate::diagnostics::{distances, resolvent_cross_block, top_vector_deloc};
use crate::ensemble::{eigenvalues, esd, sample_matrix, sample_rect, wishart_spectrum, EnsembleKind, EnsembleSpec};
use crate::entry_law::EntryLaw;
use crate::error::Result;
use crate::estimate::replica_rng;
use crate::free_energy::f_wishart;
use crate::rate::{rate_block, rate_variational, rate_wigner, VariationalTarget};
use crate::spectral_law::{block_edge, mp_edges, SpectralLaw};
use crate::spike::{spike_location_wishart, theta_x_wishart};
use serde::Serialize;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Bulk,
    Wishart,
    Transforms,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bulk" => Ok(Suite::Bulk),
            "wishart" => Ok(Suite::Wishart),
            "transforms" => Ok(Suite::Transforms),
            _ => Err(format!("unknown suite '{s}' (expected bulk, wishart, transforms)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst value observed over the grid or the seeds.
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check { name: name.into(), measured, threshold, passed: measured < threshold }
    }

    fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check { name: name.into(), measured, threshold, passed: measured <= threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seeds: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn run_suite(suite: Suite, seeds: usize, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Bulk => bulk(seeds, seed)?,
        Suite::Wishart => wishart(seeds, seed)?,
        Suite::Transforms => transforms()?,
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite, seeds, seed, checks, passed })
}

fn worst<F: FnMut(u64) -> Result<f64>>(seeds: usize, mut f: F) -> Result<f64> {
    let mut w: f64 = 0.0;
    for s in 0..seeds as u64 {
        w = w.max(f(s)?);
    }
    Ok(w)
}

fn bulk(seeds: usize, seed: u64) -> Result<Vec<Check>> {
    let wigner = EnsembleSpec::wigner(EnsembleKind::Wigner1, 1000, EntryLaw::rademacher())?;
    let mut ks: f64 = 0.0;
    let mut deloc: f64 = 0.0;
    for s in 0..seeds as u64 {
        let mut rng = replica_rng(seed, s);
        let x = sample_matrix(&wigner, &mut rng);
        ks = ks.max(distances(&esd(&eigenvalues(&x)?), &SpectralLaw::Semicircle, 20)?.ks);
        deloc = deloc.max(top_vector_deloc(&x)?);
    }
    let block = EnsembleSpec::block(EnsembleKind::WishartBlock1, 300, 300, EntryLaw::rademacher())?;
    let resolvent = worst(seeds, |s| {
        let mut rng = replica_rng(seed ^ 0x5eed, s);
        let g = sample_rect(&block, &mut rng)?;
        resolvent_cross_block(&g, 3.0, &mut rng)
    })?;
    Ok(vec![
        Check::below("wigner1 N=1000 rademacher: KS to semicircle", ks, 0.05),
        Check::below("wigner1 N=1000 rademacher: max |v_i| of top eigenvector", deloc, 0.2),
        Check::below("block L=M=300 rademacher: |<e2, R21(3) e1>|", resolvent, 0.1),
    ])
}

fn wishart(seeds: usize, seed: u64) -> Result<Vec<Check>> {
    let (a, b) = mp_edges(4.0);
    let spec = EnsembleSpec::block(EnsembleKind::WishartBlock1, 500, 2000, EntryLaw::rademacher())?;
    let law = SpectralLaw::MarchenkoPastur { alpha: 4.0 };
    let ks = worst(seeds, |s| {
        let mut rng = replica_rng(seed, s);
        let w = wishart_spectrum(&sample_rect(&spec, &mut rng)?)?;
        Ok(distances(&esd(&w), &law, 20)?.ks)
    })?;
    let mut edge_rate: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for &alpha in &[1.0, 2.0, 4.0] {
        for &i in &[1u8, 2] {
            let e = block_edge(alpha);
            edge_rate = edge_rate.max(rate_block(e, i, alpha)?.value.as_f64().abs());
            for k in 1..=5 {
                let x = e + 0.1 * k as f64;
                let z = spike_location_wishart(theta_x_wishart(x, i, alpha)?, i, alpha)?.location;
                round_trip = round_trip.max((z - x).abs());
            }
        }
    }
    let mut fe: f64 = 0.0;
    for k in 1..=20 {
        let theta = 0.15 * k as f64;
        fe = fe.max((f_wishart(theta, 1, 1.0)?.value - theta * theta / 2.0).abs());
    }
    Ok(vec![
        Check::at_most("MP(4) left edge a_4 = 1 (|error|)", (a - 1.0).abs(), 0.0),
        Check::at_most("MP(4) right edge b_4 = 9 (|error|)", (b - 9.0).abs(), 0.0),
        Check::below("W, L=500 M=2000 rademacher: KS to MP(4)", ks, 0.05),
        Check::at_most("rate_block at the block edge", edge_rate, 1e-12),
        Check::at_most("spike_location(theta_x(x)) − x", round_trip, 1e-8),
        Check::at_most("F(θ,w_1) at α=1 vs θ²/2", fe, 1e-10),
    ])
}

fn transforms() -> Result<Vec<Check>> {
    let laws = [
        SpectralLaw::Semicircle,
        SpectralLaw::MarchenkoPastur { alpha: 1.0 },
        SpectralLaw::MarchenkoPastur { alpha: 4.0 },
        SpectralLaw::BlockLaw { alpha: 1.0 },
        SpectralLaw::BlockLaw { alpha: 3.0 },
    ];
    let mut stieltjes: f64 = 0.0;
    let mut k_of_g: f64 = 0.0;
    for law in &laws {
        let edge = law.right_edge();
        for k in 1..=20 {
            let z = edge + 0.05 * k as f64 * k as f64;
            let g = law.stieltjes(z)?;
            let q = law.integrate(|t| 1.0 / (z - t))?;
            stieltjes = stieltjes.max((g - q).abs());
            k_of_g = k_of_g.max((law.k_inverse(g)? - z).abs() / z);
        }
    }
    let mut r_sigma: f64 = 0.0;
    for k in 1..100 {
        let u = k as f64 / 100.0;
        r_sigma = r_sigma.max((SpectralLaw::Semicircle.r_transform(u)? - u).abs());
    }

    // Free-energy envelope: ∂_θ F(θ, w_i) = (4θ/i) x*(1 − x*).
    let mut fe_env: f64 = 0.0;
    for &(alpha, i) in &[(1.0, 1u8), (2.5, 1), (4.0, 2)] {
        for k in 1..=8 {
            let theta = 0.25 * k as f64;
            let h = 1e-5;
            let fd = (f_wishart(theta + h, i, alpha)?.value - f_wishart(theta - h, i, alpha)?.value) / (2.0 * h);
            let d = f_wishart(theta, i, alpha)?.d_theta();
            fe_env = fe_env.max((fd - d).abs() / d.abs().max(1.0));
        }
    }
    // Wigner rate: ∂_x I_β = (β/2)√(x² − 4).
    let mut wig_env: f64 = 0.0;
    for &beta in &[1u8, 2] {
        for k in 0..=39 {
            let x = 2.1 + 0.1 * k as f64;
            let h = 1e-5;
            let fd = (rate_wigner(x + h, beta)?.value.as_f64() - rate_wigner(x - h, beta)?.value.as_f64()) / (2.0 * h);
            let exact = 0.5 * beta as f64 * (x * x - 4.0).sqrt();
            wig_env = wig_env.max((fd - exact).abs() / exact);
        }
    }
    // Block rate: ∂_x I = θ* − (β/2) G_{σ_w}(x).
    let mut block_env: f64 = 0.0;
    for &(alpha, i) in &[(1.0, 1u8), (3.0, 2)] {
        let law = SpectralLaw::BlockLaw { alpha };
        for k in 1..=4 {
            let x = block_edge(alpha) + 0.25 * k as f64;
            let h = 1e-4;
            let target = VariationalTarget::Block { i, alpha };
            let fd = (rate_variational(x + h, target)?.value.as_f64() - rate_variational(x - h, target)?.value.as_f64())
                / (2.0 * h);
            let r = rate_variational(x, target)?;
            let env = r.theta_star - 0.5 * i as f64 * law.stieltjes(x)?;
            block_env = block_env.max((fd - env).abs() / env.abs().max(1.0));
        }
    }
    Ok(vec![
        Check::below("Stieltjes closed form vs quadrature", stieltjes, 1e-7),
        Check::below("K(G(z)) round trip (relative)", k_of_g, 1e-9),
        Check::at_most("R_σ(u) − u", r_sigma, 0.0),
        Check::below("∂_θ F(θ,w_i) envelope (finite difference)", fe_env, 1e-6),
        Check::below("∂_x I_β(x) = (β/2)√(x²−4) (finite difference)", wig_env, 1e-6),
        Check::below("∂_x I_w(x) = θ* − (β/2)G_σw(x) (finite difference)", block_env, 1e-6),
    ])
}
