//! Importance sampling of large deviations of `λ_max` by rank-one tilts.
//!
//! Under the tilt `(e, θ)` every entry slot is drawn from its exponentially
//! tilted law with argument `t_ij = 2θ√N e_i ē_j` (`θ√N |e_i|²` on the
//! diagonal), which is the law `exp(θN⟨e,Xe⟩)/E[…] dP(X)`. The top eigenvalue
//! then sits near the spike location `ρ_θ`.
//!
//! Two importance weights are available, see [`WeightScheme`]. Both are exactly
//! unbiased for the untilted probability; they differ enormously in variance.

pub use crate::spike::{
    critical_theta_wishart, rho_theta_wigner, spike_location_wishart, theta_x_wigner, theta_x_wishart,
    wishart_spike_lhs, SpikeLocation,
};

use crate::ensemble::{eigenvalues, sample_matrix_tilted, EnsembleKind, EnsembleSpec, Hermitian};
use crate::entry_law::{EntryLaw, Field};
use crate::error::{invalid, Error, Result};
use crate::estimate::{log_mean_exp_jackknife, mean_and_se, run_replicas};
use crate::rate::{rate_wigner, rate_wishart};
use crate::spherical::{deloc_check, inner_annealed, j_n_exact, sample_sphere, BetaProposal, SphereVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

/// A rank-one tilt: direction, strength, and where the spike is expected.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltPlan {
    pub e: SphereVector,
    pub theta: f64,
    /// `ρ_θ` for Wigner kinds, the block-unit spike location for block kinds.
    pub predicted_spike: f64,
    pub deloc_eps: f64,
    kind: EnsembleKind,
    split: Option<usize>,
}

impl TiltPlan {
    pub fn new(spec: &EnsembleSpec, e: SphereVector, theta: f64, deloc_eps: f64) -> Result<Self> {
        spec.validate()?;
        if e.n() != spec.n() {
            return Err(invalid(format!("direction has length {}, matrix side is {}", e.n(), spec.n())));
        }
        if e.field != spec.kind.field() {
            return Err(invalid("direction field does not match the ensemble"));
        }
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(invalid("θ must be finite and ≥ 0"));
        }
        let predicted_spike = if theta == 0.0 {
            spec.limit_law().right_edge()
        } else {
            match spec.alpha() {
                Some(alpha) => spike_location_wishart(theta, spec.beta(), alpha)?.location,
                None => rho_theta_wigner(theta, spec.beta())?.location,
            }
        };
        Ok(TiltPlan { e, theta, predicted_spike, deloc_eps, kind: spec.kind, split: spec.rect().map(|(l, _)| l) })
    }

    pub fn n(&self) -> usize {
        self.e.n()
    }

    /// The tilt argument of slot `(i, j)`; zero on the diagonal blocks of block kinds.
    pub fn tilt_arg(&self, i: usize, j: usize) -> Complex64 {
        let c = &self.e.components;
        let s = self.theta * (self.n() as f64).sqrt();
        if let Some(l) = self.split {
            if (i < l) == (j < l) {
                return Complex64::new(0.0, 0.0);
            }
        }
        if i == j {
            Complex64::new(s * c[i].norm_sqr(), 0.0)
        } else {
            2.0 * s * c[i] * c[j].conj()
        }
    }

    /// `(1/N) ln E[exp(θN⟨e,Xe⟩)]` for this direction.
    pub fn log_normalizer(&self, law: &EntryLaw) -> f64 {
        inner_annealed(&self.e, self.theta, law, self.kind, self.split.unwrap_or(0))
    }
}

/// Mean of the tilted matrix and the size of its deviation from `(2θ/β)ee*`.
#[derive(Clone, Debug)]
pub struct TiltedMean {
    pub mean: Hermitian,
    /// `‖E[X] − (2θ/β)ee*‖` (block kinds: relative to the off-block part of `ee*`).
    pub delta_norm: f64,
    /// `2·M₃·θ²·√N·Σ|e_i|⁴`, with `M₃` bounding `|L‴|` over the tilt arguments
    /// used (times `√2` for complex entries).
    pub delta_bound: f64,
}

/// Entrywise tilted means `L′(t_ij)/√N`.
pub fn tilted_mean_matrix(plan: &TiltPlan, law: &EntryLaw) -> Result<TiltedMean> {
    let n = plan.n();
    let field = plan.kind.field();
    let beta = plan.kind.beta();
    let law = law.clone().with_field(field);
    let diag_law = law.diagonal(beta);
    let inv = 1.0 / (n as f64).sqrt();
    let c = &plan.e.components;
    let mut mean = DMatrix::<Complex64>::zeros(n, n);
    let mut dev = DMatrix::<Complex64>::zeros(n, n);
    let mut t_max: f64 = 0.0;
    let scale = 2.0 * plan.theta / beta as f64;
    for j in 0..n {
        for i in 0..=j {
            let t = plan.tilt_arg(i, j);
            let off_block = plan.split.is_none_or(|l| (i < l) != (j < l));
            if plan.split.is_some() && !off_block {
                continue;
            }
            t_max = t_max.max(t.norm());
            let m = if i == j { diag_law.tilted_mean(t) } else { law.tilted_mean(t) } * inv;
            let target = scale * c[i] * c[j].conj();
            mean[(i, j)] = m;
            mean[(j, i)] = m.conj();
            dev[(i, j)] = m - target;
            dev[(j, i)] = (m - target).conj();
        }
    }
    let m3 = law.third_derivative_bound(t_max).max(diag_law.third_derivative_bound(t_max));
    let complex_factor = if field == Field::Complex { std::f64::consts::SQRT_2 } else { 1.0 };
    let delta_bound = 2.0 * m3 * complex_factor * plan.theta * plan.theta * (n as f64).sqrt() * plan.e.sum_abs4();
    let delta_norm = match field {
        Field::Real => Hermitian::Real(dev.map(|z| z.re)).norm()?,
        Field::Complex => Hermitian::Complex(dev).norm()?,
    };
    let mean = match field {
        Field::Real => Hermitian::Real(mean.map(|z| z.re)),
        Field::Complex => Hermitian::Complex(mean),
    };
    Ok(TiltedMean { mean, delta_norm, delta_bound })
}

/// Draws `X` under the tilt and returns it with the log-likelihood ratio
/// `ln dP/dP^{(e,θ)}(X) = −θN⟨e,Xe⟩ + Σ_slots L(t_ij)`.
pub fn sample_tilted<R: Rng + ?Sized>(spec: &EnsembleSpec, plan: &TiltPlan, rng: &mut R) -> Result<(Hermitian, f64)> {
    if plan.n() != spec.n() || plan.kind != spec.kind {
        return Err(invalid("tilt plan does not match the ensemble"));
    }
    if plan.theta == 0.0 {
        return Ok(sample_matrix_tilted(spec, None, rng));
    }
    let f = |i: usize, j: usize| plan.tilt_arg(i, j);
    Ok(sample_matrix_tilted(spec, Some(&f), rng))
}

/// Importance weight used by [`estimate_tail`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// Weight `Λ(e) − N·J_N(X,θ)` of the joint tilt of `(e, X)`, with
    /// `Λ(e) = ln E[exp(θN⟨e,Xe⟩)]` and `J_N` computed exactly from the
    /// spectrum. Its spread comes only from the spherical integral and stays
    /// `O(1)` in `N`.
    #[default]
    Marginal,
    /// Per-direction weight `−θN⟨e,Xe⟩ + Λ(e)` with delocalization rejection
    /// of `e`. Exact for each fixed `e`, but its log-spread grows like `θ√(2N)`.
    PerDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailConfig {
    /// Target location; Wishart units (`λ_max` of `GG*/L`) for block kinds.
    pub x: f64,
    pub delta: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub scheme: WeightScheme,
    pub deloc_eps: f64,
    /// Overrides the analytic `θ_x`.
    pub theta: Option<f64>,
}

impl TailConfig {
    pub fn new(x: f64, delta: f64, n_samples: usize, seed: u64) -> Self {
        TailConfig { x, delta, n_samples, seed, scheme: WeightScheme::Marginal, deloc_eps: 0.1, theta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub x: f64,
    pub delta: f64,
    /// Estimate of `(1/N) ln P(|λ_max − x| < δ)`.
    pub log_prob_per_n: f64,
    pub std_err: f64,
    /// Fraction of tilted replicas landing in the window.
    pub hit_rate: f64,
    /// Estimate of `(1/N) ln P(λ_max ≥ x)`.
    pub one_sided_log_prob_per_n: f64,
    pub one_sided_std_err: f64,
    pub one_sided_hit_rate: f64,
    pub n_samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub theta: f64,
    pub predicted_spike: f64,
    /// `−I(x)` from the closed-form rate.
    pub reference: f64,
    pub scheme: WeightScheme,
    /// Directions discarded by the delocalization test (per-direction scheme only).
    pub rejected_directions: usize,
    /// No replica hit the window; the estimate is `-inf` and carries no information.
    pub degenerate: bool,
}

struct Replica {
    log_weight: f64,
    lambda: f64,
    rejected: usize,
}

const MAX_REJECTIONS: usize = 100_000;

/// Estimates `(1/N) ln P(|λ_max − x| < δ)` by sampling `X` under the tilt `θ_x`.
pub fn estimate_tail(spec: &EnsembleSpec, cfg: &TailConfig) -> Result<TailEstimate> {
    spec.validate()?;
    if !(cfg.delta > 0.0) {
        return Err(invalid("δ must be > 0"));
    }
    if cfg.n_samples < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    let n = spec.n();
    let nf = n as f64;
    let beta = spec.beta();
    let field = spec.kind.field();
    let rect = spec.rect();

    // Work in block units for the tilt, in Wishart units for the window.
    let (x_tilt, reference) = match (rect, spec.alpha()) {
        (Some((l, _)), Some(alpha)) => {
            ((cfg.x.max(0.0) * l as f64 / nf).sqrt(), -rate_wishart(cfg.x, beta, alpha)?.value.as_f64())
        }
        _ => (cfg.x, -rate_wigner(cfg.x, beta)?.value.as_f64()),
    };
    let theta = match cfg.theta {
        Some(t) => t,
        None => match spec.alpha() {
            Some(alpha) => theta_x_wishart(x_tilt, beta, alpha)?,
            None => theta_x_wigner(x_tilt, beta)?,
        },
    };
    if !(theta > 0.0) {
        return Err(invalid("θ must be > 0"));
    }
    let proposal = match (cfg.scheme, rect) {
        (WeightScheme::Marginal, Some((l, m))) => Some(BetaProposal::new(l, m, beta, theta)),
        _ => None,
    };
    let template = TiltPlan::new(spec, sample_sphere(n, field, &mut crate::estimate::replica_rng(cfg.seed, u64::MAX)), theta, cfg.deloc_eps)?;
    let predicted_spike = match rect {
        Some((l, _)) => nf / l as f64 * template.predicted_spike * template.predicted_spike,
        None => template.predicted_spike,
    };

    let replicas = run_replicas(cfg.n_samples, cfg.seed, |rng, _| -> Result<Replica> {
        let mut rejected = 0;
        let (e, ln_ratio) = match (&proposal, rect) {
            (Some(p), Some((l, m))) => p.draw_direction(l, m, field, rng),
            _ => loop {
                let e = sample_sphere(n, field, rng);
                if cfg.scheme == WeightScheme::Marginal || deloc_check(&e, cfg.deloc_eps) {
                    break (e, 0.0);
                }
                rejected += 1;
                if rejected > MAX_REJECTIONS {
                    return Err(Error::Degenerate(format!(
                        "no delocalized direction in {MAX_REJECTIONS} draws at ε = {}",
                        cfg.deloc_eps
                    )));
                }
            },
        };
        let plan = TiltPlan { e, theta, predicted_spike: template.predicted_spike, deloc_eps: cfg.deloc_eps, kind: spec.kind, split: template.split };
        let (matrix, llr) = sample_tilted(spec, &plan, rng)?;
        let spectrum = eigenvalues(&matrix)?;
        let top = spectrum.lambda_max();
        let lambda = match rect {
            Some((l, _)) => nf / l as f64 * top * top,
            None => top,
        };
        let log_weight = match cfg.scheme {
            WeightScheme::PerDirection => llr,
            WeightScheme::Marginal => {
                nf * plan.log_normalizer(&spec.law) - nf * j_n_exact(&spectrum.eigenvalues, theta, beta)? + ln_ratio
            }
        };
        Ok(Replica { log_weight, lambda, rejected })
    });
    let replicas: Vec<Replica> = replicas.into_iter().collect::<Result<_>>()?;

    let window: Vec<f64> = replicas
        .iter()
        .map(|r| if (r.lambda - cfg.x).abs() < cfg.delta { r.log_weight } else { f64::NEG_INFINITY })
        .collect();
    let upper: Vec<f64> =
        replicas.iter().map(|r| if r.lambda >= cfg.x { r.log_weight } else { f64::NEG_INFINITY }).collect();
    let hits = window.iter().filter(|v| v.is_finite()).count();
    let upper_hits = upper.iter().filter(|v| v.is_finite()).count();
    let (lp, se) = log_mean_exp_jackknife(&window)?;
    let (lp1, se1) = log_mean_exp_jackknife(&upper)?;
    let total = cfg.n_samples as f64;
    Ok(TailEstimate {
        x: cfg.x,
        delta: cfg.delta,
        log_prob_per_n: lp / nf,
        std_err: se / nf,
        hit_rate: hits as f64 / total,
        one_sided_log_prob_per_n: lp1 / nf,
        one_sided_std_err: se1 / nf,
        one_sided_hit_rate: upper_hits as f64 / total,
        n_samples: cfg.n_samples,
        n,
        theta,
        predicted_spike,
        reference,
        scheme: cfg.scheme,
        rejected_directions: replicas.iter().map(|r| r.rejected).sum(),
        degenerate: hits == 0,
    })
}

/// Plain Monte Carlo estimate of the window probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NaiveTail {
    pub x: f64,
    pub delta: f64,
    pub prob: f64,
    pub std_err: f64,
    pub hits: usize,
    pub n_samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// `(1/N) ln prob`; `-inf` without hits.
    pub log_prob_per_n: f64,
    /// Delta-method standard error of `log_prob_per_n`.
    pub log_std_err: f64,
}

/// `P(|λ_max − x| < δ)` by direct sampling. Wigner kinds test the window with
/// two Cholesky factorizations instead of an eigendecomposition; block kinds
/// take `x` in Wishart units and diagonalize.
pub fn naive_tail_mc(spec: &EnsembleSpec, x: f64, delta: f64, n_samples: usize, seed: u64) -> Result<NaiveTail> {
    spec.validate()?;
    if !(delta > 0.0) || n_samples < 2 {
        return Err(invalid("need δ > 0 and at least 2 samples"));
    }
    let n = spec.n();
    let rect = spec.rect();
    let flags = run_replicas(n_samples, seed, |rng, _| -> Result<bool> {
        let (m, _) = sample_matrix_tilted(spec, None, rng);
        match rect {
            None => Ok(m.is_below(x + delta) && !m.is_below(x - delta)),
            Some((l, _)) => {
                let top = eigenvalues(&m)?.lambda_max();
                Ok(((n as f64 / l as f64) * top * top - x).abs() < delta)
            }
        }
    });
    let flags: Vec<bool> = flags.into_iter().collect::<Result<_>>()?;
    let hits = flags.iter().filter(|&&h| h).count();
    let ind: Vec<f64> = flags.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect();
    let (prob, std_err) = mean_and_se(&ind);
    let nf = n as f64;
    Ok(NaiveTail {
        x,
        delta,
        prob,
        std_err,
        hits,
        n_samples,
        n,
        log_prob_per_n: prob.ln() / nf,
        log_std_err: if hits > 0 { std_err / prob / nf } else { f64::INFINITY },
    })
}
