//! Spherical integrals `I_N(X,θ) = E_e[exp(θN⟨e,Xe⟩)]` and their limits.
//!
//! Three routes are provided:
//!
//! * [`j_n_monte_carlo`] averages over sphere draws. Its log-mean-exp is biased
//!   low for finite samples, and the integrand is heavy-tailed once
//!   `θ·N·λ_max` is large; use it for `θ·N·λ_max ≲ 50`.
//! * [`j_n_exact`] evaluates `I_N` from the spectrum alone through the contour
//!   representation
//!   `I_N = Γ(βN/2)·(1/2πi)∫ e^z Π_i (z − θNλ_i)^{−β/2} dz`
//!   on a parabola through the real saddle point. It is exact up to quadrature
//!   error and is what the tail estimator uses.
//! * [`j_limit`] is the large-N limit `J(μ,θ,λ)` for the three limiting laws.
//!
//! [`inner_annealed`] integrates the matrix out exactly for a fixed direction,
//! so [`f_n_estimate`] only averages over `e`.

use crate::ensemble::{EnsembleKind, EnsembleSpec, Hermitian};
use crate::entry_law::{EntryLaw, Field};
use crate::error::{domain, invalid, Error, Result};
use crate::estimate::{log_mean_exp_jackknife, run_replicas, Estimate};
use crate::quadrature::{integrate_with, QuadOptions};
use crate::spectral_law::SpectralLaw;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// A unit vector in `R^N` or `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereVector {
    pub components: Vec<Complex64>,
    pub field: Field,
}

impl SphereVector {
    /// Normalizes `v`; fails on the zero vector.
    pub fn new(v: Vec<Complex64>, field: Field) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(invalid("cannot normalize the zero vector"));
        }
        Ok(SphereVector { components: v.into_iter().map(|z| z / norm).collect(), field })
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        SphereVector::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect(), Field::Real)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sum_abs4(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum()
    }
}

fn gaussian_components<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|_| match field {
            Field::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
            Field::Complex => Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)),
        })
        .collect()
}

/// A uniform point of the unit sphere: a normalized Gaussian vector.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> SphereVector {
    loop {
        if let Ok(e) = SphereVector::new(gaussian_components(n, field, rng), field) {
            return e;
        }
    }
}

/// Membership in `V_N^ε = {e : max_i |e_i| ≤ N^{−1/4−ε}}`.
pub fn deloc_check(e: &SphereVector, eps: f64) -> bool {
    e.max_abs() <= (e.n() as f64).powf(-0.25 - eps)
}

/// `J_N(X,θ) = (1/N) ln E_e[exp(θN⟨e,Xe⟩)]` by Monte Carlo over the sphere.
pub fn j_n_monte_carlo(x: &Hermitian, theta: f64, n_samples: usize, seed: u64) -> Result<Estimate> {
    if n_samples < 2 {
        return Err(invalid("j_n_monte_carlo needs at least 2 samples"));
    }
    if !(theta >= 0.0) {
        return Err(invalid("θ must be ≥ 0"));
    }
    let n = x.n();
    let field = match x {
        Hermitian::Real(_) => Field::Real,
        Hermitian::Complex(_) => Field::Complex,
    };
    let terms = run_replicas(n_samples, seed, |rng, _| {
        let e = sample_sphere(n, field, rng);
        theta * n as f64 * x.quadratic_form(&e.components)
    });
    let (v, se) = log_mean_exp_jackknife(&terms)?;
    Ok(Estimate { value: v / n as f64, std_err: se / n as f64, replicas: n_samples, seed })
}

/// `J_N(X,θ)` from the eigenvalues of `X`, for a uniform real (β=1) or complex
/// (β=2) direction, via the contour integral described in the module docs.
pub fn j_n_exact(eigenvalues: &[f64], theta: f64, beta: u8) -> Result<f64> {
    let n = eigenvalues.len();
    if n == 0 {
        return Err(invalid("empty spectrum"));
    }
    if !(theta >= 0.0) || !(beta == 1 || beta == 2) {
        return Err(invalid("need θ ≥ 0 and β ∈ {1, 2}"));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let h = 0.5 * beta as f64;
    let b: Vec<f64> = eigenvalues.iter().map(|&l| theta * nf * l).collect();
    let top = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = b.iter().map(|&v| top - v).collect();

    // Saddle point z* = top + d, where h·Σ 1/(d + top − b_i) = 1.
    let phi = |d: f64| h * shifted.iter().map(|s| 1.0 / (d + s)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.5 * h, h * nf);
    if phi(lo) <= 0.0 {
        lo = h * 1e-3;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let d = 0.5 * (lo + hi);
    let s2 = h * shifted.iter().map(|s| 1.0 / ((d + s) * (d + s))).sum::<f64>();
    let a = 0.5 * s2;
    let w = 1.0 / s2.sqrt();
    // Work relative to z*: u = z − z*, so z − b_i = (d + s_i) + u.
    let l0 = d - h * shifted.iter().map(|s| (d + s).ln()).sum::<f64>();
    let log_f = |y: f64| -> Complex64 {
        let u = Complex64::new(-a * y * y, y);
        let mut acc = Complex64::new(d, 0.0) + u;
        for s in &shifted {
            acc -= h * (Complex64::new(d + s, 0.0) + u).ln();
        }
        acc - l0
    };
    let mut y_max = w;
    while log_f(y_max).re > -50.0 {
        y_max *= 1.5;
        if !y_max.is_finite() {
            return Err(Error::NoConvergence("contour tail does not decay".into()));
        }
    }
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 2000 };
    let q = integrate_with(
        |y| {
            let f = log_f(y).exp();
            (f * Complex64::new(-2.0 * a * y, 1.0)).im
        },
        0.0,
        y_max,
        opts,
    )?;
    let val = q.value / std::f64::consts::PI;
    if !(val > 0.0) {
        return Err(Error::NoConvergence(format!("contour integral returned {val}")));
    }
    let log_i = ln_gamma(h * nf) + top + l0 + val.ln();
    Ok(log_i / nf)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JLimitInput {
    pub law: SpectralLaw,
    pub theta: f64,
    pub lam: f64,
    pub beta: u8,
}

/// Which branch of `v(θ, μ, λ)` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JRegime {
    SubCritical,
    SuperCritical,
}

/// `v(θ, μ, λ)` and its regime: `R_μ(2θ/β)` when `2θ/β ≤ H_max(μ, λ)`, else `λ − β/(2θ)`.
pub fn j_velocity(input: &JLimitInput) -> Result<(f64, JRegime)> {
    let s = 2.0 * input.theta / input.beta as f64;
    let h = input.law.h_max(input.lam)?;
    if s <= h {
        let v = if s == 0.0 {
            input.law.mean()
        } else if s >= input.law.h_max(input.law.right_edge())? {
            input.lam - 1.0 / s
        } else {
            input.law.r_transform(s)?
        };
        Ok((v, JRegime::SubCritical))
    } else {
        Ok((input.lam - 1.0 / s, JRegime::SuperCritical))
    }
}

/// `J(μ,θ,λ) = θv − (β/2)∫ ln(1 + (2θ/β)(v − y)) dμ(y)`.
pub fn j_limit(input: &JLimitInput) -> Result<f64> {
    input.law.validate()?;
    if !(input.beta == 1 || input.beta == 2) {
        return Err(invalid("β must be 1 or 2"));
    }
    if !(input.theta >= 0.0) || !input.theta.is_finite() {
        return Err(invalid("θ must be finite and ≥ 0"));
    }
    if !(input.lam >= input.law.right_edge()) {
        return Err(domain(format!("λ = {} lies below the right edge {}", input.lam, input.law.right_edge())));
    }
    if input.theta == 0.0 {
        return Ok(0.0);
    }
    let beta = input.beta as f64;
    let s = 2.0 * input.theta / beta;
    let (v, regime) = j_velocity(input)?;
    if regime == JRegime::SubCritical && input.law == SpectralLaw::Semicircle {
        return Ok(input.theta * input.theta / beta);
    }
    let mut bad = None;
    let integral = input.law.integrate(|y| {
        let arg = 1.0 + s * (v - y);
        if arg < 0.0 || (arg == 0.0 && bad.is_none()) {
            bad = Some(y);
        }
        if arg > 0.0 {
            arg.ln()
        } else {
            0.0
        }
    })?;
    if let Some(y) = bad {
        if regime == JRegime::SubCritical || y < input.lam - 1e-12 {
            return Err(domain(format!("log argument is not positive at y = {y} ({regime:?})")));
        }
    }
    Ok(input.theta * v - 0.5 * beta * integral)
}

/// `(1/N)·[Σ_{i<j} L(2θ√N e_i ē_j) + Σ_i L_diag(θ√N|e_i|²)]`, the exact value of
/// `(1/N) ln E_X[exp(θN⟨e,Xe⟩)]` for a fixed direction. For block kinds only
/// pairs across the two blocks contribute.
///
/// `split` is `L` for block kinds and ignored otherwise.
pub fn inner_annealed(e: &SphereVector, theta: f64, law: &EntryLaw, kind: EnsembleKind, split: usize) -> f64 {
    let n = e.n();
    if theta == 0.0 {
        return 0.0;
    }
    let law = law.clone().with_field(kind.field());
    let scale = theta * (n as f64).sqrt();
    let off = law.component();
    let c = &e.components;
    let mut acc = 0.0;
    if kind.is_block() {
        let l = split.min(n);
        for i in 0..l {
            let ci = 2.0 * scale * c[i];
            for cj in &c[l..] {
                acc += law.lmgf_unchecked(&off, ci * cj.conj());
            }
        }
    } else {
        let diag_law = law.diagonal(kind.beta());
        let diag = diag_law.component();
        for i in 0..n {
            let ci = 2.0 * scale * c[i];
            for cj in &c[i + 1..] {
                acc += law.lmgf_unchecked(&off, ci * cj.conj());
            }
            acc += diag_law.lmgf_unchecked(&diag, Complex64::new(scale * c[i].norm_sqr(), 0.0));
        }
    }
    acc / n as f64
}

/// Proposal for `x = ‖e^(1)‖²` in block ensembles: a piecewise-constant fit of
/// the Beta(iL/2, iM/2) law tilted by `exp(N(2θ²/i)x(1−x))`, mixed with a small
/// uniform component so its support is all of `[0, 1]`.
#[derive(Clone, Debug)]
pub(crate) struct BetaProposal {
    pub a: f64,
    pub b: f64,
    ln_beta_fn: f64,
    cumulative: Vec<f64>,
    density: Vec<f64>,
    eta: f64,
}

impl BetaProposal {
    const CELLS: usize = 4096;

    pub fn new(l: usize, m: usize, beta: u8, theta: f64) -> Self {
        let i = beta as f64;
        let n = (l + m) as f64;
        let a = 0.5 * i * l as f64;
        let b = 0.5 * i * m as f64;
        let ln_beta_fn = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
        let k = Self::CELLS;
        let width = 1.0 / k as f64;
        let logw: Vec<f64> = (0..k)
            .map(|c| {
                let x = (c as f64 + 0.5) * width;
                (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() + n * 2.0 * theta * theta / i * x * (1.0 - x)
            })
            .collect();
        let z = crate::estimate::log_sum_exp(&logw);
        let probs: Vec<f64> = logw.iter().map(|w| (w - z).exp()).collect();
        let mut cumulative = Vec::with_capacity(k);
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let eta = 1e-3;
        let density = probs.iter().map(|p| (1.0 - eta) * p / width + eta).collect();
        BetaProposal { a, b, ln_beta_fn, cumulative, density, eta }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u < self.eta {
            return v.clamp(1e-300, 1.0 - 1e-16);
        }
        let target: f64 = rng.random::<f64>() * self.cumulative[Self::CELLS - 1];
        let c = self.cumulative.partition_point(|&p| p <= target).min(Self::CELLS - 1);
        ((c as f64 + v) / Self::CELLS as f64).clamp(1e-300, 1.0 - 1e-16)
    }

    pub fn ln_q(&self, x: f64) -> f64 {
        let c = ((x * Self::CELLS as f64) as usize).min(Self::CELLS - 1);
        self.density[c].ln()
    }

    pub fn ln_beta_pdf(&self, x: f64) -> f64 {
        (self.a - 1.0) * x.ln() + (self.b - 1.0) * (1.0 - x).ln() - self.ln_beta_fn
    }

    /// Draws `x` from the proposal and a direction with `‖e^(1)‖² = x`, returning
    /// `e` and `ln(p_Beta(x)/q(x))`.
    pub fn draw_direction<R: Rng + ?Sized>(&self, l: usize, m: usize, field: Field, rng: &mut R) -> (SphereVector, f64) {
        let x = self.sample(rng);
        let u1 = sample_sphere(l, field, rng);
        let u2 = sample_sphere(m, field, rng);
        let (s1, s2) = (x.sqrt(), (1.0 - x).sqrt());
        let components = u1.components.iter().map(|z| z * s1).chain(u2.components.iter().map(|z| z * s2)).collect();
        (SphereVector { components, field }, self.ln_beta_pdf(x) - self.ln_q(x))
    }
}

/// `F_N(θ) = (1/N) ln E[I_N(X,θ)]`, integrating the matrix exactly for each
/// direction and averaging over directions. Block kinds draw `‖e^(1)‖²` from
/// [`BetaProposal`] and correct by the density ratio.
pub fn f_n_estimate(spec: &EnsembleSpec, theta: f64, n_samples: usize, seed: u64) -> Result<Estimate> {
    spec.validate()?;
    if n_samples < 2 {
        return Err(invalid("f_n_estimate needs at least 2 samples"));
    }
    if !(theta >= 0.0) {
        return Err(invalid("θ must be ≥ 0"));
    }
    if theta == 0.0 {
        return Ok(Estimate { value: 0.0, std_err: 0.0, replicas: n_samples, seed });
    }
    let n = spec.n();
    let nf = n as f64;
    let field = spec.kind.field();
    let rect = spec.rect();
    let proposal = rect.map(|(l, m)| BetaProposal::new(l, m, spec.beta(), theta));
    let terms = run_replicas(n_samples, seed, |rng, _| match (&proposal, rect) {
        (Some(p), Some((l, m))) => {
            let (e, corr) = p.draw_direction(l, m, field, rng);
            nf * inner_annealed(&e, theta, &spec.law, spec.kind, l) + corr
        }
        _ => {
            let e = sample_sphere(n, field, rng);
            nf * inner_annealed(&e, theta, &spec.law, spec.kind, 0)
        }
    });
    let (v, se) = log_mean_exp_jackknife(&terms)?;
    Ok(Estimate { value: v / nf, std_err: se / nf, replicas: n_samples, seed })
}
