//! Limiting annealed free energies `F(θ,β)` (Wigner) and `F(θ,w_i)` (Wishart).
//!
//! For the block ensembles the free energy is a one-dimensional concave
//! maximization over `x = ‖e^(1)‖² ∈ (0,1)`:
//!
//! `F(θ,w_i) = sup_x g(x) − i·C_α`, with
//! `g(x) = (2θ²/i)x(1−x) + (i/(2(1+α))) ln x + (iα/(2(1+α))) ln(1−x)`.
//!
//! The maximizer is the unique zero of
//! `ψ(x) = (2/i)g′(x) = (4θ²/i²)(1−2x) + 1/((1+α)x) − α/((1+α)(1−x))`,
//! which is strictly decreasing on `(0,1)`.

use crate::error::{invalid, Error, Result};
use serde::Serialize;

const X_LO: f64 = 1e-12;
const X_HI: f64 = 1.0 - 1e-12;

/// `F(θ,β) = θ²/β`.
pub fn f_wigner(theta: f64, beta: u8) -> Result<f64> {
    if !(theta >= 0.0) || !(beta == 1 || beta == 2) {
        return Err(invalid("need θ ≥ 0 and β ∈ {1, 2}"));
    }
    Ok(theta * theta / beta as f64)
}

/// `C_α = (1/(2(1+α))) ln(1/(1+α)) + (α/(2(1+α))) ln(α/(1+α))`.
pub fn c_alpha(alpha: f64) -> f64 {
    let s = 1.0 + alpha;
    (1.0 / (2.0 * s)) * (1.0 / s).ln() + (alpha / (2.0 * s)) * (alpha / s).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WishartFreeEnergyResult {
    pub theta: f64,
    pub i: u8,
    pub alpha: f64,
    pub value: f64,
    pub x_star: f64,
    pub c_alpha: f64,
}

impl WishartFreeEnergyResult {
    /// `∂_θ F = (4θ/i)·x*(1−x*)` by the envelope theorem.
    pub fn d_theta(&self) -> f64 {
        4.0 * self.theta / self.i as f64 * self.x_star * (1.0 - self.x_star)
    }
}

fn objective(x: f64, theta: f64, i: f64, alpha: f64) -> f64 {
    let s = 1.0 + alpha;
    2.0 * theta * theta / i * x * (1.0 - x) + i / (2.0 * s) * x.ln() + i * alpha / (2.0 * s) * (1.0 - x).ln()
}

/// `ψ(x, θ)`, normalized as `(2/i)·g′(x)` so that it vanishes at the maximizer.
pub fn x_critical_residual(x: f64, theta: f64, i: u8, alpha: f64) -> f64 {
    let i = i as f64;
    let s = 1.0 + alpha;
    4.0 * theta * theta / (i * i) * (1.0 - 2.0 * x) + 1.0 / (s * x) - alpha / (s * (1.0 - x))
}

fn psi_prime(x: f64, theta: f64, i: f64, alpha: f64) -> f64 {
    let s = 1.0 + alpha;
    -8.0 * theta * theta / (i * i) - 1.0 / (s * x * x) - alpha / (s * (1.0 - x) * (1.0 - x))
}

/// Newton on `ψ` safeguarded by the bracket `(1e−12, 1 − 1e−12)`.
fn solve_x_star(theta: f64, i: u8, alpha: f64) -> Result<f64> {
    let fi = i as f64;
    let (mut lo, mut hi) = (X_LO, X_HI);
    let mut x = 1.0 / (1.0 + alpha);
    if theta > 0.0 {
        // Start between the θ = 0 and θ = ∞ maximizers.
        x = 0.5 * (x + 0.5);
    }
    for _ in 0..200 {
        let r = x_critical_residual(x, theta, i, alpha);
        if r == 0.0 {
            return Ok(x);
        }
        if r > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = r / psi_prime(x, theta, fi, alpha);
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(1e-300) || hi - lo <= 1e-16 {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence(format!("x* for θ={theta}, i={i}, α={alpha}")))
}

/// `F(θ,w_i)` with its maximizer `x*`.
pub fn f_wishart(theta: f64, i: u8, alpha: f64) -> Result<WishartFreeEnergyResult> {
    if !(theta >= 0.0 && theta.is_finite()) || !(i == 1 || i == 2) || !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(invalid("need θ ≥ 0, i ∈ {1, 2}, α ≥ 1"));
    }
    let x_star = if theta == 0.0 { 1.0 / (1.0 + alpha) } else { solve_x_star(theta, i, alpha)? };
    let c = c_alpha(alpha);
    let value = objective(x_star, theta, i as f64, alpha) - i as f64 * c;
    Ok(WishartFreeEnergyResult { theta, i, alpha, value, x_star, c_alpha: c })
}
