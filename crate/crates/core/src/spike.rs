//! Spike maps of the rank-one tilt: where the top eigenvalue goes under tilt θ,
//! and which tilt sends it to a prescribed location.
//!
//! Wigner: `ρ_θ = 2θ/β + β/(2θ)` for `2θ/β > 1` and `θ_x = (β/4)(x + √(x² − 4))`.
//!
//! Block (Wishart) kinds, with `u = (1+α)z²`: the spike solves
//! `(1+α)² z² G_π(u) G_c(u) = i²/(4θ² x*(1−x*))`, where `G_c` is the companion
//! transform and `x*` the free-energy maximizer. The inverse map is closed form:
//! with `P = (2θ/i)(1+α)x + 1 − α`, the critical-point condition is the
//! quadratic `P² − 2(z+1−α)P + 4z = 0` (`z = (1+α)x²`). Its smaller root gives
//! `2θ/i = G_w(x)`, so the larger one is `P₊ = 4z/P₋` by Vieta.

use crate::error::{domain, invalid, Error, Result};
use crate::free_energy::f_wishart;
use crate::spectral_law::{block_edge, companion_stieltjes, mp_stieltjes, SpectralLaw};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpikeLocation {
    pub location: f64,
    pub supercritical: bool,
}

/// `ρ_θ = 2θ/β + β/(2θ)`; the bulk edge 2 with `supercritical = false` when `2θ/β ≤ 1`.
pub fn rho_theta_wigner(theta: f64, beta: u8) -> Result<SpikeLocation> {
    if !(theta > 0.0) {
        return Err(invalid("θ must be > 0"));
    }
    let s = 2.0 * theta / beta as f64;
    if s <= 1.0 {
        return Ok(SpikeLocation { location: 2.0, supercritical: false });
    }
    Ok(SpikeLocation { location: s + 1.0 / s, supercritical: true })
}

/// `θ_x = (β/4)(x + √(x² − 4))`, the inverse of [`rho_theta_wigner`].
pub fn theta_x_wigner(x: f64, beta: u8) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(domain(format!("θ_x needs x ≥ 2, got {x}")));
    }
    Ok(0.25 * beta as f64 * (x + ((x - 2.0) * (x + 2.0)).sqrt()))
}

/// Left side of the block spike equation, positive and decreasing on `(b̃_α, ∞)`.
pub fn wishart_spike_lhs(z: f64, alpha: f64) -> f64 {
    let s = 1.0 + alpha;
    let u = s * z * z;
    s * s * z * z * mp_stieltjes(alpha, u) * companion_stieltjes(alpha, u)
}

fn spike_rhs(theta: f64, i: u8, alpha: f64) -> Result<f64> {
    let fe = f_wishart(theta, i, alpha)?;
    let fi = i as f64;
    Ok(fi * fi / (4.0 * theta * theta * fe.x_star * (1.0 - fe.x_star)))
}

/// The critical tilt θ_α at which the block spike leaves the bulk edge.
pub fn critical_theta_wishart(i: u8, alpha: f64) -> Result<f64> {
    let target = wishart_spike_lhs(block_edge(alpha), alpha);
    let (mut lo, mut hi) = (1e-6, 1.0);
    while spike_rhs(hi, i, alpha)? > target {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::NoConvergence("critical tilt bracket".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spike_rhs(mid, i, alpha)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Block-kind spike location (block units) under tilt θ, by bisection on the
/// spike equation. Below the critical tilt the edge `b̃_α` is returned with
/// `supercritical = false`.
pub fn spike_location_wishart(theta: f64, i: u8, alpha: f64) -> Result<SpikeLocation> {
    if !(theta > 0.0) {
        return Err(invalid("θ must be > 0"));
    }
    let edge = block_edge(alpha);
    let rhs = spike_rhs(theta, i, alpha)?;
    if rhs >= wishart_spike_lhs(edge, alpha) {
        return Ok(SpikeLocation { location: edge, supercritical: false });
    }
    let (mut lo, mut hi) = (edge, 2.0 * edge);
    while wishart_spike_lhs(hi, alpha) > rhs {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if wishart_spike_lhs(mid, alpha) > rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SpikeLocation { location: 0.5 * (lo + hi), supercritical: true })
}

/// The tilt sending the block spike to `x > b̃_α`: the larger root of the
/// critical-point quadratic, obtained from `G_w(x)` through Vieta.
pub fn theta_x_wishart(x: f64, i: u8, alpha: f64) -> Result<f64> {
    let edge = block_edge(alpha);
    if !(x >= edge) {
        return Err(domain(format!("θ_x needs x ≥ b̃_α = {edge}, got {x}")));
    }
    let s = 1.0 + alpha;
    let z = s * x * x;
    let g = SpectralLaw::BlockLaw { alpha }.h_max(x)?;
    let p_minus = s * x * g + 1.0 - alpha;
    if !(p_minus > 0.0) {
        return Err(Error::NoConvergence(format!("quadratic root P₋ = {p_minus} is not positive")));
    }
    let p_plus = 4.0 * z / p_minus;
    Ok(0.5 * i as f64 * (p_plus - 1.0 + alpha) / (s * x))
}
