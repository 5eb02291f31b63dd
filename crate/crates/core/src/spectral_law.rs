//! Limiting spectral laws: the semicircle σ, Marchenko–Pastur π_α and the
//! symmetrized block law σ_w.
//!
//! All Stieltjes transforms are evaluated on the real axis above the right
//! edge, with the branch that makes `G` positive and decreasing there. The
//! square-root forms are rationalized (`G = 2/(z + √(z² − 4))` and similar) so
//! that no cancellation occurs for large `z`.
//!
//! The block law is the law of `±√(λ/(1+α))` for `λ ~ π_α`, each sign with
//! weight `1/(1+α)`, plus an atom of mass `(α−1)/(α+1)` at 0. Its density on
//! `x ≠ 0` is therefore `2|x|·p_π((1+α)x²)`.

use crate::error::{domain, invalid, Result};
use crate::quadrature::integrate;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralLaw {
    Semicircle,
    MarchenkoPastur { alpha: f64 },
    BlockLaw { alpha: f64 },
}

/// `(a_α, b_α) = ((1−√α)², (1+√α)²)`.
pub fn mp_edges(alpha: f64) -> (f64, f64) {
    let s = alpha.sqrt();
    ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
}

/// `b̃_α = √(b_α/(1+α))`, the right edge of the block law.
pub fn block_edge(alpha: f64) -> f64 {
    (mp_edges(alpha).1 / (1.0 + alpha)).sqrt()
}

/// `G_{π_α}(z) = (z + 1 − α − √((z−a)(z−b)))/(2z)` for `z ≥ b_α`.
pub fn mp_stieltjes(alpha: f64, z: f64) -> f64 {
    let (a, b) = mp_edges(alpha);
    let disc = ((z - a) * (z - b)).max(0.0);
    2.0 / (z + 1.0 - alpha + disc.sqrt())
}

/// Stieltjes transform of the companion law of π_α (the eigenvalue law of
/// `(1/L)G*G`, i.e. π_α with the roles of L and M swapped and M − L zeros).
///
/// `G_c(u) = G_π(u)/α + (1 − 1/α)/u`.
pub fn companion_stieltjes(alpha: f64, u: f64) -> f64 {
    mp_stieltjes(alpha, u) / alpha + (1.0 - 1.0 / alpha) / u
}

fn mp_density(alpha: f64, x: f64) -> f64 {
    let (a, b) = mp_edges(alpha);
    if x <= a || x >= b || x <= 0.0 {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * PI * x)
}

/// Closed-form CDF of π_α, from the substitution `λ = (1+α) − 2√α·cos ψ`.
fn mp_cdf(alpha: f64, x: f64) -> f64 {
    let (a, b) = mp_edges(alpha);
    if x <= a {
        return 0.0;
    }
    if x >= b {
        return 1.0;
    }
    let c = 1.0 + alpha;
    let r = 2.0 * alpha.sqrt();
    let psi = ((c - x) / r).clamp(-1.0, 1.0).acos();
    let h = 0.5 * psi;
    let arc = (b.sqrt() * h.sin()).atan2(a.sqrt() * h.cos());
    ((r * psi.sin() + c * psi) / (2.0 * PI) - (alpha - 1.0) / PI * arc).clamp(0.0, 1.0)
}

fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        (0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (0.5 * x).asin() / PI).clamp(0.0, 1.0)
    }
}

impl SpectralLaw {
    pub fn marchenko_pastur(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SpectralLaw::MarchenkoPastur { alpha })
    }

    pub fn block(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SpectralLaw::BlockLaw { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralLaw::Semicircle => Ok(()),
            SpectralLaw::MarchenkoPastur { alpha } | SpectralLaw::BlockLaw { alpha } => check_alpha(alpha),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            SpectralLaw::Semicircle => (-2.0, 2.0),
            SpectralLaw::MarchenkoPastur { alpha } => mp_edges(alpha),
            SpectralLaw::BlockLaw { alpha } => {
                let e = block_edge(alpha);
                (-e, e)
            }
        }
    }

    pub fn right_edge(&self) -> f64 {
        self.support().1
    }

    pub fn atom_at_zero(&self) -> f64 {
        match *self {
            SpectralLaw::BlockLaw { alpha } => (alpha - 1.0) / (alpha + 1.0),
            _ => 0.0,
        }
    }

    /// Density of the absolutely continuous part.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            SpectralLaw::Semicircle => {
                if x.abs() >= 2.0 {
                    0.0
                } else {
                    (4.0 - x * x).sqrt() / (2.0 * PI)
                }
            }
            SpectralLaw::MarchenkoPastur { alpha } => mp_density(alpha, x),
            SpectralLaw::BlockLaw { alpha } => {
                if x == 0.0 {
                    0.0
                } else {
                    2.0 * x.abs() * mp_density(alpha, (1.0 + alpha) * x * x)
                }
            }
        }
    }

    /// `μ((−∞, x])`, atoms included.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            SpectralLaw::Semicircle => semicircle_cdf(x),
            SpectralLaw::MarchenkoPastur { alpha } => mp_cdf(alpha, x),
            SpectralLaw::BlockLaw { alpha } => {
                let side = 1.0 / (1.0 + alpha);
                let f = mp_cdf(alpha, (1.0 + alpha) * x * x);
                if x < 0.0 {
                    side * (1.0 - f)
                } else {
                    side + self.atom_at_zero() + side * f
                }
            }
        }
    }

    /// `μ((−∞, x))`, which differs from [`cdf`](Self::cdf) only at the atom.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.cdf(0.0) - self.atom_at_zero()
        } else {
            self.cdf(x)
        }
    }

    /// Smallest `x` with `cdf(x) ≥ u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        if u <= 0.0 {
            return lo;
        }
        if u >= 1.0 {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `∫ f dμ`, including the atom. Each law is integrated in a variable that
    /// removes the square-root edges.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        self.integrate_dyn(&mut f)
    }

    fn integrate_dyn(&self, f: &mut dyn FnMut(f64) -> f64) -> Result<f64> {
        match *self {
            SpectralLaw::Semicircle => integrate(
                |phi: f64| {
                    let s = phi.sin();
                    f(-2.0 * phi.cos()) * 2.0 / PI * s * s
                },
                0.0,
                PI,
            ),
            SpectralLaw::MarchenkoPastur { alpha } => {
                let c = 1.0 + alpha;
                let r = 2.0 * alpha.sqrt();
                integrate(
                    |phi: f64| {
                        let s = phi.sin();
                        let lam = c - r * phi.cos();
                        f(lam) * r * r * s * s / (2.0 * PI * lam)
                    },
                    0.0,
                    PI,
                )
            }
            SpectralLaw::BlockLaw { alpha } => {
                let side = 1.0 / (1.0 + alpha);
                let atom = self.atom_at_zero();
                let mp = SpectralLaw::MarchenkoPastur { alpha };
                let body = mp.integrate_dyn(&mut |lam| {
                    let x = (lam.max(0.0) * side).sqrt();
                    f(x) + f(-x)
                })?;
                Ok(atom * f(0.0) + side * body)
            }
        }
    }

    fn g_closed(&self, z: f64) -> f64 {
        match *self {
            SpectralLaw::Semicircle => 2.0 / (z + (z * z - 4.0).max(0.0).sqrt()),
            SpectralLaw::MarchenkoPastur { alpha } => mp_stieltjes(alpha, z),
            SpectralLaw::BlockLaw { alpha } => {
                2.0 * z * mp_stieltjes(alpha, (1.0 + alpha) * z * z) + (alpha - 1.0) / ((1.0 + alpha) * z)
            }
        }
    }

    /// `G_μ(z) = ∫ dμ(t)/(z − t)` for real `z` above the right edge.
    pub fn stieltjes(&self, z: f64) -> Result<f64> {
        if !(z > self.right_edge()) || !z.is_finite() {
            return Err(domain(format!("stieltjes needs z > {}, got {z}", self.right_edge())));
        }
        Ok(self.g_closed(z))
    }

    /// `H_max(μ, λ) = lim_{z↓λ} G_μ(z)`; finite at the soft edges of all three laws.
    pub fn h_max(&self, lam: f64) -> Result<f64> {
        if !(lam >= self.right_edge()) {
            return Err(domain(format!("h_max needs λ ≥ {}, got {lam}", self.right_edge())));
        }
        Ok(self.g_closed(lam))
    }

    /// The functional inverse `K_μ(g)` of `G_μ` on `(right_edge, ∞)`, for
    /// `0 < g ≤ H_max(μ, right_edge)`, by monotone bisection.
    pub fn k_inverse(&self, g: f64) -> Result<f64> {
        let edge = self.right_edge();
        let h = self.g_closed(edge);
        if !(g > 0.0 && g <= h) {
            return Err(domain(format!("K is defined on (0, {h}], got {g}")));
        }
        if g == h {
            return Ok(edge);
        }
        let mut lo = edge;
        let mut hi = edge.abs() + 2.0 / g + 1.0;
        while self.g_closed(hi) > g {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.g_closed(mid) > g {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `R_μ(u) = K_μ(u) − 1/u` for `0 < u < H_max(μ, right_edge)`.
    ///
    /// The semicircle is returned in closed form, `R_σ(u) = u`.
    pub fn r_transform(&self, u: f64) -> Result<f64> {
        let h = self.g_closed(self.right_edge());
        if !(u > 0.0 && u < h) {
            return Err(domain(format!("R-transform is defined on (0, {h}), got {u}")));
        }
        match self {
            SpectralLaw::Semicircle => Ok(u),
            _ => Ok(self.k_inverse(u)? - 1.0 / u),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            SpectralLaw::MarchenkoPastur { alpha } => alpha,
            _ => 0.0,
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            SpectralLaw::Semicircle => 1.0,
            SpectralLaw::MarchenkoPastur { alpha } => alpha * (1.0 + alpha),
            SpectralLaw::BlockLaw { alpha } => 2.0 * alpha / ((1.0 + alpha) * (1.0 + alpha)),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("α must be finite and ≥ 1, got {alpha}")))
    }
}

/// Residual of the quadratic `P² − 2(z+1−α)P + 4z` satisfied by
/// `P = (1+α)·u·K_w(u) + 1 − α`, `z = (1+α)K_w(u)²`; it vanishes along the block
/// law's inverse Stieltjes transform.
pub fn block_k_residual(alpha: f64, u: f64, k: f64) -> f64 {
    let z = (1.0 + alpha) * k * k;
    let p = (1.0 + alpha) * u * k + 1.0 - alpha;
    p * p - 2.0 * (z + 1.0 - alpha) * p + 4.0 * z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges() {
        assert_eq!(mp_edges(4.0), (1.0, 9.0));
        assert!((block_edge(1.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn block_cdf_has_atom() {
        let l = SpectralLaw::BlockLaw { alpha: 3.0 };
        assert!((l.cdf_left(0.0) - 0.25).abs() < 1e-15);
        assert!((l.cdf(0.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn k_inverse_rejects_outside_range() {
        let l = SpectralLaw::Semicircle;
        assert!(l.k_inverse(1.5).is_err());
        assert!(l.k_inverse(0.0).is_err());
        assert_eq!(l.k_inverse(1.0).unwrap(), 2.0);
    }

    #[test]
    fn block_inverse_satisfies_quadratic() {
        for &alpha in &[1.0, 2.5, 4.0] {
            let law = SpectralLaw::BlockLaw { alpha };
            let h = law.h_max(law.right_edge()).unwrap();
            for k in 1..10 {
                let u = h * k as f64 / 10.0;
                let kk = law.k_inverse(u).unwrap();
                assert!(block_k_residual(alpha, u, kk).abs() < 1e-9 * (1.0 + kk * kk));
            }
        }
    }
}
