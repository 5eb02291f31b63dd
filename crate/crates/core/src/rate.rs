//! Large-deviation rate functions of the largest eigenvalue.
//!
//! Closed forms are available for the three limiting laws; the variational
//! route `I(x) = sup_θ {J(μ, θ, x) − F(θ)}` is implemented independently so the
//! two can be checked against each other.
//!
//! The smallest eigenvalue obeys the same principle after the reflection
//! `X ↦ −X` (all entry laws here are symmetric), see [`rate_lambda_min_wigner`].

use crate::ensemble::EnsembleKind;
use crate::error::{domain, invalid, Error, Result};
use crate::free_energy::{f_wigner, f_wishart};
use crate::quadrature::integrate;
use crate::spectral_law::{block_edge, mp_edges, SpectralLaw};
use crate::spherical::{j_limit, JLimitInput};
use crate::spike::{theta_x_wigner, theta_x_wishart};
use serde::{Serialize, Serializer};

/// A rate value; `Infinite` stands for `+∞` below the bulk edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateValue {
    Finite(f64),
    Infinite,
}

impl RateValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RateValue::Infinite)
    }

    /// The finite value, or `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            RateValue::Finite(v) => *v,
            RateValue::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for RateValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RateValue::Finite(v) => s.serialize_f64(*v),
            RateValue::Infinite => s.serialize_str("+inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RateMethod {
    ClosedForm,
    Variational,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateResult {
    pub x: f64,
    pub value: RateValue,
    /// Optimal tilt; `0` when no tilt is involved (closed forms) or below the edge.
    pub theta_star: f64,
    pub method: RateMethod,
}

impl RateResult {
    fn infinite(x: f64, method: RateMethod) -> Self {
        RateResult { x, value: RateValue::Infinite, theta_star: 0.0, method }
    }
}

fn check_beta(beta: u8) -> Result<()> {
    if beta == 1 || beta == 2 {
        Ok(())
    } else {
        Err(invalid(format!("β must be 1 or 2, got {beta}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("α must be finite and ≥ 1, got {alpha}")))
    }
}

/// `∫₂ˣ √(t² − 4) dt = (x/2)√(x² − 4) − 2 ln((x + √(x² − 4))/2)`.
fn semicircle_area(x: f64) -> f64 {
    let r = ((x - 2.0) * (x + 2.0)).sqrt();
    // ln((x + r)/2) = asinh-like; ln_1p keeps precision near the edge
    0.5 * x * r - 2.0 * (0.5 * (x - 2.0 + r)).ln_1p()
}

/// `I_β(x) = (β/2)∫₂ˣ √(t² − 4) dt` for `x ≥ 2`, `+∞` below.
pub fn rate_wigner(x: f64, beta: u8) -> Result<RateResult> {
    check_beta(beta)?;
    if x.is_nan() {
        return Err(invalid("x is NaN"));
    }
    if x < 2.0 {
        return Ok(RateResult::infinite(x, RateMethod::ClosedForm));
    }
    let v = if x == f64::INFINITY { f64::INFINITY } else { 0.5 * beta as f64 * semicircle_area(x) };
    Ok(RateResult { x, value: RateValue::Finite(v), theta_star: 0.0, method: RateMethod::ClosedForm })
}

/// Same integral by adaptive quadrature, with `t = 2 + u²` removing the edge root.
pub fn rate_wigner_quadrature(x: f64, beta: u8) -> Result<RateResult> {
    check_beta(beta)?;
    if !(x >= 2.0) {
        return Ok(RateResult::infinite(x, RateMethod::Quadrature));
    }
    let w = (x - 2.0).sqrt();
    let v = integrate(|u| 2.0 * u * u * (4.0 + u * u).sqrt(), 0.0, w)?;
    Ok(RateResult { x, value: RateValue::Finite(0.5 * beta as f64 * v), theta_star: 0.0, method: RateMethod::Quadrature })
}

/// Rate of `−λ_min` at `y`, i.e. of the event `{λ_min ≤ −y}`: `I_β(y)`.
pub fn rate_lambda_min_wigner(y: f64, beta: u8) -> Result<RateResult> {
    rate_wigner(y, beta)
}

/// `∫_b^x √((y − b)(y − a))/y dy` for the MP law, with `y = b + u²`.
fn wishart_integral(x: f64, alpha: f64) -> Result<f64> {
    let (a, b) = mp_edges(alpha);
    let w = (x - b).sqrt();
    integrate(|u| {
        let y = b + u * u;
        2.0 * u * u * (y - a).sqrt() / y
    }, 0.0, w)
}

/// Rate of the top Wishart eigenvalue,
/// `(β/(2(1+α))) ∫_{b_α}^x √((y − b_α)(y − a_α))/y dy` for `x ≥ b_α`.
pub fn rate_wishart(x: f64, beta: u8, alpha: f64) -> Result<RateResult> {
    check_beta(beta)?;
    check_alpha(alpha)?;
    let (_, b) = mp_edges(alpha);
    if !(x >= b) {
        return Ok(RateResult::infinite(x, RateMethod::Quadrature));
    }
    let v = beta as f64 / (2.0 * (1.0 + alpha)) * wishart_integral(x, alpha)?;
    Ok(RateResult { x, value: RateValue::Finite(v), theta_star: 0.0, method: RateMethod::Quadrature })
}

/// Rate of the top block eigenvalue: `rate_wishart((1+α)x²)` for `x ≥ b̃_α`.
pub fn rate_block(x: f64, beta: u8, alpha: f64) -> Result<RateResult> {
    check_alpha(alpha)?;
    if !(x >= block_edge(alpha)) {
        check_beta(beta)?;
        return Ok(RateResult::infinite(x, RateMethod::Quadrature));
    }
    let b = mp_edges(alpha).1;
    // At the edge itself (1+α)·x² can round above b_α; pin it so the rate is exactly 0.
    let y = if x == block_edge(alpha) { b } else { ((1.0 + alpha) * x * x).max(b) };
    let mut r = rate_wishart(y, beta, alpha)?;
    r.x = x;
    Ok(r)
}

/// The Wishart rate with the alternative prefactor `β/(4(1+α))`. Kept for the
/// discrepancy ledger only.
pub fn rate_wishart_printed(x: f64, beta: u8, alpha: f64) -> Result<f64> {
    Ok(0.5 * rate_wishart(x, beta, alpha)?.value.as_f64())
}

/// `(β/(1+α)) ∫_{b̃_α}^x (1/y)√((1+α)²(y² − 1)² − 4α) dy`, the alternative
/// block display. Kept for the discrepancy ledger only.
pub fn rate_block_display(x: f64, beta: u8, alpha: f64) -> Result<f64> {
    check_beta(beta)?;
    check_alpha(alpha)?;
    let e = block_edge(alpha);
    if !(x >= e) {
        return Ok(f64::INFINITY);
    }
    let s = 1.0 + alpha;
    let w = (x - e).sqrt();
    let v = integrate(|u| {
        let y = e + u * u;
        let d = s * s * (y * y - 1.0).powi(2) - 4.0 * alpha;
        2.0 * u * d.max(0.0).sqrt() / y
    }, 0.0, w)?;
    Ok(beta as f64 / s * v)
}

/// Which law the variational formula is evaluated for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum VariationalTarget {
    /// Semicircle with `F(θ,β) = θ²/β`.
    Wigner { beta: u8 },
    /// Block law `σ_w` with the block free energy `F(θ,w_i)`, `β = i`.
    Block { i: u8, alpha: f64 },
}

impl VariationalTarget {
    /// The variational target of an ensemble kind; `alpha` is required for block kinds.
    pub fn from_kind(kind: EnsembleKind, alpha: Option<f64>) -> Result<Self> {
        if kind.is_block() {
            let alpha = alpha.ok_or_else(|| invalid("block kinds need α"))?;
            Ok(VariationalTarget::Block { i: kind.beta(), alpha })
        } else {
            Ok(VariationalTarget::Wigner { beta: kind.beta() })
        }
    }

    fn beta(&self) -> u8 {
        match *self {
            VariationalTarget::Wigner { beta } => beta,
            VariationalTarget::Block { i, .. } => i,
        }
    }

    fn law(&self) -> SpectralLaw {
        match *self {
            VariationalTarget::Wigner { .. } => SpectralLaw::Semicircle,
            VariationalTarget::Block { alpha, .. } => SpectralLaw::BlockLaw { alpha },
        }
    }

    fn free_energy(&self, theta: f64) -> Result<f64> {
        match *self {
            VariationalTarget::Wigner { beta } => f_wigner(theta, beta),
            VariationalTarget::Block { i, alpha } => Ok(f_wishart(theta, i, alpha)?.value),
        }
    }

    fn theta_x(&self, x: f64) -> Result<f64> {
        match *self {
            VariationalTarget::Wigner { beta } => theta_x_wigner(x, beta),
            VariationalTarget::Block { i, alpha } => theta_x_wishart(x, i, alpha),
        }
    }

    /// `φ(θ) = J(μ, θ, x) − F(θ)`.
    pub fn phi(&self, theta: f64, x: f64) -> Result<f64> {
        let j = j_limit(&JLimitInput { law: self.law(), theta, lam: x, beta: self.beta() })?;
        Ok(j - self.free_energy(theta)?)
    }
}

/// Evaluation budget of [`rate_variational`].
pub const MAX_EVALUATIONS: usize = 500;

struct Counted<'a> {
    target: &'a VariationalTarget,
    x: f64,
    evals: usize,
    trace: Vec<(f64, f64)>,
}

impl Counted<'_> {
    fn eval(&mut self, theta: f64) -> Result<f64> {
        self.evals += 1;
        if self.evals > MAX_EVALUATIONS {
            let tail: Vec<_> = self.trace.iter().rev().take(5).collect();
            return Err(Error::NoConvergence(format!(
                "variational rate at x = {} exceeded {MAX_EVALUATIONS} evaluations; last (θ, φ): {tail:?}",
                self.x
            )));
        }
        let v = self.target.phi(theta, self.x)?;
        self.trace.push((theta, v));
        Ok(v)
    }
}

/// `sup_{θ ≥ 0} {J(μ, θ, x) − F(θ)}`.
///
/// `φ` vanishes on the sub-critical range `2θ/β ≤ H_max(μ, x)`, so the search
/// runs over `[θ_c, 10·θ_x]` with `θ_c = (β/2)H_max(μ, x)`: golden section
/// followed by two parabolic vertex refinements.
pub fn rate_variational(x: f64, target: VariationalTarget) -> Result<RateResult> {
    check_beta(target.beta())?;
    if let VariationalTarget::Block { alpha, .. } = target {
        check_alpha(alpha)?;
    }
    let law = target.law();
    let edge = law.right_edge();
    if !(x >= edge) {
        return Err(domain(format!("x = {x} lies below the bulk edge {edge}")));
    }
    let beta = target.beta() as f64;
    let theta_c = 0.5 * beta * law.h_max(x)?;
    if x == edge {
        return Ok(RateResult { x, value: RateValue::Finite(0.0), theta_star: theta_c, method: RateMethod::Variational });
    }
    let theta_hi = 10.0 * target.theta_x(x)?.max(theta_c);
    let mut f = Counted { target: &target, x, evals: 0, trace: Vec::new() };

    let invphi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (theta_c, theta_hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f.eval(c)?;
    let mut fd = f.eval(d)?;
    while b - a > 1e-7 * b.max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f.eval(d)?;
        }
    }
    let (mut theta, mut best) = if fc >= fd { (c, fc) } else { (d, fd) };

    for _ in 0..2 {
        let h = 1e-4 * theta.max(1.0);
        let lo = (theta - h).max(theta_c);
        let hi = (theta + h).min(theta_hi);
        if hi - lo < 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (fl, fm, fh) = (f.eval(lo)?, f.eval(mid)?, f.eval(hi)?);
        let denom = fl - 2.0 * fm + fh;
        if !(denom < 0.0) {
            break;
        }
        let step = 0.5 * (hi - lo) * 0.5 * (fl - fh) / denom;
        let cand = (mid + step).clamp(lo, hi);
        let fcand = f.eval(cand)?;
        for (t, v) in [(lo, fl), (mid, fm), (hi, fh), (cand, fcand)] {
            if v > best {
                best = v;
                theta = t;
            }
        }
    }
    Ok(RateResult { x, value: RateValue::Finite(best.max(0.0)), theta_star: theta, method: RateMethod::Variational })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_quadrature() {
        for &x in &[2.0, 2.001, 2.5, 3.0, 6.0, 20.0] {
            let a = rate_wigner(x, 1).unwrap().value.as_f64();
            let b = rate_wigner_quadrature(x, 1).unwrap().value.as_f64();
            assert!((a - b).abs() <= 1e-10 * (1.0 + a), "x={x}: {a} vs {b}");
        }
        assert!(rate_wigner(1.5, 1).unwrap().value.is_infinite());
    }

    #[test]
    fn wigner_variational_matches() {
        let r = rate_variational(3.0, VariationalTarget::Wigner { beta: 1 }).unwrap();
        assert!((r.value.as_f64() - 0.7146273330056354).abs() < 1e-6, "{r:?}");
        assert!((r.theta_star - 0.25 * (3.0 + 5f64.sqrt())).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn block_variational_matches_composition() {
        let v = rate_variational(2.0, VariationalTarget::Block { i: 1, alpha: 1.0 }).unwrap();
        let c = rate_block(2.0, 1, 1.0).unwrap();
        assert!((v.value.as_f64() - c.value.as_f64()).abs() < 1e-4, "{v:?} vs {c:?}");
    }

    #[test]
    fn block_display_matches_composition() {
        let d = rate_block_display(2.0, 1, 1.0).unwrap();
        let c = rate_block(2.0, 1, 1.0).unwrap().value.as_f64();
        assert!((d - c).abs() < 1e-9 * c, "{d} vs {c}");
    }
}
