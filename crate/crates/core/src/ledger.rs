//! Machine-readable record of formulas whose printed form disagrees with what
//! the rest of the theory forces, each with the discrepancy measured live.

use crate::error::Result;
use crate::rate::{rate_block, rate_block_display, rate_variational, rate_wishart, rate_wishart_printed, VariationalTarget};
use crate::spectral_law::{block_edge, mp_stieltjes};
use crate::spike::{rho_theta_wigner, theta_x_wigner, theta_x_wishart};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub id: &'static str,
    pub printed: &'static str,
    pub used: &'static str,
    /// Where the two were compared.
    pub at: String,
    pub printed_value: f64,
    pub used_value: f64,
    /// `printed_value / used_value` (or the printed residual when `used_value` is 0).
    pub ratio: f64,
    pub note: &'static str,
}

fn ratio(p: f64, u: f64) -> f64 {
    if u == 0.0 {
        p
    } else {
        p / u
    }
}

fn entry(
    id: &'static str,
    printed: &'static str,
    used: &'static str,
    at: String,
    printed_value: f64,
    used_value: f64,
    note: &'static str,
) -> LedgerEntry {
    LedgerEntry { id, printed, used, at, printed_value, used_value, ratio: ratio(printed_value, used_value), note }
}

/// `(βα/(1+α))·√((x² − 1 − α)² − 4α)/x²`, the printed block-rate derivative.
fn printed_block_derivative(x: f64, beta: f64, alpha: f64) -> f64 {
    let d = (x * x - 1.0 - alpha).powi(2) - 4.0 * alpha;
    beta * alpha / (1.0 + alpha) * d.max(0.0).sqrt() / (x * x)
}

/// `β√D/((1+α)x)` with `D = ((1+α)x² − 1 − α)² − 4α`.
fn block_derivative(x: f64, beta: f64, alpha: f64) -> f64 {
    let z = (1.0 + alpha) * x * x;
    let d = (z - 1.0 - alpha).powi(2) - 4.0 * alpha;
    beta * d.max(0.0).sqrt() / ((1.0 + alpha) * x)
}

/// Evaluates every ledger entry.
pub fn discrepancy_ledger() -> Result<Vec<LedgerEntry>> {
    let mut out = Vec::new();

    let (x, alpha) = (12.0, 4.0);
    out.push(entry(
        "wishart-rate-prefactor",
        "J(x) = β/(4(1+α)) ∫_b^x √((y−b)(y−a))/y dy",
        "J(x) = β/(2(1+α)) ∫_b^x √((y−b)(y−a))/y dy",
        format!("x = {x}, β = 1, α = {alpha}"),
        rate_wishart_printed(x, 1, alpha)?,
        rate_wishart(x, 1, alpha)?.value.as_f64(),
        "the β/(2(1+α)) prefactor is what sup_θ{J − F(θ,w_i)} returns",
    ));

    let (xb, a1) = (2.0, 1.0);
    let variational = rate_variational(xb, VariationalTarget::Block { i: 1, alpha: a1 })?.value.as_f64();
    out.push(entry(
        "block-rate-variational-vs-printed-composition",
        "J((1+α)x²) with the β/(4(1+α)) prefactor",
        "sup_θ{J(σ_w,θ,x) − F(θ,w_i)}",
        format!("x = {xb}, β = 1, α = {a1}"),
        0.5 * rate_block(xb, 1, a1)?.value.as_f64(),
        variational,
        "the printed composition is half the variational value",
    ));

    out.push(entry(
        "block-rate-display",
        "(β/(1+α)) ∫_{b̃}^x (1/y)√((1+α)²(y²−1)² − 4α) dy",
        "J((1+α)x²) with the β/(2(1+α)) prefactor",
        format!("x = {xb}, β = 1, α = {a1}"),
        rate_block_display(xb, 1, a1)?,
        rate_block(xb, 1, a1)?.value.as_f64(),
        "agrees with the composition once the Wishart prefactor is β/(2(1+α)); against the printed prefactor the ratio is 2",
    ));

    let e = block_edge(alpha);
    out.push(entry(
        "block-edge-discriminant",
        "(x² − 1 − α)² − 4α",
        "((1+α)x² − 1 − α)² − 4α",
        format!("x = b̃_α = {e}, α = {alpha}"),
        (e * e - 1.0 - alpha).powi(2) - 4.0 * alpha,
        ((1.0 + alpha) * e * e - 1.0 - alpha).powi(2) - 4.0 * alpha,
        "the printed discriminant does not vanish at the block edge (ratio column holds the printed residual)",
    ));

    let xd = 2.5;
    let h = 1e-5;
    let fd = (rate_block(xd + h, 1, a1)?.value.as_f64() - rate_block(xd - h, 1, a1)?.value.as_f64()) / (2.0 * h);
    out.push(entry(
        "block-rate-derivative",
        "(βα/(1+α)) √((x² − 1 − α)² − 4α) / x²",
        "β √(((1+α)x² − 1 − α)² − 4α) / ((1+α)x)",
        format!("x = {xd}, β = 1, α = {a1}; finite difference of the rate = {fd:.10}"),
        printed_block_derivative(xd, 1.0, a1),
        block_derivative(xd, 1.0, a1),
        "the used form matches the finite-difference derivative of the rate",
    ));

    let xt: f64 = 3.0;
    let printed_theta = 0.5 * (xt + (xt * xt - 4.0).sqrt());
    out.push(entry(
        "wigner-theta-x-factor",
        "θ_x = (β/2)(x + √(x² − 4))",
        "θ_x = (β/4)(x + √(x² − 4))",
        format!("x = {xt}, β = 1; ρ(printed θ_x) = {:.10}", rho_theta_wigner(printed_theta, 1)?.location),
        printed_theta,
        theta_x_wigner(xt, 1)?,
        "only the used θ_x satisfies ρ_θ = x",
    ));

    let xw = 1.3 * block_edge(alpha);
    let s = 1.0 + alpha;
    let d_printed = (xw * xw - 1.0 - alpha).powi(2) - 4.0 * alpha;
    let printed_branch = 2.0 * alpha / s * (xw * xw + 1.0 - alpha + d_printed.max(0.0).sqrt()) / (2.0 * xw * xw)
        + (1.0 - alpha) / (s * xw);
    out.push(entry(
        "wishart-theta-x-branch",
        "(2/β)θ_x = (2α/(1+α))(x² + 1 − α + √((x² − 1 − α)² − 4α))/(2x²) + (1 − α)/((1+α)x)",
        "(2/β)θ_x = P₊ from the critical-point quadratic, P₊ = 4z/P₋",
        format!("x = {xw:.6}, β = 1, α = {alpha}"),
        printed_branch,
        2.0 * theta_x_wishart(xw, 1, alpha)?,
        "the printed branch does not invert the spike equation",
    ));

    let z = 12.0;
    let g = mp_stieltjes(alpha, z);
    let printed_residual = (2.0 * z).powi(2) * g * g - 4.0 * z * (z + 1.0 - alpha) * g + 4.0 * z - 8.0 * alpha;
    let used_residual = z * g * g - (z + 1.0 - alpha) * g + 1.0;
    out.push(entry(
        "mp-quadratic",
        "(2z)²G² − 4z(z + 1 − α)G + 4z − 8α = 0",
        "zG² − (z + 1 − α)G + 1 = 0",
        format!("z = {z}, α = {alpha}, G = G_π(z) = {g:.12}; used residual {used_residual:e}"),
        printed_residual,
        0.0,
        "the printed quadratic is off by the constant −8α at the true transform (ratio column holds the printed residual)",
    ));

    Ok(out)
}
