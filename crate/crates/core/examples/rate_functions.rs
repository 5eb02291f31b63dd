//! Rate functions of the largest eigenvalue: closed forms against the
//! variational formula, for Wigner and Wishart (block) ensembles.

use ldp_eigen::rate::{rate_block, rate_variational, rate_wigner, RateValue, VariationalTarget};
use ldp_eigen::spectral_law::block_edge;

fn show(v: RateValue) -> String {
    if v.is_infinite() {
        "+inf".into()
    } else {
        format!("{:.10}", v.as_f64())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("Wigner, β = 1");
    for x in [2.0, 2.5, 3.0, 4.0] {
        let closed = rate_wigner(x, 1)?;
        let var = rate_variational(x, VariationalTarget::Wigner { beta: 1 })?;
        println!("  x = {x:.1}: closed {}  variational {}  θ* = {:.5}", show(closed.value), show(var.value), var.theta_star);
    }

    let alpha = 2.0;
    let edge = block_edge(alpha);
    println!("\nblock, α = {alpha}, β = 1 (edge {edge:.5})");
    for dx in [0.0, 0.1, 0.3, 0.6, 1.0] {
        let x = edge + dx;
        let closed = rate_block(x, 1, alpha)?;
        let var = rate_variational(x, VariationalTarget::Block { i: 1, alpha })?;
        println!("  x = {x:.4}: composed {}  variational {}", show(closed.value), show(var.value));
    }
    Ok(())
}
