//! Stieltjes, inverse and R-transforms of the semicircle, Marchenko–Pastur and
//! block laws at a few points outside their supports.

use ldp_eigen::spectral_law::SpectralLaw;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let laws = [
        ("semicircle", SpectralLaw::Semicircle),
        ("MP(4)", SpectralLaw::marchenko_pastur(4.0)?),
        ("block(2)", SpectralLaw::block(2.0)?),
    ];
    for (name, law) in laws {
        let (lo, hi) = law.support();
        println!("{name}: support [{lo:.4}, {hi:.4}], atom at 0 = {:.4}", law.atom_at_zero());
        for dz in [0.1, 0.5, 2.0] {
            let z = hi + dz;
            let g = law.stieltjes(z)?;
            println!("  z = {z:.4}  G(z) = {g:.10}  K(G(z)) = {:.10}", law.k_inverse(g)?);
        }
        let u = 0.5 * law.stieltjes(hi + 0.1)?;
        println!("  R({u:.4}) = {:.10}", law.r_transform(u)?);
    }
    Ok(())
}
