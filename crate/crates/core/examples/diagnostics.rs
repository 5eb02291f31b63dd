//! Distances between sampled spectra and their limits, top-eigenvector
//! delocalization, and the cross-block resolvent entry.

use ldp_eigen::diagnostics::{distances, resolvent_cross_block, top_vector_deloc};
use ldp_eigen::ensemble::{eigenvalues, esd, sample_matrix, sample_rect, wishart_spectrum, EnsembleKind, EnsembleSpec};
use ldp_eigen::entry_law::EntryLaw;
use ldp_eigen::spectral_law::SpectralLaw;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    for n in [100, 400, 1000] {
        let spec = EnsembleSpec::wigner(EnsembleKind::Wigner1, n, EntryLaw::rademacher())?;
        let x = sample_matrix(&spec, &mut rng);
        let d = distances(&esd(&eigenvalues(&x)?), &SpectralLaw::Semicircle, 8)?;
        println!(
            "Wigner N = {n:>4}: KS {:.4}, W1 {:.4}, BL ≥ {:.4}, max |v_i| = {:.4}",
            d.ks,
            d.w1,
            d.bl_lower,
            top_vector_deloc(&x)?
        );
    }

    let spec = EnsembleSpec::block(EnsembleKind::WishartBlock1, 300, 1200, EntryLaw::rademacher())?;
    let g = sample_rect(&spec, &mut rng)?;
    let d = distances(&esd(&wishart_spectrum(&g)?), &SpectralLaw::marchenko_pastur(4.0)?, 8)?;
    println!("Wishart L = 300, M = 1200: KS to MP(4) {:.4}, W1 {:.4}", d.ks, d.w1);
    println!("cross-block resolvent at z = 3: {:.5}", resolvent_cross_block(&g, 3.0, &mut rng)?);
    Ok(())
}
