//! Sample each ensemble once and summarize its spectrum. For the block
//! ensemble the Wishart eigenvalues (N/L)λ² are shown as well.

use ldp_eigen::ensemble::{
    block_spectrum_from_rect, eigenvalues, sample_matrix, sample_rect, wishart_spectrum, EnsembleKind, EnsembleSpec,
};
use ldp_eigen::entry_law::EntryLaw;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for kind in [EnsembleKind::Wigner1, EnsembleKind::Wigner2] {
        let spec = EnsembleSpec::wigner(kind, 500, EntryLaw::rademacher())?;
        let s = eigenvalues(&sample_matrix(&spec, &mut rng))?;
        println!("{kind:?} N = 500: λ_min {:.4}, λ_max {:.4}", s.lambda_min(), s.lambda_max());
    }

    let spec = EnsembleSpec::block(EnsembleKind::WishartBlock1, 200, 800, EntryLaw::gaussian())?;
    let g = sample_rect(&spec, &mut rng)?;
    let block = block_spectrum_from_rect(&g)?;
    let wishart = wishart_spectrum(&g)?;
    println!(
        "block L = 200, M = 800: λ_max {:.4} (edge {:.4}); Wishart λ_max {:.4} (edge 9)",
        block.lambda_max(),
        spec.limit_law().right_edge(),
        wishart.lambda_max()
    );
    Ok(())
}
