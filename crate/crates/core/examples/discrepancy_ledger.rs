//! Print every formula whose printed form disagrees with the one implemented,
//! with the two values measured side by side.

use ldp_eigen::ledger::discrepancy_ledger;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for e in discrepancy_ledger()? {
        println!("{}\n  printed: {}\n  used:    {}", e.id, e.printed, e.used);
        println!("  at {}: {:.6} vs {:.6} (ratio {:.4})\n", e.at, e.printed_value, e.used_value, e.ratio);
    }
    Ok(())
}
