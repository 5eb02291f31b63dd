use ldp_eigen::validate::{run_suite, Suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_suite(Suite::Transforms, 1, 0)?;
    for c in &report.checks {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        println!("{tag} {:<48} {:.3e} (threshold {:.1e})", c.name, c.measured, c.threshold);
    }
    Ok(())
}
