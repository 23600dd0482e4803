//! Runs the verification suites for one weight and prints a summary.
//!
//! ```text
//! cargo run --release --example verify [hecke2|piltz2|piltz3]
//! ```

use hecke_circle::verify::{run_suite, Suite, SuiteConfig, WeightChoice, WeightContext};

fn main() -> hecke_circle::Result<()> {
    let choice: WeightChoice = std::env::args().nth(1).as_deref().unwrap_or("piltz2").parse()?;
    let cfg = SuiteConfig { n_grid: vec![10_000, 30_000, 100_000], sample_size: 200, ..SuiteConfig::default() };
    let ctx = WeightContext::new(choice, *cfg.n_grid.last().unwrap())?;
    for report in run_suite(Suite::All, &ctx, &cfg)? {
        let stats: Vec<String> = report.statistics().iter().map(|s| format!("{s:.3e}")).collect();
        println!(
            "{:4} {:<20} {:<7} [{}]",
            if report.pass { "ok" } else { "FAIL" },
            report.test_id,
            report.kind,
            stats.join(", ")
        );
    }
    Ok(())
}
