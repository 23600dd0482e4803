//! Weighted exponential sums at rationals, irrationals, and on a grid.
//!
//! ```text
//! cargo run --release --example expsum
//! ```

use hecke_circle::expsum::{exp_sum, exp_sum_grid, normalized_t};
use hecke_circle::weights::piltz_table;

fn main() -> hecke_circle::Result<()> {
    let n = 100_000;
    let d2 = piltz_table(2, n)?;

    for (label, x) in [("1/2", 0.5), ("1/3", 1.0 / 3.0), ("2/7", 2.0 / 7.0), ("golden", 0.5 * (5f64.sqrt() - 1.0))] {
        let t = normalized_t(&d2, x, n)?;
        println!("T_n({label:>6}) = {:+.6} {:+.6}i   |T| = {:.6}", t.value.re, t.value.im, t.value.norm());
    }

    // the grid transform agrees with direct evaluation
    let m = 4096;
    let grid = exp_sum_grid(&d2, n, m)?;
    let worst = [1usize, 17, 1000, 2731]
        .iter()
        .map(|&k| {
            let direct = exp_sum(&d2, k as f64 / m as f64, n).unwrap();
            (grid[k] - direct).norm() / direct.norm().max(1.0)
        })
        .fold(0.0f64, f64::max);
    println!("grid vs direct, M = {m}: max relative deviation {worst:.2e}");
    Ok(())
}
