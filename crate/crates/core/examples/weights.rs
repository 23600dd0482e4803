//! Weight tables: exact τ, normalized λ², and Piltz divisor functions.
//!
//! ```text
//! cargo run --release --example weights [N]
//! ```

use hecke_circle::singular::estimate_c_phi;
use hecke_circle::weights::{hecke_lambda_sq_from, piltz_table, tau_table};

fn main() -> hecke_circle::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);

    let tau = tau_table(n)?;
    println!("tau(1..=6) = {:?}", &tau.values()[1..=6]);
    let lam2 = hecke_lambda_sq_from(&tau)?;
    println!("lambda(2)^2 = {:.12}", lam2.get(2));
    println!("C_Phi ~ sum lambda^2 / N = {:.6} at N = {n}", estimate_c_phi(&lam2, n)?);

    // Deligne: λ(p)² ≤ 4
    let worst = (2..=n.min(10_000))
        .filter(|&p| hecke_circle::arith::is_prime(p as u64))
        .map(|p| lam2.get(p))
        .fold(0.0f64, f64::max);
    println!("max lambda(p)^2 over p <= {} = {worst:.6}", n.min(10_000));

    for v in 2..=4 {
        let d = piltz_table(v, n)?;
        println!(
            "d_{v}: d(12) = {}, sum_(k<=N) d(k) / N = {:.4}",
            d.get(12),
            d.prefix_sum(n) / n as f64
        );
    }
    Ok(())
}
