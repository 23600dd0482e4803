//! Rational-point amplitudes: D_q for λ², the log-polynomials of d_v, and a
//! check of both against the exponential sums they describe.
//!
//! ```text
//! cargo run --release --example coeffs
//! ```

use hecke_circle::expsum::exp_sum;
use hecke_circle::singular::{d_q, piltz_log_polynomials, LOCAL_TOL};
use hecke_circle::verify::{WeightChoice, WeightContext};
use hecke_circle::weights::piltz_table;

fn main() -> hecke_circle::Result<()> {
    let n = 200_000;

    let ctx = WeightContext::new(WeightChoice::HeckeSquare, n)?;
    let c_phi = ctx.c_phi.unwrap();
    println!("C_Phi estimate {c_phi:.6}");
    for q in [1u64, 2, 3, 5, 6, 12] {
        let dq = ctx.density(q, n)?;
        let s = exp_sum(&ctx.weights, 1.0 / q as f64, n)?;
        println!("q = {q:>2}: D_q = {dq:+.6}   Lambda_n(1/q)/n = {:+.6}", s.re / n as f64);
    }
    let lam = |p: u64| if p == 2 { -24.0 / 2f64.powf(5.5) } else { 0.0 };
    println!("D_2 from lambda(2) alone: {:+.6}", d_q(2, c_phi, &lam, LOCAL_TOL).value);

    let d3 = piltz_table(3, n)?;
    for q in [1u64, 4, 7] {
        let (f, g) = piltz_log_polynomials(3, q)?;
        let s = exp_sum(&d3, 1.0 / q as f64, n)?;
        println!(
            "d_3, q = {q}: F = {:?}, G = {:?}\n          S/n = {:.5}, F(n) = {:.5}",
            f.coeffs, g.coeffs, s.re / n as f64, f.eval(n as f64)
        );
    }
    Ok(())
}
