//! Major/minor arc classification and the global approximant φ_n.
//!
//! ```text
//! cargo run --release --example arcs
//! ```

use hecke_circle::arcs::{best_rational, classify, minor_arc_intervals, ArcParams};
use hecke_circle::expsum::normalized_t;
use hecke_circle::verify::{WeightChoice, WeightContext};

fn main() -> hecke_circle::Result<()> {
    for n in [10_000u64, 100_000, 1_000_000] {
        let p = ArcParams::new(n, 0.1, 1.0)?;
        let minor = minor_arc_intervals(&p);
        let len = minor.iter().fold(0.0, |acc, (a, b)| acc + (b - a));
        println!(
            "n = {n:>7}: P = {:7.1}, Q = {:9.1}, {} minor intervals, total length {len:.2e}",
            p.p,
            p.q,
            minor.len()
        );
    }

    let n = 100_000;
    let p = ArcParams::new(n as u64, 0.1, 1.0)?;
    let ctx = WeightContext::new(WeightChoice::Piltz(2), n)?;
    let phi = ctx.approximant(n, 1.0, p.s_max())?;
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    for x in [0.0, 0.25, 1.0 / 3.0 + 1e-6, 0.3, golden] {
        let t = normalized_t(&ctx.weights, x, n)?.value;
        let approx = phi.phi(x);
        println!(
            "x = {x:.8}: {:?}, best a/q <= P: {:?}, |T| = {:.5}, |T - phi| = {:.2e}",
            classify(x, &p),
            best_rational(x, p.p_floor()),
            t.norm(),
            (t - approx).norm()
        );
    }
    Ok(())
}
