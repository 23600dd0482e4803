//! Weighted ergodic averages on a rotation and the doubling map, and
//! oscillation sums on the integers.
//!
//! ```text
//! cargo run --release --example ergodic
//! ```

use hecke_circle::ergodic::{
    convergence_diagnostic, oscillation_sum, DynamicalSystem, KernelFamily, LacunarySequence, Observable,
    State, TwoSided,
};
use hecke_circle::rng::seeded;
use hecke_circle::weights::piltz_table;
use rand::Rng;

fn main() -> hecke_circle::Result<()> {
    let n_max = 1 << 16;
    let d2 = piltz_table(2, n_max)?;
    let f = Observable::Character(1);

    for (name, sys) in [
        ("rotation(golden)", DynamicalSystem::Rotation { theta: 0.5 * (5f64.sqrt() - 1.0) }),
        ("rotation(1/3)", DynamicalSystem::Rotation { theta: 1.0 / 3.0 }),
        ("doubling", DynamicalSystem::Doubling { seed: 1 }),
    ] {
        let diag = convergence_diagnostic(&sys, &d2, &f, &State::Point(0.1), 2.0, n_max)?;
        let (re, im) = *diag.averages.last().unwrap();
        println!(
            "{name:<17} A_N = {re:+.5} {im:+.5}i at N = {}, tail sup {:.2e} -> {:.2e}",
            diag.lengths.last().unwrap(),
            diag.tail_sup[diag.tail_sup.len() / 2],
            diag.tail_sup.last().unwrap()
        );
    }

    let mut rng = seeded(7);
    let g = TwoSided::new(1, (0..1000).map(|_| rng.random_range(-1.0..=1.0)).collect());
    let lac = LacunarySequence::new(2.0, 1 << 20)?;
    for family in [KernelFamily::Cesaro, KernelFamily::Weighted(piltz_table(2, 1 << 20)?)] {
        let short = oscillation_sum(&g, &family, &lac, 5)?;
        let long = oscillation_sum(&g, &family, &lac, 20)?;
        println!(
            "{:<16} value/J: J = 5 -> {:.3}, J = 20 -> {:.3}  (||g||^2 = {:.1})",
            family.name(),
            short.value_per_j,
            long.value_per_j,
            g.norm_sq()
        );
    }
    Ok(())
}
