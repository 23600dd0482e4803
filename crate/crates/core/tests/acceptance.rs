//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails if a criterion fails that is not listed in
//! [`KNOWN_FAILURES`]; those are printed as FAIL all the same.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use hecke_circle::arcs::Amplitude;
use hecke_circle::arith::{gcd, is_prime, mobius};
use hecke_circle::characters::{dirichlet_characters, gauss_sum, CharacterTable};
use hecke_circle::ergodic::{
    convolve, maximal_cesaro, oscillation_sum, weighted_average, DynamicalSystem, KernelFamily,
    LacunarySequence, Observable, State, TwoSided,
};
use hecke_circle::expsum::{e, exp_sum, exp_sum_grid, normalized_t};
use hecke_circle::rng::{seeded, substream};
use hecke_circle::singular::piltz_log_polynomial;
use hecke_circle::verify::{
    run_suite, verify_rational_point, verify_residue_fit, Suite, SuiteConfig, VerificationReport, WeightChoice,
    WeightContext,
};
use hecke_circle::weights::{piltz_table, tau_table, TauTable, TAU_CAPACITY};
use num_complex::Complex64;
use rand::Rng;

/// Criteria that fail at desk scale for reasons recorded with the project
/// decisions; they are reported, not hidden.
const KNOWN_FAILURES: &[(u32, &str)] = &[
    (5, "v = 3 constant coefficient: least-squares extrapolation to log n = 0 amplifies the n^(-1/3) remainder"),
    (9, "d2: minor arcs are empty at n = 1e4, 1e5 (eps = 0.1), so only n = 1e6 samples the major-arc edge"),
];

const GAMMA0: f64 = 0.577_215_664_901_532_9;

fn tau() -> Arc<TauTable> {
    static TAU: OnceLock<Arc<TauTable>> = OnceLock::new();
    TAU.get_or_init(|| Arc::new(tau_table(TAU_CAPACITY).expect("tau table"))).clone()
}

fn hecke(n: usize) -> WeightContext {
    WeightContext::hecke(tau(), n).expect("hecke context")
}

/// Default suite runs, shared by several criteria.
fn suites() -> &'static BTreeMap<String, Vec<VerificationReport>> {
    static SUITES: OnceLock<BTreeMap<String, Vec<VerificationReport>>> = OnceLock::new();
    SUITES.get_or_init(|| {
        let cfg = SuiteConfig::default();
        let mut out = BTreeMap::new();
        for ctx in [hecke(1_000_000), WeightContext::new(WeightChoice::Piltz(2), 1_000_000).unwrap()] {
            out.insert(ctx.choice.to_string(), run_suite(Suite::All, &ctx, &cfg).unwrap());
        }
        out
    })
}

fn report<'a>(kind: &str, id: &str) -> &'a VerificationReport {
    suites()[kind].iter().find(|r| r.test_id == id).unwrap()
}

fn fmt_stats(r: &VerificationReport) -> String {
    let s: Vec<String> = r.statistics().iter().map(|x| format!("{x:.4e}")).collect();
    format!("[{}]", s.join(", "))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1_tau_table() -> Outcome {
    let t0 = Instant::now();
    let n = 10_000usize;
    let t = tau_table(n).unwrap();
    let mut bad = Vec::new();

    for a in 2..=n {
        for b in (a + 1)..=(n / a) {
            if gcd(a as u64, b as u64) == 1 && t.get(a * b) != t.get(a) * t.get(b) {
                bad.push(format!("mult {a}*{b}"));
            }
        }
    }
    for p in (2..=n).take_while(|&p| p * p <= n).filter(|&p| is_prime(p as u64)) {
        let p11 = (p as i128).pow(11);
        let mut pk = p;
        while pk * p <= n {
            let prev = if pk == p { 1 } else { t.get(pk / p) };
            if t.get(pk * p) != t.get(p) * t.get(pk) - p11 * prev {
                bad.push(format!("hecke {p}^k"));
            }
            pk *= p;
        }
    }
    let pow691 = |b: u64| (0..11).fold(1u64, |acc, _| acc * (b % 691) % 691);
    for m in 1..=n {
        let sigma = (1..=m).filter(|d| m % d == 0).fold(0u64, |acc, d| (acc + pow691(d as u64)) % 691);
        if t.get(m).rem_euclid(691) as u64 != sigma {
            bad.push(format!("691 at {m}"));
        }
    }
    // q ∏ (1 − q^m)^24 to degree 6 by schoolbook multiplication
    let mut series = vec![0i128; 7];
    series[1] = 1;
    for m in 1..=6 {
        for _ in 0..24 {
            for k in (m..7).rev() {
                series[k] -= series[k - m];
            }
        }
    }
    if (1..=6).any(|k| series[k] != t.get(k)) {
        bad.push("series oracle".into());
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 60.0,
        format!("tau(1..6) = {:?}, {} violations, {secs:.1} s", &t.values()[1..=6], bad.len()),
    )
}

fn c2_deligne() -> Outcome {
    let t = tau();
    let (mut worst, mut at) = (0.0f64, 0);
    for p in (2..=100_000usize).filter(|&p| is_prime(p as u64)) {
        let l2 = t.lambda(p).powi(2);
        if l2 > worst {
            (worst, at) = (l2, p);
        }
    }
    outcome(worst <= 4.0 + 1e-9, format!("max lambda(p)^2 = {worst:.9} at p = {at}"))
}

fn c3_leading_terms() -> Outcome {
    let r = report("hecke2", "kernel_asymptotics");
    let at = |n: u64| r.metrics.iter().find(|m| m.n == n).unwrap();
    let (a, b) = (at(100_000), at(1_000_000));
    let (c5, c6) = (a.extra["c_phi"], b.extra["c_phi"]);
    let agree = (c5 - c6).abs() / c6;
    let pass = agree <= 0.02 && b.statistic < a.statistic;
    outcome(
        pass,
        format!(
            "C_Phi(1e5) = {c5:.6}, C_Phi(1e6) = {c6:.6} (rel diff {agree:.2e}); lambda^4 residual {:.3e} -> {:.3e}",
            a.statistic, b.statistic
        ),
    )
}

fn c4_rational_points() -> Outcome {
    let t0 = Instant::now();
    let ctx = hecke(1_000_000);
    let r = verify_rational_point(&ctx, 20, &[100_000, 300_000, 1_000_000]).unwrap();
    let d1 = ctx.density(1, 1_000_000).unwrap();
    let c = ctx.c_phi.unwrap();
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        r.pass && (d1 - c).abs() <= 1e-12 && secs < 600.0,
        format!("medians {}, |D_1 - C_Phi| = {:.1e}, {secs:.1} s", fmt_stats(&r), (d1 - c).abs()),
    )
}

fn c5_residues() -> Outcome {
    let p = piltz_log_polynomial(2, 1).unwrap();
    let closed = (p.coeffs[0] - 1.0).abs().max((p.coeffs[1] - 2.0 * GAMMA0).abs());
    let mut pass = closed <= 1e-8;
    let mut parts = vec![format!("P_(2,1) vs [1, 2 gamma] {closed:.1e}")];
    for v in [2, 3] {
        let r = verify_residue_fit(v, 20, 100_000, 10_000_000, 40).unwrap();
        let worst = r.statistics().iter().cloned().fold(0.0f64, f64::max);
        let over = r.metrics.iter().filter(|m| m.statistic > 0.05).count();
        parts.push(format!("v = {v}: {over}/{} fractions over 5%, worst {worst:.3}", r.metrics.len()));
        pass &= r.pass;
    }
    outcome(pass, parts.join("; "))
}

fn c6_character_identity() -> Outcome {
    let (mut worst, mut count) = (0.0f64, 0usize);
    for q1 in 1..=30u64 {
        let table = CharacterTable::new(q1);
        for a in (1..=q1).filter(|&a| gcd(a, q1) == 1) {
            for m1 in 0..q1 {
                worst = worst.max(table.identity_error(a, m1).unwrap());
                count += 1;
            }
        }
    }
    outcome(worst <= 1e-10, format!("{count} cases, max error {worst:.2e}"))
}

fn c7_gauss_sums() -> Outcome {
    let (mut principal_err, mut ratio) = (0.0f64, 0.0f64);
    for q1 in 1..=30u64 {
        for chi in dirichlet_characters(q1) {
            let t = gauss_sum(&chi);
            if chi.principal {
                principal_err = principal_err.max((t - Complex64::new(mobius(q1) as f64, 0.0)).norm());
            } else {
                ratio = ratio.max(t.norm() - (q1 as f64).sqrt());
            }
        }
    }
    outcome(
        principal_err <= 1e-9 && ratio <= 1e-9,
        format!("principal |tau - mu| <= {principal_err:.1e}, max |tau| - sqrt(q) = {ratio:.2e}"),
    )
}

fn c8_grid_vs_direct() -> Outcome {
    let (n, m) = (10_000usize, 1usize << 12);
    let mut worst = 0.0f64;
    for w in [hecke(n).weights, piltz_table(2, n).unwrap(), piltz_table(3, n).unwrap()] {
        let grid = exp_sum_grid(&w, n, m).unwrap();
        for (k, g) in grid.iter().enumerate() {
            let d = exp_sum(&w, k as f64 / m as f64, n).unwrap();
            worst = worst.max((g - d).norm() / d.norm());
        }
    }
    outcome(worst <= 1e-8, format!("max relative deviation {worst:.2e} over {m} points x 3 weights"))
}

fn c9_minor_arcs() -> Outcome {
    let (h, d) = (report("hecke2", "minor_arc"), report("piltz2", "minor_arc"));
    outcome(h.pass && d.pass, format!("hecke2 {} {}; piltz2 {} {}", fmt_stats(h), pf(h.pass), fmt_stats(d), pf(d.pass)))
}

fn c10_phi_shape() -> Outcome {
    let (h, d) = (report("hecke2", "phi_global"), report("piltz2", "phi_global"));
    outcome(h.pass && d.pass, format!("hecke2 {} {}; piltz2 {} {}", fmt_stats(h), pf(h.pass), fmt_stats(d), pf(d.pass)))
}

fn c11_rotation_identity() -> Outcome {
    let n_max = 100_000;
    let weights = [hecke(n_max).weights, piltz_table(2, n_max).unwrap()];
    let mut rng = seeded(11);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let w = &weights[i % 2];
        let theta: f64 = rng.random();
        let x0: f64 = rng.random();
        let n = rng.random_range(1..=n_max);
        let sys = DynamicalSystem::Rotation { theta };
        let avg = weighted_average(&sys, w, &Observable::Character(1), &State::Point(x0), n).unwrap();
        let want = e(x0) * normalized_t(w, theta, n).unwrap().value;
        worst = worst.max((avg - want).norm());
    }
    outcome(worst <= 1e-10, format!("100 cases, max |A - e(x0) T_n(theta)| = {worst:.2e}"))
}

fn random_g(seed: u64, len: usize) -> TwoSided {
    let mut rng = substream(seed, 0);
    TwoSided::new(1, (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

fn c12_kernel_calculus() -> Outcome {
    let n_max = 100_000;
    let ctx = hecke(n_max);
    let mut scalar = 0.0f64;
    let g = random_g(12, 2000);
    for q in 1..=8u64 {
        let dq = ctx.density(q, n_max).unwrap();
        let omega = KernelFamily::Omega { q, amplitude: Amplitude::Constant(dq), normalizer: ctx.weights.clone() };
        for n in [1usize, 10, 1000, 100_000] {
            let lhs = convolve(&omega.kernel(n).unwrap(), &g);
            let factor = dq * n as f64 / ctx.normalizer(n);
            let rhs = convolve(&KernelFamily::Cesaro.kernel(n).unwrap(), &g).scaled(factor);
            for j in lhs.start()..lhs.end() {
                scalar = scalar.max((lhs.get(j) - rhs.get(j)).abs());
            }
        }
    }
    let mut ratio = 0.0f64;
    for seed in 0..100 {
        ratio = ratio.max(maximal_cesaro(&random_g(1000 + seed, 10_000), 1000).unwrap());
    }
    outcome(
        scalar <= 1e-12 && ratio <= 10.0,
        format!("omega vs scaled Cesaro max diff {scalar:.1e}; max Cesaro maximal ratio {ratio:.3} over 100 g"),
    )
}

fn c13_oscillation() -> Outcome {
    let n = 1usize << 20;
    let ctx = hecke(n);
    let lac = LacunarySequence::new(2.0, n).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for family in [KernelFamily::Weighted(ctx.weights.clone()), KernelFamily::Cesaro] {
        let mut wins = 0;
        for seed in 0..10 {
            let g = random_g(seed, 1000);
            let short = oscillation_sum(&g, &family, &lac, 5).unwrap();
            let long = oscillation_sum(&g, &family, &lac, 20).unwrap();
            wins += usize::from(long.value_per_j < short.value_per_j);
        }
        parts.push(format!("{} {wins}/10", family.name()));
        pass &= wins >= 9;
    }
    let g = random_g(0, 1000);
    let mut stats = Vec::new();
    for q in [1u64, 2, 4, 8] {
        let amplitude = Amplitude::Constant(ctx.density(q, 1_000_000).unwrap());
        let omega = KernelFamily::Omega { q, amplitude, normalizer: ctx.weights.clone() };
        let r = oscillation_sum(&g, &omega, &lac, 20).unwrap();
        stats.push(r.value * ((q + 1) as f64).powf(0.9) / g.norm_sq());
    }
    // one constant for all q: the q = 1 value bounds the rest
    let bounded = stats.iter().all(|&s| s <= stats[0]);
    pass &= bounded;
    let s: Vec<String> = stats.iter().map(|x| format!("{x:.3e}")).collect();
    parts.push(format!("omega value (q+1)^0.9/|g|^2 for q = 1,2,4,8: [{}]", s.join(", ")));
    outcome(pass, parts.join("; "))
}

fn c14_determinism() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut same = true;
    for ctx in [hecke(1_000_000), WeightContext::new(WeightChoice::Piltz(2), 1_000_000).unwrap()] {
        let again = run_suite(Suite::All, &ctx, &cfg).unwrap();
        let a = serde_json::to_vec(&suites()[&ctx.choice.to_string()]).unwrap();
        let b = serde_json::to_vec(&again).unwrap();
        same &= a == b;
    }
    let fit = || serde_json::to_vec(&verify_residue_fit(2, 10, 10_000, 100_000, 12).unwrap()).unwrap();
    same &= fit() == fit();
    let g = random_g(3, 500);
    let lac = LacunarySequence::new(2.0, 1 << 12).unwrap();
    let osc = || serde_json::to_vec(&oscillation_sum(&g, &KernelFamily::Cesaro, &lac, 10).unwrap()).unwrap();
    same &= osc() == osc();
    outcome(same, "all suites, residue fit and oscillation reports rerun byte-identically".to_string())
}

fn pf(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Outcome)> = vec![
        (1, "tau table", c1_tau_table),
        (2, "Deligne bound", c2_deligne),
        (3, "leading terms", c3_leading_terms),
        (4, "rational points", c4_rational_points),
        (5, "residue pipeline", c5_residues),
        (6, "character identity", c6_character_identity),
        (7, "Gauss sums", c7_gauss_sums),
        (8, "grid vs direct", c8_grid_vs_direct),
        (9, "minor-arc smallness", c9_minor_arcs),
        (10, "approximant shape", c10_phi_shape),
        (11, "rotation identity", c11_rotation_identity),
        (12, "kernel calculus", c12_kernel_calculus),
        (13, "oscillation sums", c13_oscillation),
        (14, "determinism", c14_determinism),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    let mut passed = 0;
    let mut ran = 0;
    for (id, name, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let o = check();
        let secs = t0.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        println!("criterion {id:>2} {} {name} ({secs:.1} s): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass {
            passed += 1;
        } else if let Some((_, why)) = known {
            println!("             known failure: {why}");
        } else {
            unexpected.push(id);
        }
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
