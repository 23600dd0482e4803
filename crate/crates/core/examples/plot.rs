//! |T_n(x)| on a 2^12-point grid, written as an SVG.
//!
//! ```text
//! cargo run --release --example plot [out.svg]
//! ```

use hecke_circle::cli::plot::{emit_plot, PlotOptions, PlotStyle};
use hecke_circle::expsum::exp_sum_grid;
use hecke_circle::weights::piltz_table;

fn main() -> hecke_circle::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "abs_t_grid.svg".into());
    let (n, m) = (100_000, 4096);
    let d2 = piltz_table(2, n)?;
    let total = d2.prefix_sum(n);
    let series: Vec<(f64, f64)> = exp_sum_grid(&d2, n, m)?
        .iter()
        .enumerate()
        .map(|(k, s)| (k as f64 / m as f64, (s.norm() / total).max(1e-9)))
        .collect();
    let opts = PlotOptions {
        title: format!("|T_n(k/{m})|, d_2 weights, n = {n}"),
        x_label: "x".into(),
        y_label: "|T_n(x)|".into(),
        log_y: true,
        style: PlotStyle::Scatter,
        ..PlotOptions::default()
    };
    emit_plot(&series, std::path::Path::new(&out), &opts)?;
    println!("wrote {} points to {out}", series.len());
    Ok(())
}
