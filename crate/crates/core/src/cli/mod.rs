//! Command-line front end: argument model, dispatch, table cache and output.
//!
//! Every subcommand is a pure function of [`RunConfig`]. Exit codes are
//! 0 on success, 1 when a verification suite fails and 2 for usage or
//! input errors.

pub mod cache;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arcs::{classify, ArcClassification, ArcParams};
use crate::ergodic::{
    convergence_diagnostic, oscillation_sum, ConvergenceDiagnostic, DynamicalSystem, KernelFamily,
    LacunarySequence, Observable, OscillationReport, State, TwoSided,
};
use crate::error::{Error, Result};
use crate::expsum::{exp_sum, exp_sum_grid};
use crate::rng::substream;
use crate::singular::{d_q, generic_log_polynomials, piltz_log_polynomial, LogPolynomial};
use crate::verify::{run_suite, Suite, SuiteConfig, VerificationReport, WeightChoice, WeightContext};
use crate::weights::{tau_table, MultiplicativeWeightSpec, TauTable};

use cache::{CacheStatus, Column, TableCache};
use output::{write_text, Cell, Table};
use plot::{PlotOptions, PlotStyle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Worker threads (default: logical cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Table cache directory; falls back to $HECKE_CIRCLE_CACHE_DIR.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format (default: csv for tables, json for `verify`).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// A complete, serializable description of one run.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "hecke-circle", version, about = "Circle-method tables, checks and ergodic averages")]
pub struct RunConfig {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// `N`, accepting `100000`, `1e5` or `1_000_000`.
pub fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim().replace('_', "");
    if let Ok(n) = t.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = t.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 1e15 {
        Ok(x as usize)
    } else {
        Err(format!("'{s}' is not a nonnegative integer"))
    }
}

/// `a/q` or a decimal.
pub fn parse_point(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("'{s}' is neither a/q nor a real number"));
    match s.split_once('/') {
        Some((a, q)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(Error::DivisionByZero(format!("denominator in '{s}'")));
            }
            Ok(a as f64 / q as f64)
        }
        None => s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad),
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct KindArgs {
    /// hecke2, piltz, cesaro (or piltzV / dV).
    #[arg(long, default_value = "hecke2")]
    pub kind: String,
    /// Piltz order when `--kind piltz`.
    #[arg(long)]
    pub v: Option<u32>,
}

impl KindArgs {
    pub fn choice(&self) -> Result<WeightChoice> {
        weight_choice(&self.kind, self.v)
    }
}

fn weight_choice(kind: &str, v: Option<u32>) -> Result<WeightChoice> {
    if kind.trim().eq_ignore_ascii_case("piltz") {
        let v = v.unwrap_or(2);
        if v == 0 {
            return Err(Error::Config("--v must be at least 1".into()));
        }
        return Ok(WeightChoice::Piltz(v));
    }
    let choice = WeightChoice::from_str(kind)?;
    if let (Some(v), WeightChoice::Piltz(w)) = (v, choice) {
        if v != w {
            return Err(Error::Config(format!("--kind {kind} conflicts with --v {v}")));
        }
    }
    Ok(choice)
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
pub enum Command {
    /// Weight table w(1..N) with prefix sums.
    Weights {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponential sums S_n(x) at one point or on a grid k/M.
    Expsum {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        /// a/q or a real number.
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        x: Option<String>,
        /// Grid size M (power of two).
        #[arg(long, value_parser = parse_count)]
        grid: Option<usize>,
        /// Divide by the normalizer, giving T_n(x).
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rational-point amplitudes: D_q for hecke2, log-polynomial coefficients otherwise.
    Coeffs {
        /// hecke2, piltz, generic:cesaro or generic:piltzV.
        #[arg(long, default_value = "piltz")]
        weight: String,
        #[arg(long, default_value_t = 20)]
        q_max: u64,
        #[arg(long, default_value_t = 2)]
        v: u32,
        /// Truncation tolerance of the local sums.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Table length used to estimate C_Φ for hecke2.
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Major/minor classification and φ_n at one point or on a grid.
    Arcs {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        m_const: f64,
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        x: Option<String>,
        #[arg(long, value_parser = parse_count)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verification suites; exit code 1 if any report fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_parser = parse_count, value_delimiter = ',', default_value = "1e4,1e5,1e6")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        q_max: u64,
        /// Random samples per n for the major- and minor-arc suites.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Grid size for the global φ check.
        #[arg(long, value_parser = parse_count, default_value = "4096")]
        grid_m: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        m_const: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted ergodic averages along a lacunary sequence, plus oscillation sums.
    Ergodic {
        /// rotation:<θ>, doubling or shift.
        #[arg(long)]
        system: String,
        /// hecke2, piltz, piltzV or cesaro.
        #[arg(long, default_value = "cesaro")]
        weights: String,
        #[arg(long)]
        v: Option<u32>,
        /// character:<h>, indicator:<lo>,<hi> or coordinate (shift only).
        #[arg(long)]
        observable: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 2.0)]
        rho: f64,
        #[arg(long, value_parser = parse_count, default_value = "100000")]
        n_max: usize,
        /// Blocks J for the oscillation sums (default: all that fit below n_max).
        #[arg(long)]
        blocks: Option<usize>,
        /// JSON file for the oscillation reports.
        #[arg(long)]
        oscillation_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG plot of two columns of a CSV produced by another subcommand.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        log_y: bool,
        #[arg(long)]
        scatter: bool,
        #[arg(long, default_value = "")]
        title: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// What a run produced, beyond its files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// `(table kind, N, status)` for every cache lookup.
    pub cache_events: Vec<(String, usize, CacheStatus)>,
}

struct Runner<'a> {
    global: &'a GlobalArgs,
    cache: Option<TableCache>,
    events: Vec<(String, usize, CacheStatus)>,
}

impl Runner<'_> {
    fn tau(&mut self, n: usize) -> Result<Arc<TauTable>> {
        let Some(cache) = &self.cache else {
            return Ok(Arc::new(tau_table(n)?));
        };
        // the file holds τ(1..=n); index 0 is restored on load
        let (col, status) = cache.get_or_build("tau", n, || Ok(Column::I128(tau_table(n)?.values()[1..].to_vec())))?;
        self.events.push(("tau".into(), n, status));
        let path = cache.path("tau", n);
        eprintln!("cache {}: {}", if status == CacheStatus::Hit { "hit" } else { "built" }, path.display());
        match col {
            Column::I128(v) => Ok(Arc::new(TauTable::from_values(std::iter::once(0).chain(v).collect()))),
            Column::F64(_) => Err(Error::Corruption { path, reason: "tau table stored as f64".into() }),
        }
    }

    fn context(&mut self, choice: WeightChoice, n: usize) -> Result<WeightContext> {
        match choice {
            WeightChoice::HeckeSquare => {
                let tau = self.tau(n)?;
                WeightContext::hecke(tau, n)
            }
            other => WeightContext::new(other, n),
        }
    }

    fn format(&self, default: Format) -> Format {
        self.global.format.unwrap_or(default)
    }

    fn emit(&self, table: &Table, out: Option<&Path>) -> Result<()> {
        let text = match self.format(Format::Csv) {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json()?,
        };
        write_text(out, &text)
    }
}

/// Checks that do not need any tables, so bad input fails fast.
fn validate(cmd: &Command) -> Result<()> {
    let arc_check = |eps: f64, m_const: f64, n: u64| ArcParams::new(n.max(3), eps, m_const).map(|_| ());
    match cmd {
        Command::Weights { kind, n, .. } | Command::Expsum { kind, n, .. } => {
            kind.choice()?;
            if *n == 0 {
                return Err(Error::Config("--n must be at least 1".into()));
            }
        }
        Command::Arcs { kind, n, eps, m_const, .. } => {
            kind.choice()?;
            arc_check(*eps, *m_const, *n as u64)?;
            if *n < 3 {
                return Err(Error::Config("--n must be at least 3".into()));
            }
        }
        Command::Verify { suite, kind, n_grid, eps, m_const, .. } => {
            Suite::from_str(suite)?;
            kind.choice()?;
            arc_check(*eps, *m_const, n_grid.first().copied().unwrap_or(3) as u64)?;
        }
        Command::Coeffs { tol, q_max, .. } => {
            if !(*tol > 0.0) {
                return Err(Error::Domain(format!("--tol must be positive, got {tol}")));
            }
            if *q_max == 0 {
                return Err(Error::Config("--q-max must be at least 1".into()));
            }
        }
        Command::Ergodic { rho, n_max, .. } => {
            if !(*rho > 1.0) {
                return Err(Error::Domain(format!("--rho must exceed 1, got {rho}")));
            }
            if *n_max == 0 {
                return Err(Error::Config("--n-max must be at least 1".into()));
            }
        }
        Command::Plot { .. } => {}
    }
    Ok(())
}

/// Runs one configuration inside a pool of `--threads` workers.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    validate(&config.command)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.global.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut runner = Runner {
        global: &config.global,
        cache: TableCache::resolve(config.global.cache_dir.as_deref()),
        events: Vec::new(),
    };
    let exit_code = pool.install(|| dispatch(&mut runner, &config.command))?;
    Ok(RunOutcome { exit_code, cache_events: runner.events })
}

fn dispatch(r: &mut Runner, cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Weights { kind, n, out } => {
            let ctx = r.context(kind.choice()?, *n)?;
            let w = &ctx.weights;
            let mut t = Table::new(&["k", "w", "prefix_sum"]);
            for k in 1..=*n {
                t.push(vec![k.into(), w.get(k).into(), w.prefix_sum(k).into()]);
            }
            r.emit(&t, out.as_deref())?;
        }
        Command::Expsum { kind, n, x, grid, normalized, out } => {
            let ctx = r.context(kind.choice()?, *n)?;
            let scale = if *normalized { 1.0 / ctx.normalizer(*n) } else { 1.0 };
            let points: Vec<(f64, num_complex::Complex64)> = match (x, grid) {
                (Some(x), _) => {
                    let x = parse_point(x)?;
                    vec![(x, exp_sum(&ctx.weights, x, *n)?)]
                }
                (None, Some(m)) => exp_sum_grid(&ctx.weights, *n, *m)?
                    .into_iter()
                    .enumerate()
                    .map(|(k, s)| (k as f64 / *m as f64, s))
                    .collect(),
                (None, None) => return Err(Error::Config("expsum needs --x or --grid".into())),
            };
            let mut t = Table::new(&["x", "re", "im", "abs"]);
            for (x, s) in points {
                let s = s * scale;
                t.push(vec![x.into(), s.re.into(), s.im.into(), s.norm().into()]);
            }
            r.emit(&t, out.as_deref())?;
        }
        Command::Coeffs { weight, q_max, v, tol, n, out } => {
            let t = coeffs_table(r, weight, *q_max, *v, *tol, *n)?;
            r.emit(&t, out.as_deref())?;
        }
        Command::Arcs { kind, n, eps, m_const, x, grid, out } => {
            let params = ArcParams::new(*n as u64, *eps, *m_const)?;
            let ctx = r.context(kind.choice()?, *n)?;
            let approx = ctx.approximant(*n, *m_const, params.s_max())?;
            let xs: Vec<f64> = match (x, grid) {
                (Some(x), _) => vec![parse_point(x)?],
                (None, Some(m)) if *m >= 1 => (0..*m).map(|k| k as f64 / *m as f64).collect(),
                _ => return Err(Error::Config("arcs needs --x or a positive --grid".into())),
            };
            let mut t = Table::new(&["x", "arc_type", "a", "q", "phi_re", "phi_im"]);
            for x in xs {
                let phi = approx.phi(x);
                let (kind, a, q) = match classify(x, &params) {
                    ArcClassification::Major { a, q } => ("major", Cell::from(a), Cell::from(q)),
                    ArcClassification::Minor => ("minor", Cell::Empty, Cell::Empty),
                };
                t.push(vec![x.into(), kind.into(), a, q, phi.re.into(), phi.im.into()]);
            }
            r.emit(&t, out.as_deref())?;
        }
        Command::Verify { suite, kind, n_grid, q_max, samples, grid_m, eps, m_const, out } => {
            let suite = Suite::from_str(suite)?;
            let cfg = SuiteConfig {
                n_grid: n_grid.clone(),
                q_max: *q_max,
                sample_size: *samples,
                grid_m: *grid_m,
                seed: r.global.seed,
                eps: *eps,
                m_const: *m_const,
                record_timing: false,
            };
            let n_max = *n_grid.last().ok_or_else(|| Error::Config("empty --n-grid".into()))?;
            let ctx = r.context(kind.choice()?, n_max)?;
            let reports = run_suite(suite, &ctx, &cfg)?;
            let text = match r.format(Format::Json) {
                Format::Json => output::to_json(&reports)?,
                Format::Csv => reports_table(&reports).to_csv(),
            };
            write_text(out.as_deref(), &text)?;
            for rep in &reports {
                eprintln!("{} {} {}", if rep.pass { "PASS" } else { "FAIL" }, rep.test_id, rep.kind);
            }
            if reports.iter().any(|rep| !rep.pass) {
                return Ok(EXIT_VERIFICATION_FAILED);
            }
        }
        Command::Ergodic { system, weights, v, observable, x0, rho, n_max, blocks, oscillation_out, out } => {
            let run = ergodic_run(r, system, weights, *v, observable.as_deref(), *x0, *rho, *n_max, *blocks)?;
            let mut t = Table::new(&["N", "average_re", "average_im"]);
            for (n, (re, im)) in run.diagnostic.lengths.iter().zip(&run.diagnostic.averages) {
                t.push(vec![(*n).into(), (*re).into(), (*im).into()]);
            }
            match r.format(Format::Csv) {
                Format::Csv => write_text(out.as_deref(), &t.to_csv())?,
                Format::Json => write_text(out.as_deref(), &output::to_json(&run)?)?,
            }
            if let Some(path) = oscillation_out {
                write_text(Some(path), &output::to_json(&run.oscillation)?)?;
            }
        }
        Command::Plot { input, x, y, log_x, log_y, scatter, title, out } => {
            let table = output::parse_csv(&std::fs::read_to_string(input)?)?;
            let xs = table.column(x)?;
            let ys = table.column(y)?;
            let opts = PlotOptions {
                title: title.clone(),
                x_label: x.clone(),
                y_label: y.clone(),
                log_x: *log_x,
                log_y: *log_y,
                style: if *scatter { PlotStyle::Scatter } else { PlotStyle::Line },
                ..PlotOptions::default()
            };
            let series: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
            plot::emit_plot(&series, out, &opts)?;
        }
    }
    Ok(EXIT_OK)
}

fn reports_table(reports: &[VerificationReport]) -> Table {
    let mut t = Table::new(&["test_id", "kind", "n", "statistic", "max_error", "pass"]);
    for rep in reports {
        for m in &rep.metrics {
            t.push(vec![
                rep.test_id.as_str().into(),
                rep.kind.to_string().as_str().into(),
                m.n.into(),
                m.statistic.into(),
                m.max_error.into(),
                if rep.pass { "true" } else { "false" }.into(),
            ]);
        }
    }
    t
}

/// Named generic specs accepted by `coeffs --weight generic:<id>`.
pub fn generic_spec(id: &str) -> Result<MultiplicativeWeightSpec> {
    if id == "cesaro" {
        return Ok(MultiplicativeWeightSpec::cesaro());
    }
    if let Some(v) = id.strip_prefix("piltz") {
        let v: u32 = v.parse().map_err(|_| Error::Config(format!("bad generic spec '{id}'")))?;
        return MultiplicativeWeightSpec::piltz(v);
    }
    Err(Error::Config(format!("unknown generic spec '{id}' (known: cesaro, piltzV)")))
}

fn coeffs_table(r: &mut Runner, weight: &str, q_max: u64, v: u32, tol: f64, n: usize) -> Result<Table> {
    let log_rows = |polys: &mut dyn FnMut(u64) -> Result<LogPolynomial>| -> Result<Table> {
        let mut t = Table::new(&["q", "i", "coeff"]);
        for q in 1..=q_max {
            for (i, c) in polys(q)?.ascending().into_iter().enumerate() {
                t.push(vec![q.into(), i.into(), c.into()]);
            }
        }
        Ok(t)
    };
    if let Some(id) = weight.strip_prefix("generic:") {
        let spec = generic_spec(id)?;
        return log_rows(&mut |q| Ok(generic_log_polynomials(&spec, q)?.1));
    }
    match weight_choice(weight, Some(v))? {
        WeightChoice::HeckeSquare => {
            let tau = r.tau(n)?;
            let c_phi = WeightContext::hecke(tau.clone(), n)?.c_phi.unwrap_or_default();
            let lam = |p: u64| tau.lambda(p as usize);
            let mut t = Table::new(&["q", "Dq"]);
            for q in 1..=q_max {
                t.push(vec![q.into(), d_q(q, c_phi, &lam, tol).value.into()]);
            }
            Ok(t)
        }
        WeightChoice::Piltz(v) => log_rows(&mut |q| piltz_log_polynomial(v, q)),
        WeightChoice::Cesaro => log_rows(&mut |q| Ok(generic_log_polynomials(&MultiplicativeWeightSpec::cesaro(), q)?.1)),
    }
}

/// Averages and oscillation reports of one `ergodic` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicRun {
    pub system: String,
    pub weights: String,
    pub observable: String,
    pub diagnostic: ConvergenceDiagnostic,
    pub oscillation: Vec<OscillationReport>,
}

pub fn parse_system(s: &str, seed: u64) -> Result<DynamicalSystem> {
    let s = s.trim();
    if let Some(theta) = s.strip_prefix("rotation:") {
        return Ok(DynamicalSystem::Rotation { theta: parse_point(theta)? });
    }
    match s {
        "doubling" => Ok(DynamicalSystem::Doubling { seed }),
        "shift" => Ok(DynamicalSystem::IntegerShift),
        _ => Err(Error::Config(format!("unknown system '{s}' (rotation:<θ>, doubling, shift)"))),
    }
}

pub fn parse_observable(s: &str) -> Result<Observable> {
    let s = s.trim();
    let bad = || Error::Config(format!("bad observable '{s}'"));
    if let Some(h) = s.strip_prefix("character:") {
        return Ok(Observable::Character(h.trim().parse().map_err(|_| bad())?));
    }
    if let Some(range) = s.strip_prefix("indicator:") {
        let (lo, hi) = range.split_once(',').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let f = Observable::Indicator { lo, hi };
        f.validate()?;
        return Ok(f);
    }
    if s == "coordinate" {
        return Ok(Observable::Coordinate);
    }
    Err(bad())
}

/// Uniform `[−1, 1]` values on `[1, n]`, the shift system's starting sequence.
pub fn random_sequence(seed: u64, n: usize) -> TwoSided {
    let mut rng = substream(seed, 0);
    TwoSided::new(1, (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

#[allow(clippy::too_many_arguments)]
fn ergodic_run(
    r: &mut Runner,
    system: &str,
    weights: &str,
    v: Option<u32>,
    observable: Option<&str>,
    x0: f64,
    rho: f64,
    n_max: usize,
    blocks: Option<usize>,
) -> Result<ErgodicRun> {
    let seed = r.global.seed;
    let sys = parse_system(system, seed)?;
    let shift = matches!(sys, DynamicalSystem::IntegerShift);
    let f = parse_observable(observable.unwrap_or(if shift { "coordinate" } else { "character:1" }))?;
    let ctx = r.context(weight_choice(weights, v)?, n_max)?;
    let (state, g) = if shift {
        let z = random_sequence(seed, n_max);
        (State::Sequence(z.clone()), z)
    } else {
        let orbit = sys.orbit(x0, n_max)?;
        let g: Vec<f64> = orbit.iter().map(|&y| f.at_point(y).map(|c| c.re)).collect::<Result<_>>()?;
        (State::Point(x0), TwoSided::new(1, g))
    };
    let diagnostic = convergence_diagnostic(&sys, &ctx.weights, &f, &state, rho, n_max)?;
    let lac = LacunarySequence::new(rho, n_max)?;
    let available = lac.blocks.len().saturating_sub(1);
    let j_count = blocks.unwrap_or(available);
    let mut oscillation = Vec::new();
    if j_count > 0 {
        for family in [KernelFamily::Weighted(ctx.weights.clone()), KernelFamily::Cesaro] {
            oscillation.push(oscillation_sum(&g, &family, &lac, j_count)?);
        }
    }
    Ok(ErgodicRun {
        system: system.to_string(),
        weights: ctx.choice.to_string(),
        observable: format!("{f:?}"),
        diagnostic,
        oscillation,
    })
}

/// Parses `args` (including the program name) and runs them. Usage errors
/// print clap's message and return [`EXIT_USAGE`].
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(outcome) => outcome.exit_code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_points_parse() {
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert_eq!(parse_count("1_000"), Ok(1000));
        assert!(parse_count("1.5").is_err());
        let cfg = RunConfig::try_parse_from(["hecke-circle", "verify", "--n-grid", "1e4,3e5"]).unwrap();
        assert!(matches!(cfg.command, Command::Verify { ref n_grid, .. } if n_grid == &[10_000, 300_000]));
        assert_eq!(parse_point("3/8").unwrap(), 0.375);
        assert_eq!(parse_point("0.25").unwrap(), 0.25);
        assert!(parse_point("1/0").is_err());
        assert!(parse_point("x").is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::try_parse_from(["hecke-circle", "--seed", "7", "weights", "--kind", "piltz", "--v", "3", "--n", "100"])
            .unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.global.seed, 7);
    }

    #[test]
    fn bad_eps_is_a_usage_error() {
        let code = main_with_args(["hecke-circle", "arcs", "--n", "1000", "--eps", "0.7", "--x", "0.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(main_with_args(["hecke-circle", "frobnicate"]), EXIT_USAGE);
    }

    #[test]
    fn kinds_and_observables() {
        assert_eq!(weight_choice("piltz", Some(3)).unwrap(), WeightChoice::Piltz(3));
        assert!(weight_choice("piltz4", Some(3)).is_err());
        assert!(matches!(parse_observable("indicator:0.1,0.3").unwrap(), Observable::Indicator { .. }));
        assert!(parse_observable("indicator:0.1").is_err());
        assert!(matches!(parse_system("rotation:1/3", 0).unwrap(), DynamicalSystem::Rotation { .. }));
        assert!(generic_spec("piltz3").is_ok() && generic_spec("zeta").is_err());
    }
}
