//! Command-line front end: bound sweeps, simulations, and their comparison,
//! written as CSV with a self-describing comment header.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bounds::{sweep, BoundsError, BoundsRow, ChannelParams};
use crate::code::{builtin, Code, CodeError};
use crate::codefile::{load_code, CodeFileError};
use crate::sim::{
    binomial_se, run_grid, z_score, SimConfig, SimError, SimResult, Transmit, DEFAULT_TRIALS,
};
use crate::specfun::QuadratureSpec;

/// Simulated rates more than this many standard errors above a bound are
/// flagged as violations.
pub const VIOLATION_Z: f64 = 3.0;

const DEFAULT_GRID_POINTS: usize = 60;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Capacity(_) => 4,
        }
    }
}

impl From<CodeFileError> for CliError {
    fn from(e: CodeFileError) -> Self {
        match e {
            CodeFileError::Code(c) => c.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Bounds(b) => CliError::Numeric(b.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bdbound", version, about = "Bounded-distance decoder error-rate bounds and simulation on the AWGN channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the P_w and P_u bounds over a grid of decoding radii.
    Bounds(BoundsArgs),
    /// Monte Carlo simulation of the bounded-distance decoder.
    Simulate(SimulateArgs),
    /// Bounds and simulation side by side, with violation flags.
    Compare(SimulateArgs),
    /// Print n, k, d_min and the weight enumerator of a code.
    Codeinfo(CodeinfoArgs),
}

/// Inclusive, evenly spaced grid `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(format!("expected lo:hi:count, got `{s}`"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad grid start `{lo}`"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad grid end `{hi}`"))?;
        let count: usize = count.parse().map_err(|_| format!("bad grid count `{count}`"))?;
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 {
            return Err("grid endpoints must be finite and nonnegative".into());
        }
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        if count > 1 && !(hi > lo) {
            return Err("grid end must exceed grid start".into());
        }
        Ok(Self { lo, hi, count })
    }
}

/// A single radius or a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusArg {
    Single(f64),
    Grid(GridSpec),
}

impl RadiusArg {
    fn points(&self) -> Vec<f64> {
        match self {
            RadiusArg::Single(r) => vec![*r],
            RadiusArg::Grid(g) => g.points(),
        }
    }
}

impl FromStr for RadiusArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            return s.parse().map(RadiusArg::Grid);
        }
        let r: f64 = s.parse().map_err(|_| format!("bad radius `{s}`"))?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err("radius must be finite and nonnegative".into());
        }
        Ok(RadiusArg::Single(r))
    }
}

fn parse_radius(s: &str) -> Result<f64, String> {
    match s.parse()? {
        RadiusArg::Single(r) => Ok(r),
        RadiusArg::Grid(_) => Err("use --rd-grid for grids".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive integer or `auto`, got `{s}`")),
            Ok(n) => Ok(Threads::Count(n)),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Code source: `builtin:hamming84`, `builtin:ldpc128`, or a code file path.
    #[arg(long)]
    pub code: String,
    /// Bit signal-to-noise ratio E_b/N_0 in dB.
    #[arg(long = "ebn0-db", allow_negative_numbers = true)]
    pub ebn0_db: f64,
    /// Single decoding radius in signal-space units.
    #[arg(long, value_parser = parse_radius, group = "radius")]
    pub rd: Option<f64>,
    /// Radius grid `lo:hi:count` in signal-space units (inclusive, linear).
    #[arg(long = "rd-grid", group = "radius")]
    pub rd_grid: Option<GridSpec>,
    /// Radius or `lo:hi:count` grid normalized by sqrt(n).
    #[arg(long = "rd-norm", group = "radius")]
    pub rd_norm: Option<RadiusArg>,
    /// Quadrature relative tolerance.
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    /// Worker threads (`auto` or a positive count). Results do not depend on it.
    #[arg(long, default_value = "auto")]
    pub threads: Threads,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransmitArg {
    /// Always send the all-zero codeword.
    Zero,
    /// Send a uniformly random codeword each trial.
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Trials per radius. All radii share the same noise realizations.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TransmitArg::Zero)]
    pub transmit: TransmitArg,
}

#[derive(Debug, Clone, Args)]
pub struct CodeinfoArgs {
    /// Code source (positional form).
    #[arg(conflicts_with = "code")]
    pub source: Option<String>,
    /// Code source.
    #[arg(long)]
    pub code: Option<String>,
}

/// Resolves `builtin:<name>` or a file path.
pub fn load_source(source: &str) -> Result<Code, CliError> {
    match source.strip_prefix("builtin:") {
        Some(name) => Ok(builtin(name)?),
        None => Ok(load_code(source)?),
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote_arg(a: &str) -> String {
    if !a.is_empty() && a.chars().all(|c| c.is_ascii_alphanumeric() || "-_.:/=+,".contains(c)) {
        a.to_string()
    } else {
        format!("'{}'", a.replace('\'', r"'\''"))
    }
}

fn timestamp() -> String {
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        return format!("{} (SOURCE_DATE_EPOCH)", epoch.trim());
    }
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("{secs} (unix seconds)")
}

/// Resolved parameters of one invocation, emitted as `# key: value` lines.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub command_line: String,
    pub params: Vec<(String, String)>,
}

impl RunManifest {
    fn new(subcommand: &'static str, argv: &[String]) -> Self {
        let program = argv
            .first()
            .and_then(|a| std::path::Path::new(a).file_name())
            .map_or_else(|| "bdbound".to_string(), |f| f.to_string_lossy().into_owned());
        let command_line = std::iter::once(program)
            .chain(argv.iter().skip(1).map(|a| quote_arg(a)))
            .collect::<Vec<_>>()
            .join(" ");
        Self { subcommand, command_line, params: Vec::new() }
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# bdbound {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# subcommand: {}", self.subcommand);
        let _ = writeln!(out, "# command: {}", self.command_line);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "# timestamp: {}", timestamp());
        out
    }
}

struct Setup {
    code: Code,
    channel: ChannelParams<f64>,
    radii: Vec<f64>,
    quad: QuadratureSpec<f64>,
}

fn setup(common: &CommonArgs, manifest: &mut RunManifest) -> Result<Setup, CliError> {
    let code = load_source(&common.code)?;
    let n = code.n();
    let channel = ChannelParams::new(common.ebn0_db, code.rate(), n).map_err(|e| CliError::Usage(e.to_string()))?;
    let sqrt_n = (n as f64).sqrt();
    let (radii, radius_desc) = if let Some(r) = common.rd {
        (vec![r], format!("{r}"))
    } else if let Some(g) = common.rd_grid {
        (g.points(), format!("grid {}:{}:{}", g.lo, g.hi, g.count))
    } else if let Some(norm) = common.rd_norm {
        let pts = norm.points().into_iter().map(|r| r * sqrt_n).collect();
        let desc = match norm {
            RadiusArg::Single(r) => format!("{r} * sqrt(n)"),
            RadiusArg::Grid(g) => format!("grid {}:{}:{} * sqrt(n)", g.lo, g.hi, g.count),
        };
        (pts, desc)
    } else {
        let g = GridSpec {
            lo: 0.5 * (code.weight_enumerator().d_min() as f64).sqrt(),
            hi: 1.5 * sqrt_n,
            count: DEFAULT_GRID_POINTS,
        };
        (g.points(), format!("default grid {}:{}:{}", g.lo, g.hi, g.count))
    };
    let mut quad = QuadratureSpec::default();
    if let Some(rel) = common.rel_tol {
        quad = quad.with_rel_tol(rel).map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let we = code.weight_enumerator();
    manifest.set("code", format!("{} ({}, n={}, k={}, d_min={})", common.code, code.name(), n, code.k(), we.d_min()));
    manifest.set("ebn0_db", common.ebn0_db);
    manifest.set("rate", code.rate());
    manifest.set("sigma", fmt_f(channel.sigma()));
    manifest.set("r_d", format!("{radius_desc} ({} points)", radii.len()));
    manifest.set(
        "quadrature",
        format!("rel_tol={:e} abs_tol={:e} max_subdivisions={}", quad.rel_tol, quad.abs_tol, quad.max_subdivisions),
    );
    manifest.set(
        "threads",
        match common.threads {
            Threads::Auto => "auto".to_string(),
            Threads::Count(c) => c.to_string(),
        },
    );
    if we.is_truncated() {
        manifest.set(
            "truncated-enumerator",
            "yes; bounds use only the listed low-weight terms and are neither exact nor certified upper bounds",
        );
    }
    Ok(Setup { code, channel, radii, quad })
}

fn with_threads<R: Send>(threads: Threads, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Threads::Count(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn bound_rows(s: &Setup, threads: Threads) -> Result<Vec<Result<BoundsRow<f64>, BoundsError>>, CliError> {
    let we = s.code.weight_enumerator();
    with_threads(threads, || sweep(&s.channel, we, &s.radii, &s.quad))?
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn numeric_failures(rows: &[Result<BoundsRow<f64>, BoundsError>], radii: &[f64], out: &mut String) -> Vec<String> {
    let mut failures = Vec::new();
    for (row, r) in rows.iter().zip(radii) {
        if let Err(e) = row {
            let msg = format!("numeric failure at r_d={r}: {e}");
            let _ = writeln!(out, "# error: {msg}");
            failures.push(msg);
        }
    }
    failures
}

fn cmd_bounds(args: &BoundsArgs, argv: &[String]) -> Result<(String, Option<CliError>), CliError> {
    let mut manifest = RunManifest::new("bounds", argv);
    let s = setup(&args.common, &mut manifest)?;
    let rows = bound_rows(&s, args.common.threads)?;

    let mut out = manifest.render();
    out.push_str("r_d,p_tot_gt,p_u_lt,p_u_gt,p_w_bound,p_u_bound\n");
    for row in rows.iter().flatten() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f(row.r_d),
            fmt_f(row.p_tot_gt),
            fmt_f(row.p_u_lt),
            fmt_f(row.p_u_gt),
            fmt_f(row.p_w),
            fmt_f(row.p_u)
        );
    }
    let failures = numeric_failures(&rows, &s.radii, &mut out);
    let err = (!failures.is_empty()).then(|| CliError::Numeric(failures.join("\n")));
    Ok((out, err))
}

fn simulation(args: &SimulateArgs, s: &Setup, manifest: &mut RunManifest) -> Result<Vec<SimResult>, CliError> {
    let linear = s.code.linear().ok_or_else(|| {
        CliError::Capacity(format!(
            "code `{}` has no enumerable codeword list (enumerator only); simulation needs a generator matrix with k <= 24",
            s.code.name()
        ))
    })?;
    let mut cfg = SimConfig::new(args.trials, args.seed, 0.0, s.channel);
    cfg.transmit = match args.transmit {
        TransmitArg::Zero => Transmit::AllZero,
        TransmitArg::Random => Transmit::RandomCodeword,
    };
    manifest.set("trials", args.trials);
    manifest.set("seed", args.seed);
    manifest.set("batch_size", cfg.batch_size);
    manifest.set(
        "transmit",
        match cfg.transmit {
            Transmit::AllZero => "all-zero codeword",
            Transmit::RandomCodeword => "uniformly random codeword",
        },
    );
    manifest.set("noise", "ChaCha8 stream addressed by (seed, trial), Box-Muller normals; radii share noise");
    manifest.set("confidence", "Wilson score interval half-widths at 95%");
    Ok(with_threads(args.common.threads, || run_grid(linear, &cfg, &s.radii))??)
}

fn cmd_simulate(args: &SimulateArgs, argv: &[String]) -> Result<(String, Option<CliError>), CliError> {
    let mut manifest = RunManifest::new("simulate", argv);
    let s = setup(&args.common, &mut manifest)?;
    let results = simulation(args, &s, &mut manifest)?;

    let mut out = manifest.render();
    out.push_str("r_d,trials,correct,undetected,failure,p_c,p_u,p_f,p_w,ci_u,ci_w\n");
    for r in &results {
        let c = r.counts;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f(r.r_d),
            c.trials,
            c.correct,
            c.undetected,
            c.failure,
            fmt_f(r.p_c),
            fmt_f(r.p_u),
            fmt_f(r.p_f),
            fmt_f(r.p_w),
            fmt_f(r.ci_u.half_width),
            fmt_f(r.ci_w.half_width)
        );
    }
    Ok((out, None))
}

/// Outcome of checking one simulated point against its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub p_w_violation: bool,
    pub p_u_violation: bool,
    /// z-score of the simulated noise-radius exceedance against the exact term.
    pub z_tot: f64,
    pub p_tot_gt_mismatch: bool,
}

/// A simulated rate violates its bound when it exceeds it by more than
/// [`VIOLATION_Z`] binomial standard errors, the error evaluated at the bound
/// (clipped to 1). The exact term is checked two-sided.
pub fn check_point(bound: &BoundsRow<f64>, sim: &SimResult) -> PointCheck {
    let n = sim.counts.trials;
    let exceeds = |observed: f64, limit: f64| observed > limit + VIOLATION_Z * binomial_se(limit.min(1.0), n);
    let z_tot = z_score(sim.p_tot_gt, bound.p_tot_gt, n);
    PointCheck {
        p_w_violation: exceeds(sim.p_w, bound.p_w),
        p_u_violation: exceeds(sim.p_u, bound.p_u),
        z_tot,
        p_tot_gt_mismatch: z_tot.abs() > VIOLATION_Z,
    }
}

fn cmd_compare(args: &SimulateArgs, argv: &[String]) -> Result<(String, Option<CliError>), CliError> {
    let mut manifest = RunManifest::new("compare", argv);
    let s = setup(&args.common, &mut manifest)?;
    let sims = simulation(args, &s, &mut manifest)?;
    let rows = bound_rows(&s, args.common.threads)?;
    manifest.set("violation", format!("simulated > bound + {VIOLATION_Z} standard errors (p_w, p_u); |z| > {VIOLATION_Z} for p_tot_gt"));

    let mut out = manifest.render();
    out.push_str(
        "r_d,p_tot_gt,p_u_lt,p_u_gt,p_w_bound,p_u_bound,trials,correct,undetected,failure,p_u,p_f,p_w,ci_u,ci_w,p_tot_gt_sim,z_tot,violation,tot_mismatch\n",
    );
    let (mut vw, mut vu, mut vt) = (0, 0, 0);
    for (row, sim) in rows.iter().zip(&sims) {
        let Ok(b) = row else { continue };
        let chk = check_point(b, sim);
        vw += usize::from(chk.p_w_violation);
        vu += usize::from(chk.p_u_violation);
        vt += usize::from(chk.p_tot_gt_mismatch);
        let c = sim.counts;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f(b.r_d),
            fmt_f(b.p_tot_gt),
            fmt_f(b.p_u_lt),
            fmt_f(b.p_u_gt),
            fmt_f(b.p_w),
            fmt_f(b.p_u),
            c.trials,
            c.correct,
            c.undetected,
            c.failure,
            fmt_f(sim.p_u),
            fmt_f(sim.p_f),
            fmt_f(sim.p_w),
            fmt_f(sim.ci_u.half_width),
            fmt_f(sim.ci_w.half_width),
            fmt_f(sim.p_tot_gt),
            format!("{:.6}", chk.z_tot),
            u8::from(chk.p_w_violation || chk.p_u_violation),
            u8::from(chk.p_tot_gt_mismatch)
        );
    }
    let failures = numeric_failures(&rows, &s.radii, &mut out);
    let _ = writeln!(
        out,
        "# summary: points={} p_w_violations={vw} p_u_violations={vu} p_tot_gt_mismatches={vt}",
        rows.len() - failures.len()
    );
    let err = (!failures.is_empty()).then(|| CliError::Numeric(failures.join("\n")));
    Ok((out, err))
}

fn cmd_codeinfo(args: &CodeinfoArgs) -> Result<String, CliError> {
    let source = args
        .source
        .as_deref()
        .or(args.code.as_deref())
        .ok_or_else(|| CliError::Usage("codeinfo needs a code source".into()))?;
    let code = load_source(source)?;
    let we = code.weight_enumerator();
    let mut out = String::new();
    let _ = writeln!(out, "code: {}", code.name());
    let _ = writeln!(out, "source: {source}");
    let _ = writeln!(out, "n: {}", code.n());
    let _ = writeln!(out, "k: {}", code.k());
    let _ = writeln!(out, "rate: {}", code.rate());
    let _ = writeln!(out, "d_min: {}", we.d_min());
    let _ = writeln!(out, "truncated: {}", if we.is_truncated() { "yes" } else { "no" });
    let last = if we.is_truncated() { we.nonzero_terms().last().map_or(0, |(w, _)| w) } else { we.n() };
    let listed: Vec<String> = we.coeffs()[..=last].iter().map(u128::to_string).collect();
    let tail = if we.is_truncated() { ",..." } else { "" };
    let _ = writeln!(out, "A_w (w=0..{last}): {}{tail}", listed.join(","));
    Ok(out)
}

/// Runs one invocation. `argv` is recorded verbatim in the manifest.
/// Returns the process exit code.
pub fn run(cli: &Cli, argv: &[String]) -> i32 {
    let result = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, argv).map(|r| (r, a.common.output.clone())),
        Command::Simulate(a) => cmd_simulate(a, argv).map(|r| (r, a.common.output.clone())),
        Command::Compare(a) => cmd_compare(a, argv).map(|r| (r, a.common.output.clone())),
        Command::Codeinfo(a) => cmd_codeinfo(a).map(|s| ((s, None), None)),
    };
    let ((text, deferred), output) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &output {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match deferred {
        Some(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        None => 0,
    }
}
