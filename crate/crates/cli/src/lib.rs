//! Command-line front end for `tropical-regions`.
//!
//! [`run`] parses arguments, executes one subcommand and writes its report;
//! [`execute`] does the work for an already-parsed [`Cli`].

pub mod report;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tropical_regions::bounds::{
    conv_layer_bound, maxout_layer_bound, rank_two_bounds, relu_layer_bound, zonotope_face_bound, BoundReport,
};
use tropical_regions::layer_file::{generate_layer, parse_layer, GenKind};
use tropical_regions::oracle::{
    count_arrangement_regions, count_by_input_sampling, count_regions_exact, DEFAULT_INPUT_SCALE,
};
use tropical_regions::sampler::{layer_angles, sample_layer_configurations, SampleMode, SamplePlan};
use tropical_regions::{Error, LayerSpec, Result, DEFAULT_ENUMERATION_CAP, DEFAULT_TOL};

pub use report::{AngleReport, Entry, RunReport, VertexAngle, CSV_HEADER};

/// Overrides `--threads` when set.
pub const THREADS_ENV: &str = "TROPICAL_REGIONS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tropical-regions", version, about = "Count and bound the linear regions of piecewise-linear layers")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every randomized method.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for ties and LP margins.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Largest number of configurations enumerated before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
    /// Failure probability used for sample-size calculations.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub delta: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form region bounds.
    Bounds(BoundsArgs),
    /// Count the regions of a layer file.
    #[command(subcommand)]
    Count(CountCommand),
    /// Estimate the normal-cone angles of a layer's sum polytope.
    Angles {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Write a random layer file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Relu,
    Lrelu,
    Maxout,
    Conv,
    Zonotope,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    /// Input dimension.
    #[arg(short)]
    pub n: Option<u64>,
    /// Number of units, or of zonotope generators.
    #[arg(short)]
    pub m: Option<u64>,
    /// Maxout rank or convolution filter size.
    #[arg(short)]
    pub k: Option<u64>,
    /// Image side, or zonotope ambient dimension.
    #[arg(short)]
    pub d: Option<u64>,
    /// Convolution padding.
    #[arg(short, default_value_t = 0)]
    pub p: u64,
    /// Zonotope face dimension.
    #[arg(short, default_value_t = 0)]
    pub i: u64,
}

#[derive(Debug, Subcommand)]
pub enum CountCommand {
    /// Enumerate every configuration and test it with an LP.
    Exact { file: PathBuf },
    /// Count hyperplane-arrangement cells (rank-2 units only).
    Arrangement { file: PathBuf },
    /// Randomized vertex sampling on the layer's polytopes.
    Sample {
        file: PathBuf,
        #[arg(short = 'K', long = "samples")]
        samples: usize,
        /// Count region-defining vertices (the default).
        #[arg(long, conflicts_with = "full")]
        upper: bool,
        /// Count all vertices of the sum polytope.
        #[arg(long)]
        full: bool,
    },
    /// Distinct activation patterns over random inputs.
    InputSample {
        file: PathBuf,
        #[arg(short = 'K', long = "samples")]
        samples: usize,
        /// Standard deviation of the Gaussian inputs.
        #[arg(long, default_value_t = DEFAULT_INPUT_SCALE)]
        scale: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenUnit {
    Relu,
    Lrelu,
    Maxout,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenUnit,
    #[arg(short)]
    pub n: usize,
    #[arg(short)]
    pub m: usize,
    /// Maxout rank.
    #[arg(short, default_value_t = 2)]
    pub k: usize,
    /// Leaky ReLU slope.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Output path; the layer is printed when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Report(RunReport),
    Layer(String),
}

/// Exit status for a library error: 3 for the enumeration cap, 1 for solver
/// failures, 2 for everything caused by bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Solver { .. } => 1,
        _ => 2,
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn require(v: Option<u64>, flag: &str, kind: &str) -> Result<u64> {
    v.ok_or_else(|| invalid(format!("--kind {kind} requires -{flag}")))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64() * 1e3))
}

fn bound_entries(args: &BoundsArgs) -> Result<Vec<Entry>> {
    let bound = |name: &str, r: &BoundReport, ms: f64| Entry { elapsed_ms: ms, ..Entry::new(name).with_bound(r) };
    Ok(match args.kind {
        BoundKind::Relu | BoundKind::Lrelu => {
            let name = if args.kind == BoundKind::Relu { "relu" } else { "lrelu" };
            let n = require(args.n, "n", name)?;
            let m = require(args.m, "m", name)?;
            let (r, ms) = timed(|| relu_layer_bound(n, m))?;
            vec![bound(&format!("{name}_bound"), &r, ms)]
        }
        BoundKind::Maxout => {
            let n = require(args.n, "n", "maxout")?;
            let m = require(args.m, "m", "maxout")?;
            let k = require(args.k, "k", "maxout")?;
            if k == 2 {
                let (both, ms) = timed(|| rank_two_bounds(n, m))?;
                both.iter().map(|(label, r)| bound(&format!("{label}_bound"), r, ms)).collect()
            } else {
                let (r, ms) = timed(|| maxout_layer_bound(n, m, k))?;
                vec![bound("maxout_bound", &r, ms)]
            }
        }
        BoundKind::Conv => {
            let d = require(args.d, "d", "conv")?;
            let k = require(args.k, "k", "conv")?;
            let (r, ms) = timed(|| conv_layer_bound(d, k, args.p))?;
            vec![bound("conv_bound", &r, ms)]
        }
        BoundKind::Zonotope => {
            let m = require(args.m, "m", "zonotope")?;
            let d = require(args.d, "d", "zonotope")?;
            let (b, ms) = timed(|| zonotope_face_bound(m, d, args.i))?;
            vec![Entry { bound: Some(b.to_string()), elapsed_ms: ms, ..Entry::new("zonotope_face_bound") }]
        }
    })
}

/// The closed-form bound matching a layer's largest unit rank, if any.
fn layer_bound(layer: &LayerSpec) -> Option<BoundReport> {
    let n = layer.input_dim() as u64;
    let m = layer.num_units() as u64;
    match layer.ranks().into_iter().max()? {
        0 | 1 => None,
        2 => relu_layer_bound(n, m).ok(),
        k => maxout_layer_bound(n, m, k as u64).ok(),
    }
}

fn with_layer_bound(entry: Entry, layer: &LayerSpec) -> Entry {
    match layer_bound(layer) {
        Some(r) => entry.with_bound(&r),
        None => entry,
    }
}

fn count_entries(cmd: &CountCommand, g: &GlobalArgs) -> Result<Vec<Entry>> {
    match cmd {
        CountCommand::Exact { file } => {
            let layer = parse_layer(file)?;
            let (c, ms) = timed(|| count_regions_exact(&layer, g.tol, g.cap))?;
            let e = Entry {
                count: Some(c.count as u64),
                degenerate: Some(c.degenerate as u64),
                elapsed_ms: ms,
                ..Entry::new("exact")
            };
            Ok(vec![with_layer_bound(e, &layer)])
        }
        CountCommand::Arrangement { file } => {
            let layer = parse_layer(file)?;
            let (c, ms) = timed(|| count_arrangement_regions(&layer, g.tol))?;
            let e = Entry {
                count: Some(c.count as u64),
                degenerate: Some(c.degenerate as u64),
                elapsed_ms: ms,
                ..Entry::new("arrangement")
            };
            Ok(vec![with_layer_bound(e, &layer)])
        }
        CountCommand::Sample { file, samples, full, .. } => {
            let layer = parse_layer(file)?;
            let mode = if *full { SampleMode::Full } else { SampleMode::Upper };
            let plan = SamplePlan::new(*samples, g.delta, mode, g.seed)?;
            let (r, ms) = timed(|| sample_layer_configurations(&layer, &plan, g.tol))?;
            let method = if *full { "sample_full" } else { "sample_upper" };
            let e = Entry {
                count: Some(r.count() as u64),
                degenerate: Some(r.degenerate as u64),
                seed: Some(g.seed),
                k: Some(*samples as u64),
                delta: Some(g.delta),
                elapsed_ms: ms,
                ..Entry::new(method)
            };
            Ok(vec![if *full { e } else { with_layer_bound(e, &layer) }])
        }
        CountCommand::InputSample { file, samples, scale } => {
            let layer = parse_layer(file)?;
            let (c, ms) = timed(|| count_by_input_sampling(&layer, *samples, g.seed, *scale, g.tol))?;
            let e = Entry {
                count: Some(c as u64),
                seed: Some(g.seed),
                k: Some(*samples as u64),
                elapsed_ms: ms,
                ..Entry::new("input_sample")
            };
            Ok(vec![with_layer_bound(e, &layer)])
        }
    }
}

fn sample_size(r: Result<usize>) -> Result<Option<u64>> {
    match r {
        Ok(k) => Ok(Some(k as u64)),
        Err(Error::UnboundedSamples { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn angles_report(file: &PathBuf, samples: usize, g: &GlobalArgs) -> Result<(Vec<Entry>, AngleReport)> {
    let layer = parse_layer(file)?;
    let (a, ms) = timed(|| layer_angles(&layer, samples, g.seed, g.tol, g.cap))?;
    let s = &a.spectrum;
    let vertices = a
        .polytope
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let configuration = a.upper.iter().position(|&u| u == i).map(|j| a.upper_configurations[j].0.clone());
            VertexAngle {
                point: p.clone(),
                upper: configuration.is_some(),
                configuration,
                full: s.full[i],
                full_stderr: s.full_stderr[i],
                truncated: s.truncated[i],
                truncated_stderr: s.truncated_stderr[i],
            }
        })
        .collect();
    let entry = |method: &str, count: usize, k: Option<u64>| Entry {
        count: Some(count as u64),
        seed: Some(g.seed),
        k,
        delta: Some(g.delta),
        elapsed_ms: ms,
        ..Entry::new(method)
    };
    let entries = vec![
        entry("angles_full", a.polytope.len(), sample_size(a.required_samples_full(g.delta))?),
        entry("angles_upper", a.upper.len(), sample_size(a.required_samples_upper(g.delta))?),
    ];
    let report = AngleReport {
        samples: samples as u64,
        full_total: s.full_total(),
        full_total_stderr: s.full_total_stderr(),
        vertices,
    };
    Ok((entries, report))
}

/// Runs a parsed command. `argv` is echoed into the report.
pub fn execute(cli: &Cli, argv: &[String]) -> Result<Output> {
    let g = &cli.global;
    if !(g.tol >= 0.0 && g.tol.is_finite()) {
        return Err(invalid(format!("--tol {} must be a nonnegative number", g.tol)));
    }
    if !(g.delta > 0.0 && g.delta < 1.0) {
        return Err(invalid(format!("--delta {} must lie in (0, 1)", g.delta)));
    }
    let mut angles = None;
    let entries = match &cli.command {
        Command::Bounds(args) => bound_entries(args)?,
        Command::Count(cmd) => count_entries(cmd, g)?,
        Command::Angles { file, samples } => {
            let (entries, report) = angles_report(file, *samples, g)?;
            angles = Some(report);
            entries
        }
        Command::Gen(args) => {
            let kind = match args.kind {
                GenUnit::Relu => GenKind::Relu,
                GenUnit::Lrelu => GenKind::Lrelu { alpha: args.alpha },
                GenUnit::Maxout => GenKind::Maxout { k: args.k },
            };
            let (file, ms) = timed(|| generate_layer(kind, args.n, args.m, g.seed))?;
            let Some(out) = &args.out else {
                return Ok(Output::Layer(file.to_json()));
            };
            file.write(out)?;
            vec![Entry { count: Some(file.units.len() as u64), seed: Some(g.seed), elapsed_ms: ms, ..Entry::new("gen") }]
        }
    };
    Ok(Output::Report(RunReport { command: argv.to_vec(), seed: g.seed, tol: g.tol, entries, angles }))
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => match flag {
            Some(0) => Err(invalid("--threads must be positive")),
            t => Ok(t),
        },
    }
}

fn write_output(out: &mut dyn Write, output: &Output, format: Format) -> std::io::Result<()> {
    match output {
        Output::Layer(text) => out.write_all(text.as_bytes()),
        Output::Report(r) => match format {
            Format::Human => r.write_human(out),
            Format::Json => r.write_json(out),
            Format::Csv => r.write_csv(out),
        },
    }
}

/// Parses `args` (including the program name), runs the command on a pool
/// of the requested size, writes the result to `out` and diagnostics to
/// `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let result = thread_count(cli.global.threads).and_then(|threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| execute(&cli, argv.get(1..).unwrap_or_default()))
    });
    match result {
        Ok(output) => match write_output(out, &output, cli.global.format) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

