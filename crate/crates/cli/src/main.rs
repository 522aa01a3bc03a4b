//! Command-line front end: construct, flow, classify, certify, and export.
//!
//! Exit codes: 0 success, 1 failed verification assertion, 2 infeasible
//! fiber, 64 usage or malformed input. All floating-point output is printed
//! with 17 significant digits so values round-trip exactly through text, and
//! outputs are byte-identical for identical arguments and seed (wall-clock
//! timing goes to stderr).

use clap::{Args, Parser, Subcommand};
use polybend::bending::{BendingError, BendingSystem, DiagonalSet, FiberValue};
use polybend::fibers::{classify_fiber, FiberError};
use polybend::grassmann::{fiber_graph, frame_to_polygon, gc_pattern};
use polybend::io::{PolygonJson, TwoFrameJson};
use polybend::polyspace::SideLengths;
use polybend::verify::{run_suite, RunConfig, Suite, SuiteReport};
use polybend::Tolerances;
use serde::Serialize;
use std::io::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "polybend",
    version,
    about = "Bending flows on moduli spaces of 3D polygons: classify singular fibers, run flows, and certify structural properties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the fiber over a momentum value into its homogeneous model.
    Classify(ClassifyArgs),
    /// Run a verification suite and emit a machine-readable report.
    Verify(VerifyArgs),
    /// Apply a bending flow to a polygon read from JSON.
    Flow(FlowArgs),
    /// Sample seeded random polygons from a fiber.
    Sample(SampleArgs),
    /// Gel'fand-Cetlin data: the equality graph of a fiber, or the pattern
    /// of a two-frame.
    Gc(GcArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// Side lengths, comma-separated (e.g. 1,1,1,1).
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    r: String,
    /// Use the fan of diagonals from vertex 0.
    #[arg(long, conflicts_with = "diagonals")]
    caterpillar: bool,
    /// Explicit diagonals as 0-based pairs (e.g. 0-2,0-3).
    #[arg(long, value_name = "PAIRS")]
    diagonals: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Momentum values c_k = ½ℓ_k², comma-separated.
    #[arg(long, value_name = "C")]
    c: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: poisson, flow, isotropy, grassmann, or gc.
    suite: String,
    /// Polygon sizes to test (repeatable). Defaults to 4..=8, except the
    /// grid-based suites: 4..=5 for isotropy and 4..=6 for gc, whose fiber
    /// grids grow exponentially with n.
    #[arg(long = "n", value_name = "N")]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 9)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the commuting-bracket tolerance.
    #[arg(long)]
    tol_symplectic: Option<f64>,
    /// Override the isotropy tolerance.
    #[arg(long)]
    tol_isotropy: Option<f64>,
    /// Override the numerical-rank cutoff.
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Override the action-angle contract tolerance.
    #[arg(long)]
    tol_angle: Option<f64>,
}

#[derive(Args)]
struct FlowArgs {
    /// Polygon JSON file ("-" for stdin).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    diagonals: DiagArgs,
    /// Diagonal index to flow along.
    #[arg(long)]
    k: usize,
    /// Flow time (angle for --normalized, Hamiltonian time otherwise).
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// Unit angular speed instead of the Hamiltonian flow of F_k.
    #[arg(long)]
    normalized: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagArgs {
    /// Use the fan of diagonals from vertex 0 (default).
    #[arg(long, conflicts_with = "diagonals")]
    caterpillar: bool,
    /// Explicit diagonals as 0-based pairs (e.g. 0-2,0-3).
    #[arg(long, value_name = "PAIRS")]
    diagonals: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Momentum values c_k, comma-separated.
    #[arg(long, value_name = "C")]
    c: String,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GcArgs {
    /// Side lengths for the fiber graph.
    #[arg(long, value_name = "R", requires = "c")]
    r: Option<String>,
    /// Momentum values for the fiber graph.
    #[arg(long, value_name = "C", requires = "r")]
    c: Option<String>,
    /// Emit the graph in DOT format instead of JSON.
    #[arg(long)]
    dot: bool,
    /// Two-frame JSON file; emits its ladder pattern.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["r", "c", "dot"])]
    frame: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

enum Failure {
    /// Malformed input or usage: exit 64.
    Usage(String),
    /// Structurally valid input naming an empty fiber: exit 2.
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Infeasible(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn from_bending(e: BendingError) -> Failure {
    match e {
        BendingError::InfeasibleFiber { .. } => Failure::Infeasible(e.to_string()),
        other => Failure::Usage(other.to_string()),
    }
}

fn from_fiber(e: FiberError) -> Failure {
    match e {
        FiberError::Bending(b) => from_bending(b),
        other => Failure::Usage(other.to_string()),
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    if let Ok(threads) = std::env::var("POLYBEND_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => {
                eprintln!("POLYBEND_THREADS must be a positive integer, got '{threads}'");
                return 64;
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { 0 } else { 64 };
        }
    };
    let result = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Gc(args) => cmd_gc(args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.code()
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing and printing helpers
// ---------------------------------------------------------------------------

fn parse_floats(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| usage(format!("'{t}': {e}")))
        })
        .collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>, Failure> {
    s.split(',')
        .map(|t| {
            let (a, b) = t
                .trim()
                .split_once('-')
                .ok_or_else(|| usage(format!("'{t}': expected a 0-based pair like 0-2")))?;
            Ok((
                a.parse::<usize>().map_err(usage)?,
                b.parse::<usize>().map_err(usage)?,
            ))
        })
        .collect()
}

fn build_system(
    r: &str,
    caterpillar: bool,
    diagonals: &Option<String>,
) -> Result<BendingSystem, Failure> {
    let lengths = SideLengths::new(parse_floats(r)?).map_err(usage)?;
    let n = lengths.n();
    if n < 4 {
        return Err(usage(format!(
            "a bending system needs n ≥ 4 sides, got n = {n}"
        )));
    }
    let diag = match diagonals {
        Some(pairs) => DiagonalSet::new(n, parse_pairs(pairs)?).map_err(usage)?,
        None if caterpillar => DiagonalSet::caterpillar(n).map_err(usage)?,
        None => return Err(usage("give --caterpillar or --diagonals")),
    };
    BendingSystem::new(lengths, diag).map_err(usage)
}

fn parse_fiber(sys: &BendingSystem, c: &str) -> Result<FiberValue, Failure> {
    let values = parse_floats(c)?;
    if values.len() != sys.n() - 3 {
        return Err(usage(format!(
            "expected {} fiber values for n = {}, got {}",
            sys.n() - 3,
            sys.n(),
            values.len()
        )));
    }
    FiberValue::new(values).map_err(usage)
}

/// Serialize with every float printed as `{:.16e}` (17 significant digits),
/// so doubles round-trip exactly through the textual output.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("serialization cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(usage),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(usage)?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n").map_err(usage)?;
            }
            Ok(())
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(usage)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_classify(args: ClassifyArgs) -> Result<i32, Failure> {
    let sys = build_system(
        &args.system.r,
        args.system.caterpillar,
        &args.system.diagonals,
    )?;
    let c = parse_fiber(&sys, &args.c)?;
    let model = classify_fiber(&sys, &c, &Tolerances::default()).map_err(from_fiber)?;
    emit(&to_json(&model), &None)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, Failure> {
    let suite: Suite = args.suite.parse().map_err(Failure::Usage)?;
    let mut tolerances = Tolerances::default();
    if let Some(v) = args.tol_symplectic {
        tolerances.symplectic = v;
    }
    if let Some(v) = args.tol_isotropy {
        tolerances.isotropy = v;
    }
    if let Some(v) = args.tol_rank {
        tolerances.rank = v;
    }
    if let Some(v) = args.tol_angle {
        tolerances.angle = v;
    }
    for &n in &args.ns {
        if n < 4 {
            return Err(usage(format!("suite sizes need n ≥ 4, got {n}")));
        }
    }
    let default_ns: Vec<usize> = match suite {
        Suite::Isotropy => (4..=5).collect(),
        Suite::Gc => (4..=6).collect(),
        _ => (4..=8).collect(),
    };
    let config = RunConfig {
        seed: args.seed,
        samples: args.samples,
        grid: args.grid.max(2),
        ns: if args.ns.is_empty() {
            default_ns
        } else {
            args.ns.clone()
        },
        tolerances,
    };
    let report = run_suite(suite, &config);
    // Wall time goes to stderr so stdout stays byte-identical per (args, seed).
    eprintln!(
        "suite '{}' finished in {:.3}s",
        report.suite, report.wall_seconds
    );
    emit(&to_json(&DeterministicReport::from(&report)), &None)?;
    if report.pass {
        Ok(0)
    } else {
        for check in report.checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "FAIL {}: max residual {:e} (threshold {:e}){}",
                check.name,
                check.max_residual,
                check.threshold,
                check
                    .counterexample
                    .as_deref()
                    .map(|e| format!("; first counterexample: {e}"))
                    .unwrap_or_default()
            );
        }
        Ok(1)
    }
}

/// The report without its wall-clock field.
#[derive(Serialize)]
struct DeterministicReport<'a> {
    suite: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    checks: &'a [polybend::verify::CheckResult],
    pass: bool,
}

impl<'a> From<&'a SuiteReport> for DeterministicReport<'a> {
    fn from(r: &'a SuiteReport) -> Self {
        Self {
            suite: &r.suite,
            version: &r.version,
            config: &r.config,
            checks: &r.checks,
            pass: r.pass,
        }
    }
}

fn cmd_flow(args: FlowArgs) -> Result<i32, Failure> {
    let text = read_input(&args.input)?;
    let json: PolygonJson = serde_json::from_str(&text).map_err(usage)?;
    let tol = Tolerances::default();
    let polygon = json.into_polygon(&tol).map_err(usage)?;
    let n = polygon.n();
    if n < 4 {
        return Err(usage(format!(
            "a bending system needs n ≥ 4 sides, got n = {n}"
        )));
    }
    let diag = match &args.diagonals.diagonals {
        Some(pairs) => DiagonalSet::new(n, parse_pairs(pairs)?).map_err(usage)?,
        None => DiagonalSet::caterpillar(n).map_err(usage)?,
    };
    let sys = BendingSystem::new(polygon.lengths().clone(), diag).map_err(usage)?;
    let moved = sys
        .flow(&polygon, args.k, args.t, args.normalized)
        .map_err(from_bending)?;
    emit(&to_json(&PolygonJson::from(&moved)), &args.out)?;
    Ok(0)
}

fn cmd_sample(args: SampleArgs) -> Result<i32, Failure> {
    let sys = build_system(
        &args.system.r,
        args.system.caterpillar,
        &args.system.diagonals,
    )?;
    let c = parse_fiber(&sys, &args.c)?;
    let polygons = sys
        .sample_fiber(&c, args.count, args.seed)
        .map_err(from_bending)?;
    let out: Vec<PolygonJson> = polygons.iter().map(PolygonJson::from).collect();
    emit(&to_json(&out), &args.out)?;
    Ok(0)
}

fn cmd_gc(args: GcArgs) -> Result<i32, Failure> {
    if let Some(path) = &args.frame {
        let text = read_input(path)?;
        let json: TwoFrameJson = serde_json::from_str(&text).map_err(usage)?;
        let frame = json.into_frame().map_err(usage)?;
        let pattern = gc_pattern(&frame);
        let image = frame_to_polygon(&frame);
        #[derive(Serialize)]
        struct FrameReport {
            pattern: polybend::grassmann::GcPattern,
            side_lengths: Vec<f64>,
            perimeter: f64,
        }
        let report = FrameReport {
            perimeter: image.perimeter(),
            side_lengths: image.lengths,
            pattern,
        };
        emit(&to_json(&report), &args.out)?;
        return Ok(0);
    }
    let (Some(r), Some(c)) = (&args.r, &args.c) else {
        return Err(usage("give either --frame FILE or both --r and --c"));
    };
    let lengths = SideLengths::new(parse_floats(r)?).map_err(usage)?;
    let n = lengths.n();
    if n < 4 {
        return Err(usage(format!("the ladder needs n ≥ 4 sides, got n = {n}")));
    }
    let sys =
        BendingSystem::new(lengths, DiagonalSet::caterpillar(n).map_err(usage)?).map_err(usage)?;
    let fiber = parse_fiber(&sys, c)?;
    let graph = fiber_graph(&sys, &fiber, &Tolerances::default()).map_err(|e| match e {
        polybend::grassmann::FrameError::Bending(b) => from_bending(b),
        other => usage(other),
    })?;
    if args.dot {
        emit(&graph.to_dot(), &args.out)?;
    } else {
        emit(&to_json(&graph), &args.out)?;
    }
    Ok(0)
}
