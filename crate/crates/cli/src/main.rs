use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use shrinker_core::abresch_langer::{self, ShootOutcome};
use shrinker_core::analysis::{
    pinching_report, pointwise_suite, verify_suite, CheckReport, Tolerances,
};
use shrinker_core::examples::{self, LeeWangParams};
use shrinker_core::flow::{self, FlowOptions, FlowState, Normalization};
use shrinker_core::geometry::Grid;
use shrinker_core::Error;

/// Environment variable holding the worker-thread count for grid evaluation.
const WORKERS_ENV: &str = "SHRINKER_WORKERS";

/// Tolerance floor for surfaces built from solver-produced curves.
const INTERPOLATED_FLOOR: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "shrinker",
    version,
    about = "Numerical checks for Lagrangian self-shrinkers in C²"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every identity suite on a named example.
    Verify(VerifyArgs),
    /// Tabulate |A|² extremes of Lee–Wang tori against their bounds.
    Scan(ScanArgs),
    /// Shoot closed self-shrinking curves, or check products of them.
    Al(AlArgs),
    /// Run the rescaled curve-shortening flow to a stationary curve.
    Flow(FlowArgs),
}

#[derive(Args, Debug, Clone)]
struct ReportArgs {
    /// Grid size as WxH; both even and at least 16.
    #[arg(long, default_value = "64x64")]
    grid: GridSize,
    /// Override a check tolerance, e.g. `simons_identity=1e-4`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<TolOverride>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `clifford`, `control`, `lee-wang:m,n` or `product:A,B`.
    example: String,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Pairs as `m,n`.
    #[arg(long, num_args = 1.., required = true, value_name = "M,N")]
    pairs: Vec<Pair>,
    #[arg(long, default_value = "96x96")]
    grid: GridSize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AlArgs {
    /// Launch-radius bracket `LO:HI` for shooting.
    #[arg(long, value_name = "LO:HI", conflicts_with = "product")]
    shoot: Option<Bracket>,
    /// Rotation `p,q`: the tangent turns by 2πp over q petals.
    #[arg(long, default_value = "1,1")]
    rotation: Pair,
    /// Scan the bracket with this many samples and shoot on the first non-circular sign change.
    #[arg(long, value_name = "SAMPLES")]
    scan: Option<usize>,
    /// Arc-length step.
    #[arg(long, default_value_t = abresch_langer::DEFAULT_STEP)]
    step: f64,
    /// Build the product surface of two named curves.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    product: Option<Vec<String>>,
    /// With `--product`, run the full verify suite (tolerances floored at 1e-6).
    #[arg(long, requires = "product")]
    verify: bool,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct FlowArgs {
    /// `circle`, `circle:R` or `ellipse01`.
    #[arg(long, default_value = "ellipse01")]
    init: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long = "t-max", default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = flow::DEFAULT_NODES)]
    nodes: usize,
    /// Step size as a fraction of the stability bound.
    #[arg(long, default_value_t = 0.5)]
    cfl: f64,
    /// Disable centroid and area normalization.
    #[arg(long)]
    raw: bool,
    /// Time series CSV (`t,length,area,residual`); standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot CSV (`t,index,x,y`).
    #[arg(long, requires = "snapshot_interval")]
    snapshots: Option<PathBuf>,
    #[arg(long)]
    snapshot_interval: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy)]
struct GridSize(Grid);

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s.split_once('x').ok_or("expected WxH")?;
        let parse = |t: &str| t.parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
        let (w, h) = (parse(w)?, parse(h)?);
        if w < 16 || h < 16 || w % 2 != 0 || h % 2 != 0 {
            return Err(format!(
                "grid sizes must be even and at least 16, got {w}x{h}"
            ));
        }
        Grid::new(w, h).map(GridSize).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone)]
struct TolOverride(String, f64);

impl FromStr for TolOverride {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
        let value = value
            .parse::<f64>()
            .map_err(|e| format!("`{value}`: {e}"))?;
        Ok(TolOverride(name.to_string(), value))
    }
}

#[derive(Debug, Clone, Copy)]
struct Pair(u32, u32);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or("expected A,B")?;
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
        Ok(Pair(parse(a)?, parse(b)?))
    }
}

#[derive(Debug, Clone, Copy)]
struct Bracket(f64, f64);

impl FromStr for Bracket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
        let parse = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        Ok(Bracket(parse(a)?, parse(b)?))
    }
}

/// A failed command and its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::UnknownExample(_)
            | Error::InvalidParameter(_)
            | Error::NotCoprime { .. }
            | Error::InvalidGrid { .. }
            | Error::NotCompact(_)
            | Error::SampleCount(_) => 2,
            _ => 3,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::usage(format!("i/o error: {err}"))
    }
}

type Outcome = Result<bool, Failure>;

fn configure_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "{WORKERS_ENV} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn write_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            body(&mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()
        }
    }
}

fn tolerances(args: &ReportArgs, base: Tolerances) -> Result<Tolerances, Failure> {
    let mut tol = base;
    for TolOverride(name, value) in &args.tol {
        tol.set(name, *value)?;
    }
    Ok(tol)
}

fn emit_report(report: &CheckReport, args: &ReportArgs) -> Outcome {
    let text = match args.format {
        Format::Json => report.to_canonical_json(),
        Format::Csv => report.to_csv(),
    };
    write_output(args.out.as_deref(), |w| w.write_all(text.as_bytes()))?;
    let failed: Vec<&str> = report.failures().map(|e| e.name.as_str()).collect();
    eprintln!(
        "{} {}x{}: {}/{} checks pass",
        report.label,
        report.grid.nu,
        report.grid.nv,
        report.entries.len() - failed.len(),
        report.entries.len()
    );
    for name in &failed {
        eprintln!("  failed: {name}");
    }
    Ok(failed.is_empty())
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let tol = tolerances(&args.report, Tolerances::default())?;
    let chart = examples::by_name(&args.example)?;
    let report = verify_suite(&chart, args.report.grid.0, &tol)?;
    emit_report(&report, &args.report)
}

fn cmd_scan(args: &ScanArgs) -> Outcome {
    let tol = Tolerances::default();
    let mut rows = vec!["m,n,min_a2,max_a2,lower_bound,upper_bound,within_bounds,note".to_string()];
    let mut all_within = true;
    for &Pair(m, n) in &args.pairs {
        let params = match LeeWangParams::new(m, n) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("warning: skipping ({m}, {n}): {e}");
                rows.push(format!("{m},{n},,,,,,skipped: {e}"));
                continue;
            }
        };
        let report = pinching_report(&examples::lee_wang(params), args.grid.0, &tol)?;
        let (lower, upper) = params.a2_bounds();
        let within = ["a2_lower_bound", "a2_upper_bound"]
            .iter()
            .all(|name| report.entry(name).is_some_and(|e| e.pass));
        all_within &= within;
        rows.push(format!(
            "{m},{n},{:.16e},{:.16e},{:.16e},{:.16e},{within},",
            report.stats["a2_min"], report.stats["a2_max"], lower, upper
        ));
    }
    write_output(args.out.as_deref(), |w| {
        rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    Ok(all_within)
}

fn cmd_al(args: &AlArgs) -> Outcome {
    if let Some(names) = &args.product {
        let base = Tolerances::default().relaxed(INTERPOLATED_FLOOR);
        let tol = tolerances(&args.report, base)?;
        for name in names {
            if !abresch_langer::is_curve_name(name) {
                return Err(Error::UnknownExample(name.clone()).into());
            }
        }
        let chart = examples::by_name(&format!("product:{},{}", names[0], names[1]))?;
        let report = if args.verify {
            verify_suite(&chart, args.report.grid.0, &tol)?
        } else {
            pointwise_suite(&chart, args.report.grid.0, &tol)?
        };
        return emit_report(&report, &args.report);
    }

    let Bracket(lo, hi) = args
        .shoot
        .ok_or_else(|| Failure::usage("either --shoot LO:HI or --product A B is required"))?;
    let Pair(p, q) = args.rotation;
    let closed = match args.scan {
        Some(samples) => abresch_langer::find_noncircular(lo, hi, samples, (p, q))?,
        None => match abresch_langer::shoot_closed_with_step(lo, hi, (p, q), args.step)? {
            ShootOutcome::Closed(c) => Some(c),
            ShootOutcome::NoClosure(n) => {
                eprintln!("no closed curve in [{lo}, {hi}]: {}", n.reason);
                None
            }
        },
    };
    let Some(curve) = closed else {
        return Ok(false);
    };
    let (k_min, k_max) = curve.trace.curvature_extremes();
    eprintln!(
        "closed curve: launch radius {:.15}, length {:.15}, c = {:.15e} (relative spread {:.3e}), k in [{k_min:.9}, {k_max:.9}]",
        curve.launch_radius,
        curve.trace.period.unwrap_or(f64::NAN),
        curve.trace.c_mean(),
        curve.trace.c_spread(),
    );
    write_output(args.report.out.as_deref(), |w| curve.trace.write_csv(w))?;
    Ok(true)
}

fn cmd_flow(args: &FlowArgs) -> Outcome {
    let curve = flow::initial_curve(&args.init, args.nodes)?;
    let state = FlowState::new(&curve, args.nodes)?;
    let options = FlowOptions {
        normalization: if args.raw {
            Normalization::None
        } else {
            Normalization::AreaCentroid
        },
        cfl: args.cfl,
        snapshot_interval: args.snapshot_interval,
    };
    let (end, report) = flow::flow_to_stationary(state, args.tol, args.t_max, &options)?;
    write_output(args.out.as_deref(), |w| report.write_series_csv(w))?;
    if let Some(path) = &args.snapshots {
        write_output(Some(path), |w| report.write_snapshots_csv(w))?;
    }
    eprintln!(
        "{}: t = {:.6}, steps = {}, residual = {:.3e}, converged = {}, monotone = {}",
        args.init, end.t, report.steps, end.diagnostics.residual, report.converged, report.monotone
    );
    Ok(report.converged)
}

fn run(cli: &Cli) -> Outcome {
    configure_workers()?;
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Al(a) => cmd_al(a),
        Command::Flow(a) => cmd_flow(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
