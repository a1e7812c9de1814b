//! The `qsnm` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::connection::QsFamilyParams;
use crate::error::Error;
use crate::verify::{
    emit_report, random_manifold, registry, run_suite, CheckConfig, Geometry, ManifoldSpec,
    RandomManifoldConfig, ReportFormat, RunOptions, SuiteMeta, DEFAULT_POINTS, DEFAULT_TOLERANCE,
    TENSOR_NAMES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qsnm", version, about = "Build and verify quarter-symmetric non-metric connections on a chart")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every identity check on a manifold.
    Verify(VerifyArgs),
    /// Evaluate a named tensor at a point.
    Compute(ComputeArgs),
    /// Print the identity catalogue.
    List,
    /// Write a random manifold spec.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct RandomArgs {
    /// Perturbation amplitude of the random metric.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Maximal polynomial degree of the random fields.
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Add a sine term to every metric entry.
    #[arg(long)]
    trig: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Manifold spec file.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    manifold: Option<PathBuf>,
    /// Use a generated manifold instead of a file.
    #[arg(long, requires = "dim")]
    random: bool,
    /// Dimension of the generated manifold.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=4))]
    dim: Option<u64>,
    /// Seed for manifold generation and point sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// First coefficient of the family tried by the general-family check.
    #[arg(long, requires = "b", allow_hyphen_values = true)]
    a: Option<f64>,
    /// Second coefficient of the family tried by the general-family check.
    #[arg(long, requires = "a", allow_hyphen_values = true)]
    b: Option<f64>,
    /// Record wall time in the report (makes the output run-dependent).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    random_args: RandomArgs,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    /// One of the names printed by `qsnm compute --help`.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(TENSOR_NAMES))]
    tensor: String,
    #[arg(long)]
    manifold: PathBuf,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=4))]
    dim: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    random_args: RandomArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a, out),
        Command::Compute(a) => compute(a, out),
        Command::List => list(out),
        Command::Gen(a) => gen(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
        // A closed pipe downstream (`qsnm list | head`) is not an error.
        Err(Failure::Runtime(Error::Io(e))) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn random_config(seed: u64, dim: u64, r: &RandomArgs) -> RandomManifoldConfig {
    RandomManifoldConfig {
        seed,
        dimension: dim as usize,
        epsilon: r.epsilon,
        degree: r.degree,
        trig: r.trig,
    }
}

fn write_output(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    if a.points == 0 {
        return Err(Failure::Usage("--points must be positive".into()));
    }
    let spec = match (&a.manifold, a.dim) {
        (Some(path), _) => ManifoldSpec::load(path)?,
        (None, Some(dim)) => random_manifold(&random_config(a.seed, dim, &a.random_args))?,
        (None, None) => unreachable!("clap requires --manifold or --random --dim"),
    };
    let geo = Geometry::from_spec(&spec)?;
    let mut cfg = CheckConfig::default();
    if let (Some(pa), Some(pb)) = (a.a, a.b) {
        cfg.family_params = vec![QsFamilyParams::new(pa, pb)];
    }
    let opts = RunOptions {
        points: a.points,
        seed: a.seed,
        tol: a.tol,
    };
    let reports = run_suite(&geo, &cfg, &opts);
    let meta = SuiteMeta {
        seed: a.seed,
        dimension: spec.dimension,
        spec_hash: spec.hash(),
        elapsed_ms: a.timing.then(|| start.elapsed().as_millis() as u64),
    };
    let format = match a.format {
        Format::Table => ReportFormat::Table,
        Format::Json => ReportFormat::Json,
    };
    write_output(&emit_report(&reports, format, Some(&meta)), a.out.as_deref(), out)?;
    Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Printed symbol of a named tensor: `R1 → R`, `alpha2 → alpha`.
fn symbol(name: &str) -> &str {
    match name {
        "R_g" => "R",
        "d1F" | "dF" => name,
        _ => name.trim_end_matches(|c: char| c.is_ascii_digit()),
    }
}

fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        v.to_string()
    }
}

fn compute(a: ComputeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = ManifoldSpec::load(&a.manifold)?;
    let geo = Geometry::from_spec(&spec)?;
    let point = a
        .point
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("--point: {e}")))?;
    if point.len() != geo.dim() || point.iter().any(|c| !c.is_finite()) {
        return Err(Failure::Usage(format!("--point needs {} finite coordinates", geo.dim())));
    }
    let t = geo.tensor(&a.tensor)?;
    let values = t.evaluate(&point)?;
    let sym = symbol(&a.tensor);
    let coords: Vec<String> = point.iter().map(|c| c.to_string()).collect();
    writeln!(out, "# {} at ({})", a.tensor, coords.join(", "))?;
    let (upper, lower) = t.valence();
    for (flat, v) in values.data.iter().enumerate() {
        let idx = t.multi_index(flat);
        let digits = |s: &[usize]| s.iter().map(|i| (i + 1).to_string()).collect::<String>();
        let mut label = sym.to_string();
        if upper > 0 {
            label += &format!("^{}", digits(&idx[..upper]));
        }
        if lower > 0 {
            label += &format!("_{{{}}}", digits(&idx[upper..]));
        }
        writeln!(out, "{label} = {}", format_value(*v))?;
    }
    Ok(EXIT_OK)
}

fn list(out: &mut dyn Write) -> Result<i32, Failure> {
    let checks = registry();
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        writeln!(out, "{:<width$}  {}", c.name, c.anchor)?;
    }
    Ok(EXIT_OK)
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = random_manifold(&random_config(a.seed, a.dim, &a.random_args))?;
    write_output(&spec.to_json(), a.out.as_deref(), out)?;
    Ok(EXIT_OK)
}
