//! `nullag` command line: argument parsing, dispatch and report output.
//!
//! Every JSON report has the form `{"schema":"v1","command":..,"config":..,"result":..}`;
//! CSV reports start with a `# config: <json>` line.

mod commands;
mod parse;
mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "v1";
pub const SCHEMA: &str = include_str!("../schema/report.v1.json");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "nullag", version, about = "Null Lagrangians at the boundary: decision procedures and experiments")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output path, or `json` / `csv` to write that format to stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,

    /// Output format; inferred from `--out` when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct PolyArgs {
    /// Polynomial: a file path, inline JSON, or a built-in such as `det`, `detprime`,
    /// `trace`, `frobenius2`, `cof_dot([a],[rho])`, `minor([p],[q])`.
    #[arg(long)]
    pub poly: String,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct MeshArgs {
    /// Mesh resolution (cells per unit length).
    #[arg(long, default_value_t = 8)]
    pub h: usize,
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Box bound on nodal values.
    #[arg(long, default_value_t = 1.0)]
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceArg {
    Boundary,
    Interior,
    Constant,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Minor-basis decomposition; with `--normal`, in rotated coordinates.
    Decompose {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        normal: Option<String>,
    },
    /// Decides whether the polynomial is a null Lagrangian at the boundary.
    CheckBoundaryNl {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        normal: String,
    },
    /// Spanning set of boundary null Lagrangians for a normal.
    Basis {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        normal: String,
    },
    /// `N − ∇N(F₀)·F`.
    SpecialForm {
        #[command(flatten)]
        poly: PolyArgs,
        /// Rows separated by `;`, entries by `,`.
        #[arg(long = "F")]
        f: String,
    },
    /// Numerical quasiconvexity-at-the-boundary deficit at `F`.
    Qcb {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        normal: String,
        #[arg(long = "F")]
        f: Option<String>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Sign of the boundary envelope at 0 for a homogeneous polynomial.
    Envelope0 {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        normal: String,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Interior quasiconvexity deficit at `F` (fields vanish on the whole boundary).
    InteriorQc {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long = "F")]
        f: Option<String>,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Weak continuity of `f(∇u_k)` along a concentrating sequence.
    Weakcont {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, value_enum, default_value = "boundary")]
        sequence: SequenceArg,
        #[arg(long, default_value = "8,16,32,64")]
        ks: String,
        /// Test functions, `;`-separated, e.g. `1;x1;x2;x1*x2`.
        #[arg(long)]
        phis: Option<String>,
    },
    /// Higher-integrability counterexample scalings.
    Counterex {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "8,16,32,64")]
        ks: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "1e-2,1e-3,1e-4,1e-5")]
        deltas: String,
    },
    /// Runs the invariant suite at reduced sizes.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decompose { .. } => "decompose",
            Command::CheckBoundaryNl { .. } => "check-boundary-nl",
            Command::Basis { .. } => "basis",
            Command::SpecialForm { .. } => "special-form",
            Command::Qcb { .. } => "qcb",
            Command::Envelope0 { .. } => "envelope0",
            Command::InteriorQc { .. } => "interior-qc",
            Command::Weakcont { .. } => "weakcont",
            Command::Counterex { .. } => "counterex",
            Command::Selftest => "selftest",
        }
    }
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<nullag::Error> for CliError {
    fn from(e: nullag::Error) -> Self {
        use nullag::Error as E;
        match e {
            E::OptimizationFailure(_) | E::Quadrature(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Result of a subcommand: a JSON value, optional CSV body, and the exit code.
pub struct Outcome {
    pub result: serde_json::Value,
    pub csv: Option<String>,
    pub code: i32,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    seed: u64,
    out: Option<&'a str>,
    format: Format,
    threads: Option<usize>,
    args: &'a Command,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    command: &'static str,
    config: &'a RunConfig<'a>,
    result: &'a serde_json::Value,
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("NULLAG_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("NULLAG_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn resolve_format(cli: &Cli) -> (Format, Option<PathBuf>) {
    match cli.out.as_deref() {
        None => (cli.format.unwrap_or(Format::Json), None),
        Some("json") => (Format::Json, None),
        Some("csv") => (Format::Csv, None),
        Some(path) => {
            let inferred = if path.ends_with(".csv") { Format::Csv } else { Format::Json };
            (cli.format.unwrap_or(inferred), Some(PathBuf::from(path)))
        }
    }
}

fn render(cli: &Cli, format: Format, threads: Option<usize>, outcome: &Outcome) -> Result<String, CliError> {
    let config = RunConfig {
        seed: cli.seed,
        out: cli.out.as_deref(),
        format,
        threads,
        args: &cli.command,
    };
    match format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA_VERSION,
                command: cli.command.name(),
                config: &config,
                result: &outcome.result,
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::Numerical(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let body = outcome
                .csv
                .as_ref()
                .ok_or_else(|| CliError::Usage(format!("csv output is not available for `{}`", cli.command.name())))?;
            let cfg = serde_json::to_string(&config).map_err(|e| CliError::Numerical(e.to_string()))?;
            Ok(format!("# schema: {SCHEMA_VERSION}\n# config: {cfg}\n{body}"))
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let threads = threads_from_env()?;
    let (format, path) = resolve_format(cli);
    if format == Format::Csv && !matches!(cli.command, Command::Weakcont { .. } | Command::Counterex { .. }) {
        return Err(CliError::Usage(format!("csv output is not available for `{}`", cli.command.name())));
    }
    let outcome = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            pool.install(|| commands::dispatch(cli))?
        }
        None => commands::dispatch(cli)?,
    };
    let text = render(cli, format, threads, &outcome)?;
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?,
    }
    Ok(outcome.code)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let (kind, msg) = match &e {
                CliError::Usage(m) => ("usage error", m),
                CliError::Numerical(m) => ("numerical failure", m),
            };
            let _ = writeln!(stderr, "nullag {}: {kind}: {msg}", cli.command.name());
            e.code()
        }
    }
}
