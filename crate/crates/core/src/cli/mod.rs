//! The `fracgeom` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 numeric or domain error,
//! 3 flatness scan failed (max |R| above tolerance).

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::geometry::CurvatureMode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_NOT_FLAT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fracgeom", version, about = "Local fractional derivatives and the flatness of their α-metrics")]
pub struct Cli {
    /// Report format; `geodesic` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,

    /// Tolerance (flatness and riemann: max |R|; deriv: relative
    /// limit-definition agreement).
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Mode::ClosedForm)]
    pub mode: Mode,

    /// JSON object of flag values; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ClosedForm,
    FiniteDifference,
}

impl Mode {
    fn curvature(self, step: Option<f64>) -> CurvatureMode {
        match self {
            Mode::ClosedForm => CurvatureMode::ClosedFormJets,
            Mode::FiniteDifference => CurvatureMode::FiniteDifference { step },
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Mode::ClosedForm => 1e-9,
            Mode::FiniteDifference => 1e-5,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated six-parameter Mittag-Leffler function and H = Γ(β)·E.
    Ml(MlArgs),
    /// Apply a local fractional derivative to an expression in `t`.
    Deriv(DerivArgs),
    /// Christoffel symbols Γ^k_ij at a point.
    Christoffel(PointArgs),
    /// Riemann tensor R^i_jkl at a point.
    Riemann(PointArgs),
    /// Max |R| over a grid, optionally for a sweep of α.
    Flatness(FlatnessArgs),
    /// Integrate a geodesic with RK4.
    Geodesic(GeodesicArgs),
    /// Map points to Euclidean coordinates.
    Isometry(IsometryArgs),
}

#[derive(Debug, Args)]
pub struct MlArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value_t = 20)]
    pub trunc: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
}

#[derive(Debug, Args)]
pub struct DerivArgs {
    /// Operator: conformable, alternative, truncated-m:beta=B,
    /// truncated-v:gamma=..,beta=..,rho=..,delta=..,p=..,q=..,trunc=N, custom:EXPR
    #[arg(long, default_value = "conformable")]
    pub op: String,
    #[arg(long)]
    pub alpha: f64,
    /// Function of `t`.
    #[arg(long = "f", allow_hyphen_values = true)]
    pub function: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Evaluate the right limit at t = 0 instead of a point value.
    #[arg(long)]
    pub limit_at_zero: bool,
    /// Also evaluate the limit definition (truncated-v only) and compare.
    #[arg(long)]
    pub check_limit_def: bool,
    /// Extra expression parameter, `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_binding)]
    pub params: Vec<(String, f64)>,
}

/// Where a metric comes from: a JSON spec, or one operator on every axis.
#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Metric JSON, inline or a file path.
    #[arg(long, conflicts_with = "op")]
    pub metric: Option<String>,
    /// Operator used on every axis of a diagonal metric.
    #[arg(long)]
    pub op: Option<String>,
    /// Order α (overrides the metric JSON's alpha).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dimension for `--op`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Extra expression parameter, `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_binding)]
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Coords,
    /// Finite-difference step (finite-difference mode only).
    #[arg(long, value_parser = positive_f64)]
    pub h: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FlatnessArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// `lo:hi:count` on every axis.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// `from:to:step`, inclusive.
    #[arg(long)]
    pub alpha_sweep: Option<String>,
    #[arg(long, value_parser = positive_f64)]
    pub h: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Coords,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Coords,
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Map the path to Euclidean coordinates and measure its distance from
    /// the chord (diagonal metrics only).
    #[arg(long)]
    pub check_isometry: bool,
}

#[derive(Debug, Args)]
pub struct IsometryArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Base point, mapped to the origin
    #[arg(long, allow_hyphen_values = true)]
    pub base: Coords,
    /// Point to map; repeatable.
    #[arg(long = "x", allow_hyphen_values = true, required = true)]
    pub points: Vec<Coords>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Comma-separated coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

impl std::str::FromStr for Coords {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_point(s).map(Coords)
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| {
            let c = c.trim();
            c.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{c}` is not a finite number"))
        })
        .collect()
}

fn parse_binding(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", v.trim()))?;
    Ok((k.trim().to_string(), v))
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERIC
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::merge(args) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = commands::dispatch(&cli);
    if !outcome.body.is_empty() {
        let _ = out.write_all(outcome.body.as_bytes());
    }
    if let Some(e) = &outcome.error {
        let _ = writeln!(err, "error: {e}");
    }
    let _ = out.flush();
    outcome.code
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
