//! `boxdim`: trajectories of one-dimensional maps, their box dimension and
//! Minkowski content, and fixed-point classification at bifurcation values.

mod commands;
mod io;

use clap::{ArgGroup, Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use boxdim::dynamics::{MapFamily, MapSystem};
use boxdim::expr::MapExpr;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "boxdim",
    version,
    about = "Generate orbits of 1-D maps, measure box dimension and Minkowski \
             content, and classify fixed points at bifurcation parameters",
    after_help = "Exit codes: 0 success, 2 expression parse error, 3 numeric \
                  domain error, 4 estimator precondition failure, 1 anything else."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a map and write the trajectory as CSV
    Orbit(commands::OrbitArgs),
    /// Estimate box dimension of a point set or orbit file
    Dim(commands::DimArgs),
    /// Classify fixed points and check bifurcation conditions
    Classify(commands::ClassifyArgs),
    /// Sweep the parameter and tabulate attractors and dimensions
    Scan(commands::ScanArgs),
    /// Estimate Minkowski content of a point set at a given exponent
    Content(commands::ContentArgs),
}

/// How the map is specified on the command line. The recursion forms wrap a
/// step expression `f` into `x - f(x)` (monotone normal form) or
/// `-x - f(x)` (oscillating normal form).
#[derive(Args, Clone)]
#[command(group(
    ArgGroup::new("map_source")
        .required(true)
        .args(["map", "expr", "recursion", "recursion_osc"]),
))]
pub struct MapSpec {
    /// Built-in family: logistic (lam*x*(1-x)) or exponential (lam*e^x)
    #[arg(long, value_parser = ["logistic", "exponential"])]
    map: Option<String>,

    /// Custom expression in x and lam, e.g. "lam*x*(1-x^2)"
    #[arg(long)]
    expr: Option<String>,

    /// Step expression f: iterate x_{n+1} = x_n - f(x_n)
    #[arg(long)]
    recursion: Option<String>,

    /// Step expression f: iterate x_{n+1} = -x_n - f(x_n)
    #[arg(long = "recursion-osc")]
    recursion_osc: Option<String>,

    /// Parameter value substituted for lam
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,

    /// Iterate F^power instead of F
    #[arg(long, default_value_t = 1)]
    pub power: u32,
}

impl MapSpec {
    pub fn family(&self) -> Result<MapFamily, boxdim::Error> {
        if let Some(name) = &self.map {
            return Ok(match name.as_str() {
                "logistic" => MapFamily::Logistic,
                _ => MapFamily::Exponential,
            });
        }
        let source = if let Some(src) = &self.expr {
            src.clone()
        } else if let Some(f) = &self.recursion {
            format!("x-({f})")
        } else if let Some(f) = &self.recursion_osc {
            format!("-x-({f})")
        } else {
            unreachable!("clap enforces the map_source group")
        };
        Ok(MapFamily::Custom(MapExpr::parse(&source)?))
    }

    pub fn system(&self) -> Result<MapSystem, boxdim::Error> {
        let mut sys = MapSystem::new(self.family()?, self.lambda);
        sys.power = self.power.max(1);
        Ok(sys)
    }

    pub fn config(&self) -> Value {
        json!({
            "map": self.map,
            "expr": self.expr,
            "recursion": self.recursion,
            "recursion_osc": self.recursion_osc,
            "lambda": self.lambda,
            "power": self.power,
        })
    }
}

/// Anything a command can fail with, mapped onto the stable exit codes.
pub enum CliError {
    Core(boxdim::Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<boxdim::Error> for CliError {
    fn from(e: boxdim::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(boxdim::Error::Syntax { .. })
            | CliError::Core(boxdim::Error::UnknownIdentifier { .. }) => 2,
            CliError::Core(boxdim::Error::Domain(_)) => 3,
            CliError::Core(boxdim::Error::Precondition(_)) => 4,
            CliError::Io(_) | CliError::Usage(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
            CliError::Usage(msg) => msg.clone(),
        }
    }
}

pub fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("{what} must look like LO:HI")));
    }
    let lo = parts[0]
        .parse()
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    let hi = parts[1]
        .parse()
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    Ok((lo, hi))
}

pub fn parse_out(path: &Option<PathBuf>) -> Option<&PathBuf> {
    path.as_ref()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Orbit(args) => commands::run_orbit(args),
        Command::Dim(args) => commands::run_dim(args),
        Command::Classify(args) => commands::run_classify(args),
        Command::Scan(args) => commands::run_scan(args),
        Command::Content(args) => commands::run_content(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boxdim: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
