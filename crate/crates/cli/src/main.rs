//! `virial`: command line front end for the density-expansion library.
//!
//! Every successful report goes to stdout as JSON in a common envelope (or as
//! CSV with the same metadata in comment lines).  Failures print a
//! machine-readable error object; configuration and usage problems exit with
//! code 2, runtime failures and failed checks with code 1.

mod config;
mod numeric;
mod oracle_cmd;
mod report;
mod symbolic;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use virial_core::potential::Point;

use config::{ConfigError, OutputFormat, RunConfig};
use symbolic::{FamilyArg, MethodArg};

pub enum CliError {
    Config(ConfigError),
    Usage { flag: &'static str, message: String },
    Runtime(String),
    /// The command ran and reported, but a check inside it failed.
    CheckFailed,
}

impl CliError {
    fn core(e: virial_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }

    fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

pub type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(
    name = "virial",
    version,
    about = "Density expansions for canonical-ensemble correlation functions"
)]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override the inverse temperature from the configuration.
    #[arg(long, global = true, value_name = "BETA")]
    beta: Option<f64>,
    /// Override the random seed from the configuration.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Worker threads for commands that fan out over independent jobs
    /// (the density sweep); defaults to the available parallelism.  Grid-mode
    /// output is byte-identical for any worker count.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spot-check the weighted-configuration identities on random instances.
    AlgebraCheck {
        /// How many random instances to draw.
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Labeled two-color graph families.
    Graphs {
        #[command(subcommand)]
        action: GraphsAction,
    },
    /// Term-count table as CSV.
    Counts {
        #[arg(long, value_name = "M")]
        max_m: u32,
        #[arg(long, value_name = "N")]
        max_n: u32,
        /// Count the linearized recursion tree instead of the full one.
        #[arg(long)]
        linear: bool,
    },
    /// Symbolic expansion kernel for a given shape.
    Kernel {
        /// Number of pinned points.
        #[arg(long)]
        white: u8,
        /// Number of integration points.
        #[arg(long)]
        black: u8,
        #[arg(long, value_enum, default_value_t = MethodArg::Recurrence)]
        method: MethodArg,
        /// Emit the raw pre-cancellation terms (recurrence method only).
        #[arg(long)]
        no_cancel: bool,
    },
    /// Numerically integrated kernel at pinned points.
    KernelHat {
        /// Pinned points: coordinates comma-separated, points
        /// semicolon-separated; a bare comma list is one-dimensional points.
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Number of integrated companion points.
        #[arg(long)]
        order: u8,
    },
    /// Truncated density series for the correlation function.
    Correlate {
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Particle density.
        #[arg(long)]
        rho: f64,
        /// Largest companion order kept in the series.
        #[arg(long)]
        nmax: usize,
        /// Overrides the configured output format.
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Correlation series across a density grid, as CSV.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Density grid: `start:stop:steps` or a comma list.
        #[arg(long)]
        rho_grid: String,
        #[arg(long)]
        nmax: usize,
        /// Add the normalization constant and activity factor per density.
        #[arg(long)]
        with_normalization: bool,
    },
    /// Exact finite-N reference solver (one-dimensional).
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Pair-potential diagnostics.
    Potential {
        #[command(subcommand)]
        action: PotentialAction,
    },
    /// Run the built-in cross-checks and report pass or fail per check.
    Verify {
        #[arg(value_enum, default_value_t = verify::What::All)]
        what: verify::What,
        /// Size ceiling (pinned plus integrated points) for the exact checks.
        #[arg(long, default_value_t = 6)]
        max: u8,
    },
}

#[derive(Subcommand)]
enum GraphsAction {
    /// Stream a graph family, one JSON object per line.
    Enumerate {
        #[arg(long)]
        white: u8,
        #[arg(long)]
        black: u8,
        #[arg(long, value_enum, default_value_t = FamilyArg::Admissible)]
        family: FamilyArg,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    /// Canonical partition function.
    Z {
        /// Particle number.
        #[arg(long)]
        n: usize,
        /// Half-width of the centered box.
        #[arg(long)]
        half_width: f64,
    },
    /// Finite-N correlation function at pinned positions.
    Corr {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        half_width: f64,
        /// Pinned positions, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
    },
    /// Residual of the one-step consistency identity linking N to N-1.
    KsCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        half_width: f64,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Quadrature points per panel segment.
        #[arg(long, default_value_t = 4)]
        points: usize,
    },
    /// Extrapolate finite-N values to the bulk limit at fixed density.
    Extrapolate {
        #[arg(long)]
        rho: f64,
        /// Pair separation (ignored with --activity).
        #[arg(long)]
        separation: Option<f64>,
        /// Comma-separated system sizes, smallest first.
        #[arg(long, default_value = "2,3,4,5,6")]
        sizes: String,
        /// Extrapolate the activity-to-density factor instead.
        #[arg(long)]
        activity: bool,
    },
}

#[derive(Subcommand)]
enum PotentialAction {
    /// Integrability and stability diagnostics for the configured potential.
    Check {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Largest random configuration size probed.
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Random trials per configuration size.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn parse_scalar(flag: &'static str, token: &str) -> Result<f64, CliError> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::usage(flag, format!("`{}` is not a number", token.trim())))
}

/// Comma-separated scalar list.
pub fn parse_scalars(flag: &'static str, s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Err(CliError::usage(flag, "empty list"));
    }
    s.split(',').map(|t| parse_scalar(flag, t)).collect()
}

fn parse_point(flag: &'static str, s: &str, dim: usize) -> Result<Point, CliError> {
    let coords = parse_scalars(flag, s)?;
    if coords.len() != dim {
        return Err(CliError::usage(
            flag,
            format!(
                "point `{}` has {} coordinates, the configured dimension is {dim}",
                s.trim(),
                coords.len()
            ),
        ));
    }
    let mut p: Point = [0.0; 3];
    p[..dim].copy_from_slice(&coords);
    Ok(p)
}

/// Pinned-point list.  Semicolons separate points and commas coordinates; a
/// bare comma list is read as one-dimensional points when `dim` is 1.
pub fn parse_eta(flag: &'static str, s: &str, dim: usize) -> Result<Vec<Point>, CliError> {
    if s.trim().is_empty() {
        return Err(CliError::usage(flag, "need at least one pinned point"));
    }
    if s.contains(';') {
        s.split(';').map(|part| parse_point(flag, part, dim)).collect()
    } else if dim == 1 {
        Ok(parse_scalars(flag, s)?
            .into_iter()
            .map(|x| [x, 0.0, 0.0])
            .collect())
    } else {
        Ok(vec![parse_point(flag, s, dim)?])
    }
}

/// `start:stop:steps` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(flag: &'static str, s: &str) -> Result<Vec<f64>, CliError> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(flag, "expected start:stop:steps"));
        }
        let start = parse_scalar(flag, parts[0])?;
        let stop = parse_scalar(flag, parts[1])?;
        let steps: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::usage(flag, "steps must be a positive integer"))?;
        if steps == 0 {
            return Err(CliError::usage(flag, "steps must be a positive integer"));
        }
        if steps == 1 {
            return Ok(vec![start]);
        }
        let h = (stop - start) / (steps - 1) as f64;
        return Ok((0..steps).map(|k| start + h * k as f64).collect());
    }
    parse_scalars(flag, s)
}

pub fn parse_sizes(flag: &'static str, s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::usage(flag, format!("`{}` is not a size", t.trim())))
        })
        .collect()
}

fn effective_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(beta) = cli.beta {
        cfg.beta = beta;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(command: &Command, cfg: &RunConfig) -> CliResult {
    match command {
        Command::AlgebraCheck { cases } => symbolic::algebra_check(cfg, *cases, cfg.seed),
        Command::Graphs {
            action: GraphsAction::Enumerate {
                white,
                black,
                family,
            },
        } => symbolic::graphs_enumerate(cfg, *white, *black, *family),
        Command::Counts {
            max_m,
            max_n,
            linear,
        } => symbolic::counts(cfg, *max_m, *max_n, *linear),
        Command::Kernel {
            white,
            black,
            method,
            no_cancel,
        } => symbolic::kernel(cfg, *white, *black, *method, *no_cancel),
        Command::KernelHat { eta, order } => numeric::kernel_hat(cfg, eta, *order),
        Command::Correlate {
            eta,
            rho,
            nmax,
            format,
        } => numeric::correlate(cfg, eta, *rho, *nmax, format.unwrap_or(cfg.format)),
        Command::Sweep {
            eta,
            rho_grid,
            nmax,
            with_normalization,
        } => numeric::sweep(cfg, eta, rho_grid, *nmax, *with_normalization),
        Command::Oracle { action } => match action {
            OracleAction::Z { n, half_width } => oracle_cmd::z(cfg, *n, *half_width),
            OracleAction::Corr { n, half_width, eta } => {
                oracle_cmd::corr(cfg, *n, *half_width, eta)
            }
            OracleAction::KsCheck {
                n,
                half_width,
                eta,
                points,
            } => oracle_cmd::ks_check(cfg, *n, *half_width, eta, *points),
            OracleAction::Extrapolate {
                rho,
                separation,
                sizes,
                activity,
            } => oracle_cmd::extrapolate(cfg, *rho, *separation, sizes, *activity),
        },
        Command::Potential {
            action: PotentialAction::Check { dim, n_max, trials },
        } => numeric::potential_check(cfg, *dim, *n_max, *trials),
        Command::Verify { what, max } => verify::run(cfg, *what, *max),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            report::print_error("usage", Some("--workers".into()), "must be positive".into());
            return ExitCode::from(2);
        }
        // Ignore the error when a pool already exists; only the first call wins.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            report::print_error("config", e.key, e.message);
            return ExitCode::from(2);
        }
    };
    match run(&cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(e)) => {
            report::print_error("config", e.key, e.message);
            ExitCode::from(2)
        }
        Err(CliError::Usage { flag, message }) => {
            report::print_error("usage", Some(flag.to_string()), message);
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            report::print_error("runtime", None, message);
            ExitCode::from(1)
        }
        Err(CliError::CheckFailed) => ExitCode::from(1),
    }
}
