//! Commands backed by the exact finite-N reference solver.

use serde::Serialize;

use virial_core::oracle::{
    check_ks_identity, finite_correlation, limit_activity_factor, limit_pair_correlation,
    partition_function, CanonicalSystem, LimitReport,
};

use crate::config::RunConfig;
use crate::report;
use crate::{parse_scalars, parse_sizes, CliError, CliResult};

fn system(cfg: &RunConfig, n: usize, half_width: f64) -> Result<CanonicalSystem, CliError> {
    if n > cfg.caps.particles {
        return Err(CliError::usage(
            "--n",
            format!("{n} exceeds caps.particles ({})", cfg.caps.particles),
        ));
    }
    let pot = cfg.potential_checked()?;
    let beta = cfg.beta_checked()?;
    CanonicalSystem::new(n, half_width, beta, pot.clone()).map_err(CliError::core)
}

#[derive(Serialize)]
struct ZData {
    n: usize,
    half_width: f64,
    value: f64,
}

pub fn z(cfg: &RunConfig, n: usize, half_width: f64) -> CliResult {
    let sys = system(cfg, n, half_width)?;
    let value = partition_function(&sys).map_err(CliError::core)?;
    report::print_json(
        "oracle-z",
        cfg.sha256(),
        cfg.seed,
        ZData {
            n,
            half_width,
            value,
        },
    );
    Ok(())
}

#[derive(Serialize)]
struct CorrData {
    n: usize,
    half_width: f64,
    pins: Vec<f64>,
    /// Marginal-density value from the configurational integrals.  With hard
    /// walls the one-pin marginal is not flat, so for a single pin this
    /// differs from `mean_density`; both conventions are reported.
    value: f64,
    /// The flat convention `N / (2 half_width)`.
    mean_density: f64,
}

pub fn corr(cfg: &RunConfig, n: usize, half_width: f64, eta_str: &str) -> CliResult {
    let pins = parse_scalars("--eta", eta_str)?;
    let sys = system(cfg, n, half_width)?;
    let value = finite_correlation(&sys, &pins).map_err(CliError::core)?;
    report::print_json(
        "oracle-corr",
        cfg.sha256(),
        cfg.seed,
        CorrData {
            n,
            half_width,
            pins,
            value,
            mean_density: n as f64 / (2.0 * half_width),
        },
    );
    Ok(())
}

#[derive(Serialize)]
struct KsData {
    n: usize,
    half_width: f64,
    pins: Vec<f64>,
    points_per_panel: usize,
    lhs: f64,
    rhs: f64,
    residual: f64,
    scale: f64,
    relative_residual: f64,
    activity_ratio: f64,
    bridge_contributions: Vec<f64>,
}

pub fn ks_check(
    cfg: &RunConfig,
    n: usize,
    half_width: f64,
    eta_str: &str,
    points: usize,
) -> CliResult {
    let pins = parse_scalars("--eta", eta_str)?;
    let sys = system(cfg, n, half_width)?;
    let rep = check_ks_identity(&sys, &pins, points).map_err(CliError::core)?;
    report::print_json(
        "oracle-ks-check",
        cfg.sha256(),
        cfg.seed,
        KsData {
            n,
            half_width,
            pins,
            points_per_panel: points,
            lhs: rep.lhs,
            rhs: rep.rhs,
            residual: rep.residual,
            scale: rep.scale,
            relative_residual: rep.residual / rep.scale,
            activity_ratio: rep.activity_ratio,
            bridge_contributions: rep.bridge_contributions,
        },
    );
    Ok(())
}

#[derive(Serialize)]
struct SampleOut {
    n: usize,
    half_width: f64,
    value: f64,
}

#[derive(Serialize)]
struct LimitData {
    quantity: &'static str,
    density: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    separation: Option<f64>,
    samples: Vec<SampleOut>,
    extrapolated: f64,
    converging: bool,
}

fn limit_data(
    quantity: &'static str,
    separation: Option<f64>,
    rep: &LimitReport,
) -> LimitData {
    LimitData {
        quantity,
        density: rep.density,
        separation,
        samples: rep
            .samples
            .iter()
            .map(|p| SampleOut {
                n: p.n,
                half_width: p.half_width,
                value: p.value,
            })
            .collect(),
        extrapolated: rep.extrapolated,
        converging: rep.converging,
    }
}

pub fn extrapolate(
    cfg: &RunConfig,
    rho: f64,
    separation: Option<f64>,
    sizes_str: &str,
    activity: bool,
) -> CliResult {
    let sizes = parse_sizes("--sizes", sizes_str)?;
    if let Some(&worst) = sizes.iter().max() {
        if worst > cfg.caps.particles {
            return Err(CliError::usage(
                "--sizes",
                format!("{worst} exceeds caps.particles ({})", cfg.caps.particles),
            ));
        }
    }
    let pot = cfg.potential_checked()?;
    let beta = cfg.beta_checked()?;
    let data = if activity {
        let rep = limit_activity_factor(pot, beta, rho, &sizes).map_err(CliError::core)?;
        limit_data("activity-factor", None, &rep)
    } else {
        let sep = separation
            .ok_or_else(|| CliError::usage("--separation", "required without --activity"))?;
        let rep =
            limit_pair_correlation(pot, beta, rho, sep, &sizes).map_err(CliError::core)?;
        limit_data("pair-correlation", Some(sep), &rep)
    };
    report::print_json("oracle-extrapolate", cfg.sha256(), cfg.seed, data);
    Ok(())
}
