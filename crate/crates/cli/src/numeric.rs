//! Floating-point commands: integrated kernels, correlation series, density
//! sweeps, and potential diagnostics.

use rayon::prelude::*;
use serde::Serialize;

use virial_core::numerics::kernel_hat_reduced;
use virial_core::potential::{regularity_integral, stability_probe, PairPotential, StabilityReport};
use virial_core::series::{correlation, normalization, CorrelationSeries};

use crate::config::{Mode, OutputFormat, QuadratureConfig, RunConfig};
use crate::report::{self, csv_preamble};
use crate::{parse_eta, CliError, CliResult};

fn eta_out(eta: &[[f64; 3]], dim: usize) -> Vec<Vec<f64>> {
    eta.iter().map(|p| p[..dim].to_vec()).collect()
}

/// One comment line of grid/sample metadata for CSV outputs.
fn quad_comment(q: &QuadratureConfig) -> String {
    match q.mode {
        Mode::Grid => format!(
            "# dimension={} mode=grid points_per_panel={}\n",
            q.dimension, q.points_per_panel
        ),
        Mode::MonteCarlo => format!(
            "# dimension={} mode=monte-carlo samples={}\n",
            q.dimension, q.samples
        ),
    }
}

#[derive(Serialize)]
struct GraphTerm {
    edges: Vec<(String, String)>,
    value: f64,
    error: f64,
}

#[derive(Serialize)]
struct KernelHatData {
    eta: Vec<Vec<f64>>,
    order: u8,
    quadrature: QuadratureConfig,
    family_size: usize,
    value: f64,
    error: f64,
    per_graph: Vec<GraphTerm>,
}

pub fn kernel_hat(cfg: &RunConfig, eta_str: &str, order: u8) -> CliResult {
    let pot = cfg.potential_checked()?;
    let beta = cfg.beta_checked()?;
    let dim = cfg.quadrature.dimension;
    let eta = parse_eta("--eta", eta_str, dim)?;
    let spec = cfg.quadrature.to_spec(cfg.seed);
    let est = kernel_hat_reduced(&eta, order, pot, beta, &spec, cfg.caps.enumeration)
        .map_err(CliError::core)?;
    let data = KernelHatData {
        eta: eta_out(&eta, dim),
        order,
        quadrature: cfg.quadrature.clone(),
        family_size: est.per_graph.len(),
        value: est.value,
        error: est.error,
        per_graph: est
            .per_graph
            .iter()
            .map(|(g, e)| GraphTerm {
                edges: g.edge_labels(),
                value: e.value,
                error: e.error,
            })
            .collect(),
    };
    report::print_json("kernel-hat", cfg.sha256(), cfg.seed, data);
    Ok(())
}

#[derive(Serialize)]
struct TermOut {
    order: usize,
    family_size: usize,
    kernel_value: f64,
    kernel_error: f64,
    weight: f64,
    value: f64,
    error: f64,
}

#[derive(Serialize)]
struct CorrelateData {
    eta: Vec<Vec<f64>>,
    rho: f64,
    n_max: usize,
    quadrature: QuadratureConfig,
    boltzmann: f64,
    terms: Vec<TermOut>,
    value: f64,
    error: f64,
}

fn series_terms(s: &CorrelationSeries) -> Vec<TermOut> {
    s.terms
        .iter()
        .map(|t| TermOut {
            order: t.order,
            family_size: t.family_size,
            kernel_value: t.kernel_value,
            kernel_error: t.kernel_error,
            weight: t.weight,
            value: t.value,
            error: t.error,
        })
        .collect()
}

pub fn correlate(
    cfg: &RunConfig,
    eta_str: &str,
    rho: f64,
    n_max: usize,
    format: OutputFormat,
) -> CliResult {
    let pot = cfg.potential_checked()?;
    let beta = cfg.beta_checked()?;
    let dim = cfg.quadrature.dimension;
    let eta = parse_eta("--eta", eta_str, dim)?;
    let spec = cfg.quadrature.to_spec(cfg.seed);
    let s = correlation(&eta, rho, beta, pot, n_max, &spec, cfg.caps.enumeration)
        .map_err(CliError::core)?;
    match format {
        OutputFormat::Json => {
            let data = CorrelateData {
                eta: eta_out(&eta, dim),
                rho: s.rho,
                n_max: s.n_max,
                quadrature: cfg.quadrature.clone(),
                boltzmann: s.boltzmann,
                terms: series_terms(&s),
                value: s.value,
                error: s.error,
            };
            report::print_json("correlate", cfg.sha256(), cfg.seed, data);
        }
        OutputFormat::Csv => {
            let mut out = csv_preamble("correlate", &cfg.sha256(), cfg.seed);
            out.push_str(&quad_comment(&cfg.quadrature));
            out.push_str(
                "order,family_size,kernel_value,kernel_error,weight,value,error,cumulative\n",
            );
            let mut cumulative = 0.0;
            for t in &s.terms {
                cumulative += t.value;
                out.push_str(&format!(
                    "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    t.order,
                    t.family_size,
                    t.kernel_value,
                    t.kernel_error,
                    t.weight,
                    t.value,
                    t.error,
                    cumulative
                ));
            }
            report::print_text(&out);
        }
    }
    Ok(())
}

pub fn sweep(
    cfg: &RunConfig,
    eta_str: &str,
    grid_str: &str,
    n_max: usize,
    with_normalization: bool,
) -> CliResult {
    let pot = cfg.potential_checked()?;
    let beta = cfg.beta_checked()?;
    let dim = cfg.quadrature.dimension;
    let eta = parse_eta("--eta", eta_str, dim)?;
    let grid = crate::parse_grid("--rho-grid", grid_str)?;
    let spec = cfg.quadrature.to_spec(cfg.seed);
    let mut out = csv_preamble("sweep", &cfg.sha256(), cfg.seed);
    out.push_str(&quad_comment(&cfg.quadrature));
    if with_normalization {
        out.push_str("rho,value,error,q_hat,activity_factor\n");
    } else {
        out.push_str("rho,value,error\n");
    }
    // Densities are independent jobs; collect preserves grid order, so the
    // output bytes do not depend on the worker count.
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&rho| -> Result<String, CliError> {
            let s = correlation(&eta, rho, beta, pot, n_max, &spec, cfg.caps.enumeration)
                .map_err(CliError::core)?;
            if with_normalization {
                let norm = normalization(rho, beta, pot, n_max, &spec, cfg.caps.enumeration)
                    .map_err(CliError::core)?;
                Ok(format!(
                    "{rho},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    s.value, s.error, norm.q_hat, norm.activity_factor
                ))
            } else {
                Ok(format!("{rho},{:.17e},{:.17e}\n", s.value, s.error))
            }
        })
        .collect::<Result<_, _>>()?;
    for row in rows {
        out.push_str(&row);
    }
    report::print_text(&out);
    Ok(())
}

#[derive(Serialize)]
struct PotentialCheckData {
    potential: PairPotential,
    beta: f64,
    dim: usize,
    n_max: usize,
    trials_per_size: usize,
    /// Integral of |f| over the whole space; finite means the potential is
    /// integrable enough for the expansion integrals to converge.
    regularity_integral: f64,
    stability: StabilityReport,
}

pub fn potential_check(cfg: &RunConfig, dim: usize, n_max: usize, trials: usize) -> CliResult {
    let pot = cfg.potential_checked()?;
    let beta = cfg.beta_checked()?;
    if !(1..=3).contains(&dim) {
        return Err(CliError::usage("--dim", "must be 1, 2 or 3"));
    }
    let regularity = regularity_integral(pot, beta, dim).map_err(CliError::core)?;
    let stability =
        stability_probe(pot, beta, dim, n_max, trials, cfg.seed).map_err(CliError::core)?;
    let data = PotentialCheckData {
        potential: pot.clone(),
        beta: cfg.beta,
        dim,
        n_max,
        trials_per_size: trials,
        regularity_integral: regularity,
        stability,
    };
    report::print_json("potential-check", cfg.sha256(), cfg.seed, data);
    Ok(())
}
