//! Built-in cross-checks: condensed versions of the acceptance suite, runnable
//! from the shipped binary so an install can vouch for itself.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use virial_core::counting::{linear_closed_form, CountTable};
use virial_core::kernel::{
    kernel_by_graphs_with_cap, kernel_by_recurrence_with, kernels_equal, term_census, PickRule,
};
use virial_core::numerics::{kernel_hat_by_recurrence, kernel_hat_reduced, QuadratureSpec};
use virial_core::oracle::{check_ks_identity, partition_function, tonks_partition_function, CanonicalSystem};
use virial_core::potential::{factorization_gap, Beta, PairPotential, Point};

use crate::config::RunConfig;
use crate::report;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum What {
    /// One-pin kernels cancel to zero.
    FirstOrder,
    /// Recurrence kernels equal graph-family kernels, symbolically and
    /// numerically.
    KernelRoutes,
    /// Recursion-tree counts match their closed forms.
    Counts,
    /// Random splitting and product identity instances.
    Identities,
    /// Boltzmann factors factor over interaction bonds.
    Factorization,
    /// The reference solver reproduces closed forms and its one-step identity.
    Reference,
    All,
}

#[derive(Serialize)]
struct CheckOut {
    name: &'static str,
    ok: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyData {
    max: u8,
    checks: Vec<CheckOut>,
    ok: bool,
}

fn rods() -> PairPotential {
    PairPotential::HardCore { diameter: 1.0 }
}

fn well() -> PairPotential {
    PairPotential::SquareWell {
        diameter: 1.0,
        range: 1.5,
        depth: 0.4,
    }
}

fn beta() -> Beta {
    Beta::new(1.0).expect("unit inverse temperature")
}

fn first_order(cfg: &RunConfig, max: u8) -> Result<CheckOut, CliError> {
    let cap = cfg.caps.symbolic;
    let top = (max as usize).min(cap).saturating_sub(1).max(1) as u8;
    let mut ok = true;
    for n in 1..=top {
        let k = kernel_by_recurrence_with(1, n, PickRule::Lowest, cap).map_err(CliError::core)?;
        ok &= k.is_zero();
    }
    Ok(CheckOut {
        name: "first-order",
        ok,
        detail: format!("one-pin kernels identically zero for 1..={top} companions"),
    })
}

fn kernel_routes(cfg: &RunConfig, max: u8) -> Result<CheckOut, CliError> {
    let cap = cfg.caps.symbolic;
    let top = (max as usize).min(cap) as u8;
    let mut ok = true;
    let mut pairs = 0;
    for m in 1..=3u8 {
        for n in 0..=4u8 {
            if m + n > top {
                continue;
            }
            let a = kernel_by_recurrence_with(m, n, PickRule::Lowest, cap)
                .map_err(CliError::core)?;
            let b = kernel_by_graphs_with_cap(m, n, cap).map_err(CliError::core)?;
            ok &= kernels_equal(&a, &b).map_err(CliError::core)?;
            pairs += 1;
        }
    }
    // Numeric agreement of the two integrated routes on hard rods.
    let spec = QuadratureSpec::grid_1d(4);
    let mut worst: f64 = 0.0;
    for (m_pts, n) in [(2usize, 1u8), (2, 2)] {
        if m_pts as u8 + n > top {
            continue;
        }
        let eta: Vec<Point> = (0..m_pts)
            .map(|i| [1.3 * i as f64 - 0.5, 0.0, 0.0])
            .collect();
        let graphs = kernel_hat_reduced(&eta, n, &rods(), beta(), &spec, cfg.caps.enumeration)
            .map_err(CliError::core)?;
        let rec = kernel_hat_by_recurrence(&eta, n, &rods(), beta(), &spec)
            .map_err(CliError::core)?;
        let diff = (graphs.value - rec.value).abs();
        let tol = 1e-8 + 2.0 * (graphs.error + rec.error);
        ok &= diff <= tol;
        worst = worst.max(diff);
    }
    Ok(CheckOut {
        name: "kernel-routes",
        ok,
        detail: format!(
            "{pairs} symbolic shape(s) equal exactly; integrated routes differ by at most {worst:.3e}"
        ),
    })
}

fn counts(cfg: &RunConfig) -> Result<CheckOut, CliError> {
    let top = cfg.caps.order.min(8);
    let mut table = CountTable::new(cfg.caps.order);
    let mut ok = true;
    for m in 0..=top {
        for n in 0..=top {
            let lin = table.linear_by_recurrence(m, n).map_err(CliError::core)?;
            ok &= lin == linear_closed_form(m, n);
        }
    }
    let mut census_pairs = 0;
    for m in 1..=5u8 {
        for n in 0..=5u8 {
            if (m + n) as u32 > 5 {
                continue;
            }
            let census = BigUint::from(term_census(m, n, true).map_err(CliError::core)?);
            ok &= census == table.full(m as u32, n as u32).map_err(CliError::core)?;
            census_pairs += 1;
        }
    }
    Ok(CheckOut {
        name: "counts",
        ok,
        detail: format!(
            "linearized counts match the closed form up to ({top}, {top}); {census_pairs} census pair(s) match the full count"
        ),
    })
}

fn identities(cfg: &RunConfig) -> Result<CheckOut, CliError> {
    let (splitting, product, failures) = crate::symbolic::identity_trials(100, cfg.seed)?;
    Ok(CheckOut {
        name: "identities",
        ok: failures == 0,
        detail: format!(
            "{splitting} splitting and {product} product instances, {failures} failure(s)"
        ),
    })
}

fn factorization(cfg: &RunConfig) -> Result<CheckOut, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xfac7);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let (pot, dim) = if case % 2 == 0 {
            (rods(), 1)
        } else {
            (well(), if case % 4 == 1 { 1 } else { 3 })
        };
        let count = rng.gen_range(1usize..=8);
        let point = |rng: &mut ChaCha8Rng| -> Point {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                *c = rng.gen_range(-3.0..3.0);
            }
            p
        };
        let x = point(&mut rng);
        let gamma: Vec<Point> = (0..count).map(|_| point(&mut rng)).collect();
        let gap = factorization_gap(&pot, beta(), dim, x, &gamma).map_err(CliError::core)?;
        worst = worst.max(gap);
    }
    Ok(CheckOut {
        name: "factorization",
        ok: worst <= 1e-10,
        detail: format!("worst relative gap {worst:.3e} over 50 random configurations"),
    })
}

fn reference(cfg: &RunConfig) -> Result<CheckOut, CliError> {
    let top_n = cfg.caps.particles.min(4);
    let mut ok = true;
    let mut worst_z: f64 = 0.0;
    for n in 0..=top_n.max(2) {
        let sys = CanonicalSystem::new(n, 4.0, beta(), rods()).map_err(CliError::core)?;
        let z = partition_function(&sys).map_err(CliError::core)?;
        let exact = tonks_partition_function(n, 4.0, 1.0);
        let rel = (z - exact).abs() / exact.max(1.0);
        worst_z = worst_z.max(rel);
        ok &= rel <= 1e-8;
    }
    let pin_sets: [&[f64]; 2] = [&[0.3], &[-0.9, 0.6]];
    let mut worst_res: f64 = 0.0;
    for n in 2..=top_n {
        for pins in pin_sets {
            if pins.len() > n {
                continue;
            }
            let sys = CanonicalSystem::new(n, 4.0, beta(), rods()).map_err(CliError::core)?;
            let rep = check_ks_identity(&sys, pins, 4).map_err(CliError::core)?;
            let rel = rep.residual / rep.scale;
            worst_res = worst_res.max(rel);
            ok &= rel <= 1e-4;
        }
    }
    Ok(CheckOut {
        name: "reference",
        ok,
        detail: format!(
            "hard-rod partition functions within {worst_z:.3e} of closed forms (N <= {}); one-step identity residual at most {worst_res:.3e} relative (N <= {top_n})",
            top_n.max(2)
        ),
    })
}

pub fn run(cfg: &RunConfig, what: What, max: u8) -> CliResult {
    let mut checks = Vec::new();
    let wants = |w: What| what == w || what == What::All;
    if wants(What::FirstOrder) {
        checks.push(first_order(cfg, max)?);
    }
    if wants(What::KernelRoutes) {
        checks.push(kernel_routes(cfg, max)?);
    }
    if wants(What::Counts) {
        checks.push(counts(cfg)?);
    }
    if wants(What::Identities) {
        checks.push(identities(cfg)?);
    }
    if wants(What::Factorization) {
        checks.push(factorization(cfg)?);
    }
    if wants(What::Reference) {
        checks.push(reference(cfg)?);
    }
    let ok = checks.iter().all(|c| c.ok);
    report::print_json("verify", cfg.sha256(), cfg.seed, VerifyData { max, checks, ok });
    if ok {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}
