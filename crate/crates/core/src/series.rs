//! Density-expansion partial sums for correlation functions, and the
//! normalization constant relating density to activity.
//!
//! A correlation value at pinned points `eta` is the truncated power series
//! in density whose order-`n` term is `rho^(m+n) exp(-beta U(eta)) / n!`
//! times the reduced integrated kernel of order `n`.  The single-point value
//! is exactly `rho` at every truncation order: all higher kernels vanish
//! because their admissible graph family is empty.
//!
//! The normalization constant is assembled from the same truncated series:
//! `q_hat` sums, over the number `s` of bridge points tied to a reference
//! site by Mayer bonds, the integrals of the bond product against the
//! truncated `s`-point correlation.  Bridge counts `s <= 2` are kept, which
//! fixes `q_hat` through third order in density; the reciprocal is the
//! activity-to-density ratio.

use std::collections::HashMap;

use crate::numerics::{kernel_hat_reduced, QuadMode, QuadratureSpec};
use crate::potential::{boltzmann_pair, distance, mayer_f, Beta, PairPotential, Point};
use crate::quad::{panel_edges, simpson_on_panels};
use crate::{Error, Result};

/// One order of the truncated density expansion at fixed pins.
#[derive(Debug, Clone)]
pub struct OrderTerm {
    /// Number of integrated-out companion points.
    pub order: usize,
    /// Size of the admissible graph family at this order.
    pub family_size: usize,
    /// Reduced integrated kernel and its quadrature error.
    pub kernel_value: f64,
    pub kernel_error: f64,
    /// `rho^(m+n) exp(-beta U(eta)) / n!`.
    pub weight: f64,
    pub value: f64,
    pub error: f64,
}

/// A truncated correlation series at fixed pinned points.
#[derive(Debug, Clone)]
pub struct CorrelationSeries {
    pub rho: f64,
    pub n_max: usize,
    /// `exp(-beta U(eta))`; exactly zero when pins overlap a hard core.
    pub boltzmann: f64,
    pub terms: Vec<OrderTerm>,
    pub value: f64,
    pub error: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Truncated density expansion of the correlation function at `eta`.
pub fn correlation(
    eta: &[Point],
    rho: f64,
    beta: Beta,
    pot: &PairPotential,
    n_max: usize,
    spec: &QuadratureSpec,
    graph_cap: usize,
) -> Result<CorrelationSeries> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density must be positive, got {rho}"
        )));
    }
    pot.validate()?;
    let m = eta.len();

    let mut boltzmann = 1.0;
    for i in 0..m {
        for j in i + 1..m {
            boltzmann *= boltzmann_pair(pot, beta, distance(eta[i], eta[j], spec.dimension));
        }
    }
    if boltzmann == 0.0 {
        // Overlapping cores force every term to zero; skip the integrals.
        return Ok(CorrelationSeries {
            rho,
            n_max,
            boltzmann,
            terms: Vec::new(),
            value: 0.0,
            error: 0.0,
        });
    }

    let mut terms = Vec::with_capacity(n_max + 1);
    let mut value = 0.0;
    let mut error = 0.0;
    for n in 0..=n_max {
        let kernel = kernel_hat_reduced(eta, n as u8, pot, beta, spec, graph_cap)?;
        let weight = rho.powi((m + n) as i32) * boltzmann / factorial(n);
        let term_value = weight * kernel.value;
        let term_error = weight.abs() * kernel.error;
        value += term_value;
        error += term_error;
        terms.push(OrderTerm {
            order: n,
            family_size: kernel.per_graph.len(),
            kernel_value: kernel.value,
            kernel_error: kernel.error,
            weight,
            value: term_value,
            error: term_error,
        });
    }
    Ok(CorrelationSeries {
        rho,
        n_max,
        boltzmann,
        terms,
        value,
        error,
    })
}

/// The normalization constant at density `rho`, with its ingredients.
#[derive(Debug, Clone)]
pub struct NormalizationReport {
    pub rho: f64,
    /// Companion-order truncation used inside the two-point correlation.
    pub n_max: usize,
    /// Contributions by bridge count `s = 0, 1, 2`.
    pub bridge_terms: Vec<f64>,
    pub q_hat: f64,
    /// `1 / q_hat`: the activity-to-density ratio.
    pub activity_factor: f64,
    pub error: f64,
}

/// Normalization constant from the truncated series; one-dimensional grid
/// quadrature only.
pub fn normalization(
    rho: f64,
    beta: Beta,
    pot: &PairPotential,
    n_max: usize,
    spec: &QuadratureSpec,
    graph_cap: usize,
) -> Result<NormalizationReport> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density must be positive, got {rho}"
        )));
    }
    pot.validate()?;
    let QuadMode::Grid { points_per_panel } = spec.mode else {
        return Err(Error::InvalidParameter(
            "the normalization constant needs grid quadrature".into(),
        ));
    };
    if spec.dimension != 1 {
        return Err(Error::InvalidParameter(
            "the normalization constant is implemented in one dimension".into(),
        ));
    }

    let range = pot.interaction_range(beta);
    if range == 0.0 {
        // Free gas: every bridge bond vanishes.
        return Ok(NormalizationReport {
            rho,
            n_max,
            bridge_terms: vec![1.0, 0.0, 0.0],
            q_hat: 1.0,
            activity_factor: 1.0,
            error: 0.0,
        });
    }
    let radii = pot.breakpoint_radii();
    let points = points_per_panel;

    // s = 1: rho times the integral of a single Mayer bond.
    let f_edges = panel_edges(
        radii.iter().flat_map(|&r| [r, -r]),
        -range,
        range,
    );
    let mut bond = |u: f64| mayer_f(pot, beta, u.abs());
    let f1_coarse = simpson_on_panels(&mut bond, &f_edges, points);
    let f1_fine = simpson_on_panels(&mut bond, &f_edges, 2 * points);
    let s1 = rho * f1_fine;
    let s1_err = rho * (f1_fine - f1_coarse).abs();

    // s = 2 reduces to a one-dimensional integral over the separation w of
    // the bond autocorrelation against the truncated pair correlation.
    let bond_overlap = |w: f64| {
        let edges = panel_edges(
            radii
                .iter()
                .flat_map(|&r| [r, -r, w + r, w - r]),
            -range,
            range,
        );
        let mut f = |u: f64| mayer_f(pot, beta, u.abs()) * mayer_f(pot, beta, (u - w).abs());
        simpson_on_panels(&mut f, &edges, 2 * points)
    };

    let mut pair_cache: HashMap<u64, (f64, f64)> = HashMap::new();
    let mut pair_at = |w: f64| -> Result<(f64, f64)> {
        if let Some(&hit) = pair_cache.get(&w.to_bits()) {
            return Ok(hit);
        }
        let sep = w.abs();
        let series = if sep == 0.0 {
            None
        } else {
            Some(correlation(
                &[[0.0, 0.0, 0.0], [sep, 0.0, 0.0]],
                rho,
                beta,
                pot,
                n_max,
                spec,
                graph_cap,
            )?)
        };
        let out = match series {
            Some(s) => (s.value, s.error),
            // Coincident points: only a hard core keeps this finite, and
            // there it vanishes; for purely finite potentials use the
            // zero-separation Boltzmann-weighted value.
            None => {
                let b = boltzmann_pair(pot, beta, 0.0);
                (rho * rho * b, 0.0)
            }
        };
        pair_cache.insert(w.to_bits(), out);
        Ok(out)
    };

    // Kinks of the integrand sit at radius sums and at radius multiples
    // propagated through the truncated series.
    let mut w_bps = vec![0.0];
    for &r in &radii {
        for j in 1..=n_max + 1 {
            w_bps.push(j as f64 * r);
            w_bps.push(-(j as f64) * r);
        }
        for &r2 in &radii {
            w_bps.push(r + r2);
            w_bps.push(-(r + r2));
        }
    }
    let w_edges = panel_edges(w_bps, -2.0 * range, 2.0 * range);

    let mut failure: Option<Error> = None;
    {
        let mut value_integrand = |w: f64| match pair_at(w) {
            Ok((v, _)) => bond_overlap(w) * v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        };
        let i2_coarse = simpson_on_panels(&mut value_integrand, &w_edges, points);
        let i2_fine = simpson_on_panels(&mut value_integrand, &w_edges, 2 * points);
        if let Some(e) = failure {
            return Err(e);
        }
        let mut error_integrand = |w: f64| match pair_at(w) {
            Ok((_, e)) => bond_overlap(w).abs() * e,
            Err(_) => 0.0,
        };
        let i2_err_prop = simpson_on_panels(&mut error_integrand, &w_edges, 2 * points).abs();

        let s2 = 0.5 * i2_fine;
        let s2_err = 0.5 * ((i2_fine - i2_coarse).abs() + i2_err_prop);

        let q_hat = 1.0 + s1 + s2;
        if !(q_hat > 0.0) {
            return Err(Error::NonpositiveNormalization(q_hat));
        }
        Ok(NormalizationReport {
            rho,
            n_max,
            bridge_terms: vec![1.0, s1, s2],
            q_hat,
            activity_factor: 1.0 / q_hat,
            error: s1_err + s2_err,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64) -> Point {
        [x, 0.0, 0.0]
    }

    fn rods(a: f64) -> PairPotential {
        PairPotential::HardCore { diameter: a }
    }

    #[test]
    fn single_point_value_is_exactly_the_density() {
        let beta = Beta::new(1.0).unwrap();
        let spec = QuadratureSpec::grid_1d(4);
        for n_max in 0..=3 {
            let s = correlation(&[pt(0.7)], 0.3, beta, &rods(1.0), n_max, &spec, 9).unwrap();
            assert_eq!(s.value, 0.3);
            assert!(s.error < 1e-12);
            // Companion orders are all structurally zero.
            for t in &s.terms[1..] {
                assert_eq!(t.family_size, 0);
                assert_eq!(t.value, 0.0);
            }
        }
    }

    #[test]
    fn overlapping_pins_vanish_without_any_quadrature() {
        let beta = Beta::new(1.0).unwrap();
        let spec = QuadratureSpec::grid_1d(4);
        let s = correlation(&[pt(0.0), pt(0.4)], 0.2, beta, &rods(1.0), 3, &spec, 9).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.boltzmann, 0.0);
        assert!(s.terms.is_empty());
    }

    #[test]
    fn pair_series_matches_hand_expansion_for_hard_rods() {
        let beta = Beta::new(1.0).unwrap();
        let spec = QuadratureSpec::grid_1d(8);
        let rho = 0.1;

        // First order: rho^2 + rho^3 (2a - r) in the overlap window.
        let s = correlation(&[pt(0.0), pt(1.3)], rho, beta, &rods(1.0), 1, &spec, 9).unwrap();
        let expect = rho * rho + rho * rho * rho * 0.7;
        assert!((s.value - expect).abs() < 1e-12, "got {}", s.value);

        // Beyond the reach of one companion the correction is exactly zero.
        let s = correlation(&[pt(0.0), pt(2.5)], rho, beta, &rods(1.0), 1, &spec, 9).unwrap();
        assert!((s.value - rho * rho).abs() < 1e-15);
    }

    #[test]
    fn ideal_gas_pair_value_is_rho_squared_at_any_order() {
        let beta = Beta::new(1.0).unwrap();
        let spec = QuadratureSpec::grid_1d(4);
        let s = correlation(&[pt(0.0), pt(1.0)], 0.4, beta, &PairPotential::Ideal, 3, &spec, 9)
            .unwrap();
        assert_eq!(s.value, 0.4 * 0.4);
        assert!(s.error < 1e-12);
    }

    #[test]
    fn ideal_gas_normalization_is_unity() {
        let beta = Beta::new(1.0).unwrap();
        let spec = QuadratureSpec::grid_1d(4);
        let r = normalization(0.3, beta, &PairPotential::Ideal, 2, &spec, 9).unwrap();
        assert_eq!(r.q_hat, 1.0);
        assert_eq!(r.activity_factor, 1.0);
    }

    #[test]
    fn hard_rod_normalization_matches_the_exact_activity_ratio() {
        // For unit rods the exact ratio is rho/z = (1 - x) exp(-x/(1 - x))
        // with x = rho a.  The s <= 2, n <= 2 truncation reproduces it
        // through fourth order, since the three- and four-bridge integrals
        // vanish identically for rods.
        let beta = Beta::new(1.0).unwrap();
        let spec = QuadratureSpec::grid_1d(4);
        for x in [0.02, 0.04, 0.08] {
            let rep = normalization(x, beta, &rods(1.0), 2, &spec, 9).unwrap();
            let exact = (1.0 - x) * (-x / (1.0 - x)).exp();
            let diff = (rep.q_hat - exact).abs();
            assert!(
                diff <= x.powi(4),
                "x {x}: q {} vs exact {exact} (diff {diff})",
                rep.q_hat
            );
            let exact_activity = (x / (1.0 - x)).exp() / (1.0 - x);
            assert!((rep.activity_factor - exact_activity).abs() <= 2.0 * x.powi(4));
        }
    }

    #[test]
    fn normalization_rejects_unsupported_quadrature() {
        let beta = Beta::new(1.0).unwrap();
        let mc = QuadratureSpec::monte_carlo(1, 100, 1);
        assert!(normalization(0.1, beta, &rods(1.0), 2, &mc, 9).is_err());
        let mut d3 = QuadratureSpec::grid_1d(4);
        d3.dimension = 3;
        assert!(normalization(0.1, beta, &rods(1.0), 2, &d3, 9).is_err());
    }
}
