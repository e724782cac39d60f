//! Radial pair potentials, Mayer functions, and the interaction energies
//! built from them.
//!
//! A potential is a function of center distance only; +infinity values are
//! legal and model hard cores exactly (`exp(-beta * inf) == 0.0` in IEEE
//! arithmetic, so Mayer factors hit -1 with no rounding).  Dimension enters
//! only through volume integrals and is passed where needed.

use serde::{Deserialize, Serialize};

use crate::quad::adaptive_simpson;
use crate::{Error, Result};

/// Inverse temperature; strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta(f64);

impl Beta {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature must be positive and finite, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A point in up to three dimensions; unused trailing coordinates stay zero.
pub type Point = [f64; 3];

pub fn distance(a: Point, b: Point, dim: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..dim {
        let d = a[k] - b[k];
        acc += d * d;
    }
    acc.sqrt()
}

/// Supported pair potential shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PairPotential {
    /// No interaction at all; the free-gas reference.
    Ideal,
    /// Infinite inside the core diameter, zero outside.
    HardCore { diameter: f64 },
    /// Infinite inside `diameter`, `-depth` out to `range`, zero beyond.
    SquareWell {
        diameter: f64,
        range: f64,
        depth: f64,
    },
    /// `4 epsilon ((sigma/r)^12 - (sigma/r)^6)`.
    LennardJones { epsilon: f64, sigma: f64 },
    /// Piecewise-linear in `r` over the given `(r, phi)` knots, infinite
    /// below the first knot, zero beyond the last.
    Tabulated { points: Vec<(f64, f64)> },
}

impl PairPotential {
    /// Parameter sanity; call once after constructing from external input.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            PairPotential::Ideal => {}
            PairPotential::HardCore { diameter } => {
                if !diameter.is_finite() || *diameter <= 0.0 {
                    return bad(format!("hard core diameter must be positive, got {diameter}"));
                }
            }
            PairPotential::SquareWell {
                diameter,
                range,
                depth,
            } => {
                if !diameter.is_finite() || *diameter <= 0.0 {
                    return bad(format!("well core diameter must be positive, got {diameter}"));
                }
                if !range.is_finite() || range <= diameter {
                    return bad(format!(
                        "well range must exceed the core diameter ({diameter}), got {range}"
                    ));
                }
                if !depth.is_finite() || *depth < 0.0 {
                    return bad(format!("well depth must be nonnegative, got {depth}"));
                }
            }
            PairPotential::LennardJones { epsilon, sigma } => {
                if !epsilon.is_finite() || *epsilon <= 0.0 {
                    return bad(format!("epsilon must be positive, got {epsilon}"));
                }
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return bad(format!("sigma must be positive, got {sigma}"));
                }
            }
            PairPotential::Tabulated { points } => {
                if points.is_empty() {
                    return bad("tabulated potential needs at least one knot".into());
                }
                if points[0].0 <= 0.0 {
                    return bad("tabulated knots must start at positive r".into());
                }
                if points.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return bad("tabulated knots must have strictly increasing r".into());
                }
                if points.iter().any(|&(r, v)| !r.is_finite() || !v.is_finite()) {
                    return bad("tabulated knots must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// The potential at distance `r >= 0`; may be +infinity.
    pub fn phi(&self, r: f64) -> f64 {
        match self {
            PairPotential::Ideal => 0.0,
            PairPotential::HardCore { diameter } => {
                if r < *diameter {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            PairPotential::SquareWell {
                diameter,
                range,
                depth,
            } => {
                if r < *diameter {
                    f64::INFINITY
                } else if r < *range {
                    -depth
                } else {
                    0.0
                }
            }
            PairPotential::LennardJones { epsilon, sigma } => {
                if r == 0.0 {
                    return f64::INFINITY;
                }
                let s6 = (sigma / r).powi(6);
                4.0 * epsilon * (s6 * s6 - s6)
            }
            PairPotential::Tabulated { points } => {
                if r < points[0].0 {
                    return f64::INFINITY;
                }
                if r >= points[points.len() - 1].0 {
                    return 0.0;
                }
                let idx = points.partition_point(|&(rk, _)| rk <= r);
                let (r0, v0) = points[idx - 1];
                let (r1, v1) = points[idx];
                v0 + (v1 - v0) * (r - r0) / (r1 - r0)
            }
        }
    }

    /// Largest distance at which the potential is still infinite; zero for
    /// potentials without a hard core.
    pub fn hard_core_diameter(&self) -> f64 {
        match self {
            PairPotential::Ideal => 0.0,
            PairPotential::HardCore { diameter } => *diameter,
            PairPotential::SquareWell { diameter, .. } => *diameter,
            PairPotential::LennardJones { .. } => 0.0,
            PairPotential::Tabulated { points } => points[0].0,
        }
    }

    /// Distance beyond which `|mayer_f|` stays below `1e-12`.
    pub fn interaction_range(&self, beta: Beta) -> f64 {
        const TINY: f64 = 1e-12;
        match self {
            PairPotential::Ideal => 0.0,
            PairPotential::HardCore { diameter } => *diameter,
            PairPotential::SquareWell { range, .. } => *range,
            PairPotential::LennardJones { epsilon, sigma } => {
                // |f| ~ 4 beta epsilon (sigma/r)^6 in the tail; start from the
                // analytic estimate and extend until the bound actually holds.
                let mut r = sigma * (4.0 * beta.value() * epsilon / TINY).powf(1.0 / 6.0);
                r = r.max(*sigma);
                while mayer_f(self, beta, r).abs() >= TINY {
                    r *= 1.25;
                }
                r
            }
            PairPotential::Tabulated { points } => points[points.len() - 1].0,
        }
    }

    /// Discontinuity and kink radii, used to align quadrature panels.
    pub fn breakpoint_radii(&self) -> Vec<f64> {
        match self {
            PairPotential::Ideal => vec![],
            PairPotential::HardCore { diameter } => vec![*diameter],
            PairPotential::SquareWell {
                diameter, range, ..
            } => vec![*diameter, *range],
            PairPotential::LennardJones { sigma, .. } => vec![*sigma],
            PairPotential::Tabulated { points } => points.iter().map(|&(r, _)| r).collect(),
        }
    }
}

/// Mayer function `f(r) = exp(-beta phi(r)) - 1`; exactly `-1` inside a hard
/// core.  `exp_m1` keeps full relative precision in the small tail, where the
/// naive difference would drown in rounding.
pub fn mayer_f(pot: &PairPotential, beta: Beta, r: f64) -> f64 {
    (-beta.value() * pot.phi(r)).exp_m1()
}

/// Pair Boltzmann factor `exp(-beta phi(r))`.
pub fn boltzmann_pair(pot: &PairPotential, beta: Beta, r: f64) -> f64 {
    (-beta.value() * pot.phi(r)).exp()
}

/// Cluster factor `K(x; xi) = prod_{y in xi} f(|x - y|)`; one for empty `xi`.
pub fn mayer_k(pot: &PairPotential, beta: Beta, dim: usize, x: Point, xi: &[Point]) -> f64 {
    xi.iter()
        .map(|&y| mayer_f(pot, beta, distance(x, y, dim)))
        .product()
}

/// Total pair energy `U` of a configuration; +infinity on core overlap.
pub fn energy_u(pot: &PairPotential, dim: usize, config: &[Point]) -> f64 {
    let mut acc = 0.0;
    for i in 0..config.len() {
        for j in (i + 1)..config.len() {
            acc += pot.phi(distance(config[i], config[j], dim));
        }
    }
    acc
}

/// Interaction energy `W(x; gamma)` of one point against a configuration.
/// Exact coincidence is an error: the conditional objects this feeds are not
/// defined on the diagonal.
pub fn energy_w(pot: &PairPotential, dim: usize, x: Point, gamma: &[Point]) -> Result<f64> {
    let mut acc = 0.0;
    for (i, &y) in gamma.iter().enumerate() {
        let r = distance(x, y, dim);
        if r == 0.0 {
            return Err(Error::OverlappingConfigurations(i));
        }
        acc += pot.phi(r);
    }
    Ok(acc)
}

/// Relative gap in the cluster factorization
/// `exp(-beta W(x; gamma)) = sum_{xi subset gamma} K(x; xi)`,
/// the identity that lets interaction factors expand into Mayer sums.
pub fn factorization_gap(
    pot: &PairPotential,
    beta: Beta,
    dim: usize,
    x: Point,
    gamma: &[Point],
) -> Result<f64> {
    if gamma.len() > 20 {
        return Err(Error::CapExceeded {
            what: "factorization subset sum",
            requested: gamma.len(),
            cap: 20,
        });
    }
    let lhs = (-beta.value() * energy_w(pot, dim, x, gamma)?).exp();
    let f: Vec<f64> = gamma
        .iter()
        .map(|&y| mayer_f(pot, beta, distance(x, y, dim)))
        .collect();
    let mut rhs = 0.0;
    for mask in 0u32..(1 << gamma.len()) {
        let mut prod = 1.0;
        for (i, fi) in f.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod *= fi;
            }
        }
        rhs += prod;
    }
    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
}

/// Integral of `|mayer_f|` over d-dimensional space, by radial quadrature
/// with panels aligned to the potential's breakpoints and the tail cut where
/// `|f| < 1e-12`.  Supports d = 1, 2, 3.
pub fn regularity_integral(pot: &PairPotential, beta: Beta, dim: usize) -> Result<f64> {
    let surface = match dim {
        1 => |_r: f64| 2.0,
        2 => |r: f64| 2.0 * std::f64::consts::PI * r,
        3 => |r: f64| 4.0 * std::f64::consts::PI * r * r,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 1..=3, got {dim}"
            )))
        }
    };
    let outer = pot.interaction_range(beta);
    if !outer.is_finite() {
        return Err(Error::NonIntegrableTail(
            "potential has no finite interaction range".into(),
        ));
    }
    let core = pot.hard_core_diameter();
    // Inside the core |f| = 1 exactly.
    let mut total = match dim {
        1 => 2.0 * core,
        2 => std::f64::consts::PI * core * core,
        _ => 4.0 / 3.0 * std::f64::consts::PI * core.powi(3),
    };
    let mut cuts: Vec<f64> = pot
        .breakpoint_radii()
        .into_iter()
        .filter(|&r| r > core && r < outer)
        .collect();
    cuts.push(core);
    cuts.push(outer);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for pair in cuts.windows(2) {
        // Clamp evaluations just inside the panel so a jump sitting exactly
        // on a panel edge reads its interior value.
        let (p0, p1) = (pair[0], pair[1]);
        let nudge = (p1 - p0) * 1e-12;
        let integrand = |r: f64| {
            let rc = r.clamp(p0 + nudge, p1 - nudge);
            mayer_f(pot, beta, rc).abs() * surface(rc)
        };
        total += adaptive_simpson(&integrand, p0, p1, 1e-11, 48)?;
    }
    Ok(total)
}

/// Outcome of random stability probing: how negative the energy per particle
/// got, and whether it deepens with size (a collapse signature).
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    /// Max over samples of `(-U/|config|)`, clamped at zero.
    pub b_estimate: f64,
    /// Per configuration size, the worst (largest) `-U/|config|` seen.
    pub per_size_worst: Vec<(usize, f64)>,
    /// Worst ratio kept growing with size.
    pub collapse_suspected: bool,
}

/// Samples random configurations of 2..=`n_max` points in a box scaled to
/// the interaction range and records the worst energy-per-particle ratio.
pub fn stability_probe(
    pot: &PairPotential,
    beta: Beta,
    dim: usize,
    n_max: usize,
    trials_per_size: usize,
    seed: u64,
) -> Result<StabilityReport> {
    use rand::{Rng, SeedableRng};
    if n_max < 2 || n_max > 64 {
        return Err(Error::InvalidParameter(format!(
            "probe size must be in 2..=64, got {n_max}"
        )));
    }
    let range = pot.interaction_range(beta).max(pot.hard_core_diameter());
    let core = pot.hard_core_diameter();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut per_size_worst = Vec::new();
    for n in 2..=n_max {
        // Alternate between an extensive box (constant density) and the
        // tightest box the cores allow; only the latter exposes collapse.
        let side_extensive = 1.5 * range * (n as f64).powf(1.0 / dim as f64);
        let side_clustered = (1.05 * core * n as f64).max(1.05 * range);
        let mut worst = 0.0f64;
        for trial in 0..trials_per_size {
            let side = if trial % 2 == 0 {
                side_extensive
            } else {
                side_clustered
            };
            let config: Vec<Point> = (0..n)
                .map(|_| {
                    let mut p = [0.0; 3];
                    for c in p.iter_mut().take(dim) {
                        *c = rng.gen_range(0.0..side);
                    }
                    p
                })
                .collect();
            let u = energy_u(pot, dim, &config);
            if u.is_finite() {
                worst = worst.max(-u / n as f64);
            }
        }
        per_size_worst.push((n, worst));
    }
    let b_estimate = per_size_worst.iter().map(|&(_, w)| w).fold(0.0, f64::max);
    // Collapse signature: the worst energy per particle keeps deepening with
    // size instead of saturating.
    let k = per_size_worst.len();
    let avg = |range: std::ops::Range<usize>| {
        let len = range.len().max(1) as f64;
        per_size_worst[range].iter().map(|&(_, w)| w).sum::<f64>() / len
    };
    let mid = avg(k / 2 - 1..k / 2 + 1);
    let late = avg(k - 2..k);
    let collapse_suspected = mid > 0.0 && late > 1.5 * mid;
    Ok(StabilityReport {
        b_estimate,
        per_size_worst,
        collapse_suspected,
    })
}
