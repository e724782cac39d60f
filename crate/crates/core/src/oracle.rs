//! Exact finite-size canonical reference in one dimension.
//!
//! For short-range potentials whose reach does not exceed twice the hard
//! core, a sorted configuration only couples adjacent particles, so
//! configuration integrals factor into a left-to-right chain.  The sweep
//! tracks, interval by interval between pinned positions, the chain value
//! as a piecewise polynomial of the last placed coordinate, represented on
//! breakpoint-aligned panels by Gauss-Legendre nodes.  Every state is a
//! polynomial of degree at most the particle count, so with the particle
//! cap in place the panel arithmetic is exact to rounding: results from
//! this module are reference values, not approximations.
//!
//! On top of the sweep sit the partition function, correlation functions at
//! pinned points, the one-step identity linking the `N` and `N - 1` systems
//! through bond integrals, and extrapolation of fixed-density sequences to
//! the bulk limit.

use crate::potential::{boltzmann_pair, mayer_f, Beta, PairPotential};
use crate::quad::{gl8_on, gl8_on_panels, panel_edges, GL8};
use crate::{Error, Result};

/// Largest particle count the exact sweep accepts.  Chain states are
/// polynomials of degree up to the particle count per panel; eight
/// Gauss-Legendre nodes represent those exactly through degree seven.
pub const ORACLE_PARTICLE_CAP: usize = 7;

/// A one-dimensional canonical system on the box `[-half_width, half_width]`.
#[derive(Debug, Clone)]
pub struct CanonicalSystem {
    pub n: usize,
    pub half_width: f64,
    pub beta: Beta,
    pub pot: PairPotential,
}

impl CanonicalSystem {
    pub fn new(n: usize, half_width: f64, beta: Beta, pot: PairPotential) -> Result<Self> {
        let sys = CanonicalSystem {
            n,
            half_width,
            beta,
            pot,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// The sweep needs nearest-neighbor factorization: interactions must not
    /// reach past twice the hard core, which restricts the potential family.
    pub fn validate(&self) -> Result<()> {
        if !self.half_width.is_finite() || self.half_width <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "box half-width must be positive, got {}",
                self.half_width
            )));
        }
        if self.n > ORACLE_PARTICLE_CAP {
            return Err(Error::CapExceeded {
                what: "oracle particle count".into(),
                requested: self.n,
                cap: ORACLE_PARTICLE_CAP,
            });
        }
        self.pot.validate()?;
        match &self.pot {
            PairPotential::Ideal | PairPotential::HardCore { .. } => Ok(()),
            PairPotential::SquareWell {
                diameter, range, ..
            } => {
                if *range <= 2.0 * diameter {
                    Ok(())
                } else {
                    Err(Error::UnsupportedPotential(format!(
                        "well range {range} exceeds twice the core {diameter}; \
                         sorted configurations would couple beyond nearest neighbors"
                    )))
                }
            }
            other => Err(Error::UnsupportedPotential(format!(
                "the exact sweep supports ideal, hard-core and narrow square-well \
                 potentials, not {other:?}"
            ))),
        }
    }

    fn check_pin(&self, x: f64) -> Result<()> {
        if x.abs() > self.half_width {
            return Err(Error::OutsideBox {
                coord: x,
                half_width: self.half_width,
            });
        }
        Ok(())
    }
}

/// Closed-form free-gas partition function `(2L)^N / N!`.
pub fn ideal_partition_function(n: usize, half_width: f64) -> f64 {
    let mut z = 1.0;
    for k in 1..=n {
        z *= 2.0 * half_width / k as f64;
    }
    z
}

/// Closed-form hard-rod partition function `(2L - (N-1)a)^N / N!`, zero once
/// the rods no longer fit.
pub fn tonks_partition_function(n: usize, half_width: f64, diameter: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let free = 2.0 * half_width - (n - 1) as f64 * diameter;
    if free <= 0.0 {
        return 0.0;
    }
    let mut z = 1.0;
    for k in 1..=n {
        z *= free / k as f64;
    }
    z
}

// ---------------------------------------------------------------------------
// Piecewise-polynomial panel functions.

fn bary_weights() -> &'static [f64; 8] {
    use std::sync::OnceLock;
    static W: OnceLock<[f64; 8]> = OnceLock::new();
    W.get_or_init(|| {
        let t: Vec<f64> = GL8.iter().map(|&(x, _)| x).collect();
        let mut w = [0.0; 8];
        for i in 0..8 {
            let mut prod = 1.0;
            for j in 0..8 {
                if j != i {
                    prod *= t[i] - t[j];
                }
            }
            w[i] = 1.0 / prod;
        }
        w
    })
}

/// A piecewise polynomial held by its values at Gauss-Legendre nodes per
/// panel.  Degrees up to seven per panel round-trip exactly.
#[derive(Debug, Clone)]
struct PanelFn {
    edges: Vec<f64>,
    nodes: Vec<[f64; 8]>,
    vals: Vec<[f64; 8]>,
    /// Full-panel integrals, precomputed.
    full: Vec<f64>,
}

impl PanelFn {
    fn build(edges: Vec<f64>, mut f: impl FnMut(f64) -> f64) -> PanelFn {
        let mut nodes = Vec::new();
        let mut vals = Vec::new();
        let mut full = Vec::new();
        if edges.len() >= 2 {
            for w in edges.windows(2) {
                let pts = gl8_on(w[0], w[1]);
                let mut xs = [0.0; 8];
                let mut vs = [0.0; 8];
                let mut acc = 0.0;
                for (i, (x, wt)) in pts.iter().enumerate() {
                    xs[i] = *x;
                    vs[i] = f(*x);
                    acc += wt * vs[i];
                }
                nodes.push(xs);
                vals.push(vs);
                full.push(acc);
            }
        }
        PanelFn {
            edges,
            nodes,
            vals,
            full,
        }
    }

    fn empty(at: f64) -> PanelFn {
        PanelFn {
            edges: vec![at],
            nodes: vec![],
            vals: vec![],
            full: vec![],
        }
    }

    fn lo(&self) -> f64 {
        self.edges[0]
    }

    fn hi(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    /// Integral over `[u, v]` clipped to the stored span; exact for the
    /// represented piecewise polynomial.
    fn integral(&self, u: f64, v: f64) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        let u = u.max(self.lo());
        let v = v.min(self.hi());
        if v <= u {
            return 0.0;
        }
        let mut acc = 0.0;
        for p in 0..self.nodes.len() {
            let (lo, hi) = (self.edges[p], self.edges[p + 1]);
            if hi <= u || lo >= v {
                continue;
            }
            let (a, b) = (u.max(lo), v.min(hi));
            if a <= lo && b >= hi {
                acc += self.full[p];
            } else {
                for (x, w) in gl8_on(a, b) {
                    acc += w * self.eval_in_panel(p, x);
                }
            }
        }
        acc
    }

    fn eval_in_panel(&self, p: usize, x: f64) -> f64 {
        let (lo, hi) = (self.edges[p], self.edges[p + 1]);
        let t = (2.0 * x - lo - hi) / (hi - lo);
        let bw = bary_weights();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..8 {
            let dt = t - GL8[i].0;
            if dt.abs() < 1e-14 {
                return self.vals[p][i];
            }
            let q = bw[i] / dt;
            num += q * self.vals[p][i];
            den += q;
        }
        num / den
    }
}

// ---------------------------------------------------------------------------
// The chain sweep.

/// What sits at the left end of a sweep.
#[derive(Debug, Clone, Copy)]
enum LeftEnd {
    /// A wall: no adjacency factor toward the first particle.
    Wall(f64),
    /// A particle pinned here: the first swept particle feels it.
    Float(f64),
}

impl LeftEnd {
    fn pos(self) -> f64 {
        match self {
            LeftEnd::Wall(x) | LeftEnd::Float(x) => x,
        }
    }
}

/// All distinct sums of up to `max_terms` radii, used as breakpoint shifts.
fn radius_sums(radii: &[f64], max_terms: usize) -> Vec<f64> {
    let mut sums = vec![0.0];
    for _ in 0..max_terms {
        let mut next = sums.clone();
        for &s in &sums {
            for &r in radii {
                next.push(s + r);
            }
        }
        next.sort_by(f64::total_cmp);
        next.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        sums = next;
    }
    sums.retain(|&s| s > 0.0);
    sums
}

/// Totals of up to `max_terms` potential radii with either sign, zero
/// included.  Differences show up as kink positions when one integration
/// limit chases another across the breakpoint lattice.
fn signed_radius_sums(radii: &[f64], max_terms: usize) -> Vec<f64> {
    let mut sums = vec![0.0f64];
    for _ in 0..max_terms {
        let mut next = sums.clone();
        for &s in &sums {
            for &r in radii {
                next.push(s + r);
                next.push(s - r);
            }
        }
        next.sort_by(f64::total_cmp);
        next.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        sums = next;
    }
    sums
}

/// Left-to-right chain sweep over pinned positions; holds, per interval, the
/// chain value as a function of the last placed free coordinate, and the
/// scalar chain values when the last placed particle is a pin.
struct Sweep<'a> {
    pot: &'a PairPotential,
    beta: Beta,
    radii: Vec<f64>,
    pins: Vec<f64>,
    starts: Vec<f64>,
    /// Whether the first swept particle feels the left end.
    left_interacting: bool,
    /// `b[j][c]`: chain value with pins `1..=j` placed, pin `j` last, and
    /// `c` free particles used.
    b: Vec<Vec<f64>>,
    /// `a[j][c-1]`: chain density on interval `j` with the last free
    /// particle as argument and `c` frees used.
    a: Vec<Vec<PanelFn>>,
}

impl<'a> Sweep<'a> {
    fn g(&self, sep: f64) -> f64 {
        boltzmann_pair(self.pot, self.beta, sep)
    }

    /// `int_start^x g(x - y) a(y) dy` with piecewise-constant `g`.
    fn conv(&self, a: &PanelFn, start: f64, x: f64) -> f64 {
        if x <= start {
            return 0.0;
        }
        let mut cuts = vec![start, x];
        for &r in &self.radii {
            let y = x - r;
            if y > start && y < x {
                cuts.push(y);
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let gm = self.g(x - 0.5 * (w[0] + w[1]));
            if gm != 0.0 {
                acc += gm * a.integral(w[0], w[1]);
            }
        }
        acc
    }

    fn build(
        pot: &'a PairPotential,
        beta: Beta,
        left: LeftEnd,
        mut pins: Vec<f64>,
        hi: f64,
        k_max: usize,
        lattice_terms: usize,
    ) -> Sweep<'a> {
        pins.sort_by(f64::total_cmp);
        let radii = pot.breakpoint_radii();
        let shifts = radius_sums(&radii, lattice_terms);
        let mu = pins.len();
        let mut b = vec![vec![0.0; k_max + 1]; mu + 1];
        b[0][0] = 1.0;
        let mut starts = Vec::with_capacity(mu + 1);
        let mut a: Vec<Vec<PanelFn>> = Vec::with_capacity(mu + 1);

        let sweep_stub = Sweep {
            pot,
            beta,
            radii: radii.clone(),
            pins: pins.clone(),
            starts: vec![],
            left_interacting: matches!(left, LeftEnd::Float(_)),
            b: vec![],
            a: vec![],
        };

        for j in 0..=mu {
            let start = if j == 0 { left.pos() } else { pins[j - 1] };
            starts.push(start);
            let end = if j < mu { pins[j] } else { hi };
            let interacting = j > 0 || matches!(left, LeftEnd::Float(_));

            let mut a_j: Vec<PanelFn> = Vec::with_capacity(k_max);
            if end - start > 1e-13 {
                let edges = panel_edges(shifts.iter().map(|&s| start + s), start, end);
                for c in 1..=k_max {
                    let b_enter = b[j][c - 1];
                    let prev = if c >= 2 { Some(&a_j[c - 2]) } else { None };
                    let pf = PanelFn::build(edges.clone(), |x| {
                        let pinfac = if interacting {
                            sweep_stub.g(x - start)
                        } else {
                            1.0
                        };
                        let mut v = pinfac * b_enter;
                        if let Some(prev) = prev {
                            v += sweep_stub.conv(prev, start, x);
                        }
                        v
                    });
                    a_j.push(pf);
                }
            } else {
                for _ in 1..=k_max {
                    a_j.push(PanelFn::empty(start));
                }
            }

            if j < mu {
                let next = pins[j];
                let cross = if interacting {
                    sweep_stub.g(next - start)
                } else {
                    1.0
                };
                for c in 0..=k_max {
                    let mut v = cross * b[j][c];
                    if c >= 1 {
                        v += sweep_stub.conv(&a_j[c - 1], start, next);
                    }
                    b[j + 1][c] = v;
                }
            }
            a.push(a_j);
        }

        Sweep {
            pot,
            beta,
            radii,
            pins,
            starts,
            left_interacting: matches!(left, LeftEnd::Float(_)),
            b,
            a,
        }
    }

    /// Index of the interval containing `x` (pins at or below `x` count as
    /// placed).
    fn interval_of(&self, x: f64) -> usize {
        self.pins.partition_point(|&p| p <= x)
    }

    /// Chain value with a marked (uncounted) particle at `x` and `c` free
    /// particles strictly to its left; includes the adjacency factor from
    /// the left neighbor to `x`.
    fn closed_at(&self, x: f64, c: usize) -> f64 {
        let j = self.interval_of(x);
        let start = self.starts[j];
        let pinfac = if j == 0 && !self.left_interacting {
            1.0
        } else {
            self.g(x - start)
        };
        let mut v = pinfac * self.b[j][c];
        if c >= 1 {
            v += self.conv(&self.a[j][c - 1], start, x);
        }
        v
    }

    /// Chain total: all pins placed, `k` frees used, no right-end factor.
    fn total(&self, k: usize, hi: f64) -> f64 {
        let mu = self.pins.len();
        let mut v = self.b[mu][k];
        if k >= 1 {
            v += self.a[mu][k - 1].integral(self.starts[mu], hi);
        }
        v
    }
}

/// Right-to-left sweep, phrased as a forward sweep on mirrored coordinates.
struct Backward<'a> {
    inner: Sweep<'a>,
}

impl<'a> Backward<'a> {
    fn build(
        pot: &'a PairPotential,
        beta: Beta,
        pins: &[f64],
        half_width: f64,
        k_max: usize,
        lattice_terms: usize,
    ) -> Backward<'a> {
        let mirrored: Vec<f64> = pins.iter().map(|&p| -p).collect();
        Backward {
            inner: Sweep::build(
                pot,
                beta,
                LeftEnd::Wall(-half_width),
                mirrored,
                half_width,
                k_max,
                lattice_terms,
            ),
        }
    }

    /// Chain value of everything strictly right of `x`, with `c` frees used
    /// and the adjacency factor from the right neighbor to `x`.
    fn closed_at(&self, x: f64, c: usize) -> f64 {
        self.inner.closed_at(-x, c)
    }
}

fn lattice_terms(n: usize) -> usize {
    n + 1
}

/// Canonical partition function (including the `1/N!`), exactly.
pub fn partition_function(sys: &CanonicalSystem) -> Result<f64> {
    sys.validate()?;
    let sweep = Sweep::build(
        &sys.pot,
        sys.beta,
        LeftEnd::Wall(-sys.half_width),
        vec![],
        sys.half_width,
        sys.n,
        lattice_terms(sys.n),
    );
    Ok(sweep.total(sys.n, sys.half_width))
}

/// Exact correlation function at pinned points; `1` for no pins, `0` when
/// there are more pins than particles.
pub fn finite_correlation(sys: &CanonicalSystem, pins: &[f64]) -> Result<f64> {
    sys.validate()?;
    for &p in pins {
        sys.check_pin(p)?;
    }
    let m = pins.len();
    if m == 0 {
        return Ok(1.0);
    }
    if m > sys.n {
        return Ok(0.0);
    }
    let z = partition_function(sys)?;
    if !(z > 0.0) {
        return Err(Error::NonpositiveNormalization(z));
    }
    let sweep = Sweep::build(
        &sys.pot,
        sys.beta,
        LeftEnd::Wall(-sys.half_width),
        pins.to_vec(),
        sys.half_width,
        sys.n - m,
        lattice_terms(sys.n),
    );
    Ok(sweep.total(sys.n - m, sys.half_width) / z)
}

/// Both sides of the one-step identity relating the `N`-particle correlation
/// at `eta` to bond integrals against the `(N-1)`-particle correlations.
#[derive(Debug, Clone)]
pub struct KsReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Larger magnitude of the two sides, for relative judgments.
    pub scale: f64,
    /// Partition-function ratio `Z_{N-1} / Z_N`.
    pub activity_ratio: f64,
    /// Per bridge count `s`: the `s`-fold bond integral over the bulk
    /// window, already divided by `s!`.
    pub bridge_contributions: Vec<f64>,
}

/// Evaluate the identity at pinned points `eta`; the first entry of `eta`
/// is the distinguished point carrying the bonds.  `points_per_panel`
/// controls the outer quadrature; the correlation values under the integral
/// come from exact sweeps.
pub fn check_ks_identity(
    sys: &CanonicalSystem,
    eta: &[f64],
    points_per_panel: usize,
) -> Result<KsReport> {
    sys.validate()?;
    let m = eta.len();
    if m == 0 || m > sys.n {
        return Err(Error::InvalidParameter(format!(
            "need between 1 and {} pins, got {m}",
            sys.n
        )));
    }
    for &p in eta {
        sys.check_pin(p)?;
    }
    let x1 = eta[0];
    let mut rest: Vec<f64> = eta[1..].to_vec();
    rest.sort_by(f64::total_cmp);

    let lhs = finite_correlation(sys, eta)?;
    let sub = CanonicalSystem {
        n: sys.n - 1,
        half_width: sys.half_width,
        beta: sys.beta,
        pot: sys.pot.clone(),
    };
    let z = partition_function(sys)?;
    if !(z > 0.0) {
        return Err(Error::NonpositiveNormalization(z));
    }
    let z_sub = partition_function(&sub)?;
    let activity_ratio = z_sub / z;

    let mut wfac = 1.0;
    for &p in &rest {
        wfac *= boltzmann_pair(&sys.pot, sys.beta, (x1 - p).abs());
    }

    let l = sys.half_width;
    let range = sys.pot.interaction_range(sys.beta);
    let core = sys.pot.hard_core_diameter();
    let lo = (x1 - range).max(-l);
    let hi = (x1 + range).min(l);
    let width = (hi - lo).max(0.0);
    let s_max = sys.n - m;
    let frees_total = sub.n - rest.len();

    let mut bridge = vec![finite_correlation(&sub, &rest)?];

    let shifts = signed_radius_sums(&sys.pot.breakpoint_radii(), 2 * lattice_terms(sys.n));
    let outer_edges = |extra: &[f64]| -> Vec<f64> {
        let mut bps = Vec::new();
        for &anchor in [x1, -l, l]
            .iter()
            .chain(rest.iter())
            .chain(extra.iter())
        {
            for &s in &shifts {
                bps.push(anchor + s);
            }
        }
        panel_edges(bps, lo, hi)
    };

    if s_max >= 1 {
        if width <= 0.0 || range == 0.0 {
            for _ in 1..=s_max {
                bridge.push(0.0);
            }
        } else {
            let k_profile = frees_total - 1;
            let fwd = Sweep::build(
                &sys.pot,
                sys.beta,
                LeftEnd::Wall(-l),
                rest.clone(),
                l,
                k_profile,
                lattice_terms(sys.n),
            );
            let bwd = Backward::build(&sys.pot, sys.beta, &rest, l, k_profile, lattice_terms(sys.n));
            let profile = |xi: f64| {
                let mut acc = 0.0;
                for c1 in 0..=k_profile {
                    acc += fwd.closed_at(xi, c1) * bwd.closed_at(xi, k_profile - c1);
                }
                acc / z_sub
            };

            let edges = outer_edges(&[]);
            let mut integrand =
                |xi: f64| mayer_f(&sys.pot, sys.beta, (x1 - xi).abs()) * profile(xi);
            bridge.push(gl8_on_panels(&mut integrand, &edges, points_per_panel));

            if s_max >= 2 {
                if width <= core {
                    bridge.push(0.0);
                } else {
                    // Ordered sector xi1 < xi2; the two orderings already
                    // cancel the 1/2!.
                    let k_two = frees_total - 2;
                    let edges1 = outer_edges(&[]);
                    let mut outer = |xi1: f64| {
                        let mid_pins: Vec<f64> =
                            rest.iter().copied().filter(|&p| p > xi1).collect();
                        let mid = Sweep::build(
                            &sys.pot,
                            sys.beta,
                            LeftEnd::Float(xi1),
                            mid_pins,
                            l,
                            k_two,
                            lattice_terms(sys.n),
                        );
                        let f1 = mayer_f(&sys.pot, sys.beta, (x1 - xi1).abs());
                        if f1 == 0.0 {
                            return 0.0;
                        }
                        let edges2 = outer_edges(&[xi1]);
                        let edges2: Vec<f64> = edges2.into_iter().filter(|&e| e >= xi1).collect();
                        let mut inner = |xi2: f64| {
                            if xi2 <= xi1 {
                                return 0.0;
                            }
                            let f2 = mayer_f(&sys.pot, sys.beta, (x1 - xi2).abs());
                            if f2 == 0.0 {
                                return 0.0;
                            }
                            let mut acc = 0.0;
                            for c1 in 0..=k_two {
                                let left = fwd.closed_at(xi1, c1);
                                if left == 0.0 {
                                    continue;
                                }
                                for c2 in 0..=k_two - c1 {
                                    let c3 = k_two - c1 - c2;
                                    acc += left
                                        * mid.closed_at(xi2, c2)
                                        * bwd.closed_at(xi2, c3);
                                }
                            }
                            f2 * acc / z_sub
                        };
                        let inner_edges = if edges2.len() >= 2 {
                            edges2
                        } else {
                            vec![xi1, hi]
                        };
                        f1 * gl8_on_panels(&mut inner, &inner_edges, points_per_panel)
                    };
                    bridge.push(gl8_on_panels(&mut outer, &edges1, points_per_panel));
                }
            }
            for s in 3..=s_max {
                // Zero measure unless s hard cores fit into the bond window.
                if (s as f64 - 1.0) * core >= width - 1e-12 {
                    bridge.push(0.0);
                } else {
                    return Err(Error::UnsupportedPotential(format!(
                        "bridge multiplicity {s} has positive measure here; \
                         only up to two bridge points are implemented"
                    )));
                }
            }
        }
    }

    let rhs = wfac * activity_ratio * bridge.iter().sum::<f64>();
    let residual = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok(KsReport {
        lhs,
        rhs,
        residual,
        scale,
        activity_ratio,
        bridge_contributions: bridge,
    })
}

// ---------------------------------------------------------------------------
// Bulk-limit extrapolation at fixed density.

/// Neville evaluation at zero of the interpolating polynomial through
/// `(xs[i], ys[i])`.
pub fn extrapolate_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut q = ys.to_vec();
    let n = q.len();
    for lev in 1..n {
        for i in 0..n - lev {
            q[i] = (xs[i] * q[i + 1] - xs[i + lev] * q[i]) / (xs[i] - xs[i + lev]);
        }
    }
    q[0]
}

#[derive(Debug, Clone)]
pub struct LimitPoint {
    pub n: usize,
    pub half_width: f64,
    pub value: f64,
}

/// A fixed-density sequence of finite systems and its extrapolated limit.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub density: f64,
    pub samples: Vec<LimitPoint>,
    pub extrapolated: f64,
    /// Whether successive samples approach the extrapolated value.
    pub converging: bool,
}

fn finish_limit(density: f64, samples: Vec<LimitPoint>) -> LimitReport {
    let xs: Vec<f64> = samples.iter().map(|p| 1.0 / p.n as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|p| p.value).collect();
    let extrapolated = extrapolate_at_zero(&xs, &ys);
    let deltas: Vec<f64> = samples
        .iter()
        .map(|p| (p.value - extrapolated).abs())
        .collect();
    let converging = deltas
        .windows(2)
        .all(|d| d[1] <= d[0] * 1.2 + 1e-12);
    LimitReport {
        density,
        samples,
        extrapolated,
        converging,
    }
}

/// Two-point correlation at fixed separation and density, extrapolated over
/// growing particle numbers with the box scaled as `2L = N / density`.
pub fn limit_pair_correlation(
    pot: &PairPotential,
    beta: Beta,
    density: f64,
    separation: f64,
    n_list: &[usize],
) -> Result<LimitReport> {
    if !(density > 0.0) || !(separation > 0.0) {
        return Err(Error::InvalidParameter(
            "density and separation must be positive".into(),
        ));
    }
    if n_list.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two system sizes to extrapolate".into(),
        ));
    }
    let mut samples = Vec::new();
    for &n in n_list {
        let half = n as f64 / (2.0 * density);
        if half <= 0.5 * separation {
            return Err(Error::DomainTooSmall {
                half_width: half,
                required: 0.5 * separation,
            });
        }
        let sys = CanonicalSystem::new(n, half, beta, pot.clone())?;
        let value = finite_correlation(&sys, &[-0.5 * separation, 0.5 * separation])?;
        samples.push(LimitPoint {
            n,
            half_width: half,
            value,
        });
    }
    Ok(finish_limit(density, samples))
}

/// Partition-ratio sequence `Z_{N-1} / (Z_N rho)` extrapolated to the bulk
/// activity-to-density ratio.
pub fn limit_activity_factor(
    pot: &PairPotential,
    beta: Beta,
    density: f64,
    n_list: &[usize],
) -> Result<LimitReport> {
    if !(density > 0.0) {
        return Err(Error::InvalidParameter("density must be positive".into()));
    }
    if n_list.len() < 2 || n_list.iter().any(|&n| n < 1) {
        return Err(Error::InvalidParameter(
            "need at least two system sizes of at least one particle".into(),
        ));
    }
    let mut samples = Vec::new();
    for &n in n_list {
        let half = n as f64 / (2.0 * density);
        let sys = CanonicalSystem::new(n, half, beta, pot.clone())?;
        let sub = CanonicalSystem::new(n - 1, half, beta, pot.clone())?;
        let z = partition_function(&sys)?;
        if !(z > 0.0) {
            return Err(Error::NonpositiveNormalization(z));
        }
        let value = partition_function(&sub)? / (z * density);
        samples.push(LimitPoint {
            n,
            half_width: half,
            value,
        });
    }
    Ok(finish_limit(density, samples))
}
