//! Shared one-dimensional quadrature building blocks: composite and adaptive
//! Simpson rules, Gauss-Legendre nodes, and breakpoint-aligned panel sets.

use crate::{Error, Result};

/// Eight-point Gauss-Legendre nodes and weights on `[-1, 1]`.  Exact for
/// polynomials through degree 15.
pub const GL8: [(f64, f64); 8] = [
    (-0.9602898564975362, 0.10122853629037626),
    (-0.7966664774136267, 0.22238103445337448),
    (-0.5255324099163290, 0.31370664587788727),
    (-0.18343464249564980, 0.3626837833783620),
    (0.18343464249564980, 0.3626837833783620),
    (0.5255324099163290, 0.31370664587788727),
    (0.7966664774136267, 0.22238103445337448),
    (0.9602898564975362, 0.10122853629037626),
];

/// GL8 mapped onto `[lo, hi]`.
pub fn gl8_on(lo: f64, hi: f64) -> [(f64, f64); 8] {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    GL8.map(|(x, w)| (mid + half * x, half * w))
}

/// Composite Simpson rule with `intervals` (forced even, at least 2)
/// subdivisions.
pub fn composite_simpson(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let n = intervals.max(2).next_multiple_of(2);
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// Composite Simpson over a sorted panel edge list, `intervals` subdivisions
/// in each panel.  Evaluations are pinched into the open panel interior so
/// that an integrand jumping exactly at a panel edge is integrated by its
/// interior value on both sides.
pub fn simpson_on_panels(
    f: &mut impl FnMut(f64) -> f64,
    edges: &[f64],
    intervals: usize,
) -> f64 {
    edges
        .windows(2)
        .map(|p| {
            let nudge = (p[1] - p[0]) * 1e-12;
            let mut g = |y: f64| f(y.clamp(p[0] + nudge, p[1] - nudge));
            composite_simpson(&mut g, p[0], p[1], intervals)
        })
        .sum()
}

/// Composite 8-point Gauss-Legendre over a sorted panel edge list, with
/// `segments` equal subdivisions per panel.  Nodes are strictly interior
/// (the extreme abscissa sits 2% of a segment from its edge), so one-sided
/// branches at panel edges resolve correctly without any clamping, and each
/// segment is exact for polynomials through degree 15.
pub fn gl8_on_panels(f: &mut impl FnMut(f64) -> f64, edges: &[f64], segments: usize) -> f64 {
    let segments = segments.max(1);
    edges
        .windows(2)
        .map(|p| {
            let h = (p[1] - p[0]) / segments as f64;
            (0..segments)
                .map(|k| {
                    let a = p[0] + h * k as f64;
                    gl8_on(a, a + h).iter().map(|&(x, w)| w * f(x)).sum::<f64>()
                })
                .sum::<f64>()
        })
        .sum()
}

/// Sorted, deduplicated panel edges: the breakpoints that land strictly
/// inside `(lo, hi)`, plus the endpoints.  Near-coincident points (within
/// `1e-12` of each other or of the endpoints) collapse.
pub fn panel_edges(breakpoints: impl IntoIterator<Item = f64>, lo: f64, hi: f64) -> Vec<f64> {
    const EPS: f64 = 1e-12;
    let mut edges: Vec<f64> = breakpoints
        .into_iter()
        .filter(|r| r.is_finite() && *r > lo + EPS && *r < hi - EPS)
        .collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= EPS);
    edges
}

/// Adaptive Simpson with error control; errors out if the requested
/// tolerance is unreachable within `max_depth` bisections.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_depth: usize,
) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::InvalidParameter(format!(
                "adaptive quadrature failed to converge on [{a}, {b}]"
            )));
        }
        // Children keep the full node tolerance; halving it cannot outrun the
        // linear error decay at a kink and exhausts the depth budget instead.
        Ok(recurse(f, a, m, fa, flm, fm, left, tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, tol, depth - 1)?)
    }
    let m = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = simpson(lo, hi, fa, fm, fb);
    recurse(f, lo, hi, fa, fm, fb, whole, tol, max_depth)
}
