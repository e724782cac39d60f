//! Symbolic expansion kernels, produced by two independent routes.
//!
//! The kernel `T(eta | gamma)` for `m` pinned labels `x1..xm` and `n`
//! integration labels `y1..yn` is a polynomial in Mayer edge factors
//! `K(u, v)`, carrying a uniform density prefactor of exponent `m + n` and a
//! Boltzmann prefactor `e^{-beta U(eta)}` over the pinned labels.  Both
//! prefactors are kept out of the term list; a [`SymbolicKernel`] stores only
//! the reduced polynomial with exact rational coefficients.
//!
//! Route one ([`kernel_by_recurrence`]) unwinds the defining recurrence
//!
//! ```text
//! T(eta | gamma) = e^{-beta W(x1; eta')} sum_{xi <= gamma} K(x1; xi) T(eta' u xi | gamma \ xi)
//!               -  sum_{0 != xi <= gamma} T(eta | gamma \ xi)
//!                       sum_{0 != zeta <= xi} K(x1; zeta) T(zeta | xi \ zeta)
//! ```
//!
//! where `x1` is a chosen pinned label, `eta' = eta \ {x1}`, and the closure
//! `T(theta | 0) = e^{-beta U(theta)}` seeds the leaves.  Interaction factors
//! `e^{-beta W}` and leaf Boltzmann factors are carried as inert symbolic
//! pairs during the recursion; in the final normal form every pair touching
//! an integration label is expanded through `e^{-beta phi} = 1 + K`, while
//! pairs among the pinned labels reassemble into the `e^{-beta U(eta)}`
//! prefactor (this happens identically in every term, which is asserted).
//!
//! Route two ([`kernel_by_graphs`]) sums the admissible family
//! [`crate::graph::enumerate_d`] with unit coefficients.
//!
//! Agreement of the two routes is the statement that the recurrence's
//! cancellation leaves exactly the admissible graphs, each with coefficient
//! one.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::graph::{enumerate_d_with_cap, Edge, Vertex};
use crate::{Error, Result};

/// Default ceiling on `m + n` for symbolic construction.
pub const DEFAULT_SYMBOLIC_CAP: usize = 7;

/// Which pinned label the recurrence consumes first.  The finished kernel
/// must not depend on this; exposing it makes that testable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PickRule {
    #[default]
    Lowest,
    Highest,
}

/// One reduced term: an exact coefficient times a product of Mayer edge
/// factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMonomial {
    pub coefficient: BigRational,
    pub edges: Vec<Edge>,
}

/// A kernel in normal form: terms sorted by edge set, zero coefficients
/// dropped, one term per edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicKernel {
    num_white: u8,
    num_black: u8,
    terms: Vec<EdgeMonomial>,
}

impl SymbolicKernel {
    pub fn num_white(&self) -> u8 {
        self.num_white
    }

    pub fn num_black(&self) -> u8 {
        self.num_black
    }

    pub fn terms(&self) -> &[EdgeMonomial] {
        &self.terms
    }

    /// Exponent of the uniform density prefactor.
    pub fn prefactor_exponent(&self) -> u32 {
        self.num_white as u32 + self.num_black as u32
    }

    /// Whether the kernel carries the Boltzmann prefactor `e^{-beta U(eta)}`
    /// over its pinned labels.  Trivially one when there are fewer than two.
    pub fn has_boltzmann_prefactor(&self) -> bool {
        true
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reduced numeric value: `sum_t c_t prod_{e in t} value(e)`.  Density
    /// and Boltzmann prefactors are the caller's business.
    pub fn evaluate_f64(&self, mut edge_value: impl FnMut(Edge) -> f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut prod = t.coefficient.to_f64().expect("rational fits in f64");
            for &e in &t.edges {
                prod *= edge_value(e);
            }
            acc += prod;
        }
        acc
    }

    /// Exact-rational counterpart of [`Self::evaluate_f64`].
    pub fn evaluate_rational(
        &self,
        mut edge_value: impl FnMut(Edge) -> BigRational,
    ) -> BigRational {
        let mut acc = BigRational::zero();
        for t in &self.terms {
            let mut prod = t.coefficient.clone();
            for &e in &t.edges {
                prod *= edge_value(e);
            }
            acc += prod;
        }
        acc
    }

    /// Re-normalizes: sorts by edge set, merges duplicates, drops zeros.
    /// Idempotent; construction already leaves kernels in this form.
    pub fn normal_form(&mut self) {
        let mut merged: HashMap<Vec<Edge>, BigRational> = HashMap::new();
        for t in self.terms.drain(..) {
            *merged.entry(t.edges).or_insert_with(BigRational::zero) += t.coefficient;
        }
        let mut terms: Vec<EdgeMonomial> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(edges, coefficient)| EdgeMonomial { coefficient, edges })
            .collect();
        terms.sort_by(|a, b| a.edges.cmp(&b.edges));
        self.terms = terms;
    }
}

/// Structural equality of normal forms.  Errors on shape mismatch.
pub fn kernels_equal(a: &SymbolicKernel, b: &SymbolicKernel) -> Result<bool> {
    if a.num_white != b.num_white || a.num_black != b.num_black {
        return Err(Error::ShapeMismatch(
            a.num_white,
            a.num_black,
            b.num_white,
            b.num_black,
        ));
    }
    Ok(a.terms == b.terms)
}

/// One unmerged term as the recursion emits it: a sign, Mayer edges, and the
/// inert interaction pairs not yet expanded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawTerm {
    pub sign: i64,
    pub edges: Vec<Edge>,
    pub boltzmann_pairs: Vec<Edge>,
}

struct Builder {
    cancel: bool,
    pick: PickRule,
    memo: HashMap<(Vec<Vertex>, Vec<Vertex>), Rc<Vec<RawTerm>>>,
}

impl Builder {
    fn new(cancel: bool, pick: PickRule) -> Self {
        Self {
            cancel,
            pick,
            memo: HashMap::new(),
        }
    }

    fn build(&mut self, whites: &[Vertex], blacks: &[Vertex]) -> Rc<Vec<RawTerm>> {
        debug_assert!(whites.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(blacks.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(whites.iter().all(|v| !blacks.contains(v)));
        let key = (whites.to_vec(), blacks.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return Rc::clone(hit);
        }

        let out = if whites.is_empty() {
            if blacks.is_empty() {
                vec![RawTerm {
                    sign: 1,
                    edges: Vec::new(),
                    boltzmann_pairs: Vec::new(),
                }]
            } else {
                Vec::new()
            }
        } else if blacks.is_empty() {
            vec![RawTerm {
                sign: 1,
                edges: Vec::new(),
                boltzmann_pairs: all_pairs(whites),
            }]
        } else {
            self.step(whites, blacks)
        };

        let out = Rc::new(if self.cancel { merge_raw(out) } else { out });
        self.memo.insert(key, Rc::clone(&out));
        out
    }

    fn step(&mut self, whites: &[Vertex], blacks: &[Vertex]) -> Vec<RawTerm> {
        let (x1, rest) = match self.pick {
            PickRule::Lowest => (whites[0], &whites[1..]),
            PickRule::Highest => (whites[whites.len() - 1], &whites[..whites.len() - 1]),
        };
        let step_pairs: Vec<Edge> = sorted_edges(rest.iter().map(|&w| edge(x1, w)));

        let mut out = Vec::new();
        let nb = blacks.len();
        for mask in 0u32..(1 << nb) {
            let (xi, remaining) = split_by_mask(blacks, mask);
            let k_edges = sorted_edges(xi.iter().map(|&y| edge(x1, y)));
            let mut new_whites: Vec<Vertex> = rest.iter().copied().chain(xi.iter().copied()).collect();
            new_whites.sort();
            let sub = self.build(&new_whites, &remaining);
            for t in sub.iter() {
                out.push(RawTerm {
                    sign: t.sign,
                    edges: merge_disjoint(&k_edges, &t.edges),
                    boltzmann_pairs: merge_disjoint(&step_pairs, &t.boltzmann_pairs),
                });
            }
        }

        for mask in 1u32..(1 << nb) {
            let (xi, remaining) = split_by_mask(blacks, mask);
            let left = self.build(whites, &remaining);
            if left.is_empty() {
                continue;
            }
            let nxi = xi.len();
            for zmask in 1u32..(1 << nxi) {
                let (zeta, xi_rest) = split_by_mask(&xi, zmask);
                let kz = sorted_edges(zeta.iter().map(|&z| edge(x1, z)));
                let right = self.build(&zeta, &xi_rest);
                for a in left.iter() {
                    for b in right.iter() {
                        out.push(RawTerm {
                            sign: -a.sign * b.sign,
                            edges: merge_disjoint(&merge_disjoint(&a.edges, &kz), &b.edges),
                            boltzmann_pairs: merge_disjoint(
                                &a.boltzmann_pairs,
                                &b.boltzmann_pairs,
                            ),
                        });
                    }
                }
            }
        }
        out
    }
}

fn edge(a: Vertex, b: Vertex) -> Edge {
    Edge::new(a, b).expect("distinct labels")
}

fn all_pairs(vs: &[Vertex]) -> Vec<Edge> {
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            out.push(edge(vs[i], vs[j]));
        }
    }
    out.sort();
    out
}

fn sorted_edges(it: impl Iterator<Item = Edge>) -> Vec<Edge> {
    let mut v: Vec<Edge> = it.collect();
    v.sort();
    v
}

fn split_by_mask(items: &[Vertex], mask: u32) -> (Vec<Vertex>, Vec<Vertex>) {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for (i, &v) in items.iter().enumerate() {
        if mask & (1 << i) != 0 {
            inside.push(v);
        } else {
            outside.push(v);
        }
    }
    (inside, outside)
}

/// Merge two sorted edge lists known to be disjoint (the recursion's label
/// pools never overlap, so a pair can only arise on one side).
fn merge_disjoint(a: &[Edge], b: &[Edge]) -> Vec<Edge> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        debug_assert_ne!(a[i], b[j], "duplicate factor across recursion branches");
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_raw(terms: Vec<RawTerm>) -> Vec<RawTerm> {
    let mut merged: HashMap<(Vec<Edge>, Vec<Edge>), i64> = HashMap::new();
    for t in terms {
        *merged.entry((t.edges, t.boltzmann_pairs)).or_insert(0) += t.sign;
    }
    let mut out: Vec<RawTerm> = merged
        .into_iter()
        .filter(|&(_, s)| s != 0)
        .map(|((edges, boltzmann_pairs), sign)| RawTerm {
            sign,
            edges,
            boltzmann_pairs,
        })
        .collect();
    out.sort_by(|a, b| (&a.edges, &a.boltzmann_pairs).cmp(&(&b.edges, &b.boltzmann_pairs)));
    out
}

fn palette(num_white: u8, num_black: u8) -> (Vec<Vertex>, Vec<Vertex>) {
    (
        (0..num_white).map(Vertex::White).collect(),
        (0..num_black).map(Vertex::Black).collect(),
    )
}

fn check_cap(num_white: u8, num_black: u8, cap: usize) -> Result<()> {
    let total = num_white as usize + num_black as usize;
    if total > cap {
        return Err(Error::CapExceeded {
            what: "kernel order m + n",
            requested: total,
            cap,
        });
    }
    Ok(())
}

/// Expands inert pairs and assembles the normal form.  Every term must carry
/// the complete set of pinned-pair factors, which become the shared
/// `e^{-beta U(eta)}` prefactor; pairs touching integration labels expand
/// through `e^{-beta phi} = 1 + K`.
fn finalize(num_white: u8, num_black: u8, raw: &[RawTerm]) -> SymbolicKernel {
    let (whites, _) = palette(num_white, num_black);
    let white_pairs = all_pairs(&whites);
    let mut merged: HashMap<Vec<Edge>, i64> = HashMap::new();
    for t in raw {
        let (ww, promoted): (Vec<Edge>, Vec<Edge>) = t
            .boltzmann_pairs
            .iter()
            .partition(|e| e.is_white_white());
        assert_eq!(
            ww, white_pairs,
            "pinned-pair Boltzmann factors must be identical across terms"
        );
        // Each promoted pair contributes (1 + K): double the term set.
        let mut expanded: Vec<Vec<Edge>> = vec![t.edges.clone()];
        for &p in &promoted {
            let mut next = Vec::with_capacity(expanded.len() * 2);
            for e in expanded {
                let mut with = merge_disjoint(&e, &[p]);
                with.shrink_to_fit();
                next.push(e);
                next.push(with);
            }
            expanded = next;
        }
        for e in expanded {
            *merged.entry(e).or_insert(0) += t.sign;
        }
    }
    let mut terms: Vec<EdgeMonomial> = merged
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|(edges, c)| EdgeMonomial {
            coefficient: BigRational::from_integer(BigInt::from(c)),
            edges,
        })
        .collect();
    terms.sort_by(|a, b| a.edges.cmp(&b.edges));
    SymbolicKernel {
        num_white,
        num_black,
        terms,
    }
}

/// Kernel via the defining recurrence, with full symbolic cancellation.
pub fn kernel_by_recurrence(num_white: u8, num_black: u8) -> Result<SymbolicKernel> {
    kernel_by_recurrence_with(num_white, num_black, PickRule::Lowest, DEFAULT_SYMBOLIC_CAP)
}

pub fn kernel_by_recurrence_with(
    num_white: u8,
    num_black: u8,
    pick: PickRule,
    cap: usize,
) -> Result<SymbolicKernel> {
    check_cap(num_white, num_black, cap)?;
    let (whites, blacks) = palette(num_white, num_black);
    let mut builder = Builder::new(true, pick);
    let raw = builder.build(&whites, &blacks);
    Ok(finalize(num_white, num_black, &raw))
}

/// The unmerged terms of the recurrence with cancellation disabled, in
/// deterministic order.  Their number is the pre-cancellation census.
pub fn kernel_raw_terms(num_white: u8, num_black: u8, cap: usize) -> Result<Vec<RawTerm>> {
    check_cap(num_white, num_black, cap)?;
    let (whites, blacks) = palette(num_white, num_black);
    let mut builder = Builder::new(false, PickRule::Lowest);
    let raw = builder.build(&whites, &blacks);
    let mut out = raw.as_ref().clone();
    out.sort_by(|a, b| {
        (&a.edges, &a.boltzmann_pairs, a.sign).cmp(&(&b.edges, &b.boltzmann_pairs, b.sign))
    });
    Ok(out)
}

/// Number of kernel terms: with `pre_cancellation`, the raw count of
/// monomials the recursion emits (leaf Boltzmann factors inert, multiplicity
/// included); otherwise the size of the cancelled normal form.
pub fn term_census(num_white: u8, num_black: u8, pre_cancellation: bool) -> Result<usize> {
    if pre_cancellation {
        Ok(kernel_raw_terms(num_white, num_black, DEFAULT_SYMBOLIC_CAP)?.len())
    } else {
        Ok(kernel_by_recurrence(num_white, num_black)?.terms.len())
    }
}

/// Kernel via the admissible graph family, every member with coefficient one.
pub fn kernel_by_graphs(num_white: u8, num_black: u8) -> Result<SymbolicKernel> {
    kernel_by_graphs_with_cap(num_white, num_black, DEFAULT_SYMBOLIC_CAP)
}

pub fn kernel_by_graphs_with_cap(
    num_white: u8,
    num_black: u8,
    cap: usize,
) -> Result<SymbolicKernel> {
    check_cap(num_white, num_black, cap)?;
    let family = enumerate_d_with_cap(num_white, num_black, cap)?;
    let mut terms: Vec<EdgeMonomial> = family
        .members
        .into_iter()
        .map(|g| EdgeMonomial {
            coefficient: BigRational::from_integer(BigInt::from(1)),
            edges: g.edges().to_vec(),
        })
        .collect();
    terms.sort_by(|a, b| a.edges.cmp(&b.edges));
    Ok(SymbolicKernel {
        num_white,
        num_black,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::CountTable;
    use num_traits::One;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(i: u8) -> Vertex {
        Vertex::White(i)
    }

    fn b(j: u8) -> Vertex {
        Vertex::Black(j)
    }

    #[test]
    fn empty_kernel_is_unit_and_pure_blacks_vanish() {
        let k = kernel_by_recurrence(0, 0).unwrap();
        assert_eq!(k.terms().len(), 1);
        assert!(k.terms()[0].edges.is_empty());
        assert_eq!(k.terms()[0].coefficient, BigRational::one());
        for n in 1..=3 {
            assert!(kernel_by_recurrence(0, n).unwrap().is_zero());
        }
    }

    #[test]
    fn pinned_only_kernel_is_the_boltzmann_prefactor_alone() {
        for m in 1..=4 {
            let k = kernel_by_recurrence(m, 0).unwrap();
            assert_eq!(k.terms().len(), 1);
            assert!(k.terms()[0].edges.is_empty());
            assert_eq!(k.terms()[0].coefficient, BigRational::one());
            assert_eq!(k.prefactor_exponent(), m as u32);
        }
    }

    #[test]
    fn one_pinned_label_with_integration_labels_cancels_to_zero() {
        for n in 1..=4 {
            let k = kernel_by_recurrence(1, n).unwrap();
            assert!(k.is_zero(), "kernel (1, {n}) should vanish");
        }
    }

    #[test]
    fn two_one_kernel_is_the_single_wedge() {
        let k = kernel_by_recurrence(2, 1).unwrap();
        assert_eq!(k.terms().len(), 1);
        assert_eq!(k.terms()[0].coefficient, BigRational::one());
        assert_eq!(
            k.terms()[0].edges,
            vec![
                Edge::new(w(0), b(0)).unwrap(),
                Edge::new(w(1), b(0)).unwrap()
            ]
        );
    }

    #[test]
    fn recurrence_matches_graph_family_at_small_orders() {
        for (m, n) in [(1u8, 3u8), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let a = kernel_by_recurrence(m, n).unwrap();
            let g = kernel_by_graphs(m, n).unwrap();
            assert!(kernels_equal(&a, &g).unwrap(), "mismatch at ({m}, {n})");
        }
    }

    #[test]
    fn surviving_coefficients_are_all_one() {
        for (m, n) in [(2u8, 2u8), (3, 1), (3, 2), (2, 3)] {
            let k = kernel_by_recurrence(m, n).unwrap();
            assert!(!k.is_zero());
            for t in k.terms() {
                assert_eq!(t.coefficient, BigRational::one());
            }
        }
    }

    #[test]
    fn raw_census_matches_recurrence_count_table() {
        let mut table = CountTable::default();
        for (m, n) in [(1u8, 1u8), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3), (2, 3)] {
            let census = term_census(m, n, true).unwrap();
            let expected = table.full(m as u32, n as u32).unwrap();
            assert_eq!(
                num_bigint::BigUint::from(census),
                expected,
                "raw census at ({m}, {n})"
            );
        }
    }

    #[test]
    fn cancelled_census_matches_family_size() {
        assert_eq!(term_census(1, 2, false).unwrap(), 0);
        assert_eq!(term_census(2, 2, false).unwrap(), 8);
        assert_eq!(term_census(3, 1, false).unwrap(), 4);
    }

    #[test]
    fn pick_rule_does_not_change_the_normal_form() {
        for (m, n) in [(2u8, 2u8), (3, 1), (3, 2), (2, 3), (1, 3)] {
            let lo = kernel_by_recurrence_with(m, n, PickRule::Lowest, DEFAULT_SYMBOLIC_CAP)
                .unwrap();
            let hi = kernel_by_recurrence_with(m, n, PickRule::Highest, DEFAULT_SYMBOLIC_CAP)
                .unwrap();
            assert!(kernels_equal(&lo, &hi).unwrap(), "pick rule at ({m}, {n})");
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = kernel_by_recurrence(2, 1).unwrap();
        let b = kernel_by_recurrence(2, 2).unwrap();
        assert!(matches!(
            kernels_equal(&a, &b),
            Err(Error::ShapeMismatch(..))
        ));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            kernel_by_recurrence(4, 4),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            kernel_by_graphs(5, 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    /// Independent numeric route: evaluate the recurrence directly in exact
    /// rationals on random edge values, interpreting every interaction factor
    /// as `1 + K` with pinned-pair values set to zero so the Boltzmann
    /// prefactor drops out.  No monomials involved.
    fn numeric_recurrence(
        whites: &[Vertex],
        blacks: &[Vertex],
        k: &dyn Fn(Edge) -> BigRational,
    ) -> BigRational {
        if whites.is_empty() {
            return if blacks.is_empty() {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
        if blacks.is_empty() {
            let mut acc = BigRational::one();
            for e in all_pairs(whites) {
                acc *= BigRational::one() + k(e);
            }
            return acc;
        }
        let (x1, rest) = (whites[0], &whites[1..]);
        let mut w_factor = BigRational::one();
        for &r in rest {
            w_factor *= BigRational::one() + k(edge(x1, r));
        }
        let nb = blacks.len();
        let mut first = BigRational::zero();
        for mask in 0u32..(1 << nb) {
            let (xi, remaining) = split_by_mask(blacks, mask);
            let mut prod = BigRational::one();
            for &y in &xi {
                prod *= k(edge(x1, y));
            }
            let mut new_whites: Vec<Vertex> =
                rest.iter().copied().chain(xi.iter().copied()).collect();
            new_whites.sort();
            first += prod * numeric_recurrence(&new_whites, &remaining, k);
        }
        let mut second = BigRational::zero();
        for mask in 1u32..(1 << nb) {
            let (xi, remaining) = split_by_mask(blacks, mask);
            let left = numeric_recurrence(whites, &remaining, k);
            if left.is_zero() {
                continue;
            }
            let mut inner = BigRational::zero();
            for zmask in 1u32..(1 << xi.len() as u32) {
                let (zeta, xi_rest) = split_by_mask(&xi, zmask);
                let mut prod = BigRational::one();
                for &z in &zeta {
                    prod *= k(edge(x1, z));
                }
                inner += prod * numeric_recurrence(&zeta, &xi_rest, k);
            }
            second += left * inner;
        }
        w_factor * first - second
    }

    #[test]
    fn symbolic_kernel_agrees_with_direct_numeric_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (m, n) in [(1u8, 2u8), (2, 1), (2, 2), (3, 1), (1, 3)] {
            for _ in 0..5 {
                let mut values: HashMap<Edge, BigRational> = HashMap::new();
                let (whites, blacks) = palette(m, n);
                let all: Vec<Vertex> = whites.iter().chain(blacks.iter()).copied().collect();
                for e in all_pairs(&all) {
                    let v = if e.is_white_white() {
                        BigRational::zero()
                    } else {
                        BigRational::new(
                            BigInt::from(rng.gen_range(-9i64..=9)),
                            BigInt::from(rng.gen_range(1i64..=7)),
                        )
                    };
                    values.insert(e, v);
                }
                let lookup = |e: Edge| values[&e].clone();
                let direct = numeric_recurrence(&whites, &blacks, &lookup);
                let symbolic = kernel_by_recurrence(m, n)
                    .unwrap()
                    .evaluate_rational(|e| values[&e].clone());
                assert_eq!(direct, symbolic, "numeric route at ({m}, {n})");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn normal_form_is_idempotent_and_order_blind(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut k = kernel_by_recurrence(2, 2).unwrap();
            let reference = k.clone();
            // Shuffle and split coefficients, then renormalize.
            let mut terms = k.terms.clone();
            for t in terms.clone() {
                let half = &t.coefficient / BigRational::from_integer(BigInt::from(2));
                terms.push(EdgeMonomial { coefficient: half.clone(), edges: t.edges.clone() });
                terms.push(EdgeMonomial { coefficient: -half, edges: t.edges });
            }
            for i in (1..terms.len()).rev() {
                let j = rng.gen_range(0..=i);
                terms.swap(i, j);
            }
            k.terms = terms;
            k.normal_form();
            prop_assert_eq!(&k, &reference);
            k.normal_form();
            prop_assert_eq!(&k, &reference);
        }
    }
}
