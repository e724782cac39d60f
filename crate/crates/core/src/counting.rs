//! Upper bounds on kernel term growth: counts of the labeled tree-like
//! structures generated by the expansion recurrence before cancellation.
//!
//! `N(m | n)` counts the raw monomials the kernel recursion produces for `m`
//! pinned and `n` integration labels when Boltzmann leaf factors stay
//! unexpanded.  It satisfies
//!
//! ```text
//! N(m | n) = sum_{k=0}^{n} C(n, k) N(m + k - 1 | n - k)
//!          + sum_{k=1}^{n} C(n, k) N(m | n - k) sum_{l=1}^{k} C(k, l) N(l | k - l)
//! ```
//!
//! with `N(0 | 0) = 1`, `N(m | 0) = 1`, and `N(0 | n) = 0` for `n >= 1`.
//! Dropping the nonlinear second sum leaves a recurrence solved in closed
//! form by `m (m + n)^(n-1)`, a rooted-forest count that serves as both a
//! lower bound and an independent cross-check.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Default ceiling on `m + n` for the memoized recurrences.
pub const DEFAULT_ORDER_CAP: u32 = 40;

/// Memoized evaluator for the term-count recurrences.
#[derive(Debug)]
pub struct CountTable {
    cap: u32,
    binomials: Vec<Vec<BigUint>>,
    full: HashMap<(u32, u32), BigUint>,
    linear: HashMap<(u32, u32), BigUint>,
}

impl Default for CountTable {
    fn default() -> Self {
        Self::new(DEFAULT_ORDER_CAP)
    }
}

impl CountTable {
    pub fn new(cap: u32) -> Self {
        let rows = cap as usize + 1;
        let mut binomials = vec![vec![BigUint::zero(); rows]; rows];
        for n in 0..rows {
            binomials[n][0] = BigUint::one();
            for k in 1..=n {
                binomials[n][k] = &binomials[n - 1][k - 1]
                    + binomials[n - 1].get(k).cloned().unwrap_or_default();
            }
        }
        Self {
            cap,
            binomials,
            full: HashMap::new(),
            linear: HashMap::new(),
        }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn binomial(&self, n: u32, k: u32) -> &BigUint {
        &self.binomials[n as usize][k as usize]
    }

    fn check(&self, m: u32, n: u32) -> Result<()> {
        if m + n > self.cap {
            return Err(Error::CapExceeded {
                what: "count order m + n",
                requested: (m + n) as usize,
                cap: self.cap as usize,
            });
        }
        Ok(())
    }

    /// Full pre-cancellation term count `N(m | n)`.
    pub fn full(&mut self, m: u32, n: u32) -> Result<BigUint> {
        self.check(m, n)?;
        Ok(self.full_inner(m, n))
    }

    fn full_inner(&mut self, m: u32, n: u32) -> BigUint {
        if m == 0 {
            return if n == 0 { BigUint::one() } else { BigUint::zero() };
        }
        if n == 0 {
            return BigUint::one();
        }
        if let Some(v) = self.full.get(&(m, n)) {
            return v.clone();
        }
        let mut acc = BigUint::zero();
        for k in 0..=n {
            let term = self.full_inner(m + k - 1, n - k);
            acc += self.binomial(n, k) * term;
        }
        for k in 1..=n {
            let outer = self.full_inner(m, n - k);
            let mut inner = BigUint::zero();
            for l in 1..=k {
                let t = self.full_inner(l, k - l);
                inner += self.binomial(k, l) * t;
            }
            acc += self.binomial(n, k) * outer * inner;
        }
        self.full.insert((m, n), acc.clone());
        acc
    }

    /// Linearized count by recurrence (first sum only, same base cases).
    pub fn linear_by_recurrence(&mut self, m: u32, n: u32) -> Result<BigUint> {
        self.check(m, n)?;
        Ok(self.linear_inner(m, n))
    }

    fn linear_inner(&mut self, m: u32, n: u32) -> BigUint {
        if m == 0 {
            return if n == 0 { BigUint::one() } else { BigUint::zero() };
        }
        if n == 0 {
            return BigUint::one();
        }
        if let Some(v) = self.linear.get(&(m, n)) {
            return v.clone();
        }
        let mut acc = BigUint::zero();
        for k in 0..=n {
            let term = self.linear_inner(m + k - 1, n - k);
            acc += self.binomial(n, k) * term;
        }
        self.linear.insert((m, n), acc.clone());
        acc
    }
}

/// Closed form of the linearized count: `m (m + n)^(n-1)`, extended by the
/// same base cases as the recurrence.
pub fn linear_closed_form(m: u32, n: u32) -> BigUint {
    if m == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if n == 0 {
        return BigUint::one();
    }
    BigUint::from(m) * BigUint::from(m + n).pow(n - 1)
}
