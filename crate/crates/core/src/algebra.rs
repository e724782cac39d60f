//! Finite weighted configuration spaces and the measure identities on them.
//!
//! A [`SiteSpace`] is a finite set of abstract sites with nonnegative weights.
//! Configurations are subsets of sites, encoded as bit masks, and a
//! [`ConfigFunction`] assigns a scalar to each subset.  The sum
//! `sum_{gamma} z^|gamma| prod_{x in gamma} w_x F(gamma)` is the discrete
//! counterpart of the Lebesgue-Poisson integral, and the identities that hold
//! for that integral (splitting over a partition, the convolution/product
//! correspondence) become finite combinatorial statements here that can be
//! checked in exact rational arithmetic.
//!
//! One point needs care: on an atomic space the literal product of two
//! generating functionals is *not* the generating functional of the
//! convolution, because the continuum argument discards coincident points as a
//! null set.  The faithful finite statement multiplies square-free polynomials
//! in the site variables (equivalently, restricts the double sum to disjoint
//! pairs of configurations), and that is what [`product_identity_sides`]
//! computes.

use num_traits::{One, Zero};
use std::ops::{Neg, Sub};

use crate::{Error, Result};

/// Scalar types the algebra is generic over: exact rationals and floats both fit.
pub trait Scalar: Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> {}

impl<T> Scalar for T where T: Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{}

/// Hard cap on site count; every operation here is exponential in it.
pub const MAX_SITES: usize = 16;

/// A finite site space with one nonnegative weight per site.
///
/// Sites are identified by their index `0..len()`.  The weight plays the role
/// of the intensity measure of a single point.
#[derive(Debug, Clone)]
pub struct SiteSpace<T> {
    weights: Vec<T>,
}

impl<T: Scalar + PartialOrd> SiteSpace<T> {
    /// Builds a space from per-site weights.  Rejects negative weights and
    /// more than [`MAX_SITES`] sites.
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.len() > MAX_SITES {
            return Err(Error::CapExceeded {
                what: "sites",
                requested: weights.len(),
                cap: MAX_SITES,
            });
        }
        if weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::InvalidParameter("negative site weight".into()));
        }
        Ok(Self { weights })
    }
}

impl<T: Scalar> SiteSpace<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, site: usize) -> &T {
        &self.weights[site]
    }

    /// Product of the weights of all sites in `mask`.
    pub fn mask_weight(&self, mask: u32) -> T {
        let mut acc = T::one();
        for site in 0..self.len() {
            if mask & (1 << site) != 0 {
                acc = acc * self.weights[site].clone();
            }
        }
        acc
    }

    /// All subset masks of the full site set, ascending.
    pub fn masks(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.len())
    }
}

/// A scalar-valued function on configurations (subsets of a site space).
///
/// Values may be defined only on part of the subset lattice; querying an
/// undefined subset is an error rather than a silent zero.
#[derive(Debug, Clone)]
pub struct ConfigFunction<T> {
    num_sites: usize,
    values: Vec<Option<T>>,
}

impl<T: Scalar> ConfigFunction<T> {
    /// Total function given by a closure on masks.
    pub fn from_fn(num_sites: usize, mut f: impl FnMut(u32) -> T) -> Result<Self> {
        if num_sites > MAX_SITES {
            return Err(Error::CapExceeded {
                what: "sites",
                requested: num_sites,
                cap: MAX_SITES,
            });
        }
        let values = (0..1u32 << num_sites).map(|m| Some(f(m))).collect();
        Ok(Self { num_sites, values })
    }

    /// Function defined only on subsets of size at most `max_size`.
    pub fn from_fn_up_to(num_sites: usize, max_size: u32, mut f: impl FnMut(u32) -> T) -> Result<Self> {
        if num_sites > MAX_SITES {
            return Err(Error::CapExceeded {
                what: "sites",
                requested: num_sites,
                cap: MAX_SITES,
            });
        }
        let values = (0..1u32 << num_sites)
            .map(|m| (m.count_ones() <= max_size).then(|| f(m)))
            .collect();
        Ok(Self { num_sites, values })
    }

    /// The unit of the star convolution: indicator of the empty configuration.
    pub fn unit(num_sites: usize) -> Result<Self> {
        Self::from_fn(num_sites, |m| if m == 0 { T::one() } else { T::zero() })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn get(&self, mask: u32) -> Result<&T> {
        self.values
            .get(mask as usize)
            .and_then(|v| v.as_ref())
            .ok_or(Error::UndefinedSubset { mask })
    }
}

/// A source field: one value per site, each required to lie in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct JField<T> {
    values: Vec<T>,
}

impl<T: Scalar + PartialOrd> JField<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| *v < T::zero() || *v > T::one()) {
            return Err(Error::InvalidParameter(
                "source field value outside [0, 1]".into(),
            ));
        }
        Ok(Self { values })
    }
}

impl<T: Scalar> JField<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, site: usize) -> &T {
        &self.values[site]
    }

    /// `prod_{x in mask} j_x`, the elementary exponent factor.
    pub fn mask_product(&self, mask: u32) -> T {
        let mut acc = T::one();
        for site in 0..self.values.len() {
            if mask & (1 << site) != 0 {
                acc = acc * self.values[site].clone();
            }
        }
        acc
    }
}

/// Discrete Lebesgue-Poisson integral:
/// `sum_{gamma} z^|gamma| (prod_{x in gamma} w_x) F(gamma)`.
pub fn lp_integral<T: Scalar>(f: &ConfigFunction<T>, space: &SiteSpace<T>, z: &T) -> Result<T> {
    if f.num_sites() != space.len() {
        return Err(Error::InvalidParameter(
            "configuration function and site space disagree on site count".into(),
        ));
    }
    let mut acc = T::zero();
    for mask in space.masks() {
        let v = f.get(mask)?;
        acc = acc + pow_scalar(z, mask.count_ones()) * space.mask_weight(mask) * v.clone();
    }
    Ok(acc)
}

/// Star convolution `(f * g)(gamma) = sum_{xi subset of gamma} f(xi) g(gamma \ xi)`.
pub fn star_convolution<T: Scalar>(
    f: &ConfigFunction<T>,
    g: &ConfigFunction<T>,
) -> Result<ConfigFunction<T>> {
    if f.num_sites() != g.num_sites() {
        return Err(Error::InvalidParameter(
            "convolution operands live on different site counts".into(),
        ));
    }
    let n = f.num_sites();
    let mut values = Vec::with_capacity(1 << n);
    for gamma in 0..(1u32 << n) {
        let mut acc = T::zero();
        // Enumerate xi over all submasks of gamma, including 0 and gamma itself.
        let mut xi = gamma;
        loop {
            acc = acc + f.get(xi)?.clone() * g.get(gamma & !xi)?.clone();
            if xi == 0 {
                break;
            }
            xi = (xi - 1) & gamma;
        }
        values.push(Some(acc));
    }
    Ok(ConfigFunction {
        num_sites: n,
        values,
    })
}

/// Generating functional `sum_{gamma} (prod_{x in gamma} w_x j_x) psi(gamma)`.
pub fn generating_functional<T: Scalar>(
    psi: &ConfigFunction<T>,
    j: &JField<T>,
    space: &SiteSpace<T>,
) -> Result<T> {
    if psi.num_sites() != space.len() || j.len() != space.len() {
        return Err(Error::InvalidParameter(
            "generating functional operands disagree on site count".into(),
        ));
    }
    let mut acc = T::zero();
    for mask in space.masks() {
        acc = acc + space.mask_weight(mask) * j.mask_product(mask) * psi.get(mask)?.clone();
    }
    Ok(acc)
}

/// Both sides of the splitting identity
/// `int G(gamma) sum_{xi subset gamma} H(xi, gamma \ xi) d lambda(gamma)
///    = int int G(xi u gamma) H(xi, gamma) d lambda d lambda`,
/// with the double integral over *disjoint* pairs, as the atomic setting
/// requires.  Returns `(lhs, rhs)`.
pub fn splitting_identity_sides<T, H, G>(
    h: H,
    g: G,
    space: &SiteSpace<T>,
    z: &T,
) -> (T, T)
where
    T: Scalar,
    H: Fn(u32, u32) -> T,
    G: Fn(u32) -> T,
{
    let mut lhs = T::zero();
    for gamma in space.masks() {
        let mut inner = T::zero();
        let mut xi = gamma;
        loop {
            inner = inner + h(xi, gamma & !xi);
            if xi == 0 {
                break;
            }
            xi = (xi - 1) & gamma;
        }
        lhs = lhs + pow_scalar(z, gamma.count_ones()) * space.mask_weight(gamma) * g(gamma) * inner;
    }

    let mut rhs = T::zero();
    for xi in space.masks() {
        for gamma in space.masks() {
            if xi & gamma != 0 {
                continue;
            }
            let zpow = pow_scalar(z, xi.count_ones() + gamma.count_ones());
            rhs = rhs
                + zpow
                    * space.mask_weight(xi)
                    * space.mask_weight(gamma)
                    * g(xi | gamma)
                    * h(xi, gamma);
        }
    }
    (lhs, rhs)
}

/// Both sides of the product identity for generating functionals.
///
/// Left side: the square-free product of the two functionals, built as
/// coefficient vectors in the site variables and multiplied with the rule
/// `t_x^2 = 0` (a double loop over disjoint mask pairs), then evaluated at `j`.
/// Right side: the generating functional of the star convolution.
/// Returns `(lhs, rhs)`; the two computations share no code.
pub fn product_identity_sides<T: Scalar>(
    psi1: &ConfigFunction<T>,
    psi2: &ConfigFunction<T>,
    j: &JField<T>,
    space: &SiteSpace<T>,
) -> Result<(T, T)> {
    let n = space.len();
    if psi1.num_sites() != n || psi2.num_sites() != n || j.len() != n {
        return Err(Error::InvalidParameter(
            "product identity operands disagree on site count".into(),
        ));
    }

    // Left: coefficient vectors c_i(gamma) = w(gamma) psi_i(gamma), square-free product.
    let mut c1 = Vec::with_capacity(1 << n);
    let mut c2 = Vec::with_capacity(1 << n);
    for mask in space.masks() {
        c1.push(space.mask_weight(mask) * psi1.get(mask)?.clone());
        c2.push(space.mask_weight(mask) * psi2.get(mask)?.clone());
    }
    let mut product = vec![T::zero(); 1 << n];
    for a in 0..(1u32 << n) {
        for b in 0..(1u32 << n) {
            if a & b != 0 {
                continue;
            }
            product[(a | b) as usize] =
                product[(a | b) as usize].clone() + c1[a as usize].clone() * c2[b as usize].clone();
        }
    }
    let mut lhs = T::zero();
    for mask in space.masks() {
        lhs = lhs + j.mask_product(mask) * product[mask as usize].clone();
    }

    let conv = star_convolution(psi1, psi2)?;
    let rhs = generating_functional(&conv, j, space)?;
    Ok((lhs, rhs))
}

fn pow_scalar<T: Scalar>(z: &T, k: u32) -> T {
    let mut acc = T::one();
    for _ in 0..k {
        acc = acc * z.clone();
    }
    acc
}
