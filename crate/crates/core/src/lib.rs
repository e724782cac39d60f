//! Density expansions for correlation functions of classical particle systems
//! in the canonical ensemble.
//!
//! The library is organized around a single object: the expansion kernel
//! `T(eta | gamma)` attached to a set of pinned ("white") particles `eta` and
//! a set of integration ("black") variables `gamma`.  Two independent routes
//! produce it:
//!
//! * [`kernel::kernel_by_recurrence`] unwinds the defining nonlinear
//!   recurrence symbolically, with exact rational coefficients, so that the
//!   massive cancellation between its two sums happens literally;
//! * [`kernel::kernel_by_graphs`] sums over the admissible graph family
//!   [`graph::enumerate_d`] directly.
//!
//! Agreement of the two routes is the core correctness statement and is
//! exercised wholesale in the acceptance tests.
//!
//! Around that center sit supporting layers: a finite weighted configuration
//! algebra ([`algebra`]) for the measure-theoretic identities the derivation
//! rests on, closed-form and recurrence tree counts bounding term growth
//! ([`counting`]), pair potentials with their Mayer functions ([`potential`]),
//! deterministic quadrature of graph integrals ([`numerics`]), assembly of
//! truncated correlation series ([`series`]), and an exact one-dimensional
//! finite-N solver ([`oracle`]) used as an external reference.

pub mod algebra;
pub mod counting;
pub mod graph;
pub mod kernel;
pub mod numerics;
pub mod oracle;
pub mod potential;
pub mod quad;
pub mod series;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested object exceeds a hard size cap.
    #[error("size cap exceeded: {what} = {requested}, cap = {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    /// A configuration function was queried on a subset it does not cover.
    #[error("configuration function undefined on subset mask {mask:#b}")]
    UndefinedSubset { mask: u32 },
    /// Two point configurations share a coordinate where they must be disjoint.
    #[error("configurations overlap at point index {0}")]
    OverlappingConfigurations(usize),
    /// Kernels of different shape were compared.
    #[error("kernel shape mismatch: ({0}, {1}) vs ({2}, {3})")]
    ShapeMismatch(u8, u8, u8, u8),
    /// The tail of a radial integral does not converge.
    #[error("radial integral does not converge: {0}")]
    NonIntegrableTail(String),
    /// The operation does not support this potential.
    #[error("unsupported potential: {0}")]
    UnsupportedPotential(String),
    /// An integration domain cannot hold the requested configuration.
    #[error("domain too small: half-width {half_width}, required {required}")]
    DomainTooSmall { half_width: f64, required: f64 },
    /// A coordinate lies outside the finite box.
    #[error("point {coord} outside box of half-width {half_width}")]
    OutsideBox { coord: f64, half_width: f64 },
    /// The density parameter left the trust region of the truncated series.
    #[error("truncated normalization is non-positive ({0}); density outside trust region")]
    NonpositiveNormalization(f64),
    /// Catch-all for invalid arguments.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
