//! Exact verification of superorthogonality for finite families of
//! piecewise-constant functions.
//!
//! Everything in the verification path is computed in exact arithmetic over
//! the field Q(sqrt 2): rationals extended by a single square root, which is
//! closed under every product, power and integral the library forms. The
//! crate provides
//!
//! - [`scalar`]: rationals, the quadratic extension Q(sqrt 2) and complex
//!   numbers over it, with exactly decidable sign and order;
//! - [`stepfn`]: an algebra of compactly supported step functions on the real
//!   line with exact Lebesgue integrals, and indexed families of them;
//! - [`families`]: constructors for the concrete families of interest (Haar
//!   functions on dyadic grids, Rademacher functions, indicator complements,
//!   the Rademacher-based distinct-index construction, dyadic martingale
//!   differences);
//! - [`classifier`]: superorthogonality zone predicates on index tuples,
//!   canonical multiset-class enumeration and full type classification with
//!   violation witnesses;
//! - [`qk`]: distinct-index multilinear sums computed three independent ways,
//!   and the pointwise inequality that bounds their distance from the full
//!   product of sums;
//! - [`estimates`]: square function, decoupling and intermediate estimates
//!   with certified constants;
//! - [`random`]: seed-deterministic generators for randomized campaigns.

pub mod classifier;
pub mod error;
pub mod estimates;
pub mod families;
pub mod qk;
pub mod random;
pub mod scalar;
pub mod stepfn;

pub use error::Error;
pub use scalar::{QSqrt2, Rational, Scalar};
pub use stepfn::{Family, FamilyOrdering, Label, StepFunction};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
