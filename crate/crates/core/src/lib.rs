//! Spherical-cap measures, extremal Lipschitz tail profiles and subgaussian
//! concentration bounds on the sphere `S^{n-1}` and in Gauss space, together
//! with a grid-scan/bisection engine that certifies the associated
//! inequalities numerically.
//!
//! Certification is floating point with explicit tolerances, not interval
//! arithmetic.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cap;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod mc;
pub mod output;
pub mod product;
pub mod special_fn;
pub mod verify;

pub use cap::SphereDim;
pub use error::{Error, Result};
pub use extremal::TailProfilePoint;
pub use product::ProductSphereCase;
pub use special_fn::{integrate, QuadratureSpec};
pub use verify::{certify, ScanReport, SuiteConfig};
