//! Exact-rational workbench for convex analysis in L⁰-modules over atomic
//! probability spaces.
//!
//! Everything here computes with exact rational scalars: random variables are
//! step functions on the atoms of a σ-algebra, orders and lattice operations
//! are decided by exact comparison, gauge functionals and hull projections are
//! solved with rational pivoting, and all certificates carry exact values.
//! Square roots never enter the compute path; conditional norms are carried in
//! squared form throughout.
//!
//! The crate is generic over the scalar type through [`scalar::Scalar`], a
//! num-traits bound satisfied by exact rational types. `Q` (arbitrary
//! precision) is the default used by the CLI and the acceptance suite; `Q64`
//! is a fixed-width alternative for small unit-test instances.

pub mod codec;
pub mod concat;
pub mod condnorm;
pub mod convex;
pub mod error;
pub mod mazur;
pub mod order;
pub mod report;
pub mod rv;
pub mod sample;
pub mod scalar;
pub mod solve;
pub mod space;
pub mod weakdual;

pub use error::{Error, Result};
pub use scalar::{Ext, Scalar};

/// Default exact scalar: arbitrary-precision rational.
pub type Q = num::BigRational;

/// Fixed-width rational scalar for small instances.
pub type Q64 = num::rational::Ratio<i64>;
