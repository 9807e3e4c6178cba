//! Exact-arithmetic workbench for graded Lie algebras with countable basis,
//! studied through their finite quotients `L / I_{N+1}`.

pub mod algebra;
pub mod linalg;
pub mod catalog;
pub mod cohomology;
pub mod derivation;

/// Crate version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
