//! Exact-arithmetic engine for descendent algebras on finite cohomology
//! models, lattice vertex operator algebras built from their K-theory, the
//! pairing between the two, and closed-form intersection-number oracles.
//! Every computation is over arbitrary-precision rationals; every identity
//! the check suites verify is exact.

pub mod descendent;
pub mod duality;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod rat;
pub mod report;
pub mod suites;
pub mod superalgebra;
pub mod voa;

pub use rat::Rat;
