//! Finite approximate subgroups of SL_n(F_p) at desk scale: exact
//! product-set growth, greedy approximate-group certificates, torus and
//! conjugacy-class intersection exponents, involved-torus censuses, and
//! Cayley-graph analytics (diameter, girth, spectral gap).
//!
//! Everything is exact integer arithmetic except the spectral iteration,
//! which is deterministic floating point. Identical inputs produce
//! identical outputs regardless of thread count.

pub mod cayley;
pub mod error;
pub mod families;
pub mod ffmat;
pub mod setops;
pub mod structure;

pub use error::{Error, Result};
pub use ffmat::{CharPoly, MatSL, PrimeField};
pub use setops::{Budget, MatSet};
