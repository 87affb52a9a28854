//! Near-MDS elliptic-curve codes whose minimum-weight supports form 2-designs.
//!
//! The pipeline: pick a curve over F_q whose rational points form Z_p ⊕ Z_p,
//! find a point Q over F_{q^2} with Q + Frob(Q) = O, evaluate the Riemann-Roch
//! space of D = k(Q + Frob(Q)) at all rational points, and certify the
//! resulting [p^2, 2k, p^2 - 2k] code through subset sums in the point group.

pub mod arith;
pub mod budget;
pub mod code_analysis;
pub mod code_builder;
pub mod error;
pub mod elliptic_curve;
pub mod finite_field;
pub mod group_designs;
pub mod linalg;
pub mod param_search;

pub use budget::Budget;
pub use error::{Error, Result};
