//! Deciding and certifying (non-)realizability of branch data for branched
//! coverings of the sphere.
//!
//! The crate is organized around a few cooperating pieces:
//!
//! * [`datum`] — partitions, branch data, the Riemann–Hurwitz constraint and
//!   the canonical text grammar;
//! * [`orbifold`] — sphere-orbifold signatures, Euler characteristics and the
//!   pullback-signature computation;
//! * [`criteria`] — certificate-producing non-realizability checks;
//! * [`oracle`] — exact decision of realizability by exhaustive constellation
//!   search in the symmetric group;
//! * [`generators`] — known non-realizable families and exhaustive
//!   enumeration of branch data;
//! * [`dessins`] — combinatorial maps (rotation systems) and the
//!   map ↔ branch-datum correspondence;
//! * [`halphen`] — exact polynomial arithmetic over quadratic number fields
//!   and polynomial solutions of `X^a + Y^b = Z^c`.

pub mod criteria;
pub mod datum;
pub mod dessins;
pub mod generators;
pub mod halphen;
pub mod oracle;
pub mod orbifold;

pub use datum::{BranchDatum, Partition};
pub use orbifold::{OrbifoldAssignment, OrbifoldSignature, PullbackResult};
