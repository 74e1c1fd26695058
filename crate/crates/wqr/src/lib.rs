//! Iterated radial-stretch maps over exact ball packings.
//!
//! The crate builds, at finite depth, the classical counterexample family of
//! weakly quasiregular mappings: a bounded domain is packed by disjoint balls,
//! each ball carries a radial stretch that fixes its boundary sphere and
//! inverts orientation inside, and the construction is iterated on the
//! concentric sub-balls. On top of the construction sit numerical audits for
//! every quantitative claim the family is known for: exact annulus energies
//! and the critical Sobolev exponent, the positive-degree/negative-Jacobian
//! paradox, distributional Jacobian pairings, Cantor-spine dimension, and
//! local average blow-up.
//!
//! Start with [`tree::build`] and the `examples/` directory.

pub mod error;
pub mod geom;
pub mod packing;
pub mod rng;

pub use error::{Error, Result};
