//! Exact factorization invariants for localized monoid domains
//! `D = k[t;M]_(t;M)` and for their rings of integer-valued rational
//! functions `IntR(K,D)`.

// errors and certificates carry exact values, larger than clippy's thresholds
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod algebra;
pub mod dvr;
pub mod gadgets;
pub mod group;
pub mod interval;
pub mod monoid;
pub mod par;
pub mod parse;
pub mod scalar;
pub mod tables;
pub mod tropical;
pub mod verify;

pub use group::{Group, GroupElement, Rational};
pub use interval::{Interval, IntervalSet};
pub use monoid::{LengthSet, MonoidSpec};
pub use scalar::{CoeffField, Scalar};
