//! Arithmetic in `k[Γ]`, its fraction field `K`, the local ring `D` and
//! polynomials over `K`.

pub mod field;
pub mod local;
pub mod poly;
pub mod xpoly;

pub use field::{FieldElement, FieldError};
pub use local::{normalize_to_D, Association, DElement, DFactorization, Membership};
pub use poly::Poly;
pub use xpoly::{RationalFunction, XPoly};
