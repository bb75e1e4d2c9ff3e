//! Integer-valued rational functions with exact value profiles, and the
//! factorization theory of `IntR(K, D)` built from them.

pub mod construct;
pub mod element;
pub mod hypotheses;
pub mod intr;
pub mod profile;

pub use construct::{gadget_psi_s, gadget_stone_weierstrass, gadget_zigzag, gadget_zigzag_shifted};
pub use element::{Base, Descriptor, ElementJson, GadgetError, IntRElement, IntRMembership};
pub use hypotheses::{check_atomic_hypotheses, AtomicReport};
pub use intr::{
    antimatter_witness, atom_certify_intr, chain_intr, extend_length_bounds, factorization_intr, length_set_intr,
    IntRAtomVerdict,
};
pub use profile::{Alpha, Override, ProfileValue, ValueProfile};
