//! Exact-arithmetic engine for filtered (shifted) L-infinity algebras.
//!
//! Everything is computed over arbitrary-precision rationals: graded linear
//! algebra and cohomology, Sullivan polynomial forms on simplices, L-infinity
//! structures with their Maurer-Cartan theory, constructive Kan filling and
//! fibration lifting for the simplicial Maurer-Cartan functor, and homotopy
//! transfer realized as lifting through an acyclic fibration. There are no
//! tolerances anywhere; every identity is asserted to hold on the nose.

pub mod algebra;
pub mod corpus;
pub mod forms;
pub mod graded;
pub mod htt;
pub mod linalg;
pub mod morphism;
pub(crate) mod par;
pub mod rat;
pub mod sample;
pub mod simplicial;
pub mod tensor;

pub use rat::Rat;
