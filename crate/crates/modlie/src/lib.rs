//! Exact computations with modular Lie algebras over finite fields.
//!
//! The crate builds divided-power, Zassenhaus, Hamiltonian, Block and
//! Albert-Frank algebras as structure-constant tables, and certifies
//! isomorphisms, gradings, derivation algebras and second cohomology
//! between them using exact linear algebra.

pub mod block;
pub mod cartan;
pub mod cohom;
pub mod divpow;
pub mod error;
pub mod grading;
pub mod iso;
pub mod json;
pub mod lie;
pub mod linalg;
pub mod narrow;
pub mod par;
pub mod scalar;

pub use error::{Error, Result};
pub use lie::{LieAlgebra, LinearMap};
pub use linalg::{Matrix, Subspace};
pub use scalar::{make_field, Elt, ExtField, FieldRef, Scalar};
