//! Exact computations with truncated Witt vectors, top-degree de Rham–Witt
//! forms on affine space, Grothendieck residue symbols, Frobenius-semilinear
//! algebra and the mod `p^n` Milnor K-theory Gersten complex of a curve.

pub mod drw;
pub mod error;
pub mod field;
pub mod campaign;
pub mod linalg;
pub mod milnor;
pub mod poly;
pub mod residue;
pub mod semilinear;
pub mod witt;

pub use error::{Error, Result};
pub use field::{Embedding, Field, FieldDesc, FieldElem, GaloisField};
