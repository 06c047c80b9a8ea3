//! Exact structure of free products of multi-matrix algebras.
//!
//! [`structure::classify_free_product`] turns two [`AlgebraSpec`]s into a
//! [`StructureReport`]: the discrete part as a list of matrix blocks with
//! exact entry weights, and the type, T-set and regularity flags of the
//! diffuse factor that remains. [`abelian`] is an independent oracle for
//! the purely abelian case, and [`two_proj`] covers two free projections.

pub mod abelian;
pub mod algebra;
pub mod cite;
pub mod modular;
pub mod rational;
pub mod structure;
pub mod two_proj;

#[cfg(feature = "testing")]
pub mod testing;

pub use algebra::{parse_spec, AlgebraSpec, SpecError};
pub use rational::Rational;
pub use structure::{classify_free_product, StructureError, StructureReport};
