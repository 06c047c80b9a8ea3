//! Random-matrix check of free-product structure predictions.
//!
//! Two tracial specs are realized on `ℂ^n`, the second rotated by a Haar
//! unitary so the pair is asymptotically free. The discrete part predicted
//! by [`freeprod::classify_free_product`] is then measured directly: each
//! predicted `M_d` block shows up as the corner projection `f₁₁` obtained
//! from iterated meets, with normalized rank equal to the predicted entry
//! weight.

pub mod haar;
pub mod realize;
pub mod subspace;
pub mod verify;

pub use haar::{haar_isometry, haar_unitary};
pub use realize::{realize, Realization};
pub use subspace::{meet, Subspace};
pub use verify::{nested_meet_f11, verify, RmtConfig, RmtReport};

use freeprod::StructureError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RmtError {
    #[error("not realizable by matrices with the normalized trace: {0}")]
    NotTracial(String),
    #[error("matrix size too small: {0}")]
    SizeTooSmall(String),
    #[error("meet cutoff {cutoff:e} is ambiguous: eigenvalue {eigenvalue} lies within 10³·δ of 1")]
    IllConditioned { eigenvalue: f64, cutoff: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("every seed failed: {}", .0.join("; "))]
    AllSeedsFailed(Vec<String>),
}
