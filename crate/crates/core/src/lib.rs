//! Exterior-algebra and Lie-theoretic toolkit for metric connections with
//! skew torsion: O(n) torsion-type decomposition, the τ-Jacobi engine with
//! brick classification, metric Lie algebra utilities (Killing form,
//! compactness, ideal splitting, type identification), symmetric-pair models
//! with their reconstruction maps, and frame-level verification of the
//! warped-product picture.

pub mod error;
pub mod exterior;
pub mod formats;
pub mod lie;
pub mod subspace;
pub mod sympair;
pub mod tau;
pub mod tol;
pub mod torsion;
pub mod warped;

pub use error::CoreError;
pub use exterior::{KForm, SkewEndo, Space};
pub use formats::{AlgebraFile, FormFile, Report, TorsionFile, Verdict};
pub use lie::{CompactType, IdealDecomposition, LieTypeLabel, MetricLieAlgebra};
pub use sympair::{SymmetricPairModel, SymmetricTriple};
pub use tau::{Brick, BrickReport, TauStructure};
pub use torsion::{TorsionDecomposition, TorsionTensor};
pub use warped::WarpedModel;
