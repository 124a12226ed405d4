//! Minimum output Rényi entropy of channels built from bipartite subspaces,
//! with certification of additivity violations for antisymmetric subspaces
//! (`p > 2`) and `p = 0` additivity evidence for UPB entanglement-breaking
//! channels.
//!
//! All numerical code is generic over the real scalar `T: Real` (`f32` or
//! `f64`); the aliases below pin `f64`, which is what the CLI uses.

pub mod conjpair;
pub mod error;
pub mod json;
pub mod maxoverlap;
pub mod minentropy;
pub mod multicopy;
pub mod renyi;
pub mod scalar;
pub mod subspace;
pub mod tensor;
pub mod upb;

pub use error::{Error, Result};
pub use renyi::{binary_entropy, rank_eps, renyi_entropy, RenyiOrder};
pub use scalar::Real;

/// Dense complex matrix over `f64`.
pub type ComplexMatrix = scalar::CMat<f64>;
pub type ComplexVector = scalar::CVec<f64>;
pub type PureStateVector = tensor::PureState<f64>;
pub type SchmidtSpectrum = tensor::SchmidtSpectrum<f64>;
pub type Subspace = subspace::Subspace<f64>;
pub type Channel = subspace::Channel<f64>;
pub type ViolationReport = conjpair::ViolationReport<f64>;
pub type MultiCopyResult = multicopy::MultiCopyResult<f64>;
pub type ProductBasis = upb::ProductBasis<f64>;
