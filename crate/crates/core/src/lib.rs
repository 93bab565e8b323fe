//! Low transformed-tubal-rank tensor completion.
//!
//! Third-order tensors are multiplied through an arbitrary unitary transform
//! along the third mode (the Φ-product). This crate provides the algebra
//! built on it (transformed t-SVD, multi-rank, nuclear and spectral norms,
//! singular value thresholding, tangent-space projections, incoherence), an
//! ADMM solver for nuclear-norm completion, synthetic experiment tooling,
//! and binary/CSV formats plus a command-line front end.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod io;
pub mod lab;
mod linalg;
pub mod solver;
pub mod tensor;
pub mod transform;

pub use algebra::{
    basis, conj_transpose, identity_tensor, incoherence_mu, multi_rank, phi_product, project_t,
    project_t_perp, spectral_norm, svt_prox, t_svd, truncated_multirank, ttnn, Basis, Incoherence,
    MultiRank, TSVDFactors,
};
pub use error::{Error, Result};
pub use solver::{admm_complete, SampleSet, SolveReport, SolverConfig};
pub use tensor::{inner_product, norm, NormKind, Tensor3, WeightVector, C64};
pub use transform::{TransformKind, UnitaryTransform};
