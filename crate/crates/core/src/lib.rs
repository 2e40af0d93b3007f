//! Trace functionals, partial traces and entropy inequalities for
//! finite-dimensional positive semidefinite matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod cli;
pub mod dense;
pub mod error;
pub mod functionals;
pub mod io;
mod jacobi;
pub mod matcore;
pub mod probes;
pub mod tensor;

pub use dense::CMatrix;
pub use error::{Error, Result};
pub use functionals::{DensityMatrix, PExponent, Regime};
pub use matcore::{HermitianMatrix, PsdMatrix, Spectrum};
pub use tensor::{SignedPermutationUnitary, TensorSpace};
