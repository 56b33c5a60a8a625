//! Dense tensor algebra and tensor learning.
//!
//! * [`DenseTensor`] and [`Matrix`]: row-major storage, unfolding, folding.
//! * [`algebra`]: n-mode products, Kronecker / Khatri-Rao / Hadamard products,
//!   outer products and third-order moments.
//! * [`KruskalTensor`], [`TuckerTensor`]: factorized forms.
//! * [`decomposition`]: CP-ALS, HOSVD, HOOI, non-negative CP and Tucker.
//! * [`rpca`]: proximal operators and robust tensor PCA.
//! * [`regression`]: ridge-regularized Kruskal and Tucker regression.
//! * [`bench`]: fixed-iteration timing harness behind the `bench` binary.
//! * [`io`]: the `TNSR` binary tensor format and directory layouts for
//!   factorized models and regression datasets.

pub mod algebra;
pub mod bench;
pub mod decomposition;
mod error;
pub mod io;
pub mod kruskal;
mod linalg;
mod matrix;
mod random;
pub mod regression;
pub mod rpca;
pub mod tensor;
pub mod tucker;

pub use decomposition::{FitOptions, FitReport};
pub use error::{Result, TensorError};
pub use kruskal::KruskalTensor;
pub use matrix::Matrix;
pub use tensor::DenseTensor;
pub use tucker::TuckerTensor;
