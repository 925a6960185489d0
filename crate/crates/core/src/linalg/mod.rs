//! Dense complex linear algebra: the substrate for every other module.
//!
//! Vectorization is column-major throughout, so the two-sided multiplication
//! `x -> a x b` on `m x n` matrices lifts to `b^T (x) a`.

pub mod eigen;
pub mod hermitian;
pub mod kron;
pub mod lu;
mod matrix;
pub mod norms;
pub mod riesz;
pub mod spectrum;
pub mod subspace;
pub mod svd;

pub use kron::{apply_lift, kron_lift};
pub use matrix::{vec_dot, vec_norm, CMatrix, C64};
pub use norms::{nuclear_norm, MatrixNorm, op_norm, schatten_norm, SchattenP};
pub use riesz::{riesz_projection, Contour};
pub use spectrum::{nilpotency_defect, spectral_radius, spectrum, SpectrumSet};
pub use subspace::{subspace_distance, OrthoBasis};
