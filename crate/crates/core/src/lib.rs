//! Numerical laboratory for spectral radii of matrix families, radical
//! diagnostics and elementary operators on matrix bimodules.
//!
//! The crate is `no_std` and only needs `alloc`. Everything operates on dense
//! complex matrices ([`CMatrix`]) and is a pure function of its inputs; all
//! randomized procedures take an explicit seed.
//!
//! Module map:
//!
//! - [`linalg`]: matrix arithmetic, norms, spectra, Kronecker lifts, Riesz
//!   projections and subspace projections.
//! - [`families`]: summable and bounded families, the word-sum functional
//!   `eta`, tensor and joint spectral radius brackets and the family calculus.
//! - [`radical`]: algebra closure, Jacobson radical, quasinilpotence modulo an
//!   ideal, Engel predicates.
//! - [`elementary`]: elementary operators `x -> sum a_i x b_i`, their
//!   spectra, traces, spectral inclusion checks, quadrature lifts and block
//!   operators.
//! - [`triangular`]: simultaneous triangularization of nil families, chain
//!   product bounds and product decay curves.
//! - [`pair`]: ordered pairs of norms, spectral-subspace reconstruction and
//!   Schatten quasinorm bounds.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod elementary;
pub mod error;
pub mod families;
pub mod linalg;
pub mod pair;
pub mod radical;
pub mod sample;
pub mod triangular;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
