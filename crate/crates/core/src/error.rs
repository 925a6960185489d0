use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("entry data has length {found}, expected {expected}")]
    DataLength { expected: usize, found: usize },
    #[error("non-finite entry in matrix")]
    NonFinite,
    #[error("Schatten exponent must be positive, got {0}")]
    InvalidP(f64),
    #[error("an eigenvalue lies within {margin:e} of the contour")]
    EigenvalueOnContour { margin: f64 },
    #[error("resolvent is singular at a quadrature node")]
    SingularResolvent,
    #[error("matrix is singular")]
    Singular,
    #[error("contour quadrature did not converge with {nodes} nodes")]
    QuadratureNotConverged { nodes: usize },
    #[error("contour needs at least 16 nodes and a positive radius")]
    InvalidContour,
    #[error("eigenvalue iteration failed to converge")]
    EigenNoConvergence,
    #[error("word budget of {budget} evaluations exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("family is empty")]
    EmptyFamily,
    #[error("multiplicity must be a positive integer")]
    ZeroMultiplicity,
    #[error("expanded family lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("row {row} of the coefficient matrix has l1 sum {sum} > 1")]
    RowSumExceeded { row: usize, sum: f64 },
    #[error("coefficient {index} has modulus {modulus} > 1")]
    CoefficientTooLarge { index: usize, modulus: f64 },
    #[error("tensor spectral radius upper bound {upper} is not below one")]
    RadiusNotBelowOne { upper: f64 },
    #[error("basis is not closed under multiplication (residual {residual:e})")]
    ClosureViolated { residual: f64 },
    #[error("element is not in the algebra (residual {residual:e})")]
    NotInAlgebra { residual: f64 },
    #[error("ideal is not nil (spectral radius {radius:e})")]
    IdealNotNil { radius: f64 },
    #[error("quadrature needs at least one node")]
    NodeCountZero,
    #[error("family is not nil (spectral radius {radius:e})")]
    NotNilFamily { radius: f64 },
    #[error("operator {op} does not leave the chain invariant (residual {residual:e})")]
    ChainNotInvariant { op: usize, residual: f64 },
    #[error("product has {factors} factors but the chain has length {chain}")]
    TooFewFactors { factors: usize, chain: usize },
    #[error("K is not contained in the radical (residual {residual:e})")]
    RadicalHypothesisViolated { residual: f64 },
    #[error("operator does not map the Y-ball into a bounded set")]
    YNotInvariant,
    #[error("operator is not surjective on the subspace with constant t (needed {needed})")]
    NotSurjectiveOnSubspace { needed: f64 },
    #[error("contraction fails: epsilon * t = {product} >= 1")]
    ContractionFails { product: f64 },
    #[error("remainder has pair norm {norm:e} above epsilon^m = {bound:e}")]
    RemainderTooLarge { norm: f64, bound: f64 },
    #[error("lambda is not in the spectrum (distance {distance:e})")]
    LambdaNotInSpectrum { distance: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
