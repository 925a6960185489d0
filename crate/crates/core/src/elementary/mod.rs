//! Elementary operators `x -> sum a_i x b_i` on `m x n` matrices.
//!
//! Operators are realized on column-major vectorizations, where a single
//! term `L_a R_b` becomes `b^T (x) a`.

use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{kron_lift, op_norm, spectrum, CMatrix, SpectrumSet, C64};

mod block;
mod checks;
mod quadrature;

pub use block::{block_lift, block_spectrum, BlockElementaryOperator};
pub use checks::{spectral_inclusion_check, strong_engel_check, EngelInclusionReport, InclusionReport};
pub use quadrature::{discrete_l2_norm, quadrature_lift, OperatorValuedCurve, Side};

/// Finite sum of two-sided multiplications on the bimodule of `m x n`
/// matrices.
///
/// `compact_flags[i]` marks which coefficients of term `i` are designated
/// members of the small ideal. In this finite model small coefficients are
/// those supported in the top-left `r x r` corner (see [`corner_residual`]).
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryOperator {
    dims: (usize, usize),
    terms: Vec<(CMatrix, CMatrix)>,
    compact_flags: Vec<(bool, bool)>,
}

impl ElementaryOperator {
    pub fn new(dims: (usize, usize), terms: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        let flags = alloc::vec![(false, false); terms.len()];
        Self::with_flags(dims, terms, flags)
    }

    pub fn with_flags(dims: (usize, usize), terms: Vec<(CMatrix, CMatrix)>, compact_flags: Vec<(bool, bool)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if compact_flags.len() != terms.len() {
            return Err(Error::LengthMismatch {
                left: terms.len(),
                right: compact_flags.len(),
            });
        }
        let (m, n) = dims;
        for (a, b) in &terms {
            if a.shape() != (m, m) {
                return Err(Error::ShapeMismatch {
                    expected: (m, m),
                    found: a.shape(),
                });
            }
            if b.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    found: b.shape(),
                });
            }
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { dims, terms, compact_flags })
    }

    /// `L_a` on `m x n` matrices.
    pub fn left(a: CMatrix, n: usize) -> Result<Self> {
        let m = a.ensure_square()?;
        Self::new((m, n), alloc::vec![(a, CMatrix::identity(n))])
    }

    /// `R_b` on `m x n` matrices.
    pub fn right(b: CMatrix, m: usize) -> Result<Self> {
        let n = b.ensure_square()?;
        Self::new((m, n), alloc::vec![(CMatrix::identity(m), b)])
    }

    pub fn identity(dims: (usize, usize)) -> Self {
        Self {
            dims,
            terms: alloc::vec![(CMatrix::identity(dims.0), CMatrix::identity(dims.1))],
            compact_flags: alloc::vec![(false, false)],
        }
    }

    pub fn zero(dims: (usize, usize)) -> Self {
        Self {
            dims,
            terms: alloc::vec![(CMatrix::zeros(dims.0, dims.0), CMatrix::zeros(dims.1, dims.1))],
            compact_flags: alloc::vec![(false, false)],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn terms(&self) -> &[(CMatrix, CMatrix)] {
        &self.terms
    }

    pub fn compact_flags(&self) -> &[(bool, bool)] {
        &self.compact_flags
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn left_coefficients(&self) -> Vec<CMatrix> {
        self.terms.iter().map(|t| t.0.clone()).collect()
    }

    pub fn right_coefficients(&self) -> Vec<CMatrix> {
        self.terms.iter().map(|t| t.1.clone()).collect()
    }

    /// `sum |a_i| |b_i|` for this representation.
    pub fn representation_bound(&self) -> f64 {
        self.terms.iter().map(|(a, b)| op_norm(a) * op_norm(b)).sum()
    }

    /// `sum a_i b_i`, defined when the bimodule is square.
    pub fn coefficient_product(&self) -> Result<CMatrix> {
        let (m, n) = self.dims;
        if m != n {
            return Err(Error::ShapeMismatch {
                expected: (m, m),
                found: (m, n),
            });
        }
        let mut acc = CMatrix::zeros(m, m);
        for (a, b) in &self.terms {
            acc = &acc + &(a * b);
        }
        Ok(acc)
    }

    fn same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch {
                expected: self.dims,
                found: other.dims,
            });
        }
        Ok(())
    }

    /// Operator sum; terms are concatenated.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dims(other)?;
        let mut out = self.clone();
        out.terms.extend_from_slice(&other.terms);
        out.compact_flags.extend_from_slice(&other.compact_flags);
        Ok(out)
    }

    /// The composition `self ∘ other`, with terms `(a_i c_j, d_j b_i)`.
    /// A product coefficient is flagged when either factor is, since the
    /// small ideal absorbs multiplication.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_dims(other)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        let mut flags = Vec::with_capacity(self.len() * other.len());
        for ((a, b), fa) in self.terms.iter().zip(&self.compact_flags) {
            for ((c, d), fc) in other.terms.iter().zip(&other.compact_flags) {
                terms.push((a * c, d * b));
                flags.push((fa.0 || fc.0, fa.1 || fc.1));
            }
        }
        Ok(Self {
            dims: self.dims,
            terms,
            compact_flags: flags,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.0 = t.0.scale(s);
        }
        out
    }

    /// Splits into the terms with at least one flagged coefficient and the
    /// rest. Either side may be `None` when it has no terms.
    pub fn split_flagged(&self) -> (Option<Self>, Option<Self>) {
        let mut small = (Vec::new(), Vec::new());
        let mut rest = (Vec::new(), Vec::new());
        for (t, &f) in self.terms.iter().zip(&self.compact_flags) {
            let side = if f.0 || f.1 { &mut small } else { &mut rest };
            side.0.push(t.clone());
            side.1.push(f);
        }
        let build = |(terms, flags): (Vec<_>, Vec<_>)| {
            if terms.is_empty() {
                None
            } else {
                Some(Self {
                    dims: self.dims,
                    terms,
                    compact_flags: flags,
                })
            }
        };
        (build(small), build(rest))
    }

    /// Largest [`corner_residual`] over the flagged coefficients.
    pub fn flag_residual(&self, r: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for ((a, b), f) in self.terms.iter().zip(&self.compact_flags) {
            if f.0 {
                worst = worst.max(corner_residual(a, r));
            }
            if f.1 {
                worst = worst.max(corner_residual(b, r));
            }
        }
        worst
    }
}

/// Frobenius norm of the part of `x` outside its top-left `r x r` corner.
///
/// Corner matrices have rank at most `r`; they play the role of the small
/// (compact, finite rank) coefficients.
pub fn corner_residual(x: &CMatrix, r: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..x.rows() {
        for (j, z) in x.row(i).iter().enumerate() {
            if i >= r || j >= r {
                s += z.norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// `sum a_i x b_i`.
pub fn elem_apply(t: &ElementaryOperator, x: &CMatrix) -> Result<CMatrix> {
    if x.shape() != t.dims {
        return Err(Error::ShapeMismatch {
            expected: t.dims,
            found: x.shape(),
        });
    }
    let mut acc = CMatrix::zeros(t.dims.0, t.dims.1);
    for (a, b) in &t.terms {
        acc = &acc + &(&(a * x) * b);
    }
    Ok(acc)
}

/// `(mn) x (mn)` matrix of `t` on column-major vectorizations.
pub fn elem_matrix(t: &ElementaryOperator) -> CMatrix {
    let (m, n) = t.dims;
    let mut acc = CMatrix::zeros(m * n, m * n);
    for (a, b) in &t.terms {
        let lift = kron_lift(a, b, t.dims).expect("term shapes validated at construction");
        acc = &acc + &lift;
    }
    acc
}

pub fn elem_spectrum(t: &ElementaryOperator) -> Result<SpectrumSet> {
    spectrum(&elem_matrix(t))
}

/// Projective bound `sum |a_i| |b_i|` of the given representation; an upper
/// bound for the operator norm.
pub fn elem_norm_bound(t: &ElementaryOperator) -> f64 {
    t.representation_bound()
}

/// `sum tr(a_i) tr(b_i)`, the trace of `t` on the `mn`-dimensional space.
pub fn elem_trace(t: &ElementaryOperator) -> C64 {
    t.terms.iter().map(|(a, b)| a.trace() * b.trace()).sum()
}
