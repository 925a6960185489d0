use alloc::vec::Vec;

use num_traits::Zero;

use super::matrix::{vec_dot, vec_norm};
use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Orthonormal basis of a subspace of `C^N`, grown by modified Gram–Schmidt
/// with one reorthogonalization pass.
#[derive(Clone, Debug, Default)]
pub struct OrthoBasis {
    dim: usize,
    vectors: Vec<Vec<C64>>,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
        }
    }

    /// Orthonormalizes `vs`, dropping vectors whose residual is below
    /// `cutoff` times the largest input norm.
    pub fn from_vectors(dim: usize, vs: &[Vec<C64>], cutoff: f64) -> Self {
        let scale = vs.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
        let mut b = Self::new(dim);
        for v in vs {
            b.try_add(v, cutoff * scale);
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// `v - P v`.
    pub fn residual(&self, v: &[C64]) -> Vec<C64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.vectors {
                let p = vec_dot(q, &r);
                if p.is_zero() {
                    continue;
                }
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        r
    }

    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let r = self.residual(v);
        v.iter().zip(&r).map(|(a, b)| a - b).collect()
    }

    /// Coordinates `<q_k, v>` in the basis.
    pub fn coordinates(&self, v: &[C64]) -> Vec<C64> {
        self.vectors.iter().map(|q| vec_dot(q, v)).collect()
    }

    pub fn distance(&self, v: &[C64]) -> f64 {
        vec_norm(&self.residual(v))
    }

    /// Adds `v` if its residual norm exceeds `abs_cutoff`; returns whether
    /// the basis grew.
    pub fn try_add(&mut self, v: &[C64], abs_cutoff: f64) -> bool {
        assert_eq!(v.len(), self.dim);
        if self.vectors.len() >= self.dim {
            return false;
        }
        let r = self.residual(v);
        let nr = vec_norm(&r);
        if nr <= abs_cutoff || nr == 0.0 {
            return false;
        }
        self.vectors.push(r.iter().map(|z| z / nr).collect());
        true
    }

    /// Basis vectors as columns of an `N x k` matrix.
    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_columns(self.dim, &self.vectors)
    }
}

/// Flattened (row-major) view of a matrix as a vector in `C^{rows*cols}`,
/// consistent with the Frobenius inner product.
pub fn flatten(a: &CMatrix) -> Vec<C64> {
    a.data().to_vec()
}

pub fn unflatten(rows: usize, cols: usize, v: &[C64]) -> CMatrix {
    CMatrix::from_raw(rows, cols, v.to_vec())
}

/// Orthonormal basis of `span(basis)` in the Frobenius inner product, with
/// Gram–Schmidt cutoff 1e-12 relative to the largest basis norm.
pub fn matrix_span(shape: (usize, usize), basis: &[CMatrix]) -> Result<OrthoBasis> {
    for b in basis {
        if b.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: shape,
                found: b.shape(),
            });
        }
    }
    let vs: Vec<Vec<C64>> = basis.iter().map(flatten).collect();
    Ok(OrthoBasis::from_vectors(shape.0 * shape.1, &vs, 1e-12))
}

/// Frobenius distance from `a` to `span(basis)`.
pub fn subspace_distance(a: &CMatrix, basis: &[CMatrix]) -> Result<f64> {
    let span = matrix_span(a.shape(), basis)?;
    Ok(span.distance(&flatten(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let e11 = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let d = subspace_distance(&CMatrix::identity(2), core::slice::from_ref(&e11)).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let d = subspace_distance(&CMatrix::identity(2), &[]).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let a = e11.scale_real(3.0);
        assert!(subspace_distance(&a, &[e11]).unwrap() < 1e-12);
    }

    #[test]
    fn shape_checked() {
        assert!(subspace_distance(&CMatrix::identity(2), &[CMatrix::identity(3)]).is_err());
    }

    #[test]
    fn dependent_vectors_dropped() {
        let v1 = alloc::vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        let v2 = alloc::vec![C64::new(2.0, 0.0), C64::new(2.0, 0.0)];
        let b = OrthoBasis::from_vectors(2, &[v1, v2], 1e-12);
        assert_eq!(b.len(), 1);
    }
}
