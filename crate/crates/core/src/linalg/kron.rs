use super::CMatrix;
use crate::error::{Error, Result};

/// Matrix of `x -> a x b` on `m x n` matrices under column-major
/// vectorization, i.e. `b^T (x) a`.
pub fn kron_lift(a: &CMatrix, b: &CMatrix, bimodule_dims: (usize, usize)) -> Result<CMatrix> {
    let (m, n) = bimodule_dims;
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
    Ok(b.transpose().kron(a))
}

/// Applies a lifted operator (on column-major vectorizations) to `x`.
pub fn apply_lift(lift: &CMatrix, x: &CMatrix) -> CMatrix {
    let v = lift.mul_vec(&x.vec_col_major());
    CMatrix::from_col_major(x.rows(), x.cols(), &v)
}
