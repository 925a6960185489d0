#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::{hermitian::hermitian_eigenvalues, svd::singular_values, CMatrix};
use crate::error::{Error, Result};

/// Operator (spectral) norm, the largest singular value.
///
/// Computed from the largest eigenvalue of the smaller Gram matrix, which is
/// accurate to machine precision relative to the norm itself.
pub fn op_norm(a: &CMatrix) -> f64 {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return 0.0;
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    if m == 1 || n == 1 {
        return a.frobenius_norm();
    }
    let b = a.scale_real(1.0 / scale);
    let g = if m <= n { &b * &b.adjoint() } else { &b.adjoint() * &b };
    let lmax = hermitian_eigenvalues(&g)[0].max(0.0);
    scale * lmax.sqrt()
}

/// Submultiplicative norm used when summing or maximizing over products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MatrixNorm {
    #[default]
    Operator,
    Frobenius,
}

impl MatrixNorm {
    pub fn eval(self, a: &CMatrix) -> f64 {
        match self {
            MatrixNorm::Operator => op_norm(a),
            MatrixNorm::Frobenius => a.frobenius_norm(),
        }
    }
}

/// Exponent of a Schatten (quasi)norm; `Inf` selects the operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenP {
    Finite(f64),
    Inf,
}

impl SchattenP {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidP(p));
        }
        Ok(if p.is_infinite() {
            SchattenP::Inf
        } else {
            SchattenP::Finite(p)
        })
    }
}

/// `(sum s_i^p)^(1/p)` over singular values; `max s_i` for `p = inf`.
/// `p = 1` is the nuclear norm.
pub fn schatten_norm(a: &CMatrix, p: f64) -> Result<f64> {
    Ok(schatten(a, SchattenP::new(p)?))
}

pub fn schatten(a: &CMatrix, p: SchattenP) -> f64 {
    match p {
        SchattenP::Inf => op_norm(a),
        SchattenP::Finite(p) => schatten_from_values(&singular_values(a), p),
    }
}

/// `(sum s_i^p)^(1/p)` over the values above the rounding floor
/// [`noise_floor`]; below it a computed singular value carries no
/// information, yet for small `p` it would still inflate the sum.
pub fn schatten_from_values(s: &[f64], p: f64) -> f64 {
    let smax = s.iter().fold(0.0f64, |m, &x| m.max(x));
    if smax == 0.0 {
        return 0.0;
    }
    let floor = noise_floor(s.len()) * smax;
    // factor out the largest value to keep the power sums in range
    let sum: f64 = s.iter().filter(|&&x| x > floor).map(|&x| (x / smax).powf(p)).sum();
    smax * sum.powf(1.0 / p)
}

/// Relative size below which computed singular values of a matrix with `k`
/// of them are rounding noise.
pub fn noise_floor(k: usize) -> f64 {
    4.0 * k.max(1) as f64 * f64::EPSILON
}

pub fn nuclear_norm(a: &CMatrix) -> f64 {
    singular_values(a).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm(&CMatrix::identity(3)), 1.0);
        assert_eq!(op_norm(&CMatrix::zeros(2, 2)), 0.0);
        let a = CMatrix::diag(&[C64::new(3.0, 0.0), C64::new(0.0, -4.0)]);
        assert!((op_norm(&a) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn schatten_examples() {
        let r1 = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        for p in [0.1, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert!((schatten_norm(&r1, p).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((schatten_norm(&CMatrix::identity(2), 1.0).unwrap() - 2.0).abs() < 1e-15);
        let d = CMatrix::diag_real(&[3.0, 4.0]);
        let expected = (3f64.sqrt() + 2.0).powi(2);
        assert!((schatten_norm(&d, 0.5).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 13.928203230275509).abs() < 1e-12);
    }

    #[test]
    fn invalid_p() {
        assert_eq!(schatten_norm(&CMatrix::identity(2), 0.0), Err(Error::InvalidP(0.0)));
        assert!(schatten_norm(&CMatrix::identity(2), -1.0).is_err());
    }
}
