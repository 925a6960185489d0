use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use crate::elementary::{elem_apply, elem_matrix, ElementaryOperator};
use crate::error::{Error, Result};
use crate::linalg::norms::{noise_floor, schatten_from_values};
use crate::linalg::svd::{singular_values, svd};
use crate::linalg::{op_norm, spectrum, CMatrix, C64};

/// Singular values below this fraction of the largest count as zero when
/// reading off the eigenspace of the lift.
const NULL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenmatrixEntry {
    /// Rank of the eigenmatrix: singular values above the rounding floor.
    pub rank: usize,
    /// `|x|_p / |x|_op`.
    pub ratio: f64,
    /// `|T x|_p`.
    pub p_norm_lhs: f64,
    /// `n^((1-p)/p) (sum |a_i| |b_i|) |x|_p`.
    pub p_norm_rhs: f64,
    /// `|x|_p`.
    pub est_lhs: f64,
    /// `rank^((1-p)/p) |x|_1`.
    pub est_rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenspaceReport {
    pub lambda: C64,
    pub p: f64,
    /// The eigenvalue of the lift nearest to `lambda`, used for the
    /// eigenspace.
    pub eigenvalue: C64,
    pub entries: Vec<EigenmatrixEntry>,
    pub p_norm_holds: bool,
    pub est_holds: bool,
}

impl EigenspaceReport {
    pub fn dimension(&self) -> usize {
        self.entries.len()
    }
}

/// Schatten quasinorm bounds on the eigenspace of `T` for `lambda != 0`.
///
/// For each orthonormal basis eigenmatrix `x` this checks
/// `|T x|_p <= n^((1-p)/p) (sum |a_i| |b_i|) |x|_p` (`n` the number of terms)
/// and `|x|_p <= r^((1-p)/p) |x|_1` (`r` the rank of `x`), both within
/// relative `tol`. The eigenspace is the null space of `lift - mu` with `mu`
/// the computed eigenvalue nearest to `lambda`, which must lie within
/// `max(tol, 1e-8 |lambda|)`.
pub fn eigenspace_ideal_check(t: &ElementaryOperator, lambda: C64, p: f64, tol: f64) -> Result<EigenspaceReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidP(p));
    }
    if !(lambda.norm() > tol) {
        return Err(Error::InvalidArgument("lambda must be nonzero"));
    }
    let (rows, cols) = t.dims();
    let d = rows * cols;
    let lift = elem_matrix(t);
    let sp = spectrum(&lift)?;
    let (eigenvalue, distance) = sp
        .eigenvalues
        .iter()
        .map(|&mu| (mu, (mu - lambda).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::LambdaNotInSpectrum { distance: f64::INFINITY })?;
    if distance > tol.max(1e-8 * lambda.norm()) {
        return Err(Error::LambdaNotInSpectrum { distance });
    }

    let mut shifted = lift;
    for i in 0..d {
        shifted[(i, i)] -= eigenvalue;
    }
    let dec = svd(&shifted);
    let smax = dec.s[0].max(f64::MIN_POSITIVE);
    // at least the smallest direction, even when rounding lifts it above the cutoff
    let nullity = dec.s.iter().filter(|&&s| s <= NULL_TOL * smax).count().max(1);

    let n = t.len() as f64;
    let expo = (1.0 - p) / p;
    let coeff_sum: f64 = t.terms().iter().map(|(a, b)| op_norm(a) * op_norm(b)).sum();
    let mut entries = Vec::with_capacity(nullity);
    for k in d - nullity..d {
        let x = CMatrix::from_col_major(rows, cols, &dec.v.column(k));
        let s = singular_values(&x);
        let xp = schatten_from_values(&s, p);
        let x1: f64 = s.iter().sum();
        let floor = noise_floor(s.len()) * s[0];
        let rank = s.iter().filter(|&&v| v > floor).count();
        let tx = elem_apply(t, &x)?;
        entries.push(EigenmatrixEntry {
            rank,
            ratio: xp / s[0],
            p_norm_lhs: schatten_from_values(&singular_values(&tx), p),
            p_norm_rhs: n.powf(expo) * coeff_sum * xp,
            est_lhs: xp,
            est_rhs: (rank as f64).powf(expo) * x1,
        });
    }
    let p_norm_holds = entries.iter().all(|e| e.p_norm_lhs <= e.p_norm_rhs * (1.0 + tol));
    let est_holds = entries.iter().all(|e| e.est_lhs <= e.est_rhs * (1.0 + tol));
    Ok(EigenspaceReport {
        lambda,
        p,
        eigenvalue,
        entries,
        p_norm_holds,
        est_holds,
    })
}
