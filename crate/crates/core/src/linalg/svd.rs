//! One-sided (Hestenes) Jacobi SVD for complex matrices.
//!
//! Jacobi keeps high relative accuracy for small singular values, which the
//! Schatten quasinorms with `p < 1` are sensitive to.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use num_traits::Zero;

use super::matrix::{vec_dot, vec_norm};
use super::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(s) V^*` with `k = min(m, n)` columns, singular values
/// sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// Column-oriented Jacobi on a tall matrix given by its columns. Returns the
/// rotated columns (`A V`) and `V`.
fn jacobi_columns(mut cols: Vec<Vec<C64>>, want_v: bool) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let n = cols.len();
    let mut v: Vec<Vec<C64>> = if want_v {
        (0..n)
            .map(|j| {
                let mut e = vec![C64::zero(); n];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = vec_dot(&cols[i], &cols[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (ci, cj) = split_pair(&mut cols, i, j);
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let yb = *y * phase.conj();
                    let xi = *x;
                    *x = xi * c - yb * s;
                    *y = xi * s + yb * c;
                }
                if want_v {
                    let (vi, vj) = split_pair(&mut v, i, j);
                    for (x, y) in vi.iter_mut().zip(vj.iter_mut()) {
                        let yb = *y * phase.conj();
                        let xi = *x;
                        *x = xi * c - yb * s;
                        *y = xi * s + yb * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, v)
}

fn split_pair<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    debug_assert!(i < j);
    let (a, b) = v.split_at_mut(j);
    (&mut a[i], &mut b[0])
}

fn columns_of(a: &CMatrix) -> Vec<Vec<C64>> {
    (0..a.cols()).map(|j| a.column(j)).collect()
}

/// Singular values in decreasing order (`min(m, n)` of them).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let tall = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.adjoint()
    };
    let (cols, _) = jacobi_columns(columns_of(&tall), false);
    let mut s: Vec<f64> = cols.iter().map(|c| vec_norm(c)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Thin SVD.
pub fn svd(a: &CMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    let (cols, vcols) = jacobi_columns(columns_of(a), true);
    let mut order: Vec<(f64, usize)> = cols.iter().map(|c| vec_norm(c)).zip(0..n).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let s: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &(sv, idx) in &order {
        if sv > smax * 1e-300 && sv > 0.0 {
            ucols.push(cols[idx].iter().map(|z| z / sv).collect());
        } else {
            ucols.push(vec![C64::zero(); m]);
        }
    }
    complete_orthonormal(&mut ucols, m, &s);
    let vsorted: Vec<Vec<C64>> = order.iter().map(|&(_, idx)| vcols[idx].clone()).collect();
    Svd {
        u: CMatrix::from_columns(m, &ucols),
        s,
        v: CMatrix::from_columns(n, &vsorted),
    }
}

/// Replaces zero columns (for vanishing singular values) by unit vectors
/// orthogonal to the rest so that `U` has orthonormal columns.
fn complete_orthonormal(cols: &mut [Vec<C64>], m: usize, s: &[f64]) {
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = smax * f64::EPSILON * 64.0;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for (k, c) in cols.iter().enumerate() {
        if s[k] > cutoff && s[k] > 0.0 {
            basis.push(c.clone());
        }
    }
    let mut probe = 0;
    for k in 0..cols.len() {
        if s[k] > cutoff && s[k] > 0.0 {
            continue;
        }
        loop {
            let mut e = vec![C64::zero(); m];
            e[probe % m] = C64::new(1.0, 0.0);
            probe += 1;
            for _ in 0..2 {
                for b in &basis {
                    let p = vec_dot(b, &e);
                    for (x, y) in e.iter_mut().zip(b) {
                        *x -= p * y;
                    }
                }
            }
            let nrm = vec_norm(&e);
            if nrm > 0.5 {
                let e: Vec<C64> = e.iter().map(|z| z / nrm).collect();
                basis.push(e.clone());
                cols[k] = e;
                break;
            }
            if probe > 4 * m {
                break;
            }
        }
    }
}

/// Orthonormal basis (as column vectors) of the null space of `a`, using a
/// singular value cutoff `tol * max(s)`.
pub fn null_space(a: &CMatrix, tol: f64) -> Vec<Vec<C64>> {
    let (m, n) = a.shape();
    // pad wide matrices so that V is square
    let tall = if m < n {
        let mut p = CMatrix::zeros(n, n);
        p.set_block(0, 0, a);
        p
    } else {
        a.clone()
    };
    let d = svd(&tall);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let cutoff = tol * smax.max(f64::MIN_POSITIVE);
    (0..n)
        .filter(|&k| d.s[k] <= cutoff)
        .map(|k| d.v.column(k))
        .collect()
}

/// Numerical rank with relative cutoff.
pub fn rank(a: &CMatrix, tol: f64) -> usize {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * smax).count()
}

/// Minimal-norm least squares solution of `a x = b` via the pseudo-inverse
/// with relative cutoff `tol`.
pub fn least_squares(a: &CMatrix, b: &[C64], tol: f64) -> Vec<C64> {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let k = d.s.len();
    let mut x = vec![C64::zero(); a.cols()];
    for idx in 0..k {
        let sv = d.s[idx];
        if sv <= tol * smax || sv == 0.0 {
            continue;
        }
        let ucol = d.u.column(idx);
        let coef = vec_dot(&ucol, b) / sv;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += d.v[(i, idx)] * coef;
        }
    }
    x
}

/// Unitary polar factor `U V^*` of a matrix (for square inputs).
pub fn polar_unitary(a: &CMatrix) -> CMatrix {
    let d = svd(a);
    &d.u * &d.v.adjoint()
}
