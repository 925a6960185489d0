//! Seeded random matrices for property suites and sampling-based bounds.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{vec_dot, vec_norm, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample (Box–Muller).
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Complex normal with unit variance `E|z|^2 = 1`.
pub fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    C64::new(normal(rng), normal(rng)) * core::f64::consts::FRAC_1_SQRT_2
}

/// Uniform point on the unit circle.
pub fn unit_phase<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>())
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn real_gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), 0.0))
}

/// Haar-ish unitary from Gram–Schmidt of a complex Gaussian matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let p = vec_dot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let nv = vec_norm(&v);
        cols.push(v.iter().map(|z| z / nv).collect());
    }
    CMatrix::from_columns(n, &cols)
}

/// Random upper-triangular matrix; `strict` zeroes the diagonal.
pub fn upper_triangular<R: Rng>(rng: &mut R, n: usize, strict: bool) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if j > i || (j == i && !strict) {
            complex_normal(rng)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `U diag(s) V^*` with singular values drawn from `[1, cond]`, so the
/// condition number is at most `cond`.
pub fn conditioned<R: Rng>(rng: &mut R, n: usize, cond: f64) -> CMatrix {
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    let s: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => 1.0,
            1 => cond,
            _ => uniform(rng, 1.0, cond),
        })
        .collect();
    let s = if n == 1 { alloc::vec![1.0] } else { s };
    &(&u * &CMatrix::diag_real(&s)) * &v.adjoint()
}
