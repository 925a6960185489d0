//! Eigenvalues of general complex matrices: permutation/scaling balancing,
//! Householder reduction to Hessenberg form, then shifted complex QR with
//! Givens rotations.

use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use num_traits::Zero;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Isolates eigenvalues by permutations (rows/columns with zero off-diagonal
/// entries in the active block) and equilibrates row/column norms with
/// powers of two. Returns `(lo, hi)` of the remaining active block.
fn balance(a: &mut [C64], n: usize) -> (usize, usize) {
    let mut lo = 0usize;
    let mut hi = n; // active block is [lo, hi)
    let swap = |a: &mut [C64], i: usize, j: usize| {
        if i == j {
            return;
        }
        for r in 0..n {
            a.swap(r * n + i, r * n + j);
        }
        for c in 0..n {
            a.swap(i * n + c, j * n + c);
        }
    };
    // push rows with zero off-diagonal (within the active block) to the bottom
    'rows: loop {
        if hi == 0 {
            break;
        }
        for j in (lo..hi).rev() {
            let isolated = (lo..hi).all(|c| c == j || a[j * n + c].is_zero());
            if isolated {
                swap(a, j, hi - 1);
                hi -= 1;
                continue 'rows;
            }
        }
        break;
    }
    // push columns with zero off-diagonal to the left
    'cols: loop {
        for j in lo..hi {
            let isolated = (lo..hi).all(|r| r == j || a[r * n + j].is_zero());
            if isolated {
                swap(a, j, lo);
                lo += 1;
                continue 'cols;
            }
        }
        break;
    }
    // diagonal scaling of the active block by powers of two
    let radix = 2.0f64;
    let mut converged = false;
    let mut iter = 0;
    while !converged && iter < 100 {
        iter += 1;
        converged = true;
        for i in lo..hi {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in lo..hi {
                if j != i {
                    c += a[j * n + i].l1_norm();
                    r += a[i * n + j].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let g0 = r / radix;
            while cc < g0 {
                f *= radix;
                cc *= radix * radix;
            }
            let g1 = r * radix;
            while cc >= g1 {
                f /= radix;
                cc /= radix * radix;
            }
            if (c * f + r / f) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[i * n + j] /= f;
                }
                for j in 0..hi {
                    a[j * n + i] *= f;
                }
            }
        }
    }
    (lo, hi)
}

/// Householder reduction of the active block `[lo, hi)` to upper Hessenberg.
fn hessenberg(a: &mut [C64], n: usize, lo: usize, hi: usize) {
    if hi < lo + 3 {
        return;
    }
    for k in lo..hi - 2 {
        let len = hi - k - 1;
        let mut x: Vec<C64> = (0..len).map(|i| a[(k + 1 + i) * n + k]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        x[0] = x0 + phase * alpha;
        let vnorm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H = I - 2 v v^* / (v^* v); apply H A H on rows/cols k+1..hi
        // left: rows k+1..hi, all columns lo..n
        for j in lo..n {
            let mut dot = C64::zero();
            for i in 0..len {
                dot += x[i].conj() * a[(k + 1 + i) * n + j];
            }
            let f = dot * (2.0 / vnorm2);
            for i in 0..len {
                a[(k + 1 + i) * n + j] -= x[i] * f;
            }
        }
        // right: columns k+1..hi, rows 0..hi
        for r in 0..hi {
            let mut dot = C64::zero();
            for i in 0..len {
                dot += a[r * n + k + 1 + i] * x[i];
            }
            let f = dot * (2.0 / vnorm2);
            for i in 0..len {
                a[r * n + k + 1 + i] -= f * x[i].conj();
            }
        }
        for i in 1..len {
            a[(k + 1 + i) * n + k] = C64::zero();
        }
    }
}

/// Eigenvalue of the trailing 2x2 block closer to its last diagonal entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Shifted QR on the Hessenberg block `[lo, hi)`; writes eigenvalues.
fn hqr(a: &mut [C64], n: usize, lo: usize, hi: usize, out: &mut [C64]) -> Result<()> {
    if hi <= lo {
        return Ok(());
    }
    let mut end = hi; // exclusive end of the unreduced part
    let mut iter = 0usize;
    let max_iter = 100 * (hi - lo).max(1);
    let mut total = 0usize;
    while end > lo {
        let last = end - 1;
        // find start of the unreduced Hessenberg block ending at `last`
        let mut start = last;
        while start > lo {
            let s = a[(start - 1) * n + (start - 1)].l1_norm() + a[start * n + start].l1_norm();
            let sub = a[start * n + start - 1].l1_norm();
            if sub <= f64::EPSILON * s || sub < f64::MIN_POSITIVE {
                a[start * n + start - 1] = C64::zero();
                break;
            }
            start -= 1;
        }
        if start == last {
            out[last] = a[last * n + last];
            end -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::EigenNoConvergence);
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            let h = a[last * n + last - 1].l1_norm()
                + if last >= 2 { a[(last - 1) * n + last - 2].l1_norm() } else { 0.0 };
            a[last * n + last] + C64::new(0.75 * h, 0.4 * h)
        } else {
            wilkinson_shift(
                a[(last - 1) * n + last - 1],
                a[(last - 1) * n + last],
                a[last * n + last - 1],
                a[last * n + last],
            )
        };
        // QR step restricted to the unreduced block [start, end)
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(end - start - 1);
        for i in start..end {
            a[i * n + i] -= mu;
        }
        for k in start..end - 1 {
            let x = a[k * n + k];
            let y = a[(k + 1) * n + k];
            let (c, s) = givens(x, y);
            rots.push((c, s));
            // rows k, k+1, columns k..end
            for j in k..end {
                let p = a[k * n + j];
                let q = a[(k + 1) * n + j];
                a[k * n + j] = p * c + q * s.conj();
                a[(k + 1) * n + j] = -p * s + q * c;
            }
        }
        for (idx, k) in (start..end - 1).enumerate() {
            let (c, s) = rots[idx];
            // columns k, k+1, rows start..min(k+2, end)
            let rmax = (k + 2).min(end);
            for r in start..rmax {
                let p = a[r * n + k];
                let q = a[r * n + k + 1];
                a[r * n + k] = p * c + q * s;
                a[r * n + k + 1] = -p * s.conj() + q * c;
            }
        }
        for i in start..end {
            a[i * n + i] += mu;
        }
    }
    Ok(())
}

/// Rotation `[[c, conj(s)], [-s, c]]` with `c` real mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ny = y.norm();
    if ny == 0.0 {
        return (1.0, C64::zero());
    }
    let nx = x.norm();
    if nx == 0.0 {
        // c = 0, s chosen so that conj(s) y = |y|
        return (0.0, y / ny);
    }
    let r = (nx * nx + ny * ny).sqrt();
    let c = nx / r;
    let phase = x / nx;
    // c x + conj(s) y = phase r, -s x + c y = 0 => s = c y / x
    let s = phase * y.conj() / r;
    (c, s.conj())
}

/// All eigenvalues (with algebraic multiplicity) of a square matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.data().to_vec();
    let (lo, hi) = balance(&mut a, n);
    let mut out = alloc::vec![C64::zero(); n];
    for i in 0..lo {
        out[i] = a[i * n + i];
    }
    for i in hi..n {
        out[i] = a[i * n + i];
    }
    hessenberg(&mut a, n, lo, hi);
    hqr(&mut a, n, lo, hi, &mut out)?;
    Ok(out)
}
