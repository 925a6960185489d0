use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::{induced_norm_bracket, pair_norm, NormBracket, NormKind, OrderedPairNorm, PairNormReport, SampledMap};
use crate::elementary::{elem_matrix, ElementaryOperator};
use crate::error::{Error, Result};
use crate::linalg::lu::Lu;
use crate::linalg::subspace::OrthoBasis;
use crate::linalg::svd::svd;
use crate::linalg::{op_norm, riesz_projection, vec_dot, vec_norm, CMatrix, Contour, C64};

/// Relative invariance defect accepted for the supplied subspace.
const INVARIANCE_TOL: f64 = 1e-7;
const MAX_TERMS: usize = 2000;
const TERM_CUT: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

/// Inputs of [`reconstruct_series`]. `None` for `t` or `epsilon` means
/// "measure it".
#[derive(Clone, Copy, Debug)]
pub struct SeriesInput<'a> {
    pub op: &'a ElementaryOperator,
    /// Power `m` with `T^m = S + P`.
    pub power: usize,
    /// Spanning set of an invariant subspace `Z` on which `T` is onto.
    pub subspace: &'a [CMatrix],
    pub z: &'a CMatrix,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub pair: OrderedPairNorm,
}

/// `T^m = S + P` where `S` collects the terms of `T^m` with a flagged
/// coefficient and `P` the products of unflagged terms only, and the series
/// `z = S z_1 + P S z_2 + P^2 S z_3 + ...` with `T^m z_{k+1} = z_k` in `Z`.
#[derive(Clone, Debug)]
pub struct SpectralSubspaceRun {
    pub power: usize,
    pub t_power_m: CMatrix,
    pub s: CMatrix,
    pub p: CMatrix,
    /// Surjectivity constant used, and the bracket for the norm of the
    /// inverse of `T` on `Z` it was checked against.
    pub t: f64,
    pub t_bracket: NormBracket,
    pub epsilon: f64,
    pub remainder: PairNormReport,
    /// Norm of `S` from `X` to `Y`.
    pub s_norm: NormBracket,
    /// `t^m / (1 - eps^m t^m) |S|_{X->Y}`.
    pub bound_constant: f64,
    pub z: CMatrix,
    pub z_x: f64,
    pub z_y: f64,
    /// `bound_constant * |z|_X`.
    pub y_norm_bound: f64,
    pub series_partial_sums: Vec<CMatrix>,
    /// `|z - partial sum|_X` after each term.
    pub partial_sum_residuals: Vec<f64>,
    /// `|z_k|_X` for `k = 0, 1, ...`.
    pub preimage_norms: Vec<f64>,
    /// `|z_k|_X <= t^(mk) |z|_X` for every preimage.
    pub preimage_growth_holds: bool,
    pub converged: bool,
    /// `|z|_Y <= y_norm_bound` (relative slack 1e-9).
    pub holds: bool,
}

/// `T` restricted to an invariant subspace `Z`, in an orthonormal basis.
#[derive(Clone, Debug)]
struct Restriction {
    dims: (usize, usize),
    q: Vec<Vec<C64>>,
    basis: OrthoBasis,
    inv: CMatrix,
    /// Left singular vector of the coordinate matrix for its smallest
    /// singular value: the direction the inverse stretches most.
    worst: Vec<C64>,
}

impl Restriction {
    fn new(op: &ElementaryOperator, subspace: &[CMatrix]) -> Result<Self> {
        let dims = op.dims();
        let d = dims.0 * dims.1;
        for x in subspace {
            if x.shape() != dims {
                return Err(Error::ShapeMismatch {
                    expected: dims,
                    found: x.shape(),
                });
            }
        }
        let lift = elem_matrix(op);
        let scale = op_norm(&lift).max(f64::MIN_POSITIVE);
        let vs: Vec<Vec<C64>> = subspace.iter().map(|x| x.vec_col_major()).collect();
        let basis = OrthoBasis::from_vectors(d, &vs, 1e-10);
        if basis.is_empty() {
            return Err(Error::InvalidArgument("subspace is zero"));
        }
        let q = basis.vectors().to_vec();
        let k = q.len();
        let images: Vec<Vec<C64>> = q.iter().map(|v| lift.mul_vec(v)).collect();
        for img in &images {
            if vec_norm(&basis.residual(img)) > INVARIANCE_TOL * scale {
                return Err(Error::InvalidArgument("subspace is not invariant"));
            }
        }
        let coords = CMatrix::from_fn(k, k, |i, j| vec_dot(&q[i], &images[j]));
        let dec = svd(&coords);
        if dec.s[k - 1] <= 1e-12 * scale {
            return Err(Error::NotSurjectiveOnSubspace { needed: f64::INFINITY });
        }
        let inv = Lu::new(&coords)
            .map_err(|_| Error::NotSurjectiveOnSubspace { needed: f64::INFINITY })?
            .inverse();
        Ok(Self {
            dims,
            worst: dec.u.column(k - 1),
            q,
            basis,
            inv,
        })
    }

    fn matrix(&self, coords: &[C64]) -> CMatrix {
        let (rows, cols) = self.dims;
        CMatrix::from_col_major(rows, cols, &expand(&self.q, coords, rows * cols))
    }

    /// `|(T|_Z)^{-1} z|_X / |z|_X` for `z` given by coordinates.
    fn stretch(&self, coords: &[C64]) -> f64 {
        let z = op_norm(&self.matrix(coords));
        if z == 0.0 {
            return 0.0;
        }
        op_norm(&self.matrix(&self.inv.mul_vec(coords))) / z
    }

    /// Bracket for the operator-norm size of `(T|_Z)^{-1}`. With `full` the
    /// lower end comes from gradient ascent, otherwise from the basis
    /// vectors and the worst Frobenius direction only.
    fn inverse_bracket(&self, full: bool) -> NormBracket {
        let (rows, cols) = self.dims;
        let k = self.q.len();
        let upper = op_norm(&self.inv) * (rows.min(cols) as f64).sqrt();
        let lower = if full {
            let inputs: Vec<CMatrix> = (0..k).map(|j| self.matrix(&unit(k, j))).collect();
            let outputs: Vec<CMatrix> = (0..k).map(|j| self.matrix(&self.inv.column(j))).collect();
            let map = SampledMap {
                inputs: &inputs,
                outputs: &outputs,
            };
            map.ascent(NormKind::Operator, NormKind::Operator, core::slice::from_ref(&self.worst))
        } else {
            (0..k)
                .map(|j| self.stretch(&unit(k, j)))
                .fold(self.stretch(&self.worst), f64::max)
        };
        // |w|_op <= |w|_F = |coords|, and |z|_F <= sqrt(r) |z|_op
        NormBracket {
            lower: lower.min(upper),
            upper,
        }
    }
}

fn unit(k: usize, j: usize) -> Vec<C64> {
    let mut e = alloc::vec![C64::new(0.0, 0.0); k];
    e[j] = C64::new(1.0, 0.0);
    e
}

/// Bracket for the `X`-norm of the inverse of `T` on the invariant subspace
/// spanned by `subspace`: the best surjectivity constant `t`.
pub fn surjectivity_bracket(op: &ElementaryOperator, subspace: &[CMatrix]) -> Result<NormBracket> {
    Ok(Restriction::new(op, subspace)?.inverse_bracket(true))
}

/// The `z`-independent part of [`reconstruct_series`], reusable across
/// elements of the subspace.
#[derive(Clone, Debug)]
pub struct SeriesPlan {
    restriction: Restriction,
    pair: OrderedPairNorm,
    power: usize,
    t: f64,
    t_bracket: NormBracket,
    epsilon: f64,
    remainder: PairNormReport,
    s_norm: NormBracket,
    t_power_m: CMatrix,
    s: CMatrix,
    p: CMatrix,
    power_inv: CMatrix,
    bound_constant: f64,
}

impl SeriesPlan {
    /// Checks the hypotheses for `T^m = S + P` on the subspace.
    ///
    /// Without `t` the constant is measured as the lower end of
    /// [`surjectivity_bracket`]. A supplied `t` is checked on the basis, on
    /// the worst Frobenius direction and later on each `z`, failing with
    /// [`Error::NotSurjectiveOnSubspace`]. The default `epsilon` is the
    /// `m`-th root of the upper pair norm bracket of `P`; a supplied one must
    /// dominate it.
    pub fn new(op: &ElementaryOperator, power: usize, subspace: &[CMatrix], t: Option<f64>, epsilon: Option<f64>, pair: OrderedPairNorm) -> Result<Self> {
        let dims = op.dims();
        let d = dims.0 * dims.1;
        let m = power;
        if m == 0 {
            return Err(Error::InvalidArgument("power must be at least 1"));
        }
        if pair.carrier_dims != dims {
            return Err(Error::ShapeMismatch {
                expected: dims,
                found: pair.carrier_dims,
            });
        }
        let restriction = Restriction::new(op, subspace)?;
        let t_bracket = restriction.inverse_bracket(t.is_none());
        let t = match t {
            Some(t) if t < t_bracket.lower * (1.0 - 1e-9) => {
                return Err(Error::NotSurjectiveOnSubspace { needed: t_bracket.lower });
            }
            Some(t) => t,
            None => t_bracket.lower,
        };

        let lift = elem_matrix(op);
        let t_power_m = lift.pow(m);
        let p = match op.split_flagged().1 {
            Some(rest) => elem_matrix(&rest).pow(m),
            None => CMatrix::zeros(d, d),
        };
        let s = &t_power_m - &p;
        let remainder = pair_norm(&p, &pair)?;
        let p_norm = remainder.bracket().upper;
        let epsilon = match epsilon {
            Some(e) if e.powi(m as i32) < p_norm * (1.0 - 1e-12) => {
                return Err(Error::RemainderTooLarge {
                    norm: p_norm,
                    bound: e.powi(m as i32),
                });
            }
            Some(e) => e,
            None => p_norm.powf(1.0 / m as f64),
        };
        if epsilon * t >= 1.0 {
            return Err(Error::ContractionFails { product: epsilon * t });
        }
        let s_norm = induced_norm_bracket(&s, dims, NormKind::Operator, pair.y_kind())?;
        let tm = t.powi(m as i32);
        let bound_constant = tm / (1.0 - epsilon.powi(m as i32) * tm) * s_norm.upper;
        let power_inv = restriction.inv.pow(m);
        Ok(Self {
            restriction,
            pair,
            power: m,
            t,
            t_bracket,
            epsilon,
            remainder,
            s_norm,
            t_power_m,
            s,
            p,
            power_inv,
            bound_constant,
        })
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `t^m / (1 - eps^m t^m) |S|_{X->Y}`.
    pub fn bound_constant(&self) -> f64 {
        self.bound_constant
    }

    /// Sums the series for `z` until a term is below `1e-12 |z|_Y` with the
    /// partial sum within `1e-9 |z|_X` of `z`.
    pub fn run(&self, z: &CMatrix) -> Result<SpectralSubspaceRun> {
        let r = &self.restriction;
        let (rows, cols) = r.dims;
        let d = rows * cols;
        if z.shape() != r.dims {
            return Err(Error::ShapeMismatch {
                expected: r.dims,
                found: z.shape(),
            });
        }
        let zv = z.vec_col_major();
        if vec_norm(&r.basis.residual(&zv)) > INVARIANCE_TOL * vec_norm(&zv).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument("z is not in the subspace"));
        }
        let z_x = op_norm(z);
        let z_y = self.pair.y_norm(z);
        let mut zk: Vec<C64> = r.basis.coordinates(&zv);
        let needed = r.stretch(&zk);
        if needed > self.t * (1.0 + 1e-9) {
            return Err(Error::NotSurjectiveOnSubspace { needed });
        }
        let tm = self.t.powi(self.power as i32);
        let mut preimage_norms = alloc::vec![z_x];
        let mut sums = Vec::new();
        let mut residuals = Vec::new();
        let mut acc = alloc::vec![C64::new(0.0, 0.0); d];
        let mut growth_ok = true;
        let cut = TERM_CUT * z_y.max(f64::MIN_POSITIVE);
        for step in 1..=MAX_TERMS {
            zk = self.power_inv.mul_vec(&zk);
            let zk_full = expand(&r.q, &zk, d);
            let zk_x = op_norm(&CMatrix::from_col_major(rows, cols, &zk_full));
            growth_ok &= zk_x <= tm.powi(step as i32) * z_x * (1.0 + 1e-9);
            preimage_norms.push(zk_x);
            let mut term = self.s.mul_vec(&zk_full);
            for _ in 1..step {
                term = self.p.mul_vec(&term);
            }
            for (a, b) in acc.iter_mut().zip(&term) {
                *a += b;
            }
            let partial = CMatrix::from_col_major(rows, cols, &acc);
            residuals.push(op_norm(&(z - &partial)));
            sums.push(partial);
            let term_y = self.pair.y_norm(&CMatrix::from_col_major(rows, cols, &term));
            if term_y <= cut && residuals[step - 1] <= SUM_TOL * z_x {
                break;
            }
        }
        let converged = residuals.last().is_some_and(|&res| res <= SUM_TOL * z_x.max(f64::MIN_POSITIVE));
        let y_norm_bound = self.bound_constant * z_x;
        Ok(SpectralSubspaceRun {
            power: self.power,
            t_power_m: self.t_power_m.clone(),
            s: self.s.clone(),
            p: self.p.clone(),
            t: self.t,
            t_bracket: self.t_bracket,
            epsilon: self.epsilon,
            remainder: self.remainder,
            s_norm: self.s_norm,
            bound_constant: self.bound_constant,
            holds: z_y <= y_norm_bound * (1.0 + 1e-9),
            z: z.clone(),
            z_x,
            z_y,
            y_norm_bound,
            series_partial_sums: sums,
            partial_sum_residuals: residuals,
            preimage_norms,
            preimage_growth_holds: growth_ok,
            converged,
        })
    }
}

/// Reconstruction of `z ∈ Z` through the series above, checking its
/// hypotheses (see [`SeriesPlan::new`]) and the resulting bound
/// `|z|_Y <= C |z|_X`. Preimages are the least squares solutions inside `Z`,
/// exact since `T` is invertible there.
pub fn reconstruct_series(input: &SeriesInput<'_>) -> Result<SpectralSubspaceRun> {
    SeriesPlan::new(input.op, input.power, input.subspace, input.t, input.epsilon, input.pair)?.run(input.z)
}

fn expand(q: &[Vec<C64>], c: &[C64], d: usize) -> Vec<C64> {
    let mut out = alloc::vec![C64::new(0.0, 0.0); d];
    for (v, &ci) in q.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * ci;
        }
    }
    out
}

/// Spanning matrices of the spectral subspace of the lift for the part of
/// the spectrum inside the circle, from its Riesz projection.
pub fn spectral_subspace(op: &ElementaryOperator, center: C64, radius: f64) -> Result<Vec<CMatrix>> {
    let proj = riesz_projection(&elem_matrix(op), &Contour::circle(center, radius)?)?;
    Ok(projection_range(op.dims(), &proj))
}

/// The same for the part of the spectrum outside the circle.
pub fn spectral_complement(op: &ElementaryOperator, center: C64, radius: f64) -> Result<Vec<CMatrix>> {
    let lift = elem_matrix(op);
    let proj = riesz_projection(&lift, &Contour::circle(center, radius)?)?;
    Ok(projection_range(op.dims(), &(&CMatrix::identity(lift.rows()) - &proj)))
}

fn projection_range((rows, cols): (usize, usize), proj: &CMatrix) -> Vec<CMatrix> {
    let dec = svd(proj);
    // a projection has singular values 0 or at least 1
    (0..dec.s.len())
        .filter(|&i| dec.s[i] > 0.5)
        .map(|i| CMatrix::from_col_major(rows, cols, &dec.u.column(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectrum, C64};
    use crate::sample;

    fn rank_one(u: &[f64], v: &[f64]) -> CMatrix {
        CMatrix::from_fn(u.len(), v.len(), |i, j| C64::new(u[i] * v[j], 0.0))
    }

    #[test]
    fn rank_one_eigenmatrix() {
        // T x = lambda f x g with rank-one f, g: the image is rank one
        let f = rank_one(&[1.0, 2.0, 0.0], &[0.5, 1.0, -1.0]);
        let g = rank_one(&[1.0, 0.0, 1.0], &[1.0, 1.0, 0.5]);
        let lambda = C64::new(1.5, 0.0);
        let op = ElementaryOperator::with_flags((3, 3), alloc::vec![(f.scale(lambda), g.clone())], alloc::vec![(true, false)]).unwrap();
        let lift = elem_matrix(&op);
        let sp = spectrum(&lift).unwrap();
        let mu = *sp.eigenvalues.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        assert!(mu.norm() > 0.1);
        let basis = spectral_subspace(&op, mu, 0.5 * mu.norm()).unwrap();
        assert_eq!(basis.len(), 1);
        let z = basis[0].clone();
        assert_eq!(crate::linalg::svd::rank(&z, 1e-10), 1);
        let pair = OrderedPairNorm::nuclear((3, 3));
        let run = reconstruct_series(&SeriesInput {
            op: &op,
            power: 1,
            subspace: &basis,
            z: &z,
            t: None,
            epsilon: None,
            pair,
        })
        .unwrap();
        assert!((run.z_y - run.z_x).abs() < 1e-12 * run.z_x);
        assert!(run.holds && run.converged);
        // P = 0: a single term reproduces z
        assert_eq!(run.epsilon, 0.0);
        assert!(run.partial_sum_residuals[0] < 1e-10);
        assert!((run.bound_constant - run.t * run.s_norm.upper).abs() < 1e-12 * run.bound_constant);
        assert!(run.y_norm_bound > run.z_y);
    }

    fn semicompact(seed: u64, n: usize, r: usize) -> ElementaryOperator {
        let mut rng = sample::rng(seed);
        let corner = |rng: &mut sample::SeededRng| {
            let c = sample::gaussian_matrix(rng, r, r);
            let mut x = CMatrix::zeros(n, n);
            x.set_block(0, 0, &c);
            x
        };
        let a = sample::gaussian_matrix(&mut rng, n, n);
        let b = sample::gaussian_matrix(&mut rng, n, n);
        let small = 0.15 / (op_norm(&a) * op_norm(&b));
        let f = corner(&mut rng);
        let g = sample::gaussian_matrix(&mut rng, n, n);
        let big = 2.0 / (op_norm(&f) * op_norm(&g));
        ElementaryOperator::with_flags((n, n), alloc::vec![(a.scale_real(small), b), (f.scale_real(big), g)], alloc::vec![(false, false), (true, false)]).unwrap()
    }

    #[test]
    fn semicompact_spectral_subspace() {
        let op = semicompact(5, 6, 2);
        let lift = elem_matrix(&op);
        let sp = spectrum(&lift).unwrap();
        let rho = sp.radius();
        let inner = spectral_subspace(&op, C64::new(0.0, 0.0), 0.5 * rho).unwrap();
        let outer = spectral_complement(&op, C64::new(0.0, 0.0), 0.5 * rho).unwrap();
        assert_eq!(inner.len() + outer.len(), 36);
        let pair = OrderedPairNorm::nuclear((6, 6));
        let t = surjectivity_bracket(&op, &outer).unwrap().lower;
        let mut found = false;
        for m in 1..=8 {
            match SeriesPlan::new(&op, m, &outer, Some(t), None, pair) {
                Ok(plan) => {
                    for z in outer.iter().take(4) {
                        let run = plan.run(z).unwrap();
                        assert!(run.holds, "{} > {}", run.z_y, run.y_norm_bound);
                        assert!(run.converged);
                    }
                    assert!(plan.epsilon() * plan.t() < 1.0);
                    found = true;
                    break;
                }
                Err(Error::ContractionFails { .. }) => continue,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(found);
    }

    #[test]
    fn hypothesis_errors() {
        let op = semicompact(6, 3, 1);
        let all: Vec<CMatrix> = (0..9).map(|k| CMatrix::from_fn(3, 3, |i, j| C64::new(f64::from(u8::from(j * 3 + i == k)), 0.0))).collect();
        let pair = OrderedPairNorm::nuclear((3, 3));
        let base = SeriesInput {
            op: &op,
            power: 2,
            subspace: &all,
            z: &all[0],
            t: Some(1e-6),
            epsilon: None,
            pair,
        };
        assert!(matches!(reconstruct_series(&base), Err(Error::NotSurjectiveOnSubspace { .. })));
        let huge_t = SeriesInput { t: Some(1e6), ..base };
        assert!(matches!(reconstruct_series(&huge_t), Err(Error::ContractionFails { .. })));
        let tiny_eps = SeriesInput { t: None, epsilon: Some(1e-9), ..base };
        assert!(matches!(reconstruct_series(&tiny_eps), Err(Error::RemainderTooLarge { .. })));
        // a nilpotent operator is not onto any nonzero invariant subspace
        let n = CMatrix::from_fn(2, 2, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let nil = ElementaryOperator::left(n, 1).unwrap();
        let whole = [CMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap(), CMatrix::from_real(2, 1, &[0.0, 1.0]).unwrap()];
        let r = reconstruct_series(&SeriesInput {
            op: &nil,
            power: 1,
            subspace: &whole,
            z: &whole[0],
            t: None,
            epsilon: None,
            pair: OrderedPairNorm::nuclear((2, 1)),
        });
        assert!(matches!(r, Err(Error::NotSurjectiveOnSubspace { .. })));
    }
}
