//! Ordered pairs of norms on a matrix space: the operator norm (`X`) and a
//! Schatten (quasi)norm with `p <= 1` (`Y`), induced norms of linear maps
//! between them, the spectral-subspace reconstruction series and the
//! quasinorm bounds for elementary operators.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::norms::noise_floor;
use crate::linalg::svd::{svd, Svd};
use crate::linalg::{op_norm, schatten_norm, vec_norm, CMatrix, C64};
use crate::sample;

mod quasinorm;
mod series;

pub use quasinorm::{eigenspace_ideal_check, EigenmatrixEntry, EigenspaceReport};
pub use series::{reconstruct_series, spectral_complement, spectral_subspace, surjectivity_bracket, SeriesInput, SeriesPlan, SpectralSubspaceRun};

/// Random restarts of the induced norm ascent.
pub const RESTARTS: usize = 10;
const ASCENT_SEED: u64 = 0x5eed_a5c3;
const ASCENT_ITERS: usize = 200;
/// Singular values below this fraction of the largest are clamped when
/// differentiating a quasinorm.
const GRAD_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    Operator,
    /// Schatten exponent in `(0, 1]`; `1` is the nuclear norm.
    Schatten(f64),
}

impl NormKind {
    pub fn eval(self, x: &CMatrix) -> f64 {
        match self {
            NormKind::Operator => op_norm(x),
            NormKind::Schatten(p) => schatten_norm(x, p).expect("validated exponent"),
        }
    }

    /// Gradient (for the real part of the Frobenius pairing) at `x`, clamped
    /// at tiny singular values.
    fn gradient(self, x: &CMatrix) -> CMatrix {
        let Svd { u, s, v } = svd(x);
        let smax = s.first().copied().unwrap_or(0.0);
        let (m, n) = x.shape();
        if smax == 0.0 {
            return CMatrix::zeros(m, n);
        }
        let weights: Vec<f64> = match self {
            NormKind::Operator => s.iter().enumerate().map(|(i, _)| if i == 0 { 1.0 } else { 0.0 }).collect(),
            NormKind::Schatten(p) => {
                let nrm = self.eval(x);
                s.iter()
                    .map(|&si| nrm.powf(1.0 - p) * si.max(GRAD_FLOOR * smax).powf(p - 1.0))
                    .collect()
            }
        };
        let mut g = CMatrix::zeros(m, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..m {
                for j in 0..n {
                    g[(i, j)] += u[(i, k)] * v[(j, k)].conj() * w;
                }
            }
        }
        g
    }

    /// Constant `c` with `|x|_F <= c |x|` for `min(m, n) = r`.
    fn frobenius_ceiling(self, r: usize) -> f64 {
        match self {
            NormKind::Operator => (r as f64).sqrt(),
            NormKind::Schatten(_) => 1.0,
        }
    }

    /// Constant `c` with `|x| <= c |x|_F` for `min(m, n) = r`.
    fn frobenius_floor(self, r: usize) -> f64 {
        match self {
            NormKind::Operator => 1.0,
            NormKind::Schatten(p) => (r as f64).powf(1.0 / p - 0.5),
        }
    }

    fn exponent(self) -> f64 {
        match self {
            NormKind::Operator => 1.0,
            NormKind::Schatten(p) => p,
        }
    }
}

/// The pair `Y ⊂ X` on `m x n` matrices: `X` carries the operator norm, `Y`
/// the Schatten `p`-norm. `|y|_X <= |y|_Y` always holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderedPairNorm {
    pub p: f64,
    pub carrier_dims: (usize, usize),
}

impl OrderedPairNorm {
    pub fn new(carrier_dims: (usize, usize), p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidP(p));
        }
        Ok(Self { p, carrier_dims })
    }

    /// Operator norm against the nuclear norm.
    pub fn nuclear(carrier_dims: (usize, usize)) -> Self {
        Self { p: 1.0, carrier_dims }
    }

    pub fn x_kind(&self) -> NormKind {
        NormKind::Operator
    }

    pub fn y_kind(&self) -> NormKind {
        NormKind::Schatten(self.p)
    }

    pub fn x_norm(&self, x: &CMatrix) -> f64 {
        op_norm(x)
    }

    pub fn y_norm(&self, x: &CMatrix) -> f64 {
        self.y_kind().eval(x)
    }
}

/// Certified interval for an induced norm: `lower` is attained by an
/// explicit input, `upper` comes from norm inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
}

impl NormBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairNormReport {
    /// Induced norm on `X`.
    pub x: NormBracket,
    /// Induced norm of the restriction to `Y`.
    pub y: NormBracket,
}

impl PairNormReport {
    /// Bracket for `max(|T|_X, |T|_Y)`.
    pub fn bracket(&self) -> NormBracket {
        NormBracket {
            lower: self.x.lower.max(self.y.lower),
            upper: self.x.upper.max(self.y.upper),
        }
    }
}

/// Operator Schmidt decomposition of a lifted operator: terms `(s, a, b)`
/// with `x -> sum s a x b`, the `a` and `b` of unit Frobenius norm. Terms
/// below the rounding floor of the regrouped matrix are dropped.
pub fn schmidt_terms(lift: &CMatrix, dims: (usize, usize)) -> Result<Vec<(f64, CMatrix, CMatrix)>> {
    let (m, n) = dims;
    check_lift(lift, dims)?;
    // lift[(j m + i), (l m + k)] = b[l, j] a[i, k]; regroup by (j, l) and (i, k)
    let mut r = CMatrix::zeros(n * n, m * m);
    for j in 0..n {
        for l in 0..n {
            for i in 0..m {
                for k in 0..m {
                    r[(j * n + l, i * m + k)] = lift[(j * m + i, l * m + k)];
                }
            }
        }
    }
    let dec = svd(&r);
    let floor = noise_floor(dec.s.len()) * dec.s.first().copied().unwrap_or(0.0);
    let mut out = Vec::new();
    for (idx, &s) in dec.s.iter().enumerate() {
        if s <= floor {
            continue;
        }
        let bt = CMatrix::from_fn(n, n, |j, l| dec.u[(j * n + l, idx)]);
        let a = CMatrix::from_fn(m, m, |i, k| dec.v[(i * m + k, idx)].conj());
        out.push((s, a, bt.transpose()));
    }
    Ok(out)
}

fn check_lift(lift: &CMatrix, dims: (usize, usize)) -> Result<()> {
    let d = dims.0 * dims.1;
    if lift.shape() != (d, d) {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: lift.shape(),
        });
    }
    if !lift.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Linear map given on a spanning set: `inputs[i] -> outputs[i]`.
pub(crate) struct SampledMap<'a> {
    pub inputs: &'a [CMatrix],
    pub outputs: &'a [CMatrix],
}

impl SampledMap<'_> {
    fn combine(list: &[CMatrix], c: &[C64]) -> CMatrix {
        let (m, n) = list[0].shape();
        let mut acc = CMatrix::zeros(m, n);
        for (x, &ci) in list.iter().zip(c) {
            if ci.is_zero() {
                continue;
            }
            for (a, b) in acc.data_mut().iter_mut().zip(x.data()) {
                *a += b * ci;
            }
        }
        acc
    }

    fn ratio(&self, c: &[C64], from: NormKind, to: NormKind) -> f64 {
        let den = from.eval(&Self::combine(self.inputs, c));
        if den == 0.0 {
            return 0.0;
        }
        to.eval(&Self::combine(self.outputs, c)) / den
    }

    /// Largest ratio `|f(x)|_to / |x|_from` found by gradient ascent in the
    /// coefficients, with `starts` first and seeded random restarts after.
    pub fn ascent(&self, from: NormKind, to: NormKind, starts: &[Vec<C64>]) -> f64 {
        let k = self.inputs.len();
        if k == 0 {
            return 0.0;
        }
        let mut rng = sample::rng(ASCENT_SEED);
        let mut best: f64 = 0.0;
        for r in 0..RESTARTS.max(starts.len()) {
            let mut c = match starts.get(r) {
                Some(s) => s.clone(),
                None => (0..k).map(|_| sample::complex_normal(&mut rng)).collect(),
            };
            if !normalize(&mut c) {
                continue;
            }
            best = best.max(self.climb(&mut c, from, to));
        }
        best
    }

    fn climb(&self, c: &mut Vec<C64>, from: NormKind, to: NormKind) -> f64 {
        let mut f = self.ratio(c, from, to);
        let mut step = 0.5;
        for _ in 0..ASCENT_ITERS {
            let x = Self::combine(self.inputs, c);
            let y = Self::combine(self.outputs, c);
            let (nx, ny) = (from.eval(&x), to.eval(&y));
            if nx == 0.0 || ny == 0.0 {
                break;
            }
            let (gx, gy) = (from.gradient(&x), to.gradient(&y));
            let mut g: Vec<C64> = self
                .inputs
                .iter()
                .zip(self.outputs)
                .map(|(xi, yi)| yi.inner(&gy) / nx - xi.inner(&gx) * (ny / (nx * nx)))
                .collect();
            if !normalize(&mut g) {
                break;
            }
            let mut improved = false;
            while step > 1e-6 {
                let mut trial: Vec<C64> = c.iter().zip(&g).map(|(a, b)| a + b * step).collect();
                if normalize(&mut trial) {
                    let ft = self.ratio(&trial, from, to);
                    if ft > f {
                        *c = trial;
                        // stop once the gain is negligible
                        improved = ft > f * (1.0 + 1e-7);
                        f = ft;
                        step = (step * 2.0).min(1.0);
                        break;
                    }
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        f
    }
}

fn normalize(c: &mut [C64]) -> bool {
    let nrm = vec_norm(c);
    if !(nrm > 0.0) || !nrm.is_finite() {
        return false;
    }
    for z in c.iter_mut() {
        *z /= nrm;
    }
    true
}

/// Standard basis of `m x n` matrices, in column-major order.
fn matrix_units(dims: (usize, usize)) -> Vec<CMatrix> {
    let (m, n) = dims;
    let mut out = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            let mut e = CMatrix::zeros(m, n);
            e[(i, j)] = C64::new(1.0, 0.0);
            out.push(e);
        }
    }
    out
}

/// Bracket for the norm of the lifted operator as a map from `(M_{m,n},
/// from)` to `(M_{m,n}, to)`.
///
/// The lower bound is the best ratio found by gradient ascent from the top
/// singular vector of the lift, its rank-one truncation, its unitary polar
/// factor and [`RESTARTS`] random starts. The upper bound is the smaller of
/// a Frobenius comparison and the operator Schmidt sum, which uses
/// `|a x b|_p <= |a| |x|_p |b|` and the `p`-triangle inequality.
pub fn induced_norm_bracket(lift: &CMatrix, dims: (usize, usize), from: NormKind, to: NormKind) -> Result<NormBracket> {
    for kind in [from, to] {
        if let NormKind::Schatten(p) = kind {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidP(p));
            }
        }
    }
    check_lift(lift, dims)?;
    let (m, n) = dims;
    let r = m.min(n);
    let lift_norm = op_norm(lift);
    if lift_norm == 0.0 {
        return Ok(NormBracket { lower: 0.0, upper: 0.0 });
    }
    let crude = to.frobenius_floor(r) * lift_norm * from.frobenius_ceiling(r);

    let q = to.exponent();
    let mut acc = 0.0;
    for (s, a, b) in schmidt_terms(lift, dims)? {
        let kappa = match (from, to) {
            (NormKind::Operator, NormKind::Schatten(p)) => {
                let ka = schatten_norm(&a, p)? * op_norm(&b);
                let kb = op_norm(&a) * schatten_norm(&b, p)?;
                ka.min(kb)
            }
            _ => op_norm(&a) * op_norm(&b),
        };
        acc += (s * kappa).powf(q);
    }
    let schmidt = acc.powf(1.0 / q);
    let upper = crude.min(schmidt);

    let inputs = matrix_units(dims);
    let outputs: Vec<CMatrix> = (0..m * n)
        .map(|k| CMatrix::from_col_major(m, n, &lift.column(k)))
        .collect();
    let map = SampledMap {
        inputs: &inputs,
        outputs: &outputs,
    };
    let top = svd(lift).v.column(0);
    let top_m = CMatrix::from_col_major(m, n, &top);
    let dec = svd(&top_m);
    let rank_one = CMatrix::from_fn(m, n, |i, j| dec.u[(i, 0)] * dec.v[(j, 0)].conj());
    let polar = &dec.u * &dec.v.adjoint();
    let starts = vec![top, rank_one.vec_col_major(), polar.vec_col_major()];
    let lower = map.ascent(from, to, &starts);
    Ok(NormBracket {
        lower: lower.min(upper),
        upper,
    })
}

/// Pair norm `max(|T|_X, |T|_Y)` of a lifted operator, as a bracket on each
/// side.
///
/// In finite dimensions every operator leaves `Y` invariant with a bounded
/// restriction, so [`Error::YNotInvariant`] only signals a non-finite lift or
/// an image exceeding the norm-equivalence ceiling.
pub fn pair_norm(lift: &CMatrix, pair: &OrderedPairNorm) -> Result<PairNormReport> {
    let dims = pair.carrier_dims;
    if !lift.is_finite() {
        return Err(Error::YNotInvariant);
    }
    let x = induced_norm_bracket(lift, dims, pair.x_kind(), pair.x_kind())?;
    let y = induced_norm_bracket(lift, dims, pair.y_kind(), pair.y_kind())?;
    if !(y.lower <= y.upper * (1.0 + 1e-9)) {
        return Err(Error::YNotInvariant);
    }
    Ok(PairNormReport { x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elementary::{elem_matrix, ElementaryOperator};
    use crate::linalg::kron_lift;
    use proptest::prelude::*;

    fn random_elem(seed: u64, dims: (usize, usize), k: usize) -> ElementaryOperator {
        let mut rng = sample::rng(seed);
        let terms = (0..k)
            .map(|_| (sample::gaussian_matrix(&mut rng, dims.0, dims.0), sample::gaussian_matrix(&mut rng, dims.1, dims.1)))
            .collect();
        ElementaryOperator::new(dims, terms).unwrap()
    }

    #[test]
    fn trivial_operators() {
        let pair = OrderedPairNorm::nuclear((3, 2));
        let id = pair_norm(&CMatrix::identity(6), &pair).unwrap();
        for b in [id.x, id.y] {
            assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12, "{b:?}");
        }
        let zero = pair_norm(&CMatrix::zeros(6, 6), &pair).unwrap();
        assert_eq!(zero.bracket(), NormBracket { lower: 0.0, upper: 0.0 });
        assert!(pair_norm(&CMatrix::identity(5), &pair).is_err());
        let mut bad = CMatrix::identity(6);
        bad[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert_eq!(pair_norm(&bad, &pair).unwrap_err(), Error::YNotInvariant);
        assert!(OrderedPairNorm::new((2, 2), 1.5).is_err());
    }

    #[test]
    fn single_term_is_flexible() {
        let mut rng = sample::rng(7);
        for _ in 0..5 {
            let a = sample::gaussian_matrix(&mut rng, 3, 3);
            let b = sample::gaussian_matrix(&mut rng, 3, 3);
            let lift = kron_lift(&a, &b, (3, 3)).unwrap();
            let ab = op_norm(&a) * op_norm(&b);
            for p in [1.0, 0.5] {
                let r = pair_norm(&lift, &OrderedPairNorm::new((3, 3), p).unwrap()).unwrap();
                for side in [r.x, r.y] {
                    assert!(side.upper <= ab * (1.0 + 1e-10));
                    // attained at x = v_a u_b^*, a rank-one input
                    assert!(side.lower >= ab * (1.0 - 1e-6), "{p} {side:?} {ab}");
                }
            }
        }
    }

    #[test]
    fn schmidt_terms_rebuild_the_lift() {
        let t = random_elem(3, (2, 3), 3);
        let lift = elem_matrix(&t);
        let terms = schmidt_terms(&lift, (2, 3)).unwrap();
        let mut rebuilt = CMatrix::zeros(6, 6);
        for (s, a, b) in &terms {
            rebuilt = &rebuilt + &kron_lift(a, b, (2, 3)).unwrap().scale_real(*s);
        }
        assert!(rebuilt.approx_eq(&lift, 1e-10));
        let significant = terms.iter().filter(|t| t.0 > 1e-10 * terms[0].0).count();
        assert_eq!(significant, 3);
    }

    #[test]
    fn lower_bound_is_attained() {
        let t = random_elem(11, (3, 3), 2);
        let lift = elem_matrix(&t);
        let b = induced_norm_bracket(&lift, (3, 3), NormKind::Operator, NormKind::Schatten(1.0)).unwrap();
        assert!(b.lower > 0.0 && b.lower <= b.upper);
        // the crude comparison never beats a sampled image
        let mut rng = sample::rng(12);
        for _ in 0..50 {
            let x = sample::gaussian_matrix(&mut rng, 3, 3);
            let y = crate::linalg::apply_lift(&lift, &x);
            assert!(NormKind::Schatten(1.0).eval(&y) <= b.upper * op_norm(&x) * (1.0 + 1e-10));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn y_dominates_x(seed in 0u64..10_000, m in 1usize..6, n in 1usize..6, p in 0.05f64..=1.0) {
            let mut rng = sample::rng(seed);
            let x = sample::gaussian_matrix(&mut rng, m, n);
            let pair = OrderedPairNorm::new((m, n), p).unwrap();
            prop_assert!(pair.x_norm(&x) <= pair.y_norm(&x) * (1.0 + 1e-12));
        }

        #[test]
        fn pair_norm_is_submultiplicative(seed in 0u64..10_000, p in prop::sample::select(vec![1.0, 0.5])) {
            let dims = (2, 3);
            let s = elem_matrix(&random_elem(seed, dims, 2));
            let t = elem_matrix(&random_elem(seed + 1, dims, 1));
            let pair = OrderedPairNorm::new(dims, p).unwrap();
            let st = pair_norm(&(&s * &t), &pair).unwrap().bracket();
            let (bs, bt) = (pair_norm(&s, &pair).unwrap().bracket(), pair_norm(&t, &pair).unwrap().bracket());
            prop_assert!(st.lower <= bs.upper * bt.upper * (1.0 + 1e-9));
            prop_assert!(bs.lower <= bs.upper && bt.lower <= bt.upper);
        }
    }
}
