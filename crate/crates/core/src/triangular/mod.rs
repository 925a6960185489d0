//! Simultaneous triangularization of nil families and the chain bounds on
//! long products.

use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::svd::svd;
use crate::linalg::{nilpotency_defect, op_norm, vec_dot, vec_norm, CMatrix, C64};
use crate::radical::algebra_closure_in;

mod decay;

pub use decay::{product_decay, DecayCurve, DecayPoint};

/// Singular values of normalized images below this are treated as zero.
pub const IMAGE_RANK_TOL: f64 = 1e-9;
/// Residual accepted by [`cepochka_check`] for chain invariance.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// Strictly increasing chain `X_1 ⊂ ... ⊂ X_k` of proper nonzero subspaces
/// of `C^d`, stored as one orthonormal column list whose first
/// `dims[j - 1]` columns span `X_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceChain {
    dimension: usize,
    columns: Vec<Vec<C64>>,
    dims: Vec<usize>,
}

impl SubspaceChain {
    /// Validates nested orthonormal bases (`B_j` a prefix of `B_{j+1}`).
    pub fn from_bases(dimension: usize, bases: &[Vec<Vec<C64>>]) -> Result<Self> {
        let bad = Err(Error::InvalidArgument("chain bases must be nested orthonormal prefixes of proper subspaces"));
        let Some(last) = bases.last() else {
            return Ok(Self {
                dimension,
                columns: Vec::new(),
                dims: Vec::new(),
            });
        };
        let mut dims = Vec::with_capacity(bases.len());
        let mut prev = 0;
        for b in bases {
            if b.len() <= prev || b.len() >= dimension || b[..prev] != last[..prev] {
                return bad;
            }
            prev = b.len();
            dims.push(prev);
        }
        for (i, u) in last.iter().enumerate() {
            if u.len() != dimension {
                return Err(Error::DimMismatch {
                    expected: dimension,
                    found: u.len(),
                });
            }
            for (j, v) in last.iter().enumerate().take(i + 1) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (vec_dot(v, u) - C64::new(target, 0.0)).norm() > 1e-10 {
                    return bad;
                }
            }
        }
        Ok(Self {
            dimension,
            columns: last.clone(),
            dims,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number `k` of subspaces in the chain.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// `dim X_j` for `j = 1..=k`.
    pub fn subspace_dims(&self) -> &[usize] {
        &self.dims
    }

    /// `dim X_j` with `X_0 = 0` and `X_{k+1} = C^d`.
    fn dim_at(&self, j: usize) -> usize {
        match j {
            0 => 0,
            j if j > self.len() => self.dimension,
            j => self.dims[j - 1],
        }
    }

    /// The bases `B_1, ..., B_k` as column lists.
    pub fn bases(&self) -> Vec<Vec<Vec<C64>>> {
        self.dims.iter().map(|&n| self.columns[..n].to_vec()).collect()
    }

    /// `d x dim X_j` orthonormal basis of `X_j`, `1 <= j <= k`.
    pub fn basis_matrix(&self, j: usize) -> CMatrix {
        CMatrix::from_columns(self.dimension, &self.columns[..self.dim_at(j)])
    }

    /// Orthogonal projector onto `X_j` for `0 <= j <= k + 1`.
    pub fn projector(&self, j: usize) -> CMatrix {
        if j > self.len() {
            return CMatrix::identity(self.dimension);
        }
        self.range_projector(0, self.dim_at(j))
    }

    /// Orthogonal projector onto `X_j ⊖ X_{j-1}` for `1 <= j <= k + 1`; the
    /// last one is the top gap `C^d ⊖ X_k`.
    pub fn gap_projector(&self, j: usize) -> CMatrix {
        if j > self.len() {
            return &CMatrix::identity(self.dimension) - &self.projector(self.len());
        }
        self.range_projector(self.dim_at(j - 1), self.dim_at(j))
    }

    fn range_projector(&self, lo: usize, hi: usize) -> CMatrix {
        let d = self.dimension;
        CMatrix::from_fn(d, d, |r, c| {
            self.columns[lo..hi]
                .iter()
                .fold(C64::zero(), |s, u| s + u[r] * u[c].conj())
        })
    }
}

/// Whether `gens` generate a nil algebra, judged by the descending images
/// `V_{j+1} = gens V_j` (generators scaled to unit norm) reaching zero.
/// `tol` is the singular value cutoff for the images.
pub fn is_nil_family(gens: &[CMatrix], tol: f64) -> Result<bool> {
    let (d, g) = normalized(gens)?;
    Ok(descend(d, &g, &[], tol.max(f64::EPSILON)).is_ok())
}

fn normalized(gens: &[CMatrix]) -> Result<(usize, Vec<CMatrix>)> {
    let d = match gens.first() {
        Some(g) => g.ensure_square()?,
        None => return Err(Error::EmptyFamily),
    };
    let mut out = Vec::with_capacity(gens.len());
    for g in gens {
        if g.shape() != (d, d) {
            return Err(Error::DimMismatch {
                expected: d,
                found: g.rows(),
            });
        }
        let n = op_norm(g);
        if n > 0.0 {
            out.push(g.scale_real(1.0 / n));
        }
    }
    Ok((d, out))
}

/// Triangularizing chain for a nil family.
///
/// The descending images `V_0 = C^d`, `V_{j+1} = span(g V_j)` are nested
/// (by induction) and reach zero exactly when the generated algebra is
/// nilpotent; reversed they form a chain that every generator strictly
/// lowers. Working with the generators directly avoids forming the algebra,
/// whose orthonormalized basis amplifies rounding for ill-conditioned
/// families.
pub fn triangularize(gens: &[CMatrix]) -> Result<SubspaceChain> {
    let (d, g) = normalized(gens)?;
    match descend(d, &g, &[], IMAGE_RANK_TOL) {
        Ok(levels) => Ok(nested_chain(d, &levels)),
        Err(_) => {
            let a = algebra_closure_in(d, &g, false)?;
            let radius = a.basis().iter().map(nilpotency_defect).fold(0.0, f64::max);
            Err(Error::NotNilFamily { radius })
        }
    }
}

/// Chain for `K ∪ F` with `K` in the radical of the algebra they generate.
///
/// Here `V_{j+1}` is the smallest `F`-invariant subspace containing
/// `K V_j`, so `K` strictly lowers the chain and `F` leaves it invariant.
/// The sequence reaches zero exactly when `K` lies in the radical; otherwise
/// the error carries the largest norm of a `K` element (scaled to unit norm)
/// on the stalled subspace.
pub fn triangularize_split(k: &[CMatrix], f: &[CMatrix]) -> Result<SubspaceChain> {
    let mut all = k.to_vec();
    all.extend_from_slice(f);
    let (d, _) = normalized(&all)?;
    let (_, kn) = if k.is_empty() { (d, Vec::new()) } else { normalized(k)? };
    let (_, fn_) = if f.is_empty() { (d, Vec::new()) } else { normalized(f)? };
    match descend(d, &kn, &fn_, IMAGE_RANK_TOL) {
        Ok(levels) => Ok(nested_chain(d, &levels)),
        Err(stalled) => {
            let q = CMatrix::from_columns(d, &stalled);
            let residual = kn.iter().map(|x| op_norm(&(x * &q))).fold(0.0, f64::max);
            Err(Error::RadicalHypothesisViolated { residual })
        }
    }
}

/// Orthonormal basis (largest singular directions) of the span of the
/// images `e q` over the given elements and basis vectors.
fn image_basis(d: usize, elems: &[CMatrix], q: &[Vec<C64>], cutoff: f64) -> Vec<Vec<C64>> {
    let cols: Vec<Vec<C64>> = elems.iter().flat_map(|e| q.iter().map(move |v| e.mul_vec(v))).collect();
    if cols.is_empty() {
        return Vec::new();
    }
    let dec = svd(&CMatrix::from_columns(d, &cols));
    let r = dec.s.iter().filter(|&&s| s > cutoff).count();
    (0..r).map(|i| dec.u.column(i)).collect()
}

/// Levels `V_1 ⊃ V_2 ⊃ ...` (nonzero ones only), or the basis of the
/// subspace where the descent stalls.
fn descend(d: usize, k: &[CMatrix], f: &[CMatrix], cutoff: f64) -> core::result::Result<Vec<Vec<Vec<C64>>>, Vec<Vec<C64>>> {
    let mut hull_ops = alloc::vec![CMatrix::identity(d)];
    hull_ops.extend_from_slice(f);
    let mut levels = Vec::new();
    let mut v: Vec<Vec<C64>> = (0..d)
        .map(|i| (0..d).map(|r| if r == i { C64::new(1.0, 0.0) } else { C64::zero() }).collect())
        .collect();
    loop {
        let mut next = image_basis(d, k, &v, cutoff);
        if !f.is_empty() {
            loop {
                let grown = image_basis(d, &hull_ops, &next, cutoff);
                if grown.len() <= next.len() {
                    break;
                }
                next = grown;
            }
        }
        if next.is_empty() {
            return Ok(levels);
        }
        if next.len() >= v.len() {
            return Err(v);
        }
        levels.push(next.clone());
        v = next;
    }
}

fn nested_chain(d: usize, levels: &[Vec<Vec<C64>>]) -> SubspaceChain {
    // levels = [V_1, V_2, ..., V_k]; X_j = V_{k+1-j}
    let mut columns: Vec<Vec<C64>> = Vec::new();
    let mut dims = Vec::new();
    for level in levels.iter().rev() {
        let need = level.len() - columns.len();
        let residuals: Vec<Vec<C64>> = level
            .iter()
            .map(|u| {
                let mut r = u.clone();
                for _ in 0..2 {
                    for q in &columns {
                        let c = vec_dot(q, &r);
                        for (x, y) in r.iter_mut().zip(q) {
                            *x -= c * y;
                        }
                    }
                }
                r
            })
            .collect();
        let dec = svd(&CMatrix::from_columns(d, &residuals));
        for i in 0..need {
            let mut u = dec.u.column(i);
            let n = vec_norm(&u);
            u.iter_mut().for_each(|x| *x /= n);
            columns.push(u);
        }
        dims.push(columns.len());
    }
    SubspaceChain {
        dimension: d,
        columns,
        dims,
    }
}

/// `max_j |(I - P_{j-1}) g P_j| / |g|` over `j = 1..=k+1`: zero exactly when
/// `g X_j ⊂ X_{j-1}` for every `j` (with `X_{k+1} = C^d`).
pub fn lowering_residual(g: &CMatrix, chain: &SubspaceChain) -> f64 {
    chain_residual(g, chain, 1)
}

/// `max_j |(I - P_j) g P_j| / |g|`: zero exactly when `g` leaves the chain
/// invariant.
pub fn invariance_residual(g: &CMatrix, chain: &SubspaceChain) -> f64 {
    chain_residual(g, chain, 0)
}

fn chain_residual(g: &CMatrix, chain: &SubspaceChain, shift: usize) -> f64 {
    let nrm = op_norm(g);
    if nrm == 0.0 {
        return 0.0;
    }
    let id = CMatrix::identity(chain.dimension);
    let mut worst: f64 = 0.0;
    for j in 1..=chain.len() + 1 {
        let outside = &id - &chain.projector(j - shift);
        worst = worst.max(op_norm(&(&(&outside * g) * &chain.projector(j))));
    }
    worst / nrm
}

/// `alpha = max |a_i|` and `beta = max |a_i restricted to X_j / X_{j-1}|`
/// over all gaps including the top one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainBlockBounds {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
}

pub fn chain_block_bounds(ops: &[CMatrix], chain: &SubspaceChain) -> ChainBlockBounds {
    let gaps: Vec<CMatrix> = (1..=chain.len() + 1).map(|j| chain.gap_projector(j)).collect();
    let mut alpha: f64 = 0.0;
    let mut beta: f64 = 0.0;
    for a in ops {
        alpha = alpha.max(op_norm(a));
        for q in &gaps {
            // the quotient X_j / X_{j-1} is isometric to the gap slice
            beta = beta.max(op_norm(&(&(q * a) * q)));
        }
    }
    ChainBlockBounds {
        alpha,
        beta: beta.min(alpha),
        k: chain.len(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CepochkaReport {
    pub bounds: ChainBlockBounds,
    /// `|a_1 ... a_m|`.
    pub product_norm: f64,
    /// `2^m C(m, k) alpha^k beta^(m-k)`.
    pub bound: f64,
    pub holds: bool,
    /// Largest `lhs - rhs` of the two-factor bound over adjacent pairs with
    /// `W = X_1` (non-positive when it holds).
    pub pair_excess: f64,
    pub pair_holds: bool,
}

fn binomial(m: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Checks the chain bound on `|a_1 ... a_m|` and the two-factor bound
/// `|ab| <= 2 |a|_W| |b| + |a| |b|_{X/W}|` with `W = X_1`.
///
/// Both sides are compared with the absolute slack `tol * alpha^m`, since
/// for strictly lowering operators the bound is exactly zero while the
/// computed product carries rounding of that size.
pub fn cepochka_check(ops: &[CMatrix], chain: &SubspaceChain, tol: f64) -> Result<CepochkaReport> {
    let m = ops.len();
    let k = chain.len();
    if m < k || m == 0 {
        return Err(Error::TooFewFactors { factors: m, chain: k });
    }
    for (op, a) in ops.iter().enumerate() {
        if a.shape() != (chain.dimension, chain.dimension) {
            return Err(Error::DimMismatch {
                expected: chain.dimension,
                found: a.rows(),
            });
        }
        let residual = invariance_residual(a, chain);
        if residual > INVARIANCE_TOL {
            return Err(Error::ChainNotInvariant { op, residual });
        }
    }
    let bounds = chain_block_bounds(ops, chain);
    let mut prod = ops[0].clone();
    for a in &ops[1..] {
        prod = &prod * a;
    }
    let product_norm = op_norm(&prod);
    let (alpha, beta) = (bounds.alpha, bounds.beta);
    let bound = 2f64.powi(m as i32) * binomial(m, k) * alpha.powi(k as i32) * beta.powi((m - k) as i32);
    let slack = tol * alpha.powi(m as i32);

    let mut pair_excess = f64::NEG_INFINITY;
    if m >= 2 {
        let w = chain.projector(1.min(k));
        let comp = &CMatrix::identity(chain.dimension) - &w;
        for pair in ops.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let lhs = op_norm(&(a * b));
            let rhs = 2.0 * op_norm(&(a * &w)) * op_norm(b) + op_norm(a) * op_norm(&(&(&comp * b) * &comp));
            pair_excess = pair_excess.max(lhs - rhs);
        }
    }
    Ok(CepochkaReport {
        bounds,
        product_norm,
        bound,
        holds: product_norm <= bound + slack,
        pair_excess,
        pair_holds: pair_excess <= slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu::inverse;
    use crate::sample;
    use proptest::prelude::*;

    fn jordan(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::zero() })
    }

    fn unit(d: usize, i: usize) -> Vec<C64> {
        (0..d).map(|r| if r == i { C64::new(1.0, 0.0) } else { C64::zero() }).collect()
    }

    /// `|(I - P_X) Q_Y|` for orthonormal bases: zero when `Y ⊂ X`.
    fn containment(x: &CMatrix, y: &CMatrix) -> f64 {
        let p = x * &x.adjoint();
        op_norm(&(&(&CMatrix::identity(x.rows()) - &p) * y))
    }

    fn orthonormal_span(m: &CMatrix) -> CMatrix {
        let dec = svd(m);
        let cols: Vec<Vec<C64>> = (0..m.cols()).map(|i| dec.u.column(i)).collect();
        CMatrix::from_columns(m.rows(), &cols)
    }

    #[test]
    fn nil_examples() {
        let mut rng = sample::rng(2);
        let n1 = sample::upper_triangular(&mut rng, 4, true);
        let n2 = sample::upper_triangular(&mut rng, 4, true);
        assert!(is_nil_family(&[n1.clone(), n2.clone()], 1e-9).unwrap());
        assert!(!is_nil_family(&[CMatrix::identity(3)], 1e-9).unwrap());
        let s = sample::conditioned(&mut rng, 4, 10.0);
        let si = inverse(&s).unwrap();
        let conj = [&(&s * &n1) * &si, &(&s * &n2) * &si];
        assert!(is_nil_family(&conj, 1e-9).unwrap());
        assert!(matches!(triangularize(&[CMatrix::identity(2)]), Err(Error::NotNilFamily { .. })));
    }

    #[test]
    fn jordan_block_chain() {
        let c = triangularize(&[jordan(3)]).unwrap();
        assert_eq!(c.subspace_dims(), &[1, 2]);
        assert!(containment(&c.basis_matrix(1), &CMatrix::from_columns(3, &[unit(3, 0)])) < 1e-12);
        assert!(containment(&c.basis_matrix(2), &CMatrix::from_columns(3, &[unit(3, 0), unit(3, 1)])) < 1e-12);
        assert!(lowering_residual(&jordan(3), &c) < 1e-12);
    }

    #[test]
    fn commuting_pair_is_lowered() {
        let n = jordan(4);
        let pair = [n.clone(), &n * &n];
        let c = triangularize(&pair).unwrap();
        for g in &pair {
            assert!(lowering_residual(g, &c) < 1e-12);
        }
        // the quotient blocks vanish
        assert!(chain_block_bounds(&pair, &c).beta < 1e-12);
    }

    #[test]
    fn chain_round_trip() {
        let c = triangularize(&[jordan(4)]).unwrap();
        let back = SubspaceChain::from_bases(4, &c.bases()).unwrap();
        assert_eq!(back, c);
        let mut broken = c.bases();
        broken[1][0] = unit(4, 3);
        assert!(SubspaceChain::from_bases(4, &broken).is_err());
        let full = alloc::vec![(0..4).map(|i| unit(4, i)).collect::<Vec<_>>()];
        assert!(SubspaceChain::from_bases(4, &full).is_err());
    }

    #[test]
    fn split_chain_keeps_f_invariant() {
        let mut rng = sample::rng(6);
        let k = [sample::upper_triangular(&mut rng, 4, true)];
        let f = [sample::upper_triangular(&mut rng, 4, false), CMatrix::diag_real(&[0.5, 0.2, 0.9, 0.1])];
        let c = triangularize_split(&k, &f).unwrap();
        assert!(lowering_residual(&k[0], &c) < 1e-10);
        for g in &f {
            assert!(invariance_residual(g, &c) < 1e-10);
        }
        let bad = triangularize_split(&[CMatrix::identity(2)], &[]);
        assert!(matches!(bad, Err(Error::RadicalHypothesisViolated { .. })));
    }

    #[test]
    fn cepochka_examples() {
        let c = triangularize(&[jordan(3)]).unwrap();
        let zeros = [CMatrix::zeros(3, 3), CMatrix::zeros(3, 3)];
        let r = cepochka_check(&zeros, &c, 1e-12).unwrap();
        assert!(r.holds && r.product_norm == 0.0);

        // N^2 = 0 on a one-step chain: beta = 0 forces the product to vanish
        let n = CMatrix::from_real(2, 2, &[0.0, 3.0, 0.0, 0.0]).unwrap();
        let c1 = triangularize(core::slice::from_ref(&n)).unwrap();
        assert_eq!(c1.len(), 1);
        let r = cepochka_check(&[n.clone(), n.clone()], &c1, 1e-12).unwrap();
        assert_eq!(r.bounds.k, 1);
        assert!(r.bounds.beta < 1e-15);
        assert!(r.holds && r.pair_holds);

        assert!(matches!(cepochka_check(core::slice::from_ref(&n), &c, 1e-12), Err(Error::TooFewFactors { .. })));
        let rot = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(cepochka_check(&[rot.clone(), rot], &c1, 1e-12), Err(Error::ChainNotInvariant { .. })));
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(4, 0), 1.0);
    }

    #[test]
    fn similarity_covariance() {
        let mut rng = sample::rng(9);
        for d in 2..=5 {
            let gens = [sample::upper_triangular(&mut rng, d, true), sample::upper_triangular(&mut rng, d, true)];
            let s = sample::conditioned(&mut rng, d, 1e3);
            let si = inverse(&s).unwrap();
            let conj: Vec<CMatrix> = gens.iter().map(|g| &(&s * g) * &si).collect();
            let c0 = triangularize(&gens).unwrap();
            let c1 = triangularize(&conj).unwrap();
            assert_eq!(c0.subspace_dims(), c1.subspace_dims());
            for j in 1..=c0.len() {
                let mapped = orthonormal_span(&(&s * &c0.basis_matrix(j)));
                assert!(containment(&c1.basis_matrix(j), &mapped) < 1e-7);
            }
        }
    }

    fn chain_preserving(rng: &mut sample::SeededRng, d: usize, dims: &[usize], q: &CMatrix) -> CMatrix {
        // block upper triangular in the standard flag, then rotated by q
        let mut a = sample::gaussian_matrix(rng, d, d);
        let block_of = |i: usize| dims.iter().filter(|&&n| n <= i).count();
        for i in 0..d {
            for j in 0..d {
                if block_of(i) > block_of(j) {
                    a[(i, j)] = C64::zero();
                }
            }
        }
        &(q * &a) * &q.adjoint()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn nil_family_products_vanish(seed in 0u64..10_000, d in 2usize..7) {
            let mut rng = sample::rng(seed);
            let gens = [sample::upper_triangular(&mut rng, d, true), sample::upper_triangular(&mut rng, d, true)];
            let s = sample::conditioned(&mut rng, d, 10.0);
            let si = inverse(&s).unwrap();
            let conj: Vec<CMatrix> = gens.iter().map(|g| &(&s * g) * &si).collect();
            let c = triangularize(&conj).unwrap();
            for g in &conj {
                prop_assert!(lowering_residual(g, &c) <= 1e-9);
            }
            let alpha = conj.iter().map(op_norm).fold(0.0, f64::max);
            let mut p = CMatrix::identity(d);
            for i in 0..d {
                p = &p * &conj[i % 2];
            }
            prop_assert!(op_norm(&p) <= 1e-8 * alpha.powi(d as i32));
        }

        #[test]
        fn cepochka_bound_holds(seed in 0u64..10_000, d in 3usize..7, m in 1usize..11, k in 1usize..4) {
            let mut rng = sample::rng(seed);
            let k = k.min(d - 1);
            let mut dims: Vec<usize> = (1..d).collect();
            // pick k distinct cut points
            while dims.len() > k {
                let i = (sample::uniform(&mut rng, 0.0, dims.len() as f64) as usize).min(dims.len() - 1);
                dims.remove(i);
            }
            let q = sample::unitary(&mut rng, d);
            let cols: Vec<Vec<C64>> = (0..d).map(|i| q.column(i)).collect();
            let bases: Vec<Vec<Vec<C64>>> = dims.iter().map(|&n| cols[..n].to_vec()).collect();
            let chain = SubspaceChain::from_bases(d, &bases).unwrap();
            let m = m.max(k);
            let ops: Vec<CMatrix> = (0..m).map(|_| chain_preserving(&mut rng, d, &dims, &q)).collect();
            let r = cepochka_check(&ops, &chain, 1e-12).unwrap();
            prop_assert!(r.holds, "{:?}", r);
            prop_assert!(r.pair_holds, "{:?}", r);
        }
    }
}
