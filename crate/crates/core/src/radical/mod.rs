//! Finite-dimensional matrix algebras: span closure, Jacobson radical,
//! quasinilpotence modulo an ideal and the Engel predicates.
//!
//! Subspaces of `M_d` are handled through Frobenius-orthonormal bases, so
//! every distance here is a Frobenius distance.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::subspace::{flatten, unflatten};
use crate::linalg::svd::svd;
use crate::linalg::{nilpotency_defect, spectral_radius, CMatrix, OrthoBasis, C64};

mod qmod;

pub use qmod::{qmod_rate, tsr_mod_ideal, QmodReport};

/// New directions with residual below this (for unit-norm candidates) are
/// treated as already spanned.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Closure and ideal residual tolerance.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Relative singular value cutoff for the trace-form kernel.
pub const KERNEL_TOL: f64 = 1e-9;

/// Subalgebra of `M_d` given by a Frobenius-orthonormal basis.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    dim: usize,
    basis: Vec<CMatrix>,
    span: OrthoBasis,
}

impl MatrixAlgebra {
    /// Wraps a spanning set, checking closure under multiplication.
    pub fn from_spanning(dim: usize, vectors: &[CMatrix]) -> Result<Self> {
        let span = span_of(dim, vectors)?;
        let a = Self::from_span(dim, span);
        let residual = a.closure_residual();
        if residual > CLOSURE_TOL {
            return Err(Error::ClosureViolated { residual });
        }
        Ok(a)
    }

    fn from_span(dim: usize, span: OrthoBasis) -> Self {
        let basis = span.vectors().iter().map(|v| unflatten(dim, dim, v)).collect();
        Self { dim, basis, span }
    }

    /// Matrix size `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the algebra as a vector space.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Frobenius distance from `x` to the algebra.
    pub fn distance(&self, x: &CMatrix) -> f64 {
        self.span.distance(&flatten(x))
    }

    /// Relative membership residual `dist(x, A) / |x|_F`.
    pub fn membership_residual(&self, x: &CMatrix) -> f64 {
        let n = x.frobenius_norm();
        if n == 0.0 {
            0.0
        } else {
            self.distance(x) / n
        }
    }

    pub fn coordinates(&self, x: &CMatrix) -> Vec<C64> {
        self.span.coordinates(&flatten(x))
    }

    pub fn element(&self, coords: &[C64]) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (e, &c) in self.basis.iter().zip(coords) {
            acc = &acc + &e.scale(c);
        }
        acc
    }

    /// `max_{i,j} dist(e_i e_j, A)` over the orthonormal basis.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.distance(&(a * b)));
            }
        }
        worst
    }

    /// Matrix of `y -> x y` on the algebra in the orthonormal basis.
    pub fn left_regular(&self, x: &CMatrix) -> CMatrix {
        self.operator_matrix(|e| x * e)
    }

    /// Matrix of `y -> x y - y x` on the algebra.
    pub fn inner_derivation(&self, x: &CMatrix) -> CMatrix {
        self.operator_matrix(|e| &(x * e) - &(e * x))
    }

    /// Matrix of a linear map that leaves the algebra invariant, in the
    /// orthonormal basis. Components of `f(e)` outside the algebra are
    /// dropped.
    pub fn operator_matrix(&self, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
        let k = self.len();
        let mut m = CMatrix::zeros(k, k);
        for (j, e) in self.basis.iter().enumerate() {
            let c = self.coordinates(&f(e));
            for (i, z) in c.into_iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }
}

fn span_of(dim: usize, vectors: &[CMatrix]) -> Result<OrthoBasis> {
    let mut span = OrthoBasis::new(dim * dim);
    for v in vectors {
        if v.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch {
                expected: (dim, dim),
                found: v.shape(),
            });
        }
        add_unit(&mut span, v);
    }
    Ok(span)
}

/// Adds the direction of `v` if it is new; returns the added unit vector.
fn add_unit(span: &mut OrthoBasis, v: &CMatrix) -> Option<CMatrix> {
    let n = v.frobenius_norm();
    if n == 0.0 {
        return None;
    }
    let d = v.rows();
    let u = v.scale_real(1.0 / n);
    if span.try_add(&flatten(&u), RANK_CUTOFF) {
        let last = span.vectors().last().expect("just added");
        Some(unflatten(d, d, last))
    } else {
        None
    }
}

/// Adds the direction of a product of unit-norm matrices. It is not
/// rescaled first: a product that vanishes up to rounding must not be blown
/// up into a spurious direction.
fn add_product(span: &mut OrthoBasis, p: &CMatrix) -> Option<CMatrix> {
    let d = p.rows();
    if span.try_add(&flatten(p), RANK_CUTOFF) {
        let last = span.vectors().last().expect("just added");
        Some(unflatten(d, d, last))
    } else {
        None
    }
}

/// Smallest subalgebra containing `generators` (and `I` when `unital`):
/// the span is grown by right multiplication with the generators until the
/// rank stabilizes.
pub fn algebra_closure(generators: &[CMatrix], unital: bool) -> Result<MatrixAlgebra> {
    let dim = match generators.first() {
        Some(g) => g.ensure_square()?,
        None => return Err(Error::EmptyFamily),
    };
    algebra_closure_in(dim, generators, unital)
}

/// As [`algebra_closure`], with the matrix size given explicitly so that
/// an empty generator list is allowed.
pub fn algebra_closure_in(dim: usize, generators: &[CMatrix], unital: bool) -> Result<MatrixAlgebra> {
    let gens: Vec<CMatrix> = generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.scale_real(1.0 / g.frobenius_norm()))
        .collect();
    let mut span = OrthoBasis::new(dim * dim);
    let mut queue = VecDeque::new();
    if unital {
        if let Some(u) = add_unit(&mut span, &CMatrix::identity(dim)) {
            queue.push_back(u);
        }
    }
    for g in &gens {
        if g.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch {
                expected: (dim, dim),
                found: g.shape(),
            });
        }
        if let Some(u) = add_unit(&mut span, g) {
            queue.push_back(u);
        }
    }
    while let Some(v) = queue.pop_front() {
        for g in &gens {
            if let Some(u) = add_product(&mut span, &(&v * g)) {
                queue.push_back(u);
            }
        }
    }
    Ok(MatrixAlgebra::from_span(dim, span))
}

/// Subspace of a parent algebra closed under multiplication by it on both
/// sides.
#[derive(Clone, Debug)]
pub struct IdealSubspace {
    parent: MatrixAlgebra,
    basis: Vec<CMatrix>,
    span: OrthoBasis,
}

impl IdealSubspace {
    /// Wraps a spanning set, checking that it lies in the parent and is a
    /// two-sided ideal.
    pub fn new(parent: &MatrixAlgebra, vectors: &[CMatrix]) -> Result<Self> {
        for v in vectors {
            let residual = parent.membership_residual(v);
            if residual > CLOSURE_TOL {
                return Err(Error::NotInAlgebra { residual });
            }
        }
        let span = span_of(parent.dim, vectors)?;
        let ideal = Self::from_span(parent, span);
        let residual = ideal.ideal_residual();
        if residual > CLOSURE_TOL {
            return Err(Error::ClosureViolated { residual });
        }
        Ok(ideal)
    }

    /// Two-sided ideal generated by `vectors` in the unitization of the
    /// parent.
    pub fn generated(parent: &MatrixAlgebra, vectors: &[CMatrix]) -> Result<Self> {
        for v in vectors {
            let residual = parent.membership_residual(v);
            if residual > CLOSURE_TOL {
                return Err(Error::NotInAlgebra { residual });
            }
        }
        let mut span = OrthoBasis::new(parent.dim * parent.dim);
        let mut queue = VecDeque::new();
        for v in vectors {
            if let Some(u) = add_unit(&mut span, v) {
                queue.push_back(u);
            }
        }
        while let Some(v) = queue.pop_front() {
            for a in &parent.basis {
                for p in [a * &v, &v * a] {
                    if let Some(u) = add_product(&mut span, &p) {
                        queue.push_back(u);
                    }
                }
            }
        }
        Ok(Self::from_span(parent, span))
    }

    pub fn zero(parent: &MatrixAlgebra) -> Self {
        Self::from_span(parent, OrthoBasis::new(parent.dim * parent.dim))
    }

    fn from_span(parent: &MatrixAlgebra, span: OrthoBasis) -> Self {
        let d = parent.dim;
        let basis = span.vectors().iter().map(|v| unflatten(d, d, v)).collect();
        Self {
            parent: parent.clone(),
            basis,
            span,
        }
    }

    pub fn parent(&self) -> &MatrixAlgebra {
        &self.parent
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Frobenius distance to the ideal.
    pub fn distance(&self, x: &CMatrix) -> f64 {
        self.span.distance(&flatten(x))
    }

    /// `max dist(a j, J), dist(j a, J)` over parent and ideal basis pairs.
    pub fn ideal_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.parent.basis {
            for j in &self.basis {
                worst = worst.max(self.distance(&(a * j))).max(self.distance(&(j * a)));
            }
        }
        worst
    }

    /// Largest nilpotency residual over the basis (zero for a nil ideal).
    pub fn nil_defect(&self) -> f64 {
        self.basis.iter().map(nilpotency_defect).fold(0.0, f64::max)
    }

    /// The same ideal with one more spanning vector (which must keep it an
    /// ideal).
    pub fn enlarged(&self, extra: &[CMatrix]) -> Result<Self> {
        let mut all = self.basis.clone();
        all.extend_from_slice(extra);
        Self::new(&self.parent, &all)
    }
}

/// Jacobson radical as the kernel of the trace form
/// `(x, y) -> tr(L_x L_y)` of the left regular representation.
///
/// Over a field of characteristic zero this kernel is the largest nil ideal.
/// The kernel uses a singular value cutoff `KERNEL_TOL * max(s_max, 1)` (the
/// basis is orthonormal, so the form is O(1)-scaled).
pub fn jacobson_radical(a: &MatrixAlgebra) -> Result<IdealSubspace> {
    let k = a.len();
    if k == 0 {
        return Ok(IdealSubspace::zero(a));
    }
    let regs: Vec<CMatrix> = a.basis.iter().map(|e| a.left_regular(e)).collect();
    let g = CMatrix::from_fn(k, k, |i, j| {
        let (x, y) = (&regs[i], &regs[j]);
        let mut t = C64::new(0.0, 0.0);
        for p in 0..k {
            for q in 0..k {
                t += x[(p, q)] * y[(q, p)];
            }
        }
        t
    });
    let dec = svd(&g);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let cutoff = KERNEL_TOL * smax.max(1.0);
    let elems: Vec<CMatrix> = (0..k)
        .filter(|&i| dec.s[i] <= cutoff)
        .map(|i| a.element(&dec.v.column(i)))
        .collect();
    let rad = IdealSubspace::new(a, &elems)?;
    let residual = rad.nil_defect();
    if residual > 1e-8 {
        return Err(Error::ClosureViolated { residual });
    }
    Ok(rad)
}

/// Outcome of a predicate checked over basis elements or basis pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    /// Worst residual found (see the individual checks for its meaning).
    pub residual: f64,
    /// Basis indices attaining the worst residual.
    pub witness: Option<(usize, usize)>,
}

/// Whether every inner derivation `L_a - R_a` (for basis elements `a`) is
/// nilpotent on the algebra. The residual is the scale-free nilpotency
/// residual of the derivation; `max_radius` reports eigenvalue moduli for
/// information.
pub fn engel_check(a: &MatrixAlgebra, tol: f64) -> Result<EngelReport> {
    let mut worst = (0.0f64, None);
    let mut max_radius: f64 = 0.0;
    for (i, e) in a.basis.iter().enumerate() {
        let ad = a.inner_derivation(e);
        let defect = nilpotency_defect(&ad);
        max_radius = max_radius.max(spectral_radius(&ad)?);
        if defect > worst.0 {
            worst = (defect, Some((i, i)));
        }
    }
    Ok(EngelReport {
        check: CheckReport {
            passed: worst.0 <= tol,
            residual: worst.0,
            witness: worst.1,
        },
        max_radius,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngelReport {
    pub check: CheckReport,
    pub max_radius: f64,
}

/// Whether every commutator of basis elements lies in the radical; the
/// residual is the largest Frobenius distance.
pub fn comm_mod_rad_check(a: &MatrixAlgebra, tol: f64) -> Result<CheckReport> {
    let rad = jacobson_radical(a)?;
    Ok(comm_mod_ideal(a.basis(), &rad, tol))
}

pub(crate) fn comm_mod_ideal(elems: &[CMatrix], ideal: &IdealSubspace, tol: f64) -> CheckReport {
    let mut worst = (0.0f64, None);
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let r = ideal.distance(&elems[i].commutator(&elems[j]));
            if r > worst.0 {
                worst = (r, Some((i, j)));
            }
        }
    }
    CheckReport {
        passed: worst.0 <= tol,
        residual: worst.0,
        witness: worst.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn e(d: usize, i: usize, j: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |r, c| if r == i && c == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    fn jordan(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn closure_examples() {
        assert_eq!(algebra_closure(&[CMatrix::identity(3)], false).unwrap().len(), 1);
        let n = algebra_closure(&[jordan(3)], false).unwrap();
        assert_eq!(n.len(), 2);
        assert!(n.distance(&jordan(3).pow(2)) < 1e-12);
        let mut rng = sample::rng(3);
        let g = [sample::gaussian_matrix(&mut rng, 2, 2), sample::gaussian_matrix(&mut rng, 2, 2)];
        assert_eq!(algebra_closure(&g, false).unwrap().len(), 4);
        assert_eq!(algebra_closure(&[jordan(2)], true).unwrap().len(), 2);
    }

    #[test]
    fn radical_examples() {
        let full = algebra_closure(&[e(2, 0, 1), e(2, 1, 0)], false).unwrap();
        assert_eq!(full.len(), 4);
        assert!(jacobson_radical(&full).unwrap().is_empty());

        let upper = algebra_closure(&[e(2, 0, 0), e(2, 1, 1), e(2, 0, 1)], false).unwrap();
        let rad = jacobson_radical(&upper).unwrap();
        assert_eq!(rad.len(), 1);
        assert!(rad.distance(&e(2, 0, 1)) < 1e-12);

        let dual = algebra_closure(&[jordan(2)], true).unwrap();
        let rad = jacobson_radical(&dual).unwrap();
        assert_eq!(rad.len(), 1);
        assert!(rad.distance(&jordan(2)) < 1e-12);
    }

    #[test]
    fn nilpotent_algebra_is_its_own_radical() {
        let a = algebra_closure(&[jordan(4), jordan(4).pow(2).scale_real(3.0)], false).unwrap();
        assert_eq!(jacobson_radical(&a).unwrap().len(), a.len());
    }

    #[test]
    fn ideal_validation() {
        let upper = algebra_closure(&[e(2, 0, 0), e(2, 1, 1), e(2, 0, 1)], false).unwrap();
        assert!(IdealSubspace::new(&upper, &[e(2, 0, 1)]).is_ok());
        assert!(matches!(IdealSubspace::new(&upper, &[e(2, 0, 0)]), Err(Error::ClosureViolated { .. })));
        assert!(matches!(IdealSubspace::new(&upper, &[e(2, 1, 0)]), Err(Error::NotInAlgebra { .. })));
        let gen = IdealSubspace::generated(&upper, &[e(2, 0, 0)]).unwrap();
        assert_eq!(gen.len(), 2);
    }

    #[test]
    fn engel_and_commutativity() {
        let comm = algebra_closure(&[CMatrix::diag_real(&[1.0, 2.0, 3.0])], true).unwrap();
        assert!(engel_check(&comm, 1e-9).unwrap().check.passed);
        assert!(comm_mod_rad_check(&comm, 1e-9).unwrap().passed);

        let upper = algebra_closure(&[e(2, 0, 0), e(2, 1, 1), e(2, 0, 1)], false).unwrap();
        assert!(comm_mod_rad_check(&upper, 1e-9).unwrap().passed);
        let engel = engel_check(&upper, 1e-9).unwrap();
        assert!(!engel.check.passed);
        assert!((engel.max_radius - 1.0).abs() < 1e-12);

        let dual = algebra_closure(&[jordan(2)], true).unwrap();
        assert!(engel_check(&dual, 1e-9).unwrap().check.passed);
        assert!(comm_mod_rad_check(&dual, 1e-9).unwrap().passed);
    }
}
