use alloc::vec;
use alloc::vec::Vec;


use super::{eigen, CMatrix, C64};
use crate::error::Result;

/// Default tolerance for matching eigenvalue multisets.
pub const DEFAULT_MATCH_TOL: f64 = 1e-7;

/// Eigenvalue multiset of a square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSet {
    pub eigenvalues: Vec<C64>,
    pub match_tolerance: f64,
}

impl SpectrumSet {
    pub fn new(eigenvalues: Vec<C64>) -> Self {
        Self {
            eigenvalues,
            match_tolerance: DEFAULT_MATCH_TOL,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.match_tolerance = tol;
        self
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn sum(&self) -> C64 {
        self.eigenvalues.iter().sum()
    }

    /// Number of eigenvalues strictly inside the circle `|z - center| < radius`.
    pub fn count_inside(&self, center: C64, radius: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|z| (*z - center).norm() < radius)
            .count()
    }

    /// Greedy minimal-distance bipartite matching against another multiset.
    /// Returns the largest matched distance, or `None` when the sizes differ.
    pub fn matching_distance(&self, other: &SpectrumSet) -> Option<f64> {
        greedy_matching(&self.eigenvalues, &other.eigenvalues)
    }

    /// Multiset equality up to `self.match_tolerance`.
    pub fn matches(&self, other: &SpectrumSet) -> bool {
        self.matching_distance(other)
            .map(|d| d <= self.match_tolerance)
            .unwrap_or(false)
    }

    /// One-sided Hausdorff distance: the largest distance from an eigenvalue
    /// of `self` to the point set `points`.
    pub fn distance_to_set(&self, points: &[C64]) -> f64 {
        one_sided_hausdorff(&self.eigenvalues, points)
    }
}

/// `sup_{x in from} inf_{y in to} |x - y|`; infinite when `to` is empty and
/// `from` is not.
pub fn one_sided_hausdorff(from: &[C64], to: &[C64]) -> f64 {
    from.iter()
        .map(|x| to.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Greedy matching: repeatedly pair the globally closest unmatched elements.
pub fn greedy_matching(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
        matched += 1;
        if matched == n {
            break;
        }
    }
    Some(worst)
}

/// Eigenvalues with algebraic multiplicity.
pub fn spectrum(a: &CMatrix) -> Result<SpectrumSet> {
    Ok(SpectrumSet::new(eigen::eigenvalues(a)?))
}

pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    Ok(spectrum(a)?.radius())
}

/// Scale-free nilpotency residual `max_{k <= n} |tr(x^k)| / |x|^k`.
///
/// Eigenvalues of a defective nilpotent matrix are only determined to about
/// `eps^(1/k)` for a Jordan block of size `k`, while the power traces are
/// well conditioned; by Newton's identities they all vanish exactly when `x`
/// is nilpotent.
pub fn nilpotency_defect(x: &CMatrix) -> f64 {
    let n = x.rows();
    let nrm = super::op_norm(x);
    if nrm == 0.0 {
        return 0.0;
    }
    let u = x.scale_real(1.0 / nrm);
    let mut p = u.clone();
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        if k > 1 {
            p = &p * &u;
        }
        worst = worst.max(p.trace().norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_and_nilpotent() {
        let s = spectrum(&CMatrix::diag_real(&[1.0, 2.0])).unwrap();
        assert!(s.matches(&SpectrumSet::new(vec![c(2.0, 0.0), c(1.0, 0.0)])));
        let n = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = spectrum(&n).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.radius() == 0.0);
    }

    #[test]
    fn rotation_has_plus_minus_i() {
        let a = CMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let s = spectrum(&a).unwrap();
        assert!(s.matches(&SpectrumSet::new(vec![c(0.0, 1.0), c(0.0, -1.0)])));
    }

    #[test]
    fn non_square_rejected() {
        assert_eq!(
            spectrum(&CMatrix::zeros(2, 3)).unwrap_err(),
            Error::NonSquare { rows: 2, cols: 3 }
        );
    }

    #[test]
    fn greedy_matching_sizes() {
        assert_eq!(greedy_matching(&[c(0.0, 0.0)], &[]), None);
        let d = greedy_matching(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 1e-9), c(0.0, 0.0)]).unwrap();
        assert!(d < 2e-9);
    }
}
