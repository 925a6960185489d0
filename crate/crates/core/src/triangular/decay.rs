use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::triangularize_split;
use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix};

/// Products whose norm falls below this fraction of `alpha^len` are not
/// expanded further; their descendants are accounted for in
/// [`DecayPoint::pruned_bound`].
pub const ZERO_CUT: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayPoint {
    pub m: usize,
    /// Words of length `m` with enough `K` letters that were evaluated.
    pub count: u64,
    /// Largest norm among them (0 when none survive).
    pub max_norm: f64,
    /// `max_norm^(1/m)`.
    pub root: f64,
    /// Upper bound for the norms of words cut off below [`ZERO_CUT`].
    pub pruned_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub lambda: f64,
    pub alpha: f64,
    pub points: Vec<DecayPoint>,
    pub evaluations: u64,
}

impl DecayCurve {
    /// Mean root over the first and the last third of `m = 1..=m_max`.
    pub fn head_tail_means(&self) -> (f64, f64) {
        let n = self.points.len();
        let t = (n / 3).max(1);
        let mean = |p: &[DecayPoint]| p.iter().map(|x| x.root).sum::<f64>() / p.len() as f64;
        (mean(&self.points[..t]), mean(&self.points[n - t..]))
    }

    /// Tail mean at most `factor` times the head mean.
    pub fn decays(&self, factor: f64) -> bool {
        let (head, tail) = self.head_tail_means();
        tail <= factor * head
    }
}

struct Search<'a> {
    letters: &'a [CMatrix],
    n_k: usize,
    thresholds: Vec<usize>,
    alpha: f64,
    budget: u64,
    evaluations: u64,
    points: Vec<DecayPoint>,
}

impl Search<'_> {
    /// Whether a prefix of length `len` with `c` letters from `K` can still
    /// qualify at some length up to `m_max`.
    fn viable(&self, len: usize, c: usize) -> bool {
        (len..=self.thresholds.len()).any(|m| c + (m - len) >= self.thresholds[m - 1])
    }

    fn visit(&mut self, prefix: Option<&CMatrix>, len: usize, c: usize) -> Result<()> {
        let m_max = self.thresholds.len();
        for (i, a) in self.letters.iter().enumerate() {
            let c = c + usize::from(i < self.n_k);
            let len = len + 1;
            if !self.viable(len, c) {
                continue;
            }
            self.evaluations += 1;
            if self.evaluations > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            let p = match prefix {
                Some(q) => q * a,
                None => a.clone(),
            };
            let nrm = op_norm(&p);
            let point = &mut self.points[len - 1];
            if c >= self.thresholds[len - 1] {
                point.count += 1;
                point.max_norm = point.max_norm.max(nrm);
            }
            if len == m_max {
                continue;
            }
            if nrm <= ZERO_CUT * self.alpha.powi(len as i32) {
                // every extension has norm at most nrm * alpha^(extra)
                for m in len + 1..=m_max {
                    let b = nrm * self.alpha.powi((m - len) as i32);
                    let pb = &mut self.points[m - 1].pruned_bound;
                    *pb = pb.max(b);
                }
                continue;
            }
            self.visit(Some(&p), len, c)?;
        }
        Ok(())
    }
}

/// Largest norms of products of `m` letters from `K ∪ F` with at least
/// `ceil(lambda m)` letters from `K`, for `m = 1..=m_max`.
///
/// `K` must lie in the radical of the unital algebra generated by `K ∪ F`,
/// which is checked through [`triangularize_split`]. Prefixes that can no
/// longer reach the `K` quota are skipped.
pub fn product_decay(k: &[CMatrix], f: &[CMatrix], lambda: f64, m_max: usize, budget: u64) -> Result<DecayCurve> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument("lambda must lie in (0, 1)"));
    }
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1"));
    }
    if k.is_empty() {
        return Err(Error::EmptyFamily);
    }
    // a split chain exists exactly when K lies in the radical
    triangularize_split(k, f)?;
    let mut letters = k.to_vec();
    letters.extend_from_slice(f);

    let alpha = letters.iter().map(op_norm).fold(0.0, f64::max);
    let thresholds = (1..=m_max).map(|m| (lambda * m as f64 - 1e-12).ceil() as usize).collect();
    let mut search = Search {
        letters: &letters,
        n_k: k.len(),
        thresholds,
        alpha,
        budget,
        evaluations: 0,
        points: (1..=m_max)
            .map(|m| DecayPoint {
                m,
                count: 0,
                max_norm: 0.0,
                root: 0.0,
                pruned_bound: 0.0,
            })
            .collect(),
    };
    search.visit(None, 0, 0)?;
    let mut points = search.points;
    for p in &mut points {
        p.root = p.max_norm.powf(1.0 / p.m as f64);
    }
    Ok(DecayCurve {
        lambda,
        alpha,
        points,
        evaluations: search.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::sample;
    use num_traits::Zero;

    fn jordan(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::zero() })
    }

    /// Direct enumeration of all words, for comparison.
    fn brute(letters: &[CMatrix], n_k: usize, lambda: f64, m: usize) -> (u64, f64) {
        let n = letters.len();
        let need = (lambda * m as f64 - 1e-12).ceil() as usize;
        let mut count = 0;
        let mut best: f64 = 0.0;
        for code in 0..n.pow(m as u32) {
            let mut c = code;
            let mut p = CMatrix::identity(letters[0].rows());
            let mut kk = 0;
            for _ in 0..m {
                let i = c % n;
                c /= n;
                kk += usize::from(i < n_k);
                p = &p * &letters[i];
            }
            if kk >= need {
                count += 1;
                best = best.max(op_norm(&p));
            }
        }
        (count, best)
    }

    #[test]
    fn single_nilpotent_hits_zero() {
        let n = jordan(3);
        let curve = product_decay(core::slice::from_ref(&n), &[], 0.5, 6, 1_000_000).unwrap();
        for p in &curve.points {
            if p.m >= 3 {
                assert_eq!(p.max_norm, 0.0);
            } else {
                assert_eq!(p.max_norm, 1.0);
            }
        }
    }

    #[test]
    fn nilpotent_with_identity() {
        let curve = product_decay(&[jordan(4)], &[CMatrix::identity(4)], 0.5, 16, 10_000_000).unwrap();
        let m2 = curve.points[1].root;
        assert!(curve.points.last().unwrap().root <= 0.5 * m2);
        assert!(curve.decays(0.6));
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = sample::rng(3);
        let k = [sample::upper_triangular(&mut rng, 3, true)];
        let f = [CMatrix::diag_real(&[0.9, 0.5, 0.7]), sample::upper_triangular(&mut rng, 3, false).scale_real(0.5)];
        let mut letters = k.to_vec();
        letters.extend_from_slice(&f);
        let lambda = 1.0 / 3.0;
        let curve = product_decay(&k, &f, lambda, 7, 10_000_000).unwrap();
        for p in &curve.points {
            let (count, best) = brute(&letters, 1, lambda, p.m);
            // pruned words are exactly zero here, so only the maximum matches
            assert!(p.count <= count);
            assert!((p.max_norm - best).abs() <= 1e-12 * best.max(1.0), "m={} {} {}", p.m, p.max_norm, best);
        }
    }

    #[test]
    fn hypothesis_and_arguments() {
        let bad = product_decay(&[CMatrix::identity(2)], &[], 0.5, 4, 1000);
        assert!(matches!(bad, Err(Error::RadicalHypothesisViolated { .. })));
        // N is nilpotent but not in the radical once its transpose joins
        let n = jordan(2);
        let bad = product_decay(core::slice::from_ref(&n), &[n.transpose()], 0.5, 4, 1000);
        assert!(matches!(bad, Err(Error::RadicalHypothesisViolated { .. })));
        assert!(product_decay(core::slice::from_ref(&n), &[], 1.5, 4, 1000).is_err());
        let big = product_decay(&[n], &[CMatrix::identity(2), CMatrix::identity(2)], 0.1, 16, 100);
        assert!(matches!(big, Err(Error::BudgetExceeded { .. })));
    }
}
