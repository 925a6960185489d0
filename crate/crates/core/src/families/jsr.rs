use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::{BoundedFamily, RadiusBracket, Witness};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, spectral_radius, CMatrix};

pub const DEFAULT_DELTA: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JsrOptions {
    pub delta: f64,
    /// Cap on product evaluations.
    pub budget: u64,
}

impl Default for JsrOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            budget: super::DEFAULT_BUDGET,
        }
    }
}

/// Frontier word. The product is kept as `exp(log_scale) * unit` with
/// `|unit| = 1` so long words neither overflow nor underflow.
struct Entry {
    g: f64,
    seq: u64,
    log_scale: f64,
    unit: CMatrix,
    word: Vec<usize>,
    period: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // largest g first; ties go to the earliest insertion
    fn cmp(&self, other: &Self) -> Ordering {
        self.g
            .total_cmp(&other.g)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Smallest period of `word ++ [c]`, given the smallest period of `word`.
fn child_period(word: &[usize], period: usize, c: usize) -> usize {
    let n = word.len();
    if n == 0 {
        return 1;
    }
    if word[n - period] == c {
        return period;
    }
    let at = |i: usize| if i < n { word[i] } else { c };
    let mut pi = vec![0usize; n + 1];
    for i in 1..=n {
        let mut k = pi[i - 1];
        while k > 0 && at(i) != at(k) {
            k = pi[k - 1];
        }
        if at(i) == at(k) {
            k += 1;
        }
        pi[i] = k;
    }
    n + 1 - pi[n]
}

/// Branch-and-bound bracket for the joint spectral radius.
///
/// Words are expanded best-first by `g(w) = min_j |P_{w[..j]}|^(1/j)`. The
/// lower bound `L` is the best `rho(P_w)^(1/|w|)` seen; a word is kept only
/// while `g(w) > L + delta`. Every infinite product has a prefix among the
/// discarded or frontier words, so `max(L + delta, max_frontier g)` is an
/// upper bound at any stopping point. When the frontier empties the result
/// is certified with width at most `delta`; when the budget runs out the
/// (still valid) bracket is returned with `certified = false`.
///
/// Spectral radii are skipped for words that are proper powers, whose root
/// equals that of a shorter word.
pub fn jsr_bracket(k: &BoundedFamily, opts: &JsrOptions) -> Result<RadiusBracket> {
    if !(opts.delta > 0.0) || !opts.delta.is_finite() {
        return Err(Error::InvalidArgument("delta must be positive"));
    }
    let members = k.members();
    let mut lower = 0.0f64;
    let mut witness: Vec<usize> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut evaluations = 0u64;
    let mut max_len = 0usize;
    let mut stalled: Option<f64> = None;

    // the empty word: identity with g = +inf
    let root = Entry {
        g: f64::INFINITY,
        seq: 0,
        log_scale: 0.0,
        unit: CMatrix::identity(k.dim()),
        word: Vec::new(),
        period: 1,
    };
    let mut next = Some(root);

    while let Some(top) = next.take().or_else(|| heap.pop()) {
        if top.g <= lower + opts.delta {
            // max-heap: nothing left can exceed the threshold
            heap.clear();
            break;
        }
        let len = top.word.len() + 1;
        max_len = max_len.max(len);
        let mut parent = Some(top.word);
        for (i, a) in members.iter().enumerate() {
            evaluations += 1;
            if evaluations > opts.budget {
                stalled = Some(top.g);
                break;
            }
            let prod = if len == 1 { a.clone() } else { &top.unit * a };
            let nrm = op_norm(&prod);
            if nrm == 0.0 {
                continue;
            }
            let log_norm = top.log_scale + nrm.ln();
            let root = (log_norm / len as f64).exp();
            let g = top.g.min(root);
            let pword = parent.as_ref().expect("parent word present");
            let period = child_period(pword, top.period, i);
            let proper_power = period < len && len % period == 0;
            if root > lower && !proper_power {
                let rho = spectral_radius(&prod)?.min(nrm);
                if rho > 0.0 {
                    let r = ((rho.ln() + top.log_scale) / len as f64).exp();
                    if r > lower {
                        lower = r;
                        witness = pword.clone();
                        witness.push(i);
                    }
                }
            }
            if g > lower + opts.delta {
                let mut word = if i + 1 == members.len() {
                    parent.take().expect("parent word present")
                } else {
                    pword.clone()
                };
                word.push(i);
                seq += 1;
                heap.push(Entry {
                    g,
                    seq,
                    log_scale: log_norm,
                    unit: prod.scale_real(1.0 / nrm),
                    word,
                    period,
                });
            }
        }
        if stalled.is_some() {
            break;
        }
    }

    let frontier = heap.iter().map(|e| e.g).fold(stalled.unwrap_or(0.0), f64::max);
    let upper = frontier.max(lower + opts.delta);
    Ok(RadiusBracket {
        lower,
        upper,
        lower_witness: Witness::Word(witness),
        upper_depth: max_len,
        certified: stalled.is_none() && heap.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_radius, C64};
    use crate::sample;

    fn opts(delta: f64, budget: u64) -> JsrOptions {
        JsrOptions { delta, budget }
    }

    #[test]
    fn period_tracking() {
        assert_eq!(child_period(&[], 1, 0), 1);
        assert_eq!(child_period(&[0, 1], 2, 0), 2);
        assert_eq!(child_period(&[0, 1, 0], 2, 1), 2);
        assert_eq!(child_period(&[0, 0], 1, 1), 3);
        assert_eq!(child_period(&[0, 1, 0], 2, 0), 3);
    }

    #[test]
    fn single_matrix() {
        let mut rng = sample::rng(1);
        for d in 1..=4 {
            let a = sample::gaussian_matrix(&mut rng, d, d).scale_real(1.0 / (d as f64).sqrt());
            let rho = spectral_radius(&a).unwrap();
            let b = jsr_bracket(&BoundedFamily::new(vec![a]).unwrap(), &opts(1e-3, 10_000_000)).unwrap();
            assert!(b.certified);
            assert!(b.contains(rho, 1e-12), "{b:?} vs {rho}");
            assert!(b.width() <= 1e-3 + 1e-12);
        }
    }

    #[test]
    fn diagonal_pair() {
        let k = BoundedFamily::new(vec![CMatrix::diag_real(&[2.0, 0.0]), CMatrix::diag_real(&[0.0, 3.0])]).unwrap();
        let b = jsr_bracket(&k, &JsrOptions::default()).unwrap();
        assert!(b.certified);
        assert!((b.lower - 3.0).abs() < 1e-14);
        assert!(b.contains(3.0, 1e-14));
        assert_eq!(b.lower_witness, Witness::Word(vec![1]));
    }

    #[test]
    fn golden_pair() {
        let a = CMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let b = CMatrix::from_real(2, 2, &[1.0, 0.0, 1.0, 1.0]).unwrap();
        let k = BoundedFamily::new(vec![a, b]).unwrap();
        let br = jsr_bracket(&k, &opts(0.04, 1_000_000)).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(br.contains(phi, 1e-12), "{br:?}");
        assert!(br.width() <= 0.05);
    }

    #[test]
    fn budget_exhaustion_is_flagged_but_valid() {
        let mut rng = sample::rng(21);
        let members: Vec<CMatrix> = (0..3).map(|_| sample::gaussian_matrix(&mut rng, 3, 3)).collect();
        let k = BoundedFamily::new(members).unwrap();
        let rough = jsr_bracket(&k, &opts(1e-6, 200)).unwrap();
        assert!(!rough.certified);
        let fine = jsr_bracket(&k, &opts(1e-2, 10_000_000)).unwrap();
        assert!(fine.certified);
        assert!(rough.intersects(&fine, 1e-12));
        assert!(rough.lower <= fine.upper && fine.lower <= rough.upper);
    }

    #[test]
    fn golden_pair_is_norm_attaining() {
        // |A| = phi = rho(AB)^(1/2), so the search stops after a few words
        let a = CMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let b = CMatrix::from_real(2, 2, &[1.0, 0.0, 1.0, 1.0]).unwrap();
        let br = jsr_bracket(&BoundedFamily::new(vec![a, b]).unwrap(), &opts(1e-9, 100)).unwrap();
        assert!(br.certified);
        assert_eq!(br.lower_witness, Witness::Word(vec![0, 1]));
    }

    #[test]
    fn zero_and_nilpotent() {
        let n = CMatrix::from_fn(2, 2, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let b = jsr_bracket(&BoundedFamily::new(vec![n]).unwrap(), &JsrOptions::default()).unwrap();
        assert!(b.certified);
        assert_eq!(b.lower, 0.0);
        assert!(b.upper <= DEFAULT_DELTA + 1e-15);
    }

    #[test]
    fn deterministic() {
        let mut rng = sample::rng(9);
        let k = BoundedFamily::new(vec![sample::gaussian_matrix(&mut rng, 3, 3), sample::gaussian_matrix(&mut rng, 3, 3)]).unwrap();
        let o = opts(1e-2, 20_000);
        assert_eq!(jsr_bracket(&k, &o).unwrap(), jsr_bracket(&k, &o).unwrap());
    }
}
