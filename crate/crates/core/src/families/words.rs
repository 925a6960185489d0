use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::{BoundedFamily, SummableFamily};
use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, CMatrix, MatrixNorm};

/// Default cap on product evaluations.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Word sums and maxima for all powers `1..=depth`; entry `m - 1` refers to
/// words of length `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerNormTable {
    pub depth: usize,
    /// `eta(M^m) = sum_{|w|=m} weight(w) |P_w|`.
    pub eta_values: Vec<f64>,
    /// `|K^m| = max_{|w|=m} |P_w|`.
    pub set_norms: Vec<f64>,
    /// `r_m = max_{|w|=m} rho(P_w)^(1/m)`.
    pub gen_radii: Vec<f64>,
    pub radius_witnesses: Vec<Vec<usize>>,
    pub norm: MatrixNorm,
    pub evaluations: u64,
}

impl PowerNormTable {
    /// `min_m eta(M^m)^(1/m)` and the `m` attaining it.
    pub fn eta_upper(&self) -> (f64, usize) {
        min_root(&self.eta_values)
    }

    /// `min_m |K^m|^(1/m)` and the `m` attaining it.
    pub fn set_upper(&self) -> (f64, usize) {
        min_root(&self.set_norms)
    }

    /// `max_m r_m` with its witness word.
    pub fn best_radius(&self) -> (f64, &[usize]) {
        let mut best = 0;
        for m in 0..self.gen_radii.len() {
            if self.gen_radii[m] > self.gen_radii[best] {
                best = m;
            }
        }
        (self.gen_radii[best], &self.radius_witnesses[best])
    }

    /// Largest relative violation of `eta(M^(n+m)) <= eta(M^n) eta(M^m)`
    /// over the table (non-positive when submultiplicativity holds).
    pub fn submultiplicativity_defect(&self) -> f64 {
        defect(&self.eta_values)
    }

    pub fn set_norm_defect(&self) -> f64 {
        defect(&self.set_norms)
    }
}

fn defect(v: &[f64]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=v.len() {
        for m in 1..=v.len() - n {
            let bound = v[n - 1] * v[m - 1];
            let lhs = v[n + m - 1];
            let rel = if bound > 0.0 { (lhs - bound) / bound } else if lhs > 0.0 { f64::INFINITY } else { 0.0 };
            worst = worst.max(rel);
        }
    }
    worst
}

fn min_root(v: &[f64]) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, &x) in v.iter().enumerate() {
        let r = x.powf(1.0 / (i + 1) as f64);
        if r < best.0 {
            best = (r, i + 1);
        }
    }
    best
}

pub fn power_norm_table(m: &SummableFamily, depth: usize) -> Result<PowerNormTable> {
    power_norm_table_with(m, depth, DEFAULT_BUDGET, MatrixNorm::Operator)
}

/// Exact word sums up to `depth`.
///
/// Uses depth-first enumeration with prefix-product reuse when the full word
/// tree fits in `budget`; otherwise falls back to a level-by-level sweep that
/// merges bitwise-identical products (adding their weights), which is exact
/// and keeps families with heavy coincidences such as scalar families
/// tractable.
pub fn power_norm_table_with(
    m: &SummableFamily,
    depth: usize,
    budget: u64,
    norm: MatrixNorm,
) -> Result<PowerNormTable> {
    let eval = |p: &CMatrix| norm.eval(p);
    let mut t = word_table(m, depth, budget, &eval, true)?;
    t.norm = norm;
    Ok(t)
}

/// Word sums of an arbitrary submultiplicative seminorm `q` that dominates
/// the spectral radius. Products with `q = 0` prune their subtree.
pub(crate) fn word_table(
    m: &SummableFamily,
    depth: usize,
    budget: u64,
    q: &dyn Fn(&CMatrix) -> f64,
    allow_sweep: bool,
) -> Result<PowerNormTable> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1"));
    }
    let weights: Vec<f64> = m.multiplicities().iter().map(|&x| x as f64).collect();
    let mut acc = Acc::new(depth);
    let k = m.len() as u64;
    let mut tree = 0u64;
    let mut level = 1u64;
    for _ in 0..depth {
        level = level.saturating_mul(k);
        tree = tree.saturating_add(level);
    }
    if tree <= budget {
        let mut word = Vec::with_capacity(depth);
        dfs(m.members(), &weights, q, depth, None, 1.0, &mut word, &mut acc)?;
    } else if allow_sweep {
        sweep(m.members(), &weights, q, depth, budget, &mut acc)?;
    } else {
        return Err(Error::BudgetExceeded { budget });
    }
    Ok(PowerNormTable {
        depth,
        eta_values: acc.eta,
        set_norms: acc.sup,
        gen_radii: acc.radii,
        radius_witnesses: acc.witnesses,
        norm: MatrixNorm::Operator,
        evaluations: acc.evaluations,
    })
}

struct Acc {
    eta: Vec<f64>,
    sup: Vec<f64>,
    radii: Vec<f64>,
    witnesses: Vec<Vec<usize>>,
    evaluations: u64,
}

impl Acc {
    fn new(depth: usize) -> Self {
        Self {
            eta: alloc::vec![0.0; depth],
            sup: alloc::vec![0.0; depth],
            radii: alloc::vec![0.0; depth],
            witnesses: alloc::vec![Vec::new(); depth],
            evaluations: 0,
        }
    }

    /// Records a product of word length `len`; returns false when it is zero.
    fn record(&mut self, p: &CMatrix, weight: f64, word: &[usize], q: &dyn Fn(&CMatrix) -> f64) -> Result<bool> {
        let nrm = q(p);
        if nrm == 0.0 {
            return Ok(false);
        }
        let i = word.len() - 1;
        let inv = 1.0 / word.len() as f64;
        self.eta[i] += weight * nrm;
        self.sup[i] = self.sup[i].max(nrm);
        // rho <= |P| bounds the root before paying for an eigensolve
        if nrm.powf(inv) > self.radii[i] {
            let r = spectral_radius(p)?.min(nrm).powf(inv);
            if r > self.radii[i] {
                self.radii[i] = r;
                self.witnesses[i] = word.to_vec();
            }
        }
        Ok(true)
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    members: &[CMatrix],
    weights: &[f64],
    q: &dyn Fn(&CMatrix) -> f64,
    depth: usize,
    prefix: Option<&CMatrix>,
    weight: f64,
    word: &mut Vec<usize>,
    acc: &mut Acc,
) -> Result<()> {
    for (i, a) in members.iter().enumerate() {
        let p = match prefix {
            Some(q) => q * a,
            None => a.clone(),
        };
        acc.evaluations += 1;
        let w = weight * weights[i];
        word.push(i);
        // a zero product annihilates its whole subtree
        if acc.record(&p, w, word, q)? && word.len() < depth {
            dfs(members, weights, q, depth, Some(&p), w, word, acc)?;
        }
        word.pop();
    }
    Ok(())
}

struct Node {
    product: CMatrix,
    weight: f64,
    word: Vec<usize>,
}

fn sweep(
    members: &[CMatrix],
    weights: &[f64],
    q: &dyn Fn(&CMatrix) -> f64,
    depth: usize,
    budget: u64,
    acc: &mut Acc,
) -> Result<()> {
    let mut level: Vec<Node> = Vec::new();
    let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for (i, a) in members.iter().enumerate() {
        acc.evaluations += 1;
        merge(&mut level, &mut index, a.clone(), weights[i], alloc::vec![i]);
    }
    for len in 1..=depth {
        let mut next: Vec<Node> = Vec::new();
        index.clear();
        for node in &level {
            if !acc.record(&node.product, node.weight, &node.word, q)? || len == depth {
                continue;
            }
            for (i, a) in members.iter().enumerate() {
                acc.evaluations += 1;
                if acc.evaluations > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                let mut word = node.word.clone();
                word.push(i);
                merge(&mut next, &mut index, &node.product * a, node.weight * weights[i], word);
            }
        }
        level = next;
    }
    Ok(())
}

fn merge(level: &mut Vec<Node>, index: &mut BTreeMap<Vec<u64>, usize>, p: CMatrix, weight: f64, word: Vec<usize>) {
    let key = p.bit_key();
    match index.get(&key) {
        Some(&j) => level[j].weight += weight,
        None => {
            index.insert(key, level.len());
            level.push(Node {
                product: p,
                weight,
                word,
            });
        }
    }
}

/// Certified Berger–Wang residual at a given depth.
#[derive(Clone, Debug, PartialEq)]
pub struct BergerWang {
    /// `max_{m <= n} r_m`.
    pub r_n: f64,
    /// `min_{m <= n} |K^m|^(1/m)`.
    pub rho_upper_n: f64,
    pub gap: f64,
    pub witness: Vec<usize>,
}

pub fn berger_wang_gap(k: &BoundedFamily, depth: usize, budget: u64) -> Result<BergerWang> {
    let fam = SummableFamily::unit(k.members().to_vec())?;
    let table = power_norm_table_with(&fam, depth, budget, MatrixNorm::Operator)?;
    let (r_n, witness) = table.best_radius();
    let (rho_upper_n, _) = table.set_upper();
    Ok(BergerWang {
        r_n,
        rho_upper_n,
        gap: rho_upper_n - r_n,
        witness: witness.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{op_norm, C64};
    use crate::sample;

    /// Independent oracle: enumerate every word from scratch, no prefix reuse.
    fn brute_force(members: &[CMatrix], mult: &[u64], n: usize) -> (f64, f64) {
        let k = members.len();
        let mut eta = 0.0;
        let mut sup: f64 = 0.0;
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut p = CMatrix::identity(members[0].rows());
            let mut w = 1.0;
            for _ in 0..n {
                let i = c % k;
                c /= k;
                p = &p * &members[i];
                w *= mult[i] as f64;
            }
            let x = op_norm(&p);
            eta += w * x;
            sup = sup.max(x);
        }
        (eta, sup)
    }

    #[test]
    fn scalar_family_powers() {
        let m = SummableFamily::unit(alloc::vec![CMatrix::identity(3).scale_real(0.7)]).unwrap();
        let t = power_norm_table(&m, 6).unwrap();
        for (i, &e) in t.eta_values.iter().enumerate() {
            assert!((e - 0.7f64.powi(i as i32 + 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn nilpotent_block_vanishes() {
        let n = CMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let t = power_norm_table(&SummableFamily::unit(alloc::vec![n]).unwrap(), 6).unwrap();
        assert_eq!(&t.eta_values[2..], &[0.0; 4]);
        assert!(t.eta_values[1] > 0.0);
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = sample::rng(11);
        for _ in 0..5 {
            let a = sample::gaussian_matrix(&mut rng, 2, 2);
            let b = sample::gaussian_matrix(&mut rng, 2, 2);
            let m = SummableFamily::new(alloc::vec![a.clone(), b.clone()], alloc::vec![1, 2]).unwrap();
            let t = power_norm_table(&m, 6).unwrap();
            for n in 1..=6 {
                let (eta, sup) = brute_force(&[a.clone(), b.clone()], &[1, 2], n);
                assert!((t.eta_values[n - 1] - eta).abs() <= 1e-12 * eta);
                assert!((t.set_norms[n - 1] - sup).abs() <= 1e-12 * sup);
            }
            assert!(t.submultiplicativity_defect() <= 1e-12);
        }
    }

    #[test]
    fn sweep_agrees_with_dfs() {
        let mut rng = sample::rng(5);
        let a = sample::gaussian_matrix(&mut rng, 2, 2);
        let b = sample::gaussian_matrix(&mut rng, 2, 2);
        let m = SummableFamily::new(alloc::vec![a, b], alloc::vec![2, 1]).unwrap();
        let dfs = power_norm_table_with(&m, 5, u64::MAX, MatrixNorm::Operator).unwrap();
        // the tree has 62 nodes, so any smaller budget takes the sweep path
        let swp = power_norm_table_with(&m, 5, 61, MatrixNorm::Operator);
        assert!(matches!(swp, Err(Error::BudgetExceeded { budget: 61 })));
        let weights = [2.0, 1.0];
        let mut acc = Acc::new(5);
        sweep(m.members(), &weights, &|p: &CMatrix| op_norm(p), 5, 62, &mut acc).unwrap();
        let swp = PowerNormTable {
            depth: 5,
            eta_values: acc.eta,
            set_norms: acc.sup,
            gen_radii: acc.radii,
            radius_witnesses: acc.witnesses,
            norm: MatrixNorm::Operator,
            evaluations: acc.evaluations,
        };
        for n in 0..5 {
            assert!((dfs.eta_values[n] - swp.eta_values[n]).abs() <= 1e-12 * dfs.eta_values[n]);
            assert!((dfs.gen_radii[n] - swp.gen_radii[n]).abs() <= 1e-12);
        }
    }

    #[test]
    fn sweep_merges_scalar_products() {
        let members: Vec<CMatrix> = (1..=20)
            .map(|k| CMatrix::scalar(C64::new(0.5f64.powi(k), 0.0)))
            .collect();
        let m = SummableFamily::unit(members).unwrap();
        let t = power_norm_table_with(&m, 6, 1_000_000, MatrixNorm::Operator).unwrap();
        // eta of the m-th power is (sum_k 0.5^k)^m
        let s: f64 = (1..=20).map(|k| 0.5f64.powi(k)).sum();
        for n in 1..=6 {
            assert!((t.eta_values[n - 1] - s.powi(n as i32)).abs() <= 1e-12);
        }
    }

    #[test]
    fn commuting_projections() {
        let m = SummableFamily::unit(alloc::vec![CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[0.0, 1.0])]).unwrap();
        let t = power_norm_table(&m, 5).unwrap();
        // only the two constant words survive, each of norm one
        for (i, &e) in t.eta_values.iter().enumerate() {
            assert_eq!(e, 2.0, "level {}", i + 1);
        }
    }

    #[test]
    fn berger_wang_commuting_normal() {
        let k = BoundedFamily::new(alloc::vec![CMatrix::diag_real(&[2.0, 0.5]), CMatrix::diag_real(&[-1.0, 3.0])]).unwrap();
        let bw = berger_wang_gap(&k, 1, DEFAULT_BUDGET).unwrap();
        assert!(bw.gap.abs() <= 1e-9);
        assert_eq!(bw.r_n, 3.0);
    }
}
