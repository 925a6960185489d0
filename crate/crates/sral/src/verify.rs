//! The acceptance suite: sixteen seeded checks with a pass/fail verdict each.
//!
//! Every case draws its inputs from a seed derived from the run seed, the
//! criterion and the case index, so results do not depend on scheduling.
//! Cases run in parallel and are reduced in index order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use sral_core::elementary::{elem_matrix, elem_trace, spectral_inclusion_check, strong_engel_check, ElementaryOperator};
use sral_core::families::{
    abs_t_transform, berger_wang_gap, family_convolution, family_disjoint_union, family_product, family_sum,
    free_semigroup_lift, geometric_bracket, geometric_family, jsr_bracket, power_norm_table_with, BoundedFamily,
    JsrOptions, SummableFamily, TsrOptions,
};
use sral_core::linalg::lu::inverse;
use sral_core::linalg::svd::singular_values;
use sral_core::linalg::{op_norm, riesz_projection, spectral_radius, spectrum, Contour, MatrixNorm};
use sral_core::pair::{eigenspace_ideal_check, spectral_complement, surjectivity_bracket, OrderedPairNorm, SeriesPlan};
use sral_core::radical::{algebra_closure, qmod_rate, IdealSubspace};
use sral_core::sample::{self, SeededRng};
use sral_core::triangular::{cepochka_check, lowering_residual, product_decay, triangularize};
use sral_core::{CMatrix, Error, C64};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Cap on word evaluations for searches that take one.
    pub budget: u64,
    /// Overrides of named tolerances.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    fn rng(&self, criterion: u8, case: usize) -> SeededRng {
        sample::rng(splitmix(self.seed ^ (u64::from(criterion) << 56) ^ case as u64))
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub violations: usize,
    /// Worst-case or summary quantities, keyed by name.
    pub metrics: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub summary: &'static str,
    pub run: fn(&RunConfig) -> CriterionReport,
}

pub const CRITERIA: [Criterion; 16] = [
    Criterion { id: 1, name: "jsr", summary: "single-matrix joint radius brackets the spectral radius", run: jsr_oracle },
    Criterion { id: 2, name: "golden", summary: "golden-ratio pair bracket", run: golden_pair },
    Criterion { id: 3, name: "berger-wang", summary: "Berger-Wang residual is nonnegative and shrinks with depth", run: berger_wang },
    Criterion { id: 4, name: "eta", summary: "word-sum calculus inequalities", run: eta_calculus },
    Criterion { id: 5, name: "geometric", summary: "geometric family of a scalar family", run: geometric },
    Criterion { id: 6, name: "free-lift", summary: "free-semigroup lift has l1 norm eta(M^n)", run: free_lift },
    Criterion { id: 7, name: "trace", summary: "trace formula for elementary operators", run: trace_formula },
    Criterion { id: 8, name: "inclusion", summary: "sum and product spectral inclusions", run: spectral_inclusions },
    Criterion { id: 9, name: "engel", summary: "strong Engel inclusion on unipotent-plus-scalar coefficients", run: strong_engel },
    Criterion { id: 10, name: "qmod", summary: "rate modulo the off-diagonal ideal", run: qmod_oracle },
    Criterion { id: 11, name: "triangularize", summary: "strict triangularization of conjugated nil families", run: triangularization },
    Criterion { id: 12, name: "decay", summary: "product decay trend", run: product_decay_trend },
    Criterion { id: 13, name: "pair", summary: "norm equivalence bound on spectral subspaces", run: spectral_subspace_bound },
    Criterion { id: 14, name: "quasinorm", summary: "Schatten quasinorm bounds on eigenspaces", run: quasinorm_bounds },
    Criterion { id: 15, name: "riesz", summary: "Riesz projections", run: riesz },
    Criterion { id: 16, name: "determinism", summary: "repeated runs give identical reports", run: determinism },
];

pub fn criterion(name: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.name == name)
}

/// Runs the named criteria (all when `names` is empty) in table order.
pub fn run_suite(cfg: &RunConfig, names: &[String]) -> Result<VerifyReport, String> {
    let selected: Vec<&Criterion> = if names.is_empty() {
        CRITERIA.iter().collect()
    } else {
        names
            .iter()
            .map(|n| criterion(n).ok_or_else(|| format!("unknown suite {n:?}")))
            .collect::<Result<_, _>>()?
    };
    let criteria: Vec<CriterionReport> = selected.par_iter().map(|c| (c.run)(cfg)).collect();
    let passed = criteria.iter().all(|c| c.passed);
    Ok(VerifyReport {
        config: cfg.clone(),
        criteria,
        passed,
    })
}

/// Tally of per-case outcomes.
struct Tally {
    id: u8,
    cases: usize,
    violations: usize,
    metrics: BTreeMap<&'static str, f64>,
    first_failure: Option<String>,
}

impl Tally {
    fn new(id: u8) -> Self {
        Self {
            id,
            cases: 0,
            violations: 0,
            metrics: BTreeMap::new(),
            first_failure: None,
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn max(&mut self, key: &'static str, v: f64) {
        let e = self.metrics.entry(key).or_insert(f64::NEG_INFINITY);
        *e = e.max(v);
    }

    fn min(&mut self, key: &'static str, v: f64) {
        let e = self.metrics.entry(key).or_insert(f64::INFINITY);
        *e = e.min(v);
    }

    fn set(&mut self, key: &'static str, v: f64) {
        self.metrics.insert(key, v);
    }

    fn finish(self) -> CriterionReport {
        self.finish_with(true)
    }

    fn finish_with(self, extra: bool) -> CriterionReport {
        let name = CRITERIA[usize::from(self.id) - 1].name;
        CriterionReport {
            id: self.id,
            name,
            passed: extra && self.violations == 0 && self.cases > 0,
            cases: self.cases,
            violations: self.violations,
            metrics: self.metrics,
            first_failure: self.first_failure,
        }
    }
}

fn cases<T: Send>(cfg: &RunConfig, id: u8, n: usize, f: impl Fn(usize, &mut SeededRng) -> T + Sync) -> Vec<T> {
    (0..n).into_par_iter().map(|i| f(i, &mut cfg.rng(id, i))).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn jsr_oracle(cfg: &RunConfig) -> CriterionReport {
    let delta = cfg.tol("jsr.delta", 1e-4);
    let width = cfg.tol("jsr.width", 1e-3);
    let out = cases(cfg, 1, 100, |i, rng| {
        let d = 1 + i % 5;
        let a = sample::gaussian_matrix(rng, d, d).scale_real(1.0 / (d as f64).sqrt());
        let rho = spectral_radius(&a)?;
        let b = jsr_bracket(&BoundedFamily::new(vec![a])?, &JsrOptions { delta, budget: cfg.budget })?;
        Ok::<_, Error>((rho, b))
    });
    let mut t = Tally::new(1);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((rho, b)) => {
                t.max("max_width", b.width());
                let ok = b.certified && b.contains(rho, 1e-12) && b.width() <= width;
                t.case(ok, || format!("case {i}: rho {rho} bracket [{}, {}] certified {}", b.lower, b.upper, b.certified));
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

pub fn golden_family() -> BoundedFamily {
    let a = CMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).expect("2x2");
    let b = CMatrix::from_real(2, 2, &[1.0, 0.0, 1.0, 1.0]).expect("2x2");
    BoundedFamily::new(vec![a, b]).expect("golden pair")
}

fn golden_pair(cfg: &RunConfig) -> CriterionReport {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let opts = JsrOptions {
        delta: cfg.tol("golden.delta", 0.04),
        budget: 1_000_000,
    };
    let mut t = Tally::new(2);
    match jsr_bracket(&golden_family(), &opts) {
        Ok(b) => {
            t.set("lower", b.lower);
            t.set("upper", b.upper);
            t.case(b.contains(phi, 1e-12) && b.width() <= cfg.tol("golden.width", 0.05), || {
                format!("bracket [{}, {}]", b.lower, b.upper)
            });
        }
        Err(e) => t.case(false, || e.to_string()),
    }
    t.finish()
}

fn berger_wang(cfg: &RunConfig) -> CriterionReport {
    let out = cases(cfg, 3, 50, |_, rng| {
        let k = BoundedFamily::new(vec![sample::gaussian_matrix(rng, 2, 2), sample::gaussian_matrix(rng, 2, 2)])?;
        let shallow = berger_wang_gap(&k, 6, cfg.budget)?;
        let deep = berger_wang_gap(&k, 14, cfg.budget)?;
        Ok::<_, Error>((shallow.gap, deep.gap))
    });
    let mut t = Tally::new(3);
    let (mut g6, mut g14) = (Vec::new(), Vec::new());
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((a, b)) => {
                t.min("min_gap", a.min(b));
                t.case(a >= -1e-12 && b >= -1e-12, || format!("case {i}: gaps {a}, {b}"));
                g6.push(a);
                g14.push(b);
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    let (m6, m14) = (median(g6), median(g14));
    t.set("median_gap_depth_6", m6);
    t.set("median_gap_depth_14", m14);
    let trend = m14 < m6;
    if !trend {
        t.first_failure.get_or_insert_with(|| format!("median gap did not decrease: {m6} -> {m14}"));
    }
    t.finish_with(trend)
}

fn random_multiplicities(rng: &mut SeededRng, k: usize) -> Vec<u64> {
    (0..k).map(|_| 1 + (sample::uniform(rng, 0.0, 3.0) as u64).min(2)).collect()
}

fn random_family(rng: &mut SeededRng, d: usize, mult: Vec<u64>, scale: f64) -> Result<SummableFamily, Error> {
    let members = mult.iter().map(|_| sample::gaussian_matrix(rng, d, d).scale_real(scale)).collect();
    SummableFamily::new(members, mult)
}

fn eta_table(f: &SummableFamily, depth: usize, budget: u64) -> Result<Vec<f64>, Error> {
    Ok(power_norm_table_with(f, depth, budget, MatrixNorm::Operator)?.eta_values)
}

fn eta_calculus(cfg: &RunConfig) -> CriterionReport {
    const K: usize = 5;
    let tol = cfg.tol("eta.rel", 1e-9);
    let out = cases(cfg, 4, 100, |_, rng| {
        // equal multiplicities keep the expanded lengths equal, as the entrywise sum needs
        let mult = random_multiplicities(rng, 2);
        let m = random_family(rng, 2, mult.clone(), 0.5)?;
        let n = random_family(rng, 2, mult, 0.5)?;
        let mut worst: Vec<(&'static str, f64)> = Vec::new();
        let table = power_norm_table_with(&m, K, cfg.budget, MatrixNorm::Operator)?;
        worst.push(("submultiplicativity", table.submultiplicativity_defect()));

        let excess = |lhs: &[f64], rhs: &[f64]| lhs.iter().zip(rhs).map(|(a, b)| (a - b) / b.max(f64::MIN_POSITIVE)).fold(f64::NEG_INFINITY, f64::max);
        let conv = eta_table(&family_convolution(&m, &n)?, K, cfg.budget)?;
        let prod = eta_table(&family_product(&m, &n)?, K, cfg.budget)?;
        worst.push(("convolution", excess(&conv, &prod)));
        let sum = eta_table(&family_sum(&m, &n)?, K, cfg.budget)?;
        let union = eta_table(&family_disjoint_union(&m, &n)?, K, cfg.budget)?;
        worst.push(("sum", excess(&sum, &union)));

        // rows of t with l1 norm at most one
        let e = m.expanded_len();
        let cols = 3;
        let mut tm = CMatrix::from_fn(e, cols, |_, _| sample::complex_normal(rng));
        for r in 0..e {
            let l1: f64 = tm.row(r).iter().map(|z| z.norm()).sum();
            let s = sample::uniform(rng, 0.2, 1.0) / l1;
            for c in 0..cols {
                tm[(r, c)] *= s;
            }
        }
        let abs = eta_table(&abs_t_transform(&m, &tm)?, K, cfg.budget)?;
        worst.push(("abs_t", excess(&abs, &table.eta_values)));
        Ok::<_, Error>(worst)
    });
    let mut t = Tally::new(4);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok(w) => {
                for (name, v) in w {
                    t.max(name, v);
                    t.case(v <= tol, || format!("case {i}: {name} excess {v:e}"));
                }
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

fn geometric(cfg: &RunConfig) -> CriterionReport {
    let opts = TsrOptions {
        budget: cfg.budget,
        ..TsrOptions::default()
    };
    let width = cfg.tol("geometric.width", 1e-3);
    let mut t = Tally::new(5);
    let out: Vec<_> = [0.25, 0.5]
        .par_iter()
        .map(|&c| {
            let m = SummableFamily::unit(vec![CMatrix::scalar(C64::new(c, 0.0))])?;
            let g = geometric_family(&m, 25, 8, &opts)?;
            Ok::<_, Error>((c, geometric_bracket(&g, 8, &opts)?))
        })
        .collect();
    for r in out {
        match r {
            Ok((c, b)) => {
                let expect = c / (1.0 - c);
                t.max("max_width", b.width());
                t.case(b.contains(expect, 1e-12) && b.width() <= width, || {
                    format!("c = {c}: [{}, {}] vs {expect}", b.lower, b.upper)
                });
            }
            Err(e) => t.case(false, || e.to_string()),
        }
    }
    t.finish()
}

fn free_lift(cfg: &RunConfig) -> CriterionReport {
    let out = cases(cfg, 6, 20, |_, rng| {
        let mult = random_multiplicities(rng, 2);
        let m = random_family(rng, 2, mult, 0.7)?;
        let etas = eta_table(&m, 6, cfg.budget)?;
        let mut errs = Vec::with_capacity(6);
        for n in 1..=6 {
            let lift = free_semigroup_lift(&m, n, cfg.budget)?;
            errs.push(rel_err(lift.l1_norm(), etas[n - 1]));
        }
        Ok::<_, Error>(errs)
    });
    let mut t = Tally::new(6);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok(errs) => {
                for (n, e) in errs.into_iter().enumerate() {
                    t.max("max_rel_err", e);
                    t.case(e <= 1e-12, || format!("case {i} n {}: relative error {e:e}", n + 1));
                }
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

fn trace_formula(cfg: &RunConfig) -> CriterionReport {
    let tol = cfg.tol("trace.rel", 1e-10);
    let out = cases(cfg, 7, 200, |i, rng| {
        let m = 1 + i % 6;
        let n = 1 + (i / 6) % 6;
        let k = 1 + (i / 36) % 10;
        let terms: Vec<_> = (0..k).map(|_| (sample::gaussian_matrix(rng, m, m), sample::gaussian_matrix(rng, n, n))).collect();
        let scale: f64 = terms.iter().map(|(a, b)| a.trace().norm() * b.trace().norm()).sum();
        let op = ElementaryOperator::new((m, n), terms)?;
        let diff = (elem_trace(&op) - elem_matrix(&op).trace()).norm();
        Ok::<_, Error>(if scale > 0.0 { diff / scale } else { diff })
    });
    let mut t = Tally::new(7);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok(e) => {
                t.max("max_rel_err", e);
                t.case(e <= tol, || format!("case {i}: relative error {e:e}"));
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

fn triangular_op(rng: &mut SeededRng, d: usize, terms: usize) -> Result<ElementaryOperator, Error> {
    let t = (0..terms)
        .map(|_| (sample::upper_triangular(rng, d, false), sample::upper_triangular(rng, d, false)))
        .collect();
    ElementaryOperator::new((d, d), t)
}

fn spectral_inclusions(cfg: &RunConfig) -> CriterionReport {
    let tol = cfg.tol("inclusion.dist", 1e-7);
    let out = cases(cfg, 8, 100, |i, rng| {
        let d = 2 + i % 3;
        let u = triangular_op(rng, d, 1 + i % 3)?;
        let v = triangular_op(rng, d, 1 + (i / 3) % 3)?;
        spectral_inclusion_check(&u, &v, tol)
    });
    let mut t = Tally::new(8);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok(r) => {
                t.max("max_sum_distance", r.max_sum_distance);
                t.max("max_product_distance", r.max_product_distance);
                t.case(r.hypothesis_satisfied && r.inclusions_hold, || {
                    format!("case {i}: hypothesis {} sum {:e} product {:e}", r.hypothesis_satisfied, r.max_sum_distance, r.max_product_distance)
                });
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

/// `c I + N` with `N` strictly upper triangular, in the basis given by `q`.
fn unipotent_plus_scalar(rng: &mut SeededRng, q: &CMatrix) -> CMatrix {
    let d = q.rows();
    let mut a = sample::upper_triangular(rng, d, true);
    let c = sample::complex_normal(rng);
    for i in 0..d {
        a[(i, i)] = c;
    }
    &(q * &a) * &q.adjoint()
}

fn strong_engel(cfg: &RunConfig) -> CriterionReport {
    let tol = cfg.tol("engel.dist", 1e-7);
    // one fixed algebra per dimension, in a generic orthonormal basis
    let bases: Vec<CMatrix> = (2..=4).map(|d| sample::unitary(&mut cfg.rng(9, usize::MAX - d), d)).collect();
    let out = cases(cfg, 9, 100, |i, rng| {
        let q = &bases[i % 3];
        let k = 1 + (i / 3) % 4;
        let terms = (0..k).map(|_| (unipotent_plus_scalar(rng, q), unipotent_plus_scalar(rng, q))).collect();
        strong_engel_check(&ElementaryOperator::new((q.rows(), q.rows()), terms)?, tol)
    });
    let mut t = Tally::new(9);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok(r) => {
                t.max("max_eigenvalue_distance", r.max_bimodule_distance);
                t.max("max_bimodule_defect", r.bimodule_defect);
                t.case(r.hypothesis_satisfied && r.bimodule_inclusion_holds, || {
                    format!("case {i}: hypothesis {} defect {:e}", r.hypothesis_satisfied, r.bimodule_defect)
                });
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, c| C64::new(f64::from(u8::from((r, c) == (i, j))), 0.0))
}

/// Diagonal blocks of sizes 1, 2, 1 on `C^4`.
const BLOCKS: [usize; 4] = [0, 1, 1, 2];

fn qmod_oracle(cfg: &RunConfig) -> CriterionReport {
    let tol = cfg.tol("qmod.rate", 1e-6);
    let units: Vec<CMatrix> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| BLOCKS[i] <= BLOCKS[j])
        .map(|(i, j)| matrix_unit(4, i, j))
        .collect();
    let off: Vec<CMatrix> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| BLOCKS[i] < BLOCKS[j])
        .map(|(i, j)| matrix_unit(4, i, j))
        .collect();
    let setup = algebra_closure(&units, false).and_then(|alg| IdealSubspace::generated(&alg, &off));
    let mut t = Tally::new(10);
    let j = match setup {
        Ok(j) => j,
        Err(e) => {
            t.case(false, || e.to_string());
            return t.finish();
        }
    };
    let out = cases(cfg, 10, 50, |_, rng| {
        // the leading 1x1 block dominates the other diagonal blocks
        let mut a = CMatrix::zeros(4, 4);
        for (r, c) in (0..4).flat_map(|i| (0..4).map(move |j| (i, j))) {
            if BLOCKS[r] <= BLOCKS[c] {
                a[(r, c)] = sample::complex_normal(rng);
            }
        }
        let lead = sample::unit_phase(rng) * sample::uniform(rng, 0.5, 2.0);
        a[(0, 0)] = lead;
        for (r0, size) in [(1, 2), (3, 1)] {
            let block = a.block(r0, r0, size, size);
            let scaled = block.scale_real(0.6 * lead.norm() / op_norm(&block).max(f64::MIN_POSITIVE));
            a.set_block(r0, r0, &scaled);
        }
        let mut diag = CMatrix::zeros(4, 4);
        for (r, c) in (0..4).flat_map(|i| (0..4).map(move |j| (i, j))) {
            if BLOCKS[r] == BLOCKS[c] {
                diag[(r, c)] = a[(r, c)];
            }
        }
        let rho = spectral_radius(&diag)?;
        let r = qmod_rate(&a, &j, 200)?;
        Ok::<_, Error>((r.inf_rate, rho))
    });
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((rate, rho)) => {
                let e = (rate - rho).abs();
                t.max("max_abs_err", e);
                t.case(e <= tol, || format!("case {i}: inf rate {rate} vs rho {rho}"));
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

fn triangularization(cfg: &RunConfig) -> CriterionReport {
    let lower_tol = cfg.tol("triangularize.lowering", 1e-9);
    let prod_tol = cfg.tol("triangularize.product", 1e-8);
    let out = cases(cfg, 11, 100, |i, rng| {
        let d = 2 + i % 5;
        let count = 2 + i % 2;
        let s = sample::conditioned(rng, d, 10.0);
        let si = inverse(&s)?;
        let gens: Vec<CMatrix> = (0..count).map(|_| &(&s * &sample::upper_triangular(rng, d, true)) * &si).collect();
        let chain = triangularize(&gens)?;
        let lowering = gens.iter().map(|g| lowering_residual(g, &chain)).fold(0.0, f64::max);
        let alpha = gens.iter().map(op_norm).fold(0.0, f64::max);
        let mut p = CMatrix::identity(d);
        for _ in 0..d {
            let pick = (sample::uniform(rng, 0.0, count as f64) as usize).min(count - 1);
            p = &p * &gens[pick];
        }
        let product = op_norm(&p) / alpha.powi(d as i32);

        // two products of chain-preserving combinations c0 I + sum c_i g_i
        let mut cepochka = Vec::with_capacity(2);
        for _ in 0..2 {
            let m = chain.len().max(1) + (sample::uniform(rng, 0.0, 6.0) as usize);
            let ops: Vec<CMatrix> = (0..m)
                .map(|_| {
                    let mut x = CMatrix::identity(d).scale(sample::complex_normal(rng));
                    for g in &gens {
                        x = &x + &g.scale(sample::complex_normal(rng).scale(1.0 / alpha));
                    }
                    x
                })
                .collect();
            let r = cepochka_check(&ops, &chain, 1e-12)?;
            cepochka.push((r.holds, r.product_norm, r.bound));
        }
        Ok::<_, Error>((lowering, product, cepochka))
    });
    let mut t = Tally::new(11);
    let mut products = 0usize;
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((lowering, product, cep)) => {
                t.max("max_lowering_residual", lowering);
                t.max("max_product_ratio", product);
                t.case(lowering <= lower_tol, || format!("case {i}: lowering residual {lowering:e}"));
                t.case(product <= prod_tol, || format!("case {i}: product ratio {product:e}"));
                for (holds, norm, bound) in cep {
                    products += 1;
                    t.case(holds, || format!("case {i}: product norm {norm} above chain bound {bound}"));
                }
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.set("chain_products_checked", products as f64);
    t.finish()
}

fn product_decay_trend(cfg: &RunConfig) -> CriterionReport {
    let factor = cfg.tol("decay.factor", 0.6);
    let out = cases(cfg, 12, 10, |i, rng| {
        let d = 3 + i % 3;
        let lambda = [0.25, 0.34, 0.5][i % 3];
        let q = sample::unitary(rng, d);
        let rot = |x: CMatrix| &(&q * &x) * &q.adjoint();
        let k = vec![rot(sample::upper_triangular(rng, d, true)).scale_real(0.8)];
        let mut f = rot(sample::upper_triangular(rng, d, false));
        let scale = 0.9 / op_norm(&f);
        f = f.scale_real(scale);
        let curve = product_decay(&k, &[f], lambda, 16, cfg.budget)?;
        Ok::<_, Error>((curve.head_tail_means(), curve.decays(factor)))
    });
    let mut t = Tally::new(12);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok(((head, tail), ok)) => {
                t.max("max_tail_over_head", if head > 0.0 { tail / head } else { 0.0 });
                t.case(ok, || format!("config {i}: head mean {head}, tail mean {tail}"));
            }
            Err(e) => t.case(false, || format!("config {i}: {e}")),
        }
    }
    t.finish()
}

/// Semicompact operator on `n x n`: a small unflagged term plus a term
/// whose left coefficient lives in the `r x r` corner ideal.
pub fn semicompact(rng: &mut SeededRng, n: usize, r: usize) -> Result<ElementaryOperator, Error> {
    let a = sample::gaussian_matrix(rng, n, n);
    let b = sample::gaussian_matrix(rng, n, n);
    let small = 0.15 / (op_norm(&a) * op_norm(&b));
    let mut f = CMatrix::zeros(n, n);
    f.set_block(0, 0, &sample::gaussian_matrix(rng, r, r));
    let g = sample::gaussian_matrix(rng, n, n);
    let big = 2.0 / (op_norm(&f) * op_norm(&g));
    ElementaryOperator::with_flags((n, n), vec![(a.scale_real(small), b), (f.scale_real(big), g)], vec![(false, false), (true, false)])
}

/// First power in `1..=8` at which the series plan is a contraction.
pub fn contracting_plan(op: &ElementaryOperator, subspace: &[CMatrix], pair: OrderedPairNorm) -> Result<SeriesPlan, Error> {
    let t = surjectivity_bracket(op, subspace)?.lower;
    let mut last = Error::InvalidArgument("no power tried");
    for m in 1..=8 {
        match SeriesPlan::new(op, m, subspace, Some(t), None, pair) {
            Ok(plan) => return Ok(plan),
            Err(e @ Error::ContractionFails { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn spectral_subspace_bound(cfg: &RunConfig) -> CriterionReport {
    let out = cases(cfg, 13, 50, |_, rng| {
        let op = semicompact(rng, 6, 2)?;
        let rho = spectrum(&elem_matrix(&op))?.radius();
        let z_basis = spectral_complement(&op, C64::new(0.0, 0.0), 0.5 * rho)?;
        let plan = contracting_plan(&op, &z_basis, OrderedPairNorm::nuclear((6, 6)))?;
        // basis elements and random combinations of them
        let mut zs: Vec<CMatrix> = z_basis.iter().take(4).cloned().collect();
        for _ in 0..2 {
            let mut z = CMatrix::zeros(6, 6);
            for b in &z_basis {
                z = &z + &b.scale(sample::complex_normal(rng));
            }
            zs.push(z);
        }
        let mut runs = Vec::with_capacity(zs.len());
        for z in &zs {
            let r = plan.run(z)?;
            runs.push((r.holds && r.converged, r.z_y / r.y_norm_bound));
        }
        Ok::<_, Error>((plan.epsilon() * plan.t(), runs))
    });
    let mut t = Tally::new(13);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((contraction, runs)) => {
                t.max("max_epsilon_t", contraction);
                for (k, (ok, ratio)) in runs.into_iter().enumerate() {
                    t.max("max_norm_ratio_to_bound", ratio);
                    t.case(ok, || format!("ensemble {i} element {k}: ratio to bound {ratio}"));
                }
            }
            Err(e) => t.case(false, || format!("ensemble {i}: {e}")),
        }
    }
    t.finish()
}

fn quasinorm_bounds(cfg: &RunConfig) -> CriterionReport {
    let tol = cfg.tol("quasinorm.rel", 1e-9);
    let ps = [1.0, 0.5, 0.25];
    let out = cases(cfg, 14, 50 * ps.len(), |i, rng| {
        let p = ps[i % ps.len()];
        let terms = (0..5).map(|_| (sample::gaussian_matrix(rng, 4, 4), sample::gaussian_matrix(rng, 4, 4))).collect();
        let op = ElementaryOperator::new((4, 4), terms)?;
        let sp = spectrum(&elem_matrix(&op))?;
        let lambda = sp.eigenvalues.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
        let r = eigenspace_ideal_check(&op, lambda, p, tol)?;
        let worst = r
            .entries
            .iter()
            .map(|e| (e.p_norm_lhs / e.p_norm_rhs).max(e.est_lhs / e.est_rhs))
            .fold(0.0, f64::max);
        Ok::<_, Error>((p, r.p_norm_holds && r.est_holds, worst))
    });
    let mut t = Tally::new(14);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((p, ok, worst)) => {
                t.max("max_lhs_over_rhs", worst);
                t.case(ok, || format!("case {i} p {p}: lhs/rhs {worst}"));
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

fn riesz(cfg: &RunConfig) -> CriterionReport {
    let tol = cfg.tol("riesz.residual", 1e-8);
    let out = cases(cfg, 15, 100, |i, rng| {
        let n = 2 + i % 5;
        let inner = 1 + (i / 5) % (n - 1);
        // cluster in |z| < 0.5, the rest in 2.5 < |z| < 3.5
        let mut tri = sample::upper_triangular(rng, n, true).scale_real(0.5);
        for k in 0..n {
            let r = if k < inner { sample::uniform(rng, 0.0, 0.5) } else { sample::uniform(rng, 2.5, 3.5) };
            tri[(k, k)] = sample::unit_phase(rng) * r;
        }
        let u = sample::unitary(rng, n);
        let a = &(&u * &tri) * &u.adjoint();
        let center = C64::new(0.0, 0.0);
        let p = riesz_projection(&a, &Contour::circle(center, 1.5)?)?;
        let idem = (&(&p * &p) - &p).max_abs();
        let comm = (&(&p * &a) - &(&a * &p)).max_abs();
        let rank = singular_values(&p).iter().filter(|&&s| s > 0.5).count();
        let enclosed = spectrum(&a)?.count_inside(center, 1.5);
        Ok::<_, Error>((idem, comm, rank, enclosed))
    });
    let mut t = Tally::new(15);
    for (i, r) in out.into_iter().enumerate() {
        match r {
            Ok((idem, comm, rank, enclosed)) => {
                t.max("max_idempotency_residual", idem);
                t.max("max_commutator_residual", comm);
                t.case(idem <= tol && comm <= tol && rank == enclosed, || {
                    format!("case {i}: idempotency {idem:e} commutator {comm:e} rank {rank} enclosed {enclosed}")
                });
            }
            Err(e) => t.case(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

/// Criteria cheap enough to run twice inside the determinism check.
const REPLAYED: [&str; 6] = ["jsr", "trace", "inclusion", "engel", "quasinorm", "riesz"];

fn determinism(cfg: &RunConfig) -> CriterionReport {
    let names: Vec<String> = REPLAYED.iter().map(|s| s.to_string()).collect();
    let render = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let report = pool.install(|| run_suite(cfg, &names))?;
        Ok(crate::io::to_json(&report))
    };
    let mut t = Tally::new(16);
    let runs: Vec<Result<String, String>> = [1usize, 4, 4].par_iter().map(|&n| render(n)).collect();
    match (&runs[0], &runs[1], &runs[2]) {
        (Ok(a), Ok(b), Ok(c)) => {
            t.set("report_bytes", a.len() as f64);
            t.case(a == b, || "single-threaded and parallel reports differ".to_owned());
            t.case(b == c, || "two parallel reports differ".to_owned());
        }
        _ => {
            let e = runs.iter().find_map(|r| r.as_ref().err()).cloned().unwrap_or_default();
            t.case(false, || e);
        }
    }
    t.finish()
}
