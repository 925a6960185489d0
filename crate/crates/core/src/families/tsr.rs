use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::words::{power_norm_table_with, PowerNormTable, DEFAULT_BUDGET};
use super::{family_disjoint_union, family_product, RadiusBracket, SummableFamily, Witness};
use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, CMatrix, MatrixNorm, C64};
use crate::sample;

/// Coefficient vectors are enumerated exhaustively up to this length.
pub const EXHAUSTIVE_SIGNS: usize = 12;
pub const SIGN_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TsrOptions {
    pub budget: u64,
    pub norm: MatrixNorm,
    /// Seed for the sampled coefficient vectors of long families.
    pub seed: u64,
    pub sign_samples: usize,
}

impl Default for TsrOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            norm: MatrixNorm::Operator,
            seed: 42,
            sign_samples: SIGN_SAMPLES,
        }
    }
}

pub fn tsr_bracket(m: &SummableFamily, depth: usize) -> Result<RadiusBracket> {
    tsr_bracket_with(m, depth, &TsrOptions::default())
}

/// Bracket for the tensor spectral radius.
///
/// The upper bound `min_{m <= depth} eta(M^m)^(1/m)` is rigorous because the
/// radius is an infimum over powers. Two lower bounds are combined: the
/// generalized radius `r_m` of each level (words have norm at most the word
/// sum) and `rho(sum t_i a_i)` over coefficient vectors with `|t_i| <= 1`,
/// which is exhaustive over signs for short families and otherwise samples
/// the torus (always including the all-ones vector).
pub fn tsr_bracket_with(m: &SummableFamily, depth: usize, opts: &TsrOptions) -> Result<RadiusBracket> {
    let table = power_norm_table_with(m, depth, opts.budget, opts.norm)?;
    bracket_from_table(m, &table, opts)
}

fn bracket_from_table(m: &SummableFamily, table: &PowerNormTable, opts: &TsrOptions) -> Result<RadiusBracket> {
    let (upper, upper_depth) = table.eta_upper();
    let (r, word) = table.best_radius();
    let (s, coeffs) = best_combination(m, opts)?;
    let (lower, lower_witness) = if s > r {
        (s, Witness::Coefficients(coeffs))
    } else {
        (r, Witness::Word(word.to_vec()))
    };
    Ok(RadiusBracket {
        // eigenvalues of nilpotent combinations carry O(eps^(1/d)) noise
        lower: lower.min(upper),
        upper,
        lower_witness,
        upper_depth,
        certified: true,
    })
}

/// Largest `rho(sum t_i a_i)` over the coefficient vectors tried.
pub(crate) fn best_combination(m: &SummableFamily, opts: &TsrOptions) -> Result<(f64, Vec<C64>)> {
    let a = m.expanded();
    let k = a.len();
    let one = C64::new(1.0, 0.0);
    let mut best = (0.0, vec![one; k]);
    let try_vec = |t: Vec<C64>, best: &mut (f64, Vec<C64>)| -> Result<()> {
        let r = spectral_radius(&combine(&a, &t))?;
        if r > best.0 {
            *best = (r, t);
        }
        Ok(())
    };
    if k <= EXHAUSTIVE_SIGNS {
        // rho(-x) = rho(x), so the first sign can stay fixed
        for mask in 0u32..(1u32 << (k - 1)) {
            let t = (0..k)
                .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -one } else { one })
                .collect();
            try_vec(t, &mut best)?;
        }
    } else {
        try_vec(vec![one; k], &mut best)?;
        let mut rng = sample::rng(opts.seed);
        for _ in 0..opts.sign_samples {
            let t = (0..k).map(|_| sample::unit_phase(&mut rng)).collect();
            try_vec(t, &mut best)?;
        }
    }
    Ok(best)
}

fn combine(a: &[CMatrix], t: &[C64]) -> CMatrix {
    let d = a[0].rows();
    let mut acc = CMatrix::zeros(d, d);
    for (x, &s) in a.iter().zip(t) {
        if s != C64::new(0.0, 0.0) {
            acc = &acc + &x.scale(s);
        }
    }
    acc
}

/// `sum t_i a_i` over the expanded family, for `|t_i| <= 1`.
pub fn omega_sample(m: &SummableFamily, t: &[C64]) -> Result<CMatrix> {
    let a = m.expanded();
    if t.len() != a.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: t.len(),
        });
    }
    for (index, z) in t.iter().enumerate() {
        let modulus = z.norm();
        if !(modulus <= 1.0 + 1e-12) {
            return Err(Error::CoefficientTooLarge { index, modulus });
        }
    }
    Ok(combine(&a, t))
}

/// `b_j = sum_i t_{ij} a_i` over the expanded family, where every row of `t`
/// has l1 norm at most one.
pub fn abs_t_transform(m: &SummableFamily, t: &CMatrix) -> Result<SummableFamily> {
    let a = m.expanded();
    if t.rows() != a.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: t.rows(),
        });
    }
    for row in 0..t.rows() {
        let sum: f64 = t.row(row).iter().map(|z| z.norm()).sum();
        if !(sum <= 1.0 + 1e-12) {
            return Err(Error::RowSumExceeded { row, sum });
        }
    }
    let members = (0..t.cols())
        .map(|j| {
            let col = t.column(j);
            combine(&a, &col)
        })
        .collect();
    SummableFamily::unit(members)
}

/// Truncation `M ⊔ M^2 ⊔ ... ⊔ M^{m_max}` of the geometric family together
/// with a bound on the word sum of the discarded tail.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricFamily {
    pub family: SummableFamily,
    pub m_max: usize,
    /// Upper bound on `sum_{m > m_max} eta(M^m)`.
    pub tail: f64,
    /// Upper bound on the radius of the source family.
    pub source_upper: f64,
}

/// Builds the truncated geometric family of `m`, which must have tensor
/// radius below one (certified at `check_depth`).
///
/// The tail bound uses `eta(M^(q j + r)) <= eta(M^j)^q eta(M^r)` with `j`
/// the depth minimizing `eta(M^j)^(1/j)`.
pub fn geometric_family(m: &SummableFamily, m_max: usize, check_depth: usize, opts: &TsrOptions) -> Result<GeometricFamily> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1"));
    }
    let table = power_norm_table_with(m, check_depth, opts.budget, opts.norm)?;
    let (upper, j) = table.eta_upper();
    if !(upper < 1.0) {
        return Err(Error::RadiusNotBelowOne { upper });
    }
    let e = table.eta_values[j - 1];
    let mut tail = 0.0;
    for r in 0..j {
        let c = if r == 0 { 1.0 } else { table.eta_values[r - 1] };
        let q_min = if r > m_max { 0 } else { (m_max - r) / j + 1 };
        tail += c * e.powi(q_min as i32) / (1.0 - e);
    }

    let mut count = 0u64;
    let mut size = 1u64;
    for _ in 0..m_max {
        size = size.saturating_mul(m.len() as u64);
        count = count.saturating_add(size);
    }
    if count > opts.budget {
        return Err(Error::BudgetExceeded { budget: opts.budget });
    }
    let mut power = m.clone();
    let mut family = m.clone();
    for _ in 1..m_max {
        power = family_product(&power, m)?;
        family = family_disjoint_union(&family, &power)?;
    }
    Ok(GeometricFamily {
        family,
        m_max,
        tail,
        source_upper: upper,
    })
}

/// Bracket for the radius of the untruncated geometric family.
///
/// The lower bound comes from the truncation (a subfamily). For the upper
/// bound, splitting the full family as truncation `G` plus tail `T` gives
/// `eta((G ⊔ T)^n) <= eta(G^n) + (eta(G) + eta(T))^n - eta(G)^n`.
pub fn geometric_bracket(g: &GeometricFamily, depth: usize, opts: &TsrOptions) -> Result<RadiusBracket> {
    let table = power_norm_table_with(&g.family, depth, opts.budget, opts.norm)?;
    let mut b = bracket_from_table(&g.family, &table, opts)?;
    let e1 = table.eta_values[0];
    let mut best = (f64::INFINITY, 0);
    for (i, &e) in table.eta_values.iter().enumerate() {
        let n = (i + 1) as i32;
        let bound = e + (e1 + g.tail).powi(n) - e1.powi(n);
        let root = bound.max(0.0).powf(1.0 / n as f64);
        if root < best.0 {
            best = (root, i + 1);
        }
    }
    b.upper = best.0;
    b.upper_depth = best.1;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{eta, power_norm_table};

    fn jordan(d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn scalar_family_collapses() {
        let m = SummableFamily::unit(vec![CMatrix::identity(2).scale_real(0.5)]).unwrap();
        let b = tsr_bracket(&m, 4).unwrap();
        assert!((b.lower - 0.5).abs() < 1e-15 && (b.upper - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nilpotent_block() {
        let m = SummableFamily::unit(vec![jordan(3)]).unwrap();
        let b = tsr_bracket(&m, 4).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, 0.0);
        assert_eq!(b.upper_depth, 3);
    }

    #[test]
    fn commuting_projections() {
        // mixed words vanish, so eta(M^n) = 2 for every n and the radius is 1
        let m = SummableFamily::unit(vec![CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[0.0, 1.0])]).unwrap();
        let b = tsr_bracket(&m, 6).unwrap();
        assert!((b.upper - 2f64.powf(1.0 / 6.0)).abs() < 1e-12);
        assert!((b.lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn omega_checks() {
        let m = SummableFamily::unit(vec![CMatrix::identity(2).scale_real(0.5)]).unwrap();
        let x = omega_sample(&m, &[C64::new(1.0, 0.0)]).unwrap();
        assert_eq!(spectral_radius(&x).unwrap(), 0.5);
        let z = omega_sample(&m, &[C64::new(0.0, 0.0)]).unwrap();
        assert!(z.is_zero());
        assert!(matches!(omega_sample(&m, &[C64::new(1.5, 0.0)]), Err(Error::CoefficientTooLarge { index: 0, .. })));
    }

    #[test]
    fn abs_t_identity_and_average() {
        let a1 = CMatrix::diag_real(&[1.0, 2.0]);
        let a2 = jordan(2);
        let m = SummableFamily::unit(vec![a1.clone(), a2.clone()]).unwrap();
        let n = abs_t_transform(&m, &CMatrix::identity(2)).unwrap();
        assert_eq!(n.members(), m.members());
        let half = CMatrix::from_real(2, 1, &[0.5, 0.5]).unwrap();
        let n = abs_t_transform(&m, &half).unwrap();
        assert!(n.members()[0].approx_eq(&(&a1 + &a2).scale_real(0.5), 1e-15));
        assert!(eta(&n) <= eta(&m));
        let bad = CMatrix::from_real(2, 2, &[0.7, 0.7, 0.0, 1.0]).unwrap();
        assert!(matches!(abs_t_transform(&m, &bad), Err(Error::RowSumExceeded { row: 0, .. })));
    }

    #[test]
    fn geometric_scalar() {
        for (c, expect) in [(0.5, 1.0), (0.25, 1.0 / 3.0)] {
            let m = SummableFamily::unit(vec![CMatrix::scalar(C64::new(c, 0.0))]).unwrap();
            let g = geometric_family(&m, 20, 4, &TsrOptions::default()).unwrap();
            let b = geometric_bracket(&g, 6, &TsrOptions::default()).unwrap();
            assert!(b.contains(expect, 1e-12), "{b:?}");
            assert!(b.width() < 1e-3);
        }
    }

    #[test]
    fn geometric_requires_radius_below_one() {
        let m = SummableFamily::unit(vec![CMatrix::identity(1)]).unwrap();
        assert!(matches!(
            geometric_family(&m, 5, 3, &TsrOptions::default()),
            Err(Error::RadiusNotBelowOne { .. })
        ));
    }

    #[test]
    fn geometric_nilpotent() {
        let m = SummableFamily::unit(vec![jordan(2)]).unwrap();
        let g = geometric_family(&m, 6, 3, &TsrOptions::default()).unwrap();
        assert_eq!(g.tail, 0.0);
        let b = geometric_bracket(&g, 4, &TsrOptions::default()).unwrap();
        assert_eq!(b.upper, 0.0);
    }

    #[test]
    fn frobenius_and_operator_brackets_overlap() {
        let mut rng = sample::rng(4);
        let m = SummableFamily::unit(vec![
            sample::gaussian_matrix(&mut rng, 3, 3),
            sample::gaussian_matrix(&mut rng, 3, 3),
        ])
        .unwrap();
        let op = tsr_bracket(&m, 5).unwrap();
        let fro = tsr_bracket_with(&m, 5, &TsrOptions { norm: MatrixNorm::Frobenius, ..Default::default() }).unwrap();
        assert!(op.intersects(&fro, 1e-12));
        let t = power_norm_table(&m, 5).unwrap();
        assert!(op.lower >= t.best_radius().0);
    }
}
