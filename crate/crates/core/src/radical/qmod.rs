use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::{IdealSubspace, CLOSURE_TOL};
use crate::error::{Error, Result};
use crate::families::tsr::{best_combination, TsrOptions};
use crate::families::words::word_table;
use crate::families::{RadiusBracket, SummableFamily, Witness};
use crate::linalg::CMatrix;

/// Rates `dist(a^n, J)^(1/n)` for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct QmodReport {
    pub rates: Vec<f64>,
    pub inf_rate: f64,
    /// Power attaining `inf_rate`.
    pub inf_index: usize,
    /// Pairs `(eps, n0)` with `dist(a^m, J) < eps^m` for every tabulated
    /// `m >= n0`.
    pub epsilon_certificate: Vec<(f64, usize)>,
}

impl QmodReport {
    /// Whether the table classifies `a` as quasinilpotent modulo `J`.
    pub fn in_q(&self, threshold: f64) -> bool {
        self.inf_rate <= threshold
    }

    /// Smallest `n0` such that all tabulated rates from `n0` on are below
    /// `eps`.
    pub fn certificate_for(&self, eps: f64) -> Option<usize> {
        let mut n0 = None;
        for (i, &r) in self.rates.iter().enumerate().rev() {
            if r < eps {
                n0 = Some(i + 1);
            } else {
                break;
            }
        }
        n0
    }
}

/// Rates of `a` modulo an ideal, in the Frobenius metric.
///
/// Powers are carried as `exp(log_scale) * unit` so that `n_max` in the
/// hundreds neither overflows nor underflows.
pub fn qmod_rate(a: &CMatrix, j: &IdealSubspace, n_max: usize) -> Result<QmodReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1"));
    }
    let residual = j.parent().membership_residual(a);
    if residual > CLOSURE_TOL {
        return Err(Error::NotInAlgebra { residual });
    }
    let mut rates = Vec::with_capacity(n_max);
    let mut unit = a.clone();
    let mut log_scale = 0.0;
    let mut zero = false;
    for n in 1..=n_max {
        if n > 1 && !zero {
            unit = &unit * a;
        }
        let s = unit.frobenius_norm();
        if zero || s == 0.0 {
            zero = true;
            rates.push(0.0);
            continue;
        }
        unit = unit.scale_real(1.0 / s);
        log_scale += s.ln();
        let dist = j.distance(&unit);
        rates.push(if dist == 0.0 { 0.0 } else { ((dist.ln() + log_scale) / n as f64).exp() });
    }
    let (inf_index, inf_rate) = rates
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &r)| if r < b.1 { (i + 1, r) } else { b });
    let mut report = QmodReport {
        rates,
        inf_rate,
        inf_index,
        epsilon_certificate: Vec::new(),
    };
    let candidates: Vec<f64> = if inf_rate > 0.0 {
        [1.5, 1.1, 1.01].iter().map(|f| f * inf_rate).collect()
    } else {
        alloc::vec![1e-1, 1e-3, 1e-6]
    };
    for eps in candidates {
        if let Some(n0) = report.certificate_for(eps) {
            report.epsilon_certificate.push((eps, n0));
        }
    }
    Ok(report)
}

/// Bracket for the tensor radius of the image of `m` in `A / I`.
///
/// The upper bound uses quotient word sums `sum_w dist_F(P_w, I)`; the
/// Frobenius quotient seminorm is submultiplicative, so the infimum formula
/// applies. Because `I` is nil, spectra are unchanged by the quotient map and
/// the lower bounds of the unquotiented family remain valid.
pub fn tsr_mod_ideal(m: &SummableFamily, ideal: &IdealSubspace, depth: usize, opts: &TsrOptions) -> Result<RadiusBracket> {
    for a in m.members() {
        let residual = ideal.parent().membership_residual(a);
        if residual > CLOSURE_TOL {
            return Err(Error::NotInAlgebra { residual });
        }
    }
    let radius = ideal.nil_defect();
    if radius > 1e-8 {
        return Err(Error::IdealNotNil { radius });
    }
    let residual = ideal.ideal_residual();
    if residual > CLOSURE_TOL {
        return Err(Error::ClosureViolated { residual });
    }
    // products inside the ideal up to rounding count as zero; their
    // subtrees stay inside it
    let q = |p: &CMatrix| {
        let d = ideal.distance(p);
        if d <= 1e-13 * p.frobenius_norm() {
            0.0
        } else {
            d
        }
    };
    let table = word_table(m, depth, opts.budget, &q, false)?;
    let (upper, upper_depth) = table.eta_upper();
    let (r, word) = table.best_radius();
    let (s, coeffs) = best_combination(m, opts)?;
    let (lower, lower_witness) = if s > r {
        (s, Witness::Coefficients(coeffs))
    } else {
        (r, Witness::Word(word.to_vec()))
    };
    Ok(RadiusBracket {
        lower: lower.min(upper),
        upper,
        lower_witness,
        upper_depth,
        certified: true,
    })
}
