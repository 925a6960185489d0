//! Serializable reports emitted by the subcommands.

use serde::Serialize;
use sral_core::elementary::{EngelInclusionReport, InclusionReport};
use sral_core::families::{RadiusBracket, Witness};
use sral_core::pair::SpectralSubspaceRun;
use sral_core::C64;

use crate::io::complex_json;

fn complex_list(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|&z| complex_json(z)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketReport {
    pub lower: f64,
    pub upper: f64,
    /// Member indices of the witness word; empty for other witnesses.
    pub lower_witness: Vec<usize>,
    /// Coefficients of a combination witnessing the lower bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_coefficients: Option<Vec<[f64; 2]>>,
    pub upper_depth: usize,
    pub certified: bool,
}

impl From<&RadiusBracket> for BracketReport {
    fn from(b: &RadiusBracket) -> Self {
        let (word, coeffs) = match &b.lower_witness {
            Witness::None => (Vec::new(), None),
            Witness::Word(w) => (w.clone(), None),
            Witness::Coefficients(c) => (Vec::new(), Some(complex_list(c))),
        };
        Self {
            lower: b.lower,
            upper: b.upper,
            lower_witness: word,
            lower_coefficients: coeffs,
            upper_depth: b.upper_depth,
            certified: b.certified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<[f64; 2]>,
    pub spectral_radius: f64,
}

impl SpectrumReport {
    pub fn new(eigenvalues: &[C64]) -> Self {
        Self {
            eigenvalues: complex_list(eigenvalues),
            spectral_radius: eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    /// `sum trace(a_i) trace(b_i)`.
    pub trace: [f64; 2],
    /// Trace of the Kronecker lift, for comparison.
    pub lift_trace: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngelReport {
    pub hypothesis_satisfied: bool,
    pub engel_residual: f64,
    pub bimodule_distances: Vec<f64>,
    pub max_bimodule_distance: f64,
    pub bimodule_defect: f64,
    pub bimodule_inclusion_holds: bool,
    pub algebra_distance: f64,
    pub algebra_defect: f64,
    pub algebra_inclusion_holds: bool,
}

impl From<&EngelInclusionReport> for EngelReport {
    fn from(r: &EngelInclusionReport) -> Self {
        Self {
            hypothesis_satisfied: r.hypothesis_satisfied,
            engel_residual: r.engel_residual,
            bimodule_distances: r.bimodule_distances.clone(),
            max_bimodule_distance: r.max_bimodule_distance,
            bimodule_defect: r.bimodule_defect,
            bimodule_inclusion_holds: r.bimodule_inclusion_holds,
            algebra_distance: r.algebra_distance,
            algebra_defect: r.algebra_defect,
            algebra_inclusion_holds: r.algebra_inclusion_holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionCheckReport {
    pub hypothesis_satisfied: bool,
    pub hypothesis_residual: f64,
    pub sum_distances: Vec<f64>,
    pub product_distances: Vec<f64>,
    pub max_sum_distance: f64,
    pub max_product_distance: f64,
    pub inclusions_hold: bool,
}

impl From<&InclusionReport> for InclusionCheckReport {
    fn from(r: &InclusionReport) -> Self {
        Self {
            hypothesis_satisfied: r.hypothesis_satisfied,
            hypothesis_residual: r.hypothesis_residual,
            sum_distances: r.sum_distances.clone(),
            product_distances: r.product_distances.clone(),
            max_sum_distance: r.max_sum_distance,
            max_product_distance: r.max_product_distance,
            inclusions_hold: r.inclusions_hold,
        }
    }
}

/// Written instead of a chain when the generators are not a nil family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NotNilReport {
    pub nil: bool,
    pub spectral_radius: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairInputs {
    pub operator: String,
    pub p: f64,
    pub power: usize,
    pub subspace_dimension: usize,
    pub center: [f64; 2],
    pub radius: f64,
    pub t: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairElementReport {
    pub z_x: f64,
    pub z_y: f64,
    pub bound_constant: f64,
    pub y_norm_bound: f64,
    pub partial_sum_residuals: Vec<f64>,
    pub converged: bool,
    pub verdict: bool,
}

impl From<&SpectralSubspaceRun> for PairElementReport {
    fn from(r: &SpectralSubspaceRun) -> Self {
        Self {
            z_x: r.z_x,
            z_y: r.z_y,
            bound_constant: r.bound_constant,
            y_norm_bound: r.y_norm_bound,
            partial_sum_residuals: r.partial_sum_residuals.clone(),
            converged: r.converged,
            verdict: r.holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRunReport {
    pub inputs: PairInputs,
    pub elements: Vec<PairElementReport>,
    pub verdict: bool,
}
