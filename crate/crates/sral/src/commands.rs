//! Subcommand implementations. Each returns the text to emit and an exit
//! code; the binary only parses arguments and writes the output.

use std::path::Path;

use sral_core::elementary::{elem_matrix, elem_spectrum, elem_trace, spectral_inclusion_check, strong_engel_check, ElementaryOperator};
use sral_core::families::{jsr_bracket, tsr_bracket_with, JsrOptions, TsrOptions};
use sral_core::linalg::{riesz_projection, spectrum, Contour};
use sral_core::pair::{spectral_complement, OrderedPairNorm, SeriesPlan};
use sral_core::triangular::{product_decay, triangularize};
use sral_core::{CMatrix, Error, C64};

use crate::io::{load, to_json, AlgebraJson, ChainJson, ElemJson, FamilyJson, IoError, MatrixJson};
use crate::report::{
    BracketReport, EngelReport, InclusionCheckReport, NotNilReport, PairElementReport, PairInputs, PairRunReport,
    SpectrumReport, TraceReport,
};
use crate::verify::{contracting_plan, run_suite, RunConfig, CRITERIA};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Input = 2,
    Budget = 3,
    /// A hypothesis or a verification failed; the report is still written.
    Hypothesis = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CommandError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Io(_) | Self::Usage(_) => ExitCode::Input,
            Self::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &Error) -> ExitCode {
    match e {
        Error::BudgetExceeded { .. } => ExitCode::Budget,
        Error::RadiusNotBelowOne { .. }
        | Error::IdealNotNil { .. }
        | Error::NotNilFamily { .. }
        | Error::RadicalHypothesisViolated { .. }
        | Error::YNotInvariant
        | Error::NotSurjectiveOnSubspace { .. }
        | Error::ContractionFails { .. }
        | Error::RemainderTooLarge { .. }
        | Error::LambdaNotInSpectrum { .. }
        | Error::EigenvalueOnContour { .. } => ExitCode::Hypothesis,
        _ => ExitCode::Input,
    }
}

/// Text to write plus the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub code: ExitCode,
}

impl Output {
    fn json<T: serde::Serialize>(value: &T, ok: bool) -> Self {
        Self {
            text: to_json(value),
            code: if ok { ExitCode::Success } else { ExitCode::Hypothesis },
        }
    }
}

pub type CommandResult = Result<Output, CommandError>;

pub fn jsr(family: &Path, delta: f64, budget: u64) -> CommandResult {
    let f = load(family, FamilyJson::to_family)?;
    let b = jsr_bracket(&f.as_bounded(), &JsrOptions { delta, budget })?;
    Ok(Output {
        text: to_json(&BracketReport::from(&b)),
        code: if b.certified { ExitCode::Success } else { ExitCode::Budget },
    })
}

pub fn tsr(family: &Path, depth: usize, budget: u64, seed: u64) -> CommandResult {
    let f = load(family, FamilyJson::to_family)?;
    let opts = TsrOptions {
        budget,
        seed,
        ..TsrOptions::default()
    };
    let b = tsr_bracket_with(&f, depth, &opts)?;
    Ok(Output::json(&BracketReport::from(&b), true))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemAction {
    Spec,
    Trace,
    Engel,
    Inclusion,
}

/// Without a second operator, `inclusion` splits the file into its first
/// term (`u`) and the remaining terms (`v`).
pub fn elem(op: &Path, action: ElemAction, with: Option<&Path>, tol: f64) -> CommandResult {
    let t = load(op, ElemJson::to_operator)?;
    match action {
        ElemAction::Spec => {
            let sp = elem_spectrum(&t)?;
            Ok(Output::json(&SpectrumReport::new(&sp.eigenvalues), true))
        }
        ElemAction::Trace => {
            let r = TraceReport {
                trace: crate::io::complex_json(elem_trace(&t)),
                lift_trace: crate::io::complex_json(elem_matrix(&t).trace()),
            };
            Ok(Output::json(&r, true))
        }
        ElemAction::Engel => {
            let r = strong_engel_check(&t, tol)?;
            Ok(Output::json(&EngelReport::from(&r), r.hypothesis_satisfied))
        }
        ElemAction::Inclusion => {
            let (u, v) = match with {
                Some(path) => (t, load(path, ElemJson::to_operator)?),
                None => split_first(&t)?,
            };
            let r = spectral_inclusion_check(&u, &v, tol)?;
            Ok(Output::json(&InclusionCheckReport::from(&r), r.hypothesis_satisfied))
        }
    }
}

fn split_first(t: &ElementaryOperator) -> Result<(ElementaryOperator, ElementaryOperator), CommandError> {
    if t.len() < 2 {
        return Err(CommandError::Usage("inclusion needs --with or an operator with at least two terms".into()));
    }
    let flags = t.compact_flags();
    let u = ElementaryOperator::with_flags(t.dims(), t.terms()[..1].to_vec(), flags[..1].to_vec())?;
    let v = ElementaryOperator::with_flags(t.dims(), t.terms()[1..].to_vec(), flags[1..].to_vec())?;
    Ok((u, v))
}

pub fn riesz(matrix: &Path, center: C64, radius: f64) -> CommandResult {
    let a = load(matrix, MatrixJson::to_matrix)?;
    let p = riesz_projection(&a, &Contour::circle(center, radius)?)?;
    Ok(Output::json(&MatrixJson::from_matrix(&p), true))
}

pub fn triangularize_cmd(gens: &Path) -> CommandResult {
    let g = load(gens, AlgebraJson::generators)?;
    match triangularize(&g) {
        Ok(chain) => Ok(Output::json(&ChainJson::from_chain(&chain), true)),
        Err(Error::NotNilFamily { radius }) => {
            let r = NotNilReport {
                nil: false,
                spectral_radius: radius,
                message: Error::NotNilFamily { radius }.to_string(),
            };
            Ok(Output::json(&r, false))
        }
        Err(e) => Err(e.into()),
    }
}

/// CSV with columns `m, count, max_norm, root`.
pub fn decay(k: &Path, f: Option<&Path>, lambda: f64, m_max: usize, budget: u64) -> CommandResult {
    let members = |path: &Path| load(path, FamilyJson::to_family).map(|fam| fam.members().to_vec());
    let kk = members(k)?;
    let ff = match f {
        Some(p) => members(p)?,
        None => Vec::new(),
    };
    let curve = product_decay(&kk, &ff, lambda, m_max, budget)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CommandError::Usage(e.to_string());
    w.write_record(["m", "count", "max_norm", "root"]).map_err(csv_err)?;
    for p in &curve.points {
        w.write_record([p.m.to_string(), p.count.to_string(), p.max_norm.to_string(), p.root.to_string()])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CommandError::Usage(e.to_string()))?;
    Ok(Output {
        text: String::from_utf8(bytes).expect("csv output is utf-8"),
        code: ExitCode::Success,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairArgs<'a> {
    pub op: &'a Path,
    pub p: f64,
    /// Power `m`; the first contracting power in `1..=8` when absent.
    pub power: Option<usize>,
    pub center: C64,
    /// Radius of the excluded disc; half the spectral radius when absent.
    pub radius: Option<f64>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    /// Elements to test; the subspace basis when absent.
    pub z: Option<&'a Path>,
}

/// Runs the series reconstruction on the spectral subspace of the lift
/// outside the given disc.
pub fn pair(args: &PairArgs<'_>) -> CommandResult {
    let op = load(args.op, ElemJson::to_operator)?;
    let pair = OrderedPairNorm::new(op.dims(), args.p)?;
    let radius = match args.radius {
        Some(r) => r,
        None => 0.5 * spectrum(&elem_matrix(&op))?.radius(),
    };
    let basis = spectral_complement(&op, args.center, radius)?;
    if basis.is_empty() {
        return Err(CommandError::Usage("the spectral subspace outside the disc is zero".into()));
    }
    let plan = match args.power {
        Some(m) => SeriesPlan::new(&op, m, &basis, args.t, args.epsilon, pair)?,
        None if args.t.is_none() && args.epsilon.is_none() => contracting_plan(&op, &basis, pair)?,
        None => return Err(CommandError::Usage("--t and --epsilon need --power".into())),
    };
    let zs: Vec<CMatrix> = match args.z {
        Some(path) => vec![load(path, MatrixJson::to_matrix)?],
        None => basis.clone(),
    };
    let elements = zs
        .iter()
        .map(|z| plan.run(z).map(|r| PairElementReport::from(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = elements.iter().all(|e| e.verdict && e.converged);
    let report = PairRunReport {
        inputs: PairInputs {
            operator: args.op.display().to_string(),
            p: args.p,
            power: plan.power(),
            subspace_dimension: basis.len(),
            center: crate::io::complex_json(args.center),
            radius,
            t: plan.t(),
            epsilon: plan.epsilon(),
        },
        elements,
        verdict,
    };
    Ok(Output::json(&report, verdict))
}

/// The JSON report, and a pass/fail table for the terminal.
pub fn verify(cfg: &RunConfig, suites: &[String]) -> Result<(Output, String), CommandError> {
    let report = run_suite(cfg, suites).map_err(CommandError::Usage)?;
    let mut table = String::new();
    for c in &report.criteria {
        let summary = CRITERIA[usize::from(c.id) - 1].summary;
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!("C{:<2} {:<14} {verdict}  {summary}\n", c.id, c.name));
    }
    let out = Output::json(&report, report.passed);
    Ok((out, table))
}
