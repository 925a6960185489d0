//! JSON file formats and their conversion to core types.
//!
//! Complex scalars are `[re, im]` pairs. Floats are printed in shortest
//! round-trip form, so a matrix survives write and read bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sral_core::elementary::{ElementaryOperator, OperatorValuedCurve, Side};
use sral_core::families::SummableFamily;
use sral_core::radical::{algebra_closure_in, MatrixAlgebra};
use sral_core::triangular::SubspaceChain;
use sral_core::{CMatrix, C64};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
}

pub type IoResult<T> = Result<T, IoError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub dimension: usize,
    pub members: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub dimension: usize,
    pub generators: Vec<MatrixJson>,
    pub unital: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub a: MatrixJson,
    pub b: MatrixJson,
    #[serde(default)]
    pub a_compact: bool,
    #[serde(default)]
    pub b_compact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElemJson {
    pub m: usize,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub interval: [f64; 2],
    /// Values at equispaced midpoints of the interval.
    pub samples: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainJson {
    pub dimension: usize,
    /// Each subspace as a list of `d x 1` column vectors.
    pub bases: Vec<Vec<MatrixJson>>,
}

pub fn complex_json(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl MatrixJson {
    pub fn from_matrix(a: &CMatrix) -> Self {
        Self {
            rows: a.rows(),
            cols: a.cols(),
            data: (0..a.rows()).map(|i| a.row(i).iter().map(|&z| complex_json(z)).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, String> {
        if self.data.len() != self.rows {
            return Err(format!("expected {} rows, found {}", self.rows, self.data.len()));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(format!("row {i} has {} entries, expected {}", row.len(), self.cols));
            }
            for &[re, im] in row {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(format!("non-finite entry in row {i}"));
                }
                entries.push(C64::new(re, im));
            }
        }
        CMatrix::new(self.rows, self.cols, entries).map_err(|e| e.to_string())
    }
}

fn square(m: &MatrixJson, d: usize, what: &str) -> Result<CMatrix, String> {
    let a = m.to_matrix()?;
    if a.shape() != (d, d) {
        return Err(format!("{what} is {}x{}, expected {d}x{d}", a.rows(), a.cols()));
    }
    Ok(a)
}

impl FamilyJson {
    pub fn from_family(f: &SummableFamily) -> Self {
        Self {
            dimension: f.dim(),
            members: f.members().iter().map(MatrixJson::from_matrix).collect(),
            multiplicities: Some(f.multiplicities().to_vec()),
        }
    }

    pub fn to_family(&self) -> Result<SummableFamily, String> {
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| square(m, self.dimension, &format!("member {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let mult = self.multiplicities.clone().unwrap_or_else(|| vec![1; members.len()]);
        SummableFamily::new(members, mult).map_err(|e| e.to_string())
    }
}

impl AlgebraJson {
    pub fn generators(&self) -> Result<Vec<CMatrix>, String> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, m)| square(m, self.dimension, &format!("generator {i}")))
            .collect()
    }

    pub fn to_algebra(&self) -> Result<MatrixAlgebra, String> {
        algebra_closure_in(self.dimension, &self.generators()?, self.unital).map_err(|e| e.to_string())
    }
}

impl ElemJson {
    pub fn from_operator(t: &ElementaryOperator) -> Self {
        let (m, n) = t.dims();
        Self {
            m,
            n,
            terms: t
                .terms()
                .iter()
                .zip(t.compact_flags())
                .map(|((a, b), &(a_compact, b_compact))| TermJson {
                    a: MatrixJson::from_matrix(a),
                    b: MatrixJson::from_matrix(b),
                    a_compact,
                    b_compact,
                })
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<ElementaryOperator, String> {
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut flags = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let a = square(&t.a, self.m, &format!("term {i} coefficient a"))?;
            let b = square(&t.b, self.n, &format!("term {i} coefficient b"))?;
            terms.push((a, b));
            flags.push((t.a_compact, t.b_compact));
        }
        ElementaryOperator::with_flags((self.m, self.n), terms, flags).map_err(|e| e.to_string())
    }
}

impl CurveJson {
    pub fn to_curve(&self, side: Side) -> Result<OperatorValuedCurve<'static>, String> {
        let samples = self.samples.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>, _>>()?;
        OperatorValuedCurve::from_samples((self.interval[0], self.interval[1]), side, samples).map_err(|e| e.to_string())
    }
}

impl ChainJson {
    pub fn from_chain(c: &SubspaceChain) -> Self {
        Self {
            dimension: c.dimension(),
            bases: c
                .bases()
                .iter()
                .map(|basis| basis.iter().map(|v| MatrixJson::from_matrix(&CMatrix::column_vector(v))).collect())
                .collect(),
        }
    }

    pub fn to_chain(&self) -> Result<SubspaceChain, String> {
        let mut bases = Vec::with_capacity(self.bases.len());
        for (j, basis) in self.bases.iter().enumerate() {
            let mut vs = Vec::with_capacity(basis.len());
            for m in basis {
                let v = m.to_matrix()?;
                if v.shape() != (self.dimension, 1) {
                    return Err(format!("subspace {j}: vectors must be {}x1", self.dimension));
                }
                vs.push(v.into_data());
            }
            bases.push(vs);
        }
        SubspaceChain::from_bases(self.dimension, &bases).map_err(|e| e.to_string())
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> IoResult<T> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Reads a file and converts it, attaching the path to schema errors.
pub fn load<J: DeserializeOwned, T>(path: &Path, convert: impl FnOnce(&J) -> Result<T, String>) -> IoResult<T> {
    let j: J = read_json(path)?;
    convert(&j).map_err(|message| IoError::Schema {
        path: path.to_owned(),
        message,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> IoResult<()> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sral_core::sample;

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let mut rng = sample::rng(9);
        let a = sample::gaussian_matrix(&mut rng, 3, 4).scale_real(1.0 / 3.0);
        let text = to_json(&MatrixJson::from_matrix(&a));
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let b = back.to_matrix().unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn matrix_schema_errors() {
        let ragged = MatrixJson {
            rows: 2,
            cols: 2,
            data: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[1.0, 0.0]]],
        };
        assert!(ragged.to_matrix().is_err());
        let nan = MatrixJson {
            rows: 1,
            cols: 1,
            data: vec![vec![[f64::NAN, 0.0]]],
        };
        assert!(nan.to_matrix().is_err());
        assert!(serde_json::from_str::<MatrixJson>(r#"{"rows": 1, "cols": 1, "data": [[[1e999, 0]]]}"#).is_err());
        assert!(serde_json::from_str::<MatrixJson>(r#"{"rows": 1, "cols": 1}"#).is_err());
    }

    #[test]
    fn family_defaults_and_dimension_check() {
        let j: FamilyJson = serde_json::from_str(
            r#"{"dimension": 1, "members": [{"rows": 1, "cols": 1, "data": [[[0.5, 0]]]}]}"#,
        )
        .unwrap();
        let f = j.to_family().unwrap();
        assert_eq!(f.multiplicities(), &[1]);
        let wrong = FamilyJson { dimension: 2, ..j };
        assert!(wrong.to_family().is_err());
    }

    #[test]
    fn elem_and_chain_round_trip() {
        let mut rng = sample::rng(4);
        let t = ElementaryOperator::with_flags(
            (2, 3),
            vec![(sample::gaussian_matrix(&mut rng, 2, 2), sample::gaussian_matrix(&mut rng, 3, 3))],
            vec![(true, false)],
        )
        .unwrap();
        let back = ElemJson::from_operator(&t).to_operator().unwrap();
        assert_eq!(back, t);

        let e = |i: usize| (0..3).map(|k| C64::new(f64::from(u8::from(k == i)), 0.0)).collect::<Vec<_>>();
        let chain = SubspaceChain::from_bases(3, &[vec![e(0)], vec![e(0), e(1)]]).unwrap();
        let j = ChainJson::from_chain(&chain);
        assert_eq!(j.to_chain().unwrap().subspace_dims(), chain.subspace_dims());
    }
}
