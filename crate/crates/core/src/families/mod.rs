//! Matrix families: the word-sum functional `eta`, tensor and joint spectral
//! radius brackets, and the family calculus.
//!
//! A word `w = (w_1, ..., w_n)` over the member indices denotes the product
//! `P_w = a_{w_1} a_{w_2} ... a_{w_n}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, MatrixNorm, C64};

mod free;
mod jsr;
pub(crate) mod tsr;
pub(crate) mod words;

pub use free::{free_semigroup_lift, FreeWordElement};
pub use jsr::{jsr_bracket, JsrOptions, DEFAULT_DELTA};
pub use tsr::{
    abs_t_transform, geometric_bracket, geometric_family, omega_sample, tsr_bracket,
    tsr_bracket_with, GeometricFamily, TsrOptions,
};
pub use words::{
    berger_wang_gap, power_norm_table, power_norm_table_with, BergerWang, PowerNormTable,
    DEFAULT_BUDGET,
};

/// Finite weighted list of square matrices of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct SummableFamily {
    dim: usize,
    members: Vec<CMatrix>,
    multiplicities: Vec<u64>,
}

impl SummableFamily {
    pub fn new(members: Vec<CMatrix>, multiplicities: Vec<u64>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if multiplicities.len() != members.len() {
            return Err(Error::LengthMismatch {
                left: members.len(),
                right: multiplicities.len(),
            });
        }
        if multiplicities.contains(&0) {
            return Err(Error::ZeroMultiplicity);
        }
        let dim = common_dim(&members)?;
        Ok(Self {
            dim,
            members,
            multiplicities,
        })
    }

    /// All multiplicities one.
    pub fn unit(members: Vec<CMatrix>) -> Result<Self> {
        let k = members.len();
        Self::new(members, alloc::vec![1; k])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[CMatrix] {
        &self.members
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Total count with multiplicity.
    pub fn expanded_len(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    /// Ordered list with every member repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<CMatrix> {
        let mut out = Vec::with_capacity(self.expanded_len());
        for (a, &m) in self.members.iter().zip(&self.multiplicities) {
            for _ in 0..m {
                out.push(a.clone());
            }
        }
        out
    }

    pub fn eta(&self) -> f64 {
        self.eta_with(MatrixNorm::Operator)
    }

    pub fn eta_with(&self, norm: MatrixNorm) -> f64 {
        self.members
            .iter()
            .zip(&self.multiplicities)
            .map(|(a, &m)| m as f64 * norm.eval(a))
            .sum()
    }

    /// The same members viewed as a bounded set (multiplicities dropped).
    pub fn as_bounded(&self) -> BoundedFamily {
        BoundedFamily {
            dim: self.dim,
            members: self.members.clone(),
        }
    }
}

/// Finite set of square matrices of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedFamily {
    dim: usize,
    members: Vec<CMatrix>,
}

impl BoundedFamily {
    pub fn new(members: Vec<CMatrix>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let dim = common_dim(&members)?;
        Ok(Self { dim, members })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[CMatrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `max_i |b_i|`.
    pub fn sup_norm(&self) -> f64 {
        self.members
            .iter()
            .map(crate::linalg::op_norm)
            .fold(0.0, f64::max)
    }
}

fn common_dim(members: &[CMatrix]) -> Result<usize> {
    let dim = members[0].ensure_square()?;
    for a in members {
        let d = a.ensure_square()?;
        if d != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: d,
            });
        }
    }
    Ok(dim)
}

/// Evidence behind a lower bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    None,
    /// A word whose product has the reported spectral radius root.
    Word(Vec<usize>),
    /// Coefficients `t` (over the expanded family) of a combination
    /// `sum t_i a_i` with the reported spectral radius.
    Coefficients(Vec<C64>),
}

/// Interval `[lower, upper]` for a spectral radius with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: Witness,
    /// Word length (or power) at which the upper bound was attained.
    pub upper_depth: usize,
    /// False when a search budget ran out before the requested precision.
    pub certified: bool,
}

impl RadiusBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }

    pub fn intersects(&self, other: &RadiusBracket, tol: f64) -> bool {
        self.lower <= other.upper + tol && other.lower <= self.upper + tol
    }
}

/// `eta(M) = sum mult_i |a_i|` in the operator norm.
pub fn eta(m: &SummableFamily) -> f64 {
    m.eta()
}

fn check_dims(m: &SummableFamily, n: &SummableFamily) -> Result<()> {
    if m.dim != n.dim {
        return Err(Error::DimMismatch {
            expected: m.dim,
            found: n.dim,
        });
    }
    Ok(())
}

/// All products `a_i b_j` with multiplicity `mult_i * mult_j`, `i`-major.
/// Equal products are kept as separate members.
pub fn family_product(m: &SummableFamily, n: &SummableFamily) -> Result<SummableFamily> {
    check_dims(m, n)?;
    let mut members = Vec::with_capacity(m.len() * n.len());
    let mut mult = Vec::with_capacity(m.len() * n.len());
    for (a, &ma) in m.members.iter().zip(&m.multiplicities) {
        for (b, &mb) in n.members.iter().zip(&n.multiplicities) {
            members.push(a * b);
            mult.push(ma * mb);
        }
    }
    SummableFamily::new(members, mult)
}

/// `M^p` as a family (`p >= 1`).
pub fn family_power(m: &SummableFamily, p: usize) -> Result<SummableFamily> {
    if p == 0 {
        return Err(Error::InvalidArgument("family power must be at least 1"));
    }
    let mut acc = m.clone();
    for _ in 1..p {
        acc = family_product(&acc, m)?;
    }
    Ok(acc)
}

pub fn family_disjoint_union(m: &SummableFamily, n: &SummableFamily) -> Result<SummableFamily> {
    check_dims(m, n)?;
    let mut members = m.members.clone();
    members.extend_from_slice(&n.members);
    let mut mult = m.multiplicities.clone();
    mult.extend_from_slice(&n.multiplicities);
    SummableFamily::new(members, mult)
}

/// Cauchy product of the expanded sequences: `c_n = sum_{i+j=n+1} a_i b_j`.
pub fn family_convolution(m: &SummableFamily, n: &SummableFamily) -> Result<SummableFamily> {
    check_dims(m, n)?;
    let a = m.expanded();
    let b = n.expanded();
    let d = m.dim;
    let mut c = alloc::vec![CMatrix::zeros(d, d); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            c[i + j] = &c[i + j] + &(ai * bj);
        }
    }
    SummableFamily::unit(c)
}

/// Entrywise sum of the expanded sequences.
pub fn family_sum(m: &SummableFamily, n: &SummableFamily) -> Result<SummableFamily> {
    check_dims(m, n)?;
    let a = m.expanded();
    let b = n.expanded();
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    SummableFamily::unit(a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

/// Whether `MN` and `NM` agree as weighted multisets of products, matching
/// each product of `MN` to an unused product of `NM` of equal weight within
/// `tol * max(1, |p|)` entrywise.
pub fn products_commute(m: &SummableFamily, n: &SummableFamily, tol: f64) -> Result<bool> {
    let mn = family_product(m, n)?;
    let nm = family_product(n, m)?;
    let mut used = alloc::vec![false; nm.len()];
    'outer: for (p, &w) in mn.members.iter().zip(&mn.multiplicities) {
        let t = tol * p.max_abs().max(1.0);
        for (k, (q, &v)) in nm.members.iter().zip(&nm.multiplicities).enumerate() {
            if !used[k] && v == w && p.approx_eq(q, t) {
                used[k] = true;
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}
