use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;

use super::ElementaryOperator;
use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Matrix-valued function on an interval, used as the left or right
/// coefficient of an integral operator `x -> ∫ a(t) x b(t) dt`.
pub struct OperatorValuedCurve<'a> {
    sample: Box<dyn Fn(f64) -> CMatrix + 'a>,
    pub interval: (f64, f64),
    pub side: Side,
}

impl core::fmt::Debug for OperatorValuedCurve<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OperatorValuedCurve")
            .field("interval", &self.interval)
            .field("side", &self.side)
            .finish_non_exhaustive()
    }
}

impl<'a> OperatorValuedCurve<'a> {
    pub fn new(interval: (f64, f64), side: Side, sample: impl Fn(f64) -> CMatrix + 'a) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument("interval must be finite with lo < hi"));
        }
        Ok(Self {
            sample: Box::new(sample),
            interval,
            side,
        })
    }

    /// Piecewise constant curve through samples taken at the midpoints of
    /// `samples.len()` equal cells.
    pub fn from_samples(interval: (f64, f64), side: Side, samples: Vec<CMatrix>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::NodeCountZero);
        }
        let (lo, hi) = interval;
        let k = samples.len();
        Self::new(interval, side, move |t| {
            let cell = ((t - lo) / (hi - lo) * k as f64).floor();
            let i = if cell < 0.0 { 0 } else { (cell as usize).min(k - 1) };
            samples[i].clone()
        })
    }

    pub fn eval(&self, t: f64) -> CMatrix {
        (self.sample)(t)
    }

    /// Midpoint nodes and the common weight.
    fn nodes(&self, nodes: usize) -> (Vec<f64>, f64) {
        let (lo, hi) = self.interval;
        let w = (hi - lo) / nodes as f64;
        ((0..nodes).map(|k| lo + (k as f64 + 0.5) * w).collect(), w)
    }
}

/// `(sum_k w |a(t_k)|^2)^(1/2)`, the midpoint rule for the L2 norm.
pub fn discrete_l2_norm(a: &OperatorValuedCurve<'_>, nodes: usize) -> Result<f64> {
    if nodes == 0 {
        return Err(Error::NodeCountZero);
    }
    let (ts, w) = a.nodes(nodes);
    Ok(ts.iter().map(|&t| w * op_norm(&a.eval(t)).powi(2)).sum::<f64>().sqrt())
}

/// Composite midpoint discretization `sum_k L_{√w a(t_k)} R_{√w b(t_k)}` of
/// `x -> ∫ a(t) x b(t) dt`.
///
/// Splitting the weight evenly makes the projective bound of the result at
/// most the product of the discrete L2 norms (Cauchy-Schwarz).
pub fn quadrature_lift(a: &OperatorValuedCurve<'_>, b: &OperatorValuedCurve<'_>, nodes: usize) -> Result<ElementaryOperator> {
    if nodes == 0 {
        return Err(Error::NodeCountZero);
    }
    if a.side != Side::Left || b.side != Side::Right {
        return Err(Error::InvalidArgument("expected a left curve and a right curve"));
    }
    if a.interval != b.interval {
        return Err(Error::InvalidArgument("curves must share the interval"));
    }
    let (ts, w) = a.nodes(nodes);
    let s = w.sqrt();
    let mut terms = Vec::with_capacity(nodes);
    for &t in &ts {
        let (x, y) = (a.eval(t), b.eval(t));
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite);
        }
        terms.push((x.scale_real(s), y.scale_real(s)));
    }
    let dims = (terms[0].0.ensure_square()?, terms[0].1.ensure_square()?);
    ElementaryOperator::new(dims, terms)
}
