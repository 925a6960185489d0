use core::f64::consts::PI;


use super::{lu::Lu, norms::op_norm, spectrum, CMatrix, C64};
use crate::error::{Error, Result};

/// Largest node count tried before giving up on convergence.
const MAX_NODES: usize = 1 << 16;
const CAUCHY_TOL: f64 = 1e-10;

/// Circle `|z - center| = radius` discretized with `nodes` equispaced points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || nodes < 16 {
            return Err(Error::InvalidContour);
        }
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    pub fn circle(center: C64, radius: f64) -> Result<Self> {
        Self::new(center, radius, 32)
    }

    pub fn encloses(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// Trapezoid sum of `r e^{it} (z - a)^{-1}` over nodes `offset, offset+2, ...`
/// of a `2 * half`-point grid (or all nodes of a `half`-point grid when
/// `step == 1`).
fn node_sum(a: &CMatrix, gamma: &Contour, total: usize, start: usize, step: usize) -> Result<CMatrix> {
    let d = a.rows();
    let mut acc = CMatrix::zeros(d, d);
    let mut k = start;
    while k < total {
        let theta = 2.0 * PI * (k as f64) / (total as f64);
        let w = C64::from_polar(gamma.radius, theta);
        let z = gamma.center + w;
        let mut shifted = a.scale_real(-1.0);
        for i in 0..d {
            shifted[(i, i)] += z;
        }
        let lu = Lu::new(&shifted).map_err(|_| Error::SingularResolvent)?;
        let inv = lu.inverse();
        acc = &acc + &inv.scale(w);
        k += step;
    }
    Ok(acc)
}

/// Riesz projection `(1 / 2 pi i) \oint (z - a)^{-1} dz` over a circle, by
/// the trapezoid rule with node doubling until successive results differ
/// by less than 1e-10 (relative to `max(1, |p|)`).
pub fn riesz_projection(a: &CMatrix, gamma: &Contour) -> Result<CMatrix> {
    a.ensure_square()?;
    if !(gamma.radius > 0.0) || gamma.nodes < 16 {
        return Err(Error::InvalidContour);
    }
    let spec = spectrum::spectrum(a)?;
    let margin = gamma.radius * 1e-6;
    for z in &spec.eigenvalues {
        if ((z - gamma.center).norm() - gamma.radius).abs() <= margin {
            return Err(Error::EigenvalueOnContour { margin });
        }
    }
    // dz = i w dt, so (1/2 pi i) * i w * (2 pi / N) = w / N
    let mut nodes = gamma.nodes;
    let mut sum = node_sum(a, gamma, nodes, 0, 1)?;
    let mut current = sum.scale_real(1.0 / nodes as f64);
    while nodes < MAX_NODES {
        let refined = node_sum(a, gamma, 2 * nodes, 1, 2)?;
        sum = &sum + &refined;
        nodes *= 2;
        let next = sum.scale_real(1.0 / nodes as f64);
        let diff = op_norm(&(&next - &current));
        current = next;
        if diff < CAUCHY_TOL * op_norm(&current).max(1.0) {
            return Ok(current);
        }
    }
    Err(Error::QuadratureNotConverged { nodes })
}
