use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::SummableFamily;
use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix};

/// Finitely supported element `sum_w a_w (x) w` of the l1 algebra of the
/// free semigroup with matrix coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FreeWordElement {
    pub terms: BTreeMap<Vec<usize>, CMatrix>,
}

impl FreeWordElement {
    /// `sum_i a_i (x) g_i` with one generator per expanded member.
    pub fn generators(m: &SummableFamily) -> Self {
        let terms = m
            .expanded()
            .into_iter()
            .enumerate()
            .map(|(i, a)| (alloc::vec![i], a))
            .collect();
        Self { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sum_w |a_w|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(op_norm).sum()
    }

    /// Convolution product; coefficients of equal words are added.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<usize>, CMatrix> = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                let p = a * b;
                match terms.get_mut(&w) {
                    Some(c) => *c = &*c + &p,
                    None => {
                        terms.insert(w, p);
                    }
                }
            }
        }
        Self { terms }
    }
}

/// `T(M)^n` for `T(M) = sum_i a_i (x) g_i`; its l1 norm equals `eta(M^n)`.
pub fn free_semigroup_lift(m: &SummableFamily, n: usize, budget: u64) -> Result<FreeWordElement> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be at least 1"));
    }
    let k = m.expanded_len() as u64;
    let mut words = 1u64;
    for _ in 0..n {
        words = words.saturating_mul(k);
    }
    if words > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    let g = FreeWordElement::generators(m);
    let mut acc = g.clone();
    for _ in 1..n {
        acc = acc.mul(&g);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{power_norm_table, DEFAULT_BUDGET};
    use crate::sample;

    #[test]
    fn first_power_is_eta() {
        let mut rng = sample::rng(2);
        let m = SummableFamily::new(
            alloc::vec![sample::gaussian_matrix(&mut rng, 3, 3), sample::gaussian_matrix(&mut rng, 3, 3)],
            alloc::vec![1, 2],
        )
        .unwrap();
        let t = free_semigroup_lift(&m, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.len(), 3);
        assert!((t.l1_norm() - m.eta()).abs() <= 1e-12 * m.eta());
    }

    #[test]
    fn single_member() {
        let a = CMatrix::from_real(2, 2, &[0.5, 1.0, 0.0, 0.3]).unwrap();
        let m = SummableFamily::unit(alloc::vec![a.clone()]).unwrap();
        let t = free_semigroup_lift(&m, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t.l1_norm() - op_norm(&a.pow(4))).abs() < 1e-14);
    }

    #[test]
    fn cube_of_pair() {
        let mut rng = sample::rng(8);
        let m = SummableFamily::unit(alloc::vec![sample::gaussian_matrix(&mut rng, 2, 2), sample::gaussian_matrix(&mut rng, 2, 2)]).unwrap();
        let t = free_semigroup_lift(&m, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.len(), 8);
        let eta3 = power_norm_table(&m, 3).unwrap().eta_values[2];
        assert!((t.l1_norm() - eta3).abs() <= 1e-12 * eta3);
        assert!(matches!(free_semigroup_lift(&m, 3, 7), Err(Error::BudgetExceeded { budget: 7 })));
    }
}
