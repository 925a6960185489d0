use alloc::vec::Vec;

use super::{elem_matrix, ElementaryOperator};
use crate::error::{Error, Result};
use crate::linalg::{spectrum, CMatrix, SpectrumSet};

/// Operator matrix `[T_ij]` acting on `n`-tuples of `m x n` matrices by
/// `y_i = sum_j T_ij x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockElementaryOperator {
    size: usize,
    /// Row-major `size x size` blocks.
    blocks: Vec<ElementaryOperator>,
}

impl BlockElementaryOperator {
    pub fn new(size: usize, blocks: Vec<ElementaryOperator>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyFamily);
        }
        if blocks.len() != size * size {
            return Err(Error::LengthMismatch {
                left: size * size,
                right: blocks.len(),
            });
        }
        let dims = blocks[0].dims();
        for b in &blocks {
            if b.dims() != dims {
                return Err(Error::ShapeMismatch {
                    expected: dims,
                    found: b.dims(),
                });
            }
        }
        Ok(Self { size, blocks })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dims(&self) -> (usize, usize) {
        self.blocks[0].dims()
    }

    pub fn block(&self, i: usize, j: usize) -> &ElementaryOperator {
        &self.blocks[i * self.size + j]
    }
}

pub fn block_lift(b: &BlockElementaryOperator) -> CMatrix {
    let (m, n) = b.dims();
    let d = m * n;
    let mut out = CMatrix::zeros(b.size * d, b.size * d);
    for i in 0..b.size {
        for j in 0..b.size {
            out.set_block(i * d, j * d, &elem_matrix(b.block(i, j)));
        }
    }
    out
}

pub fn block_spectrum(b: &BlockElementaryOperator) -> Result<SpectrumSet> {
    spectrum(&block_lift(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elementary::elem_spectrum;
    use crate::sample;

    fn random_op(rng: &mut sample::SeededRng, k: usize) -> ElementaryOperator {
        let terms = (0..k)
            .map(|_| (sample::gaussian_matrix(rng, 2, 2), sample::gaussian_matrix(rng, 3, 3)))
            .collect();
        ElementaryOperator::new((2, 3), terms).unwrap()
    }

    #[test]
    fn single_block() {
        let mut rng = sample::rng(1);
        let t = random_op(&mut rng, 2);
        let b = BlockElementaryOperator::new(1, alloc::vec![t.clone()]).unwrap();
        assert_eq!(block_lift(&b), elem_matrix(&t));
        assert!(block_spectrum(&b).unwrap().matches(&elem_spectrum(&t).unwrap()));
    }

    #[test]
    fn diagonal_and_triangular_blocks() {
        let mut rng = sample::rng(2);
        let (t1, t2, t3) = (random_op(&mut rng, 2), random_op(&mut rng, 1), random_op(&mut rng, 3));
        let mut union = elem_spectrum(&t1).unwrap().eigenvalues;
        union.extend(elem_spectrum(&t2).unwrap().eigenvalues);
        let zero = ElementaryOperator::zero((2, 3));
        let diag = BlockElementaryOperator::new(2, alloc::vec![t1.clone(), zero.clone(), zero.clone(), t2.clone()]).unwrap();
        assert!(block_spectrum(&diag).unwrap().matches(&SpectrumSet::new(union.clone())));
        let tri = BlockElementaryOperator::new(2, alloc::vec![t1, t3.clone(), zero.clone(), t2]).unwrap();
        assert!(block_spectrum(&tri).unwrap().matches(&SpectrumSet::new(union)));

        let nil = BlockElementaryOperator::new(2, alloc::vec![zero.clone(), t3, zero.clone(), zero]).unwrap();
        let l = block_lift(&nil);
        assert!((&l * &l).is_zero());
        assert!(block_spectrum(&nil).unwrap().radius() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let a = ElementaryOperator::identity((2, 2));
        let b = ElementaryOperator::identity((2, 3));
        assert!(matches!(
            BlockElementaryOperator::new(2, alloc::vec![a.clone(), a.clone(), a.clone(), b]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(BlockElementaryOperator::new(2, alloc::vec![a]).is_err());
    }
}
