//! Completely decomposable tensors `sum_k w_k v_k^{(x) m}` with explicit terms.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symtensor::SymTensor;

/// One term `weight * vector^{(x) m}` with `weight >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdTerm {
    pub weight: f64,
    pub vector: Vec<f64>,
}

/// An explicit completely decomposable tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CdDecomposition {
    pub order: usize,
    pub dim: usize,
    pub terms: Vec<CdTerm>,
}

impl CdDecomposition {
    pub fn new(order: usize, dim: usize, terms: Vec<CdTerm>) -> Result<Self> {
        for t in &terms {
            if t.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.vector.len(),
                });
            }
            if t.weight.is_nan() || t.weight < 0.0 {
                return Err(Error::NegativeWeight(t.weight));
            }
        }
        Ok(Self { order, dim, terms })
    }

    pub fn expand(&self) -> Result<SymTensor> {
        let mut acc = SymTensor::zeros(self.order, self.dim)?;
        for t in &self.terms {
            acc = acc.axpy(t.weight, &SymTensor::outer_power(&t.vector, self.order)?)?;
        }
        Ok(acc)
    }

    /// Decomposition of the Hadamard product: every pair of terms gives
    /// `w_j w'_k (v_j * v'_k)^{(x) m}` with `*` the entrywise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::ShapeMismatch {
                lhs_order: self.order,
                lhs_dim: self.dim,
                rhs_order: other.order,
                rhs_dim: other.dim,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(CdTerm {
                    weight: a.weight * b.weight,
                    vector: a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).collect(),
                });
            }
        }
        Ok(Self {
            order: self.order,
            dim: self.dim,
            terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn hadamard_of_rank_one_terms() {
        let a = CdDecomposition::new(2, 3, vec![CdTerm { weight: 2.0, vector: vec![1.0, 2.0, 3.0] }]).unwrap();
        let b = CdDecomposition::new(2, 3, vec![CdTerm { weight: 0.5, vector: vec![1.0, -1.0, 0.5] }]).unwrap();
        let h = a.hadamard(&b).unwrap().expand().unwrap();
        let direct = a.expand().unwrap().hadamard(&b.expand().unwrap()).unwrap();
        assert!(h.max_abs_diff(&direct).unwrap() < 1e-14);
    }

    #[test]
    fn rejects_negative_weight() {
        assert!(CdDecomposition::new(2, 2, vec![CdTerm { weight: -1.0, vector: vec![1.0, 0.0] }]).is_err());
    }
}
