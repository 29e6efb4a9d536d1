use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Symmetric matrix stored as upper-triangle triplets `(i, j, v)` with `i <= j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    /// Triplets may be given in either triangle; duplicates are summed and
    /// zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside a {dim}x{dim} matrix");
            *acc.entry((i.min(j), i.max(j))).or_default() += v;
        }
        let entries = acc
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((i, j), v)| (i, j, v))
            .collect();
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Number of stored upper-triangle entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `<A, T> = tr(A T)`; `T` need not be symmetric.
    pub fn inner(&self, t: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * t[(i, i)]
                } else {
                    v * (t[(i, j)] + t[(j, i)])
                }
            })
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        self.add_scaled_to(1.0, &mut m);
        m
    }

    pub fn add_scaled_to(&self, s: f64, m: &mut DMatrix<f64>) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += s * v;
            if i != j {
                m[(j, i)] += s * v;
            }
        }
    }
}

/// One block of a constraint or objective matrix.
#[derive(Clone, Debug)]
pub enum BlockData {
    Sparse(SparseSym),
    Dense(DMatrix<f64>),
}

impl BlockData {
    pub fn dim(&self) -> usize {
        match self {
            BlockData::Sparse(s) => s.dim(),
            BlockData::Dense(d) => d.nrows(),
        }
    }

    pub fn inner(&self, t: &DMatrix<f64>) -> f64 {
        match self {
            BlockData::Sparse(s) => s.inner(t),
            // A is symmetric, so tr(A T) is the entrywise dot product.
            BlockData::Dense(d) => d.dot(t),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            BlockData::Sparse(s) => s.to_dense(),
            BlockData::Dense(d) => d.clone(),
        }
    }

    pub fn add_scaled_to(&self, s: f64, m: &mut DMatrix<f64>) {
        match self {
            BlockData::Sparse(a) => a.add_scaled_to(s, m),
            BlockData::Dense(d) => *m += d * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BlockData::Sparse(s) => s.is_zero(),
            BlockData::Dense(d) => d.iter().all(|&v| v == 0.0),
        }
    }
}

/// `<A, X> = b`, with `A` given per block (absent blocks are zero).
#[derive(Clone, Debug)]
pub struct Constraint {
    pub blocks: Vec<(usize, BlockData)>,
    pub rhs: f64,
    pub label: String,
}

/// Block-diagonal standard-form SDP:
/// minimize `<C, X>` subject to `<A_k, X> = b_k`, `X >= 0`.
///
/// `offset` is added to the optimum when reporting. `barrier_weights` scale the
/// log-det barrier per block; they leave the optimum unchanged but select which
/// point of a non-unique optimal face the central path approaches.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub objective: Vec<(usize, BlockData)>,
    pub constraints: Vec<Constraint>,
    pub offset: f64,
    pub barrier_weights: Vec<f64>,
}

impl SdpProblem {
    pub fn new(
        block_dims: Vec<usize>,
        objective: Vec<(usize, BlockData)>,
        constraints: Vec<Constraint>,
        offset: f64,
    ) -> Result<Self> {
        let weights = vec![1.0; block_dims.len()];
        let p = Self {
            block_dims,
            objective,
            constraints,
            offset,
            barrier_weights: weights,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_barrier_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.barrier_weights = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.rhs).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_dims.is_empty() || self.block_dims.contains(&0) {
            return Err(Error::Parameter("block dimensions must be positive".into()));
        }
        if self.barrier_weights.len() != self.block_dims.len()
            || self.barrier_weights.iter().any(|&w| w.is_nan() || w <= 0.0)
        {
            return Err(Error::Parameter("one positive barrier weight per block required".into()));
        }
        let check = |blocks: &[(usize, BlockData)], what: &str| -> Result<()> {
            for (b, data) in blocks {
                let dim = *self.block_dims.get(*b).ok_or_else(|| {
                    Error::Parameter(format!("{what} refers to missing block {b}"))
                })?;
                if data.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: data.dim(),
                    });
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for c in &self.constraints {
            check(&c.blocks, &c.label)?;
            if c.blocks.iter().all(|(_, d)| d.is_zero()) {
                return Err(Error::Parameter(format!("constraint {} is identically zero", c.label)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_normalization_and_inner() {
        let s = SparseSym::from_triplets(3, [(1, 0, 1.0), (0, 1, 2.0), (2, 2, 0.0), (2, 2, 4.0)]);
        assert_eq!(s.entries(), &[(0, 1, 3.0), (2, 2, 4.0)]);
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        assert_eq!(s.inner(&t), 3.0 * 7.0 + 2.0);
        let d = BlockData::Dense(s.to_dense());
        assert_eq!(d.inner(&t), s.inner(&t));
    }

    #[test]
    fn rejects_zero_constraint() {
        let c = Constraint {
            blocks: vec![(0, BlockData::Sparse(SparseSym::from_triplets(2, [])))],
            rhs: 0.0,
            label: "zero".into(),
        };
        assert!(SdpProblem::new(vec![2], vec![], vec![c], 0.0).is_err());
    }
}
