use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};

use super::SparseSym;
use crate::error::{Error, Result};

/// Sparse Cholesky factor of a symmetric positive definite matrix.
pub struct Cholesky {
    n: usize,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl Cholesky {
    pub fn new(a: &SparseSym) -> Result<Self> {
        let n = a.dim();
        let entries: Vec<_> = a.lower_entries().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
            .map_err(|e| Error::InvalidParameter(format!("sparse matrix assembly: {e:?}")))?;
        let llt =
            mat.sp_cholesky(Side::Lower).map_err(|_| Error::SolveFailure { residual: f64::NAN, iterations: 0 })?;
        Ok(Self { n, llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::from_fn(self.n, |i| b[i]);
        let x = self.llt.solve(&rhs);
        (0..self.n).map(|i| x[i]).collect()
    }
}
