//! Sparse symmetric storage and the iterative solvers used by assembly and
//! by the residual-minimization estimator.

mod direct;
mod solve;
mod sparse;

pub use direct::Cholesky;
pub use solve::{solve_saddle, solve_spd, solve_spd_from, solve_sym, SaddleSolution, SolveStats};
pub use sparse::{Csr, SparseSym, SymPattern};

/// Anything that can apply a symmetric linear map.
pub trait SymOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
