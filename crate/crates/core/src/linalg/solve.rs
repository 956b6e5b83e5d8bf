use super::{axpy, dot, norm2, Cholesky, Csr, SparseSym, SymOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

enum CgOutcome {
    Converged(SolveStats),
    /// Non-positive curvature encountered: the operator is not SPD.
    Breakdown,
    MaxIter(SolveStats),
}

fn max_iterations(n: usize) -> usize {
    (10 * n).max(200)
}

/// Jacobi-preconditioned conjugate gradients. `x` holds the initial guess on
/// entry and the solution on exit.
fn pcg<A: SymOperator + ?Sized>(
    a: &A,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = a.dim();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgOutcome::Converged(SolveStats::default());
    }
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut total = 0;
    // A couple of restarts guard against drift between the recursive and
    // the true residual.
    for _restart in 0..3 {
        a.apply(x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        let mut rnorm = norm2(&r);
        if rnorm <= rtol * bnorm {
            return CgOutcome::Converged(SolveStats { iterations: total, relative_residual: rnorm / bnorm });
        }
        let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, di)| ri * di).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while total < max_iter {
            total += 1;
            a.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return CgOutcome::Breakdown;
            }
            let alpha = rz / pap;
            axpy(alpha, &p, x);
            axpy(-alpha, &ap, &mut r);
            rnorm = norm2(&r);
            if rnorm <= rtol * bnorm {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        a.apply(x, &mut ap);
        let true_res = b.iter().zip(&ap).map(|(bi, ai)| (bi - ai) * (bi - ai)).sum::<f64>().sqrt();
        if true_res <= rtol * bnorm {
            return CgOutcome::Converged(SolveStats { iterations: total, relative_residual: true_res / bnorm });
        }
        if total >= max_iter {
            return CgOutcome::MaxIter(SolveStats { iterations: total, relative_residual: true_res / bnorm });
        }
    }
    a.apply(x, &mut ap);
    let true_res = b.iter().zip(&ap).map(|(bi, ai)| (bi - ai) * (bi - ai)).sum::<f64>().sqrt();
    CgOutcome::MaxIter(SolveStats { iterations: total, relative_residual: true_res / bnorm })
}

fn jacobi(diag: &[f64]) -> Vec<f64> {
    diag.iter().map(|d| if d.abs() > 0.0 { 1.0 / d.abs() } else { 1.0 }).collect()
}

/// Solves `A x = b` for SPD `A` to `||Ax - b|| <= rtol ||b||`.
pub fn solve_spd(a: &SparseSym, b: &[f64], rtol: f64) -> Result<Vec<f64>> {
    let mut x = vec![0.0; a.dim()];
    solve_spd_from(a, b, &mut x, rtol)?;
    Ok(x)
}

/// Like [`solve_spd`] but starts from (and overwrites) `x`.
pub fn solve_spd_from(a: &SparseSym, b: &[f64], x: &mut [f64], rtol: f64) -> Result<SolveStats> {
    assert_eq!(b.len(), a.dim());
    let inv = jacobi(&a.diagonal());
    match pcg(a, &inv, b, x, rtol, max_iterations(a.dim())) {
        CgOutcome::Converged(s) => Ok(s),
        CgOutcome::MaxIter(s) => Err(Error::SolveFailure { residual: s.relative_residual, iterations: s.iterations }),
        CgOutcome::Breakdown => Err(Error::SolveFailure { residual: f64::NAN, iterations: 0 }),
    }
}

/// Symmetric, possibly indefinite solve: conjugate gradients first, MINRES
/// when CG detects non-positive curvature.
pub fn solve_sym(a: &SparseSym, b: &[f64], x: &mut [f64], rtol: f64) -> Result<SolveStats> {
    let inv = jacobi(&a.diagonal());
    let x0 = x.to_vec();
    match pcg(a, &inv, b, x, rtol, max_iterations(a.dim())) {
        CgOutcome::Converged(s) => Ok(s),
        CgOutcome::MaxIter(s) => Err(Error::SolveFailure { residual: s.relative_residual, iterations: s.iterations }),
        CgOutcome::Breakdown => {
            x.copy_from_slice(&x0);
            minres(a, &inv, b, x, rtol, max_iterations(a.dim()))
        }
    }
}

/// Preconditioned MINRES (Paige & Saunders recurrences).
fn minres(a: &SparseSym, inv_diag: &[f64], b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> Result<SolveStats> {
    let n = a.dim();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats::default());
    }
    let mut tmp = vec![0.0; n];
    for _restart in 0..3 {
        a.matvec(x, &mut tmp);
        let mut r1: Vec<f64> = b.iter().zip(&tmp).map(|(bi, ti)| bi - ti).collect();
        if norm2(&r1) <= rtol * bnorm {
            return Ok(SolveStats { iterations: 0, relative_residual: norm2(&r1) / bnorm });
        }
        let mut y: Vec<f64> = r1.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
        let beta1 = dot(&r1, &y).sqrt();
        let mut beta = beta1;
        let mut oldb = 0.0;
        let mut r2 = r1.clone();
        let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
        let (mut cs, mut sn) = (-1.0_f64, 0.0_f64);
        let mut w = vec![0.0; n];
        let mut w2 = vec![0.0; n];
        let mut v = vec![0.0; n];
        for itn in 1..=max_iter {
            let s = 1.0 / beta;
            for i in 0..n {
                v[i] = s * y[i];
            }
            a.matvec(&v, &mut y);
            if itn >= 2 {
                axpy(-beta / oldb, &r1, &mut y);
            }
            let alfa = dot(&v, &y);
            axpy(-alfa / beta, &r2, &mut y);
            std::mem::swap(&mut r1, &mut r2);
            r2.copy_from_slice(&y);
            for i in 0..n {
                y[i] = r2[i] * inv_diag[i];
            }
            oldb = beta;
            beta = dot(&r2, &y).max(0.0).sqrt();
            let oldeps = epsln;
            let delta = cs * dbar + sn * alfa;
            let gbar = sn * dbar - cs * alfa;
            epsln = sn * beta;
            dbar = -cs * beta;
            let gamma = (gbar * gbar + beta * beta).sqrt().max(f64::EPSILON);
            cs = gbar / gamma;
            sn = beta / gamma;
            let phi = cs * phibar;
            phibar *= sn;
            for i in 0..n {
                let w1 = w2[i];
                w2[i] = w[i];
                w[i] = (v[i] - oldeps * w1 - delta * w2[i]) / gamma;
                x[i] += phi * w[i];
            }
            if phibar <= 0.1 * rtol * beta1 || beta == 0.0 {
                break;
            }
        }
        a.matvec(x, &mut tmp);
        let res = b.iter().zip(&tmp).map(|(bi, ti)| (bi - ti) * (bi - ti)).sum::<f64>().sqrt();
        if res <= rtol * bnorm {
            return Ok(SolveStats { iterations: max_iter, relative_residual: res / bnorm });
        }
    }
    a.matvec(x, &mut tmp);
    let res = b.iter().zip(&tmp).map(|(bi, ti)| (bi - ti) * (bi - ti)).sum::<f64>().sqrt();
    Err(Error::SolveFailure { residual: res / bnorm, iterations: max_iter })
}

#[derive(Debug, Clone)]
pub struct SaddleSolution {
    /// Multiplier-block unknown (the error representation in the estimator).
    pub eps: Vec<f64>,
    /// Primal-block unknown.
    pub phi: Vec<f64>,
    pub outer_iterations: usize,
}

/// `B^T G^{-1} B` applied through a sparse Cholesky factor of `G`.
struct Schur<'a> {
    gram: Cholesky,
    b: &'a Csr,
}

impl Schur<'_> {
    fn gram_solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.gram.solve(rhs)
    }
}

impl SymOperator for Schur<'_> {
    fn dim(&self) -> usize {
        self.b.ncols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut bx = vec![0.0; self.b.nrows()];
        self.b.matvec(x, &mut bx);
        let z = self.gram_solve(&bx);
        self.b.matvec_transpose(&z, y);
    }
}

/// Solves `[[G, B], [B^T, 0]] [eps; phi] = [g; 0]` through the Schur
/// complement on the `phi` block.
pub fn solve_saddle(gram: &SparseSym, b: &Csr, g: &[f64], rtol: f64) -> Result<SaddleSolution> {
    assert_eq!(gram.dim(), b.nrows());
    assert_eq!(g.len(), b.nrows());
    let m = b.ncols();
    let gram_diag = gram.diagonal();
    if gram_diag.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::EstimatorFailure("Gram matrix has a non-positive diagonal".into()));
    }
    let factor =
        Cholesky::new(gram).map_err(|_| Error::EstimatorFailure("Gram matrix is not positive definite".into()))?;
    let schur = Schur { gram: factor, b };
    let precond_diag = b.weighted_column_squares(&gram_diag);
    if precond_diag.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::EstimatorFailure("constraint block has an empty column".into()));
    }
    let ginv_g = schur.gram_solve(g);
    let mut rhs = vec![0.0; m];
    b.matvec_transpose(&ginv_g, &mut rhs);
    let mut phi = vec![0.0; m];
    let outer = match pcg(&schur, &jacobi(&precond_diag), &rhs, &mut phi, rtol, max_iterations(m)) {
        CgOutcome::Converged(s) => s,
        CgOutcome::Breakdown => return Err(Error::EstimatorFailure("rank-deficient constraint block".into())),
        CgOutcome::MaxIter(s) => {
            return Err(Error::EstimatorFailure(format!(
                "Schur complement solve stalled at relative residual {:e}",
                s.relative_residual
            )))
        }
    };
    let mut bphi = vec![0.0; b.nrows()];
    b.matvec(&phi, &mut bphi);
    let resid: Vec<f64> = g.iter().zip(&bphi).map(|(gi, bi)| gi - bi).collect();
    let eps = schur.gram_solve(&resid);
    Ok(SaddleSolution { eps, phi, outer_iterations: outer.iterations })
}
