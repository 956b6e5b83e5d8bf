use crate::error::Result;
use crate::fem::{assemble_phasefield, qnorm_element, qnorm_gram, Discretization, PhaseInputs, QNorm};
use crate::linalg::solve_saddle;
use crate::mesh::TriMesh;
use crate::model::MaterialParams;
use crate::tintegrate::{AlphaParams, FieldState};

/// Residual representation of the phase-field increment problem in the
/// bubble-enriched space.
#[derive(Debug, Clone)]
pub struct SpatialEstimate {
    /// Coefficients of `ε_h` on the free enriched dofs (vertices, then bubbles).
    pub eps: Vec<f64>,
    /// Squared element-local norms; they sum to `norm²`.
    pub contributions: Vec<f64>,
    pub norm: f64,
    pub outer_iterations: usize,
}

impl SpatialEstimate {
    /// Element-local norms, the quantity used for marking.
    pub fn element_errors(&self) -> Vec<f64> {
        self.contributions.iter().map(|c| c.sqrt()).collect()
    }
}

/// Solves the residual-minimization saddle problem for the step from `state`
/// (at `t_n`) with the trial history of `history`.
pub fn spatial_estimate(
    mesh: &TriMesh,
    disc: &Discretization,
    params: &MaterialParams,
    alpha: &AlphaParams,
    dt: f64,
    state: &FieldState,
    history: &[f64],
    rtol: f64,
) -> Result<SpatialEstimate> {
    let qn = QNorm::new(params, alpha, dt);
    let inputs = PhaseInputs { phi_n: &state.phi, phidot_n: &state.phidot, history };
    let sys = assemble_phasefield(mesh, disc, params, alpha, dt, inputs, true)?;
    let gram = qnorm_gram(mesh, disc, &qn, true)?;
    let n_p1 = disc.phi.dofs.n_free();
    let b = sys.matrix.columns_prefix(n_p1);
    let sol = solve_saddle(&gram, &b, &sys.rhs, rtol)?;

    let dofs = &disc.enriched.dofs;
    let full = dofs.expand(&sol.eps);
    let mut contributions = Vec::with_capacity(mesh.n_triangles());
    for (t, geo) in disc.geometry.iter().enumerate() {
        let g = qnorm_element(geo, &qn, true);
        let d = disc.enriched.element_full_dofs(t);
        let e = [full[d[0]], full[d[1]], full[d[2]], full[d[3]]];
        let mut s = 0.0;
        for a in 0..4 {
            for c in 0..4 {
                s += e[a] * g[a * 4 + c] * e[c];
            }
        }
        contributions.push(s.max(0.0));
    }
    let norm = gram.quadratic_form(&sol.eps).max(0.0).sqrt();
    Ok(SpatialEstimate { eps: sol.eps, contributions, norm, outer_iterations: sol.outer_iterations })
}

/// `‖φ‖` in the time-augmented norm on the P1 space.
pub fn phase_qnorm(
    mesh: &TriMesh,
    disc: &Discretization,
    params: &MaterialParams,
    alpha: &AlphaParams,
    dt: f64,
    phi: &[f64],
) -> Result<f64> {
    let qn = QNorm::new(params, alpha, dt);
    let g = qnorm_gram(mesh, disc, &qn, false)?;
    Ok(g.quadratic_form(&disc.phi.dofs.restrict(phi)).max(0.0).sqrt())
}
