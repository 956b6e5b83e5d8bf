//! Generalized-α time stepping of the coupled system with a staggered
//! (alternating) solution of the momentum and phase-field increments.

mod alpha;
mod oscillator;

pub use alpha::{alpha_params, AlphaParams};
pub use oscillator::oscillator;

use crate::error::{Error, Result};
use crate::fem::{assemble_momentum, assemble_phasefield, tensile_energy, Discretization, PhaseInputs, N_QUAD};
use crate::linalg::{solve_spd_from, solve_sym, SparseSym};
use crate::mesh::{project_history, project_nodal, TriMesh};
use crate::model::MaterialParams;

/// Primary fields at one time level. Vectors use the full numbering:
/// displacements interleaved per vertex, history per quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub phi: Vec<f64>,
    pub phidot: Vec<f64>,
    pub history: Vec<f64>,
}

impl FieldState {
    /// At rest, undamaged, with zero history.
    pub fn at_rest(mesh: &TriMesh) -> Self {
        let n = mesh.n_vertices();
        Self {
            t: 0.0,
            u: vec![0.0; 2 * n],
            v: vec![0.0; 2 * n],
            a: vec![0.0; 2 * n],
            phi: vec![1.0; n],
            phidot: vec![0.0; n],
            history: vec![0.0; mesh.n_triangles() * N_QUAD],
        }
    }

    pub fn is_consistent_with(&self, mesh: &TriMesh) -> bool {
        let n = mesh.n_vertices();
        self.u.len() == 2 * n
            && self.v.len() == 2 * n
            && self.a.len() == 2 * n
            && self.phi.len() == n
            && self.phidot.len() == n
            && self.history.len() == mesh.n_triangles() * N_QUAD
    }

    /// Transfers every field to a refinement of `old`.
    pub fn project(&self, old: &TriMesh, new: &TriMesh) -> Result<Self> {
        Ok(Self {
            t: self.t,
            u: project_nodal(old, new, &self.u, 2)?,
            v: project_nodal(old, new, &self.v, 2)?,
            a: project_nodal(old, new, &self.a, 2)?,
            phi: project_nodal(old, new, &self.phi, 1)?,
            phidot: project_nodal(old, new, &self.phidot, 1)?,
            history: project_history(old, new, &self.history, N_QUAD)?,
        })
    }
}

/// Advances the rates given the increments `⟦u⟧`, `⟦φ⟧`. The history is
/// carried over unchanged.
pub fn kinematic_update(
    state: &FieldState,
    du: &[f64],
    dphi: &[f64],
    alpha: &AlphaParams,
    dt: f64,
) -> Result<FieldState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    if du.len() != state.u.len() || dphi.len() != state.phi.len() {
        return Err(Error::InvalidParameter("increment length does not match the state".into()));
    }
    let (b, g) = (alpha.beta_c, alpha.gamma_c);
    let mut next = state.clone();
    next.t = state.t + dt;
    for i in 0..du.len() {
        let jump_a = (du[i] - dt * state.v[i] - 0.5 * dt * dt * state.a[i]) / (b * dt * dt);
        next.u[i] = state.u[i] + du[i];
        next.v[i] = state.v[i] + dt * (state.a[i] + g * jump_a);
        next.a[i] = state.a[i] + jump_a;
    }
    for i in 0..dphi.len() {
        let jump = (dphi[i] / dt - state.phidot[i]) / alpha.gamma_j;
        next.phi[i] = state.phi[i] + dphi[i];
        next.phidot[i] = state.phidot[i] + jump;
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggerOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative residual for the linear solves.
    pub solver_rtol: f64,
}

impl Default for StaggerOptions {
    fn default() -> Self {
        Self { tol: 1e-5, max_iter: 50, solver_rtol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct StaggerOutcome {
    /// Candidate state at `t + dt`, holding the trial history.
    pub state: FieldState,
    pub increment_u: Vec<f64>,
    pub increment_phi: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative displacement change per iteration (zero on the first).
    pub du_history: Vec<f64>,
    pub dphi_history: Vec<f64>,
}

fn weighted_norm(m: &SparseSym, free: &[f64]) -> f64 {
    m.quadratic_form(free).max(0.0).sqrt()
}

/// One time step: alternate momentum and phase-field increment solves until
/// both fields change by less than `opts.tol` in the mass norm.
pub fn staggered_step(
    mesh: &TriMesh,
    disc: &Discretization,
    params: &MaterialParams,
    alpha: &AlphaParams,
    dt: f64,
    state: &FieldState,
    opts: StaggerOptions,
) -> Result<StaggerOutcome> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter("stagger tolerance must be positive and max_iter at least 1".into()));
    }
    if !state.is_consistent_with(mesh) {
        return Err(Error::InvalidParameter("state does not match the mesh".into()));
    }
    let udofs = &disc.u.dofs;
    let pdofs = &disc.phi.dofs;
    let mut phi_k = state.phi.clone();
    let mut du_free = vec![0.0; udofs.n_free()];
    let mut dphi_free = vec![0.0; pdofs.n_free()];
    let mut prev_u: Option<Vec<f64>> = None;
    let mut history = state.history.clone();
    let mut du_hist = Vec::new();
    let mut dphi_hist = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let phi_mass = disc.phi_mass();
    let u_mass = disc.u_mass();

    while iterations < opts.max_iter {
        iterations += 1;
        let sys = assemble_momentum(mesh, disc, &phi_k, params, alpha, dt, state)?;
        solve_spd_from(&sys.matrix, &sys.rhs, &mut du_free, opts.solver_rtol)?;
        let du = udofs.expand(&du_free);
        let u_next: Vec<f64> = state.u.iter().zip(&du).map(|(a, b)| a + b).collect();

        let psi = tensile_energy(mesh, disc, &u_next, params);
        for (t, &p) in psi.iter().enumerate() {
            for q in 0..N_QUAD {
                let k = t * N_QUAD + q;
                history[k] = state.history[k].max(p);
            }
        }
        let inputs = PhaseInputs { phi_n: &state.phi, phidot_n: &state.phidot, history: &history };
        let psys = assemble_phasefield(mesh, disc, params, alpha, dt, inputs, false)?;
        solve_sym(&psys.matrix, &psys.rhs, &mut dphi_free, opts.solver_rtol)?;
        let dphi = pdofs.expand(&dphi_free);
        let phi_next: Vec<f64> = state.phi.iter().zip(&dphi).map(|(a, b)| a + b).collect();

        let du_rel = match &prev_u {
            None => 0.0,
            Some(p) => {
                let d: Vec<f64> = du_free.iter().zip(p).map(|(a, b)| a - b).collect();
                let un: Vec<f64> = udofs.restrict(&u_next);
                weighted_norm(u_mass, &d) / weighted_norm(u_mass, &un).max(1e-12)
            }
        };
        let dp: Vec<f64> = pdofs.restrict(&phi_next).iter().zip(pdofs.restrict(&phi_k)).map(|(a, b)| a - b).collect();
        let dphi_rel = weighted_norm(phi_mass, &dp) / weighted_norm(phi_mass, &pdofs.restrict(&phi_next)).max(1e-12);
        du_hist.push(du_rel);
        dphi_hist.push(dphi_rel);
        prev_u = Some(du_free.clone());
        phi_k = phi_next;
        if du_rel.max(dphi_rel) < opts.tol {
            converged = true;
            break;
        }
    }

    let du = udofs.expand(&du_free);
    let dphi: Vec<f64> = phi_k.iter().zip(&state.phi).map(|(a, b)| a - b).collect();
    let mut next = kinematic_update(state, &du, &dphi, alpha, dt)?;
    next.history = history;
    Ok(StaggerOutcome {
        state: next,
        increment_u: du,
        increment_phi: dphi,
        iterations,
        converged,
        du_history: du_hist,
        dphi_history: dphi_hist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_increments_only_advance_time() {
        let s = FieldState {
            t: 1.0,
            u: vec![0.0; 2],
            v: vec![0.0; 2],
            a: vec![0.0; 2],
            phi: vec![1.0],
            phidot: vec![0.0],
            history: vec![],
        };
        let a = alpha_params(0.5).unwrap();
        let n = kinematic_update(&s, &[0.0; 2], &[0.0], &a, 0.1).unwrap();
        assert!((n.t - 1.1).abs() < 1e-15);
        assert_eq!(
            (n.u.clone(), n.v.clone(), n.a.clone(), n.phi.clone()),
            (s.u.clone(), s.v.clone(), s.a.clone(), s.phi.clone())
        );
        assert!(kinematic_update(&s, &[0.0; 2], &[0.0], &a, 0.0).is_err());
    }

    #[test]
    fn quadratic_motion_is_exact() {
        // u = t², u̇ = 2t, ü = 2
        for rho in [0.0, 0.3, 0.5, 1.0] {
            let a = alpha_params(rho).unwrap();
            let (t0, dt) = (0.7, 0.05);
            let s = FieldState {
                t: t0,
                u: vec![t0 * t0],
                v: vec![2.0 * t0],
                a: vec![2.0],
                phi: vec![],
                phidot: vec![],
                history: vec![],
            };
            let t1 = t0 + dt;
            let n = kinematic_update(&s, &[t1 * t1 - t0 * t0], &[], &a, dt).unwrap();
            assert!((n.v[0] - 2.0 * t1).abs() < 1e-12);
            assert!((n.a[0] - 2.0).abs() < 1e-10);
        }
    }
}
