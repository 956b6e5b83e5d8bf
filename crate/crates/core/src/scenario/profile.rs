use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{assemble_phasefield, Discretization, Loads, PhaseInputs, N_QUAD};
use crate::linalg::solve_spd;
use crate::mesh::TriMesh;
use crate::model::{dissipation, MaterialParams};
use crate::tintegrate::alpha_params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub ell: f64,
    pub h: f64,
    pub n_elements: usize,
    /// Largest nodal gap to `1 − exp(−|x|/ℓ)`.
    pub linf: f64,
    /// Fracture energy per unit strip height over `Gc`.
    pub dissipation_ratio: f64,
}

/// Steady phase field on `[−10ℓ, 10ℓ]` with `φ(0) = 0` and no elastic
/// driving, solved with one increment of the phase-field system at `ρ∞ = 0`
/// and `η = 0` (which reaches the steady state exactly).
pub fn profile_1d(params: &MaterialParams, h: f64) -> Result<ProfileReport> {
    let ell = params.ell;
    let n = (20.0 * ell / h).round() as usize;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("h = {h} must divide 20 ell into an even number of cells")));
    }
    let dx = 20.0 * ell / n as f64;
    let height = dx;
    let mut vertices = Vec::with_capacity(2 * (n + 1));
    for j in 0..2 {
        for i in 0..=n {
            vertices.push([-10.0 * ell + i as f64 * dx, j as f64 * height]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (a, b, c, d) = (i, i + 1, n + 2 + i, n + 1 + i);
        triangles.push([a, b, c]);
        triangles.push([a, c, d]);
    }
    let mesh = TriMesh::new(vertices, triangles, BTreeMap::new())?;
    let mid = n / 2;
    let fixed = BTreeSet::from([mid, n + 1 + mid]);

    let mut p = *params;
    p.eta = 0.0;
    let disc = Discretization::with_phase_constraints(&mesh, &p, Loads::default(), &fixed)?;
    let alpha = alpha_params(0.0)?;
    let mut phi_n = vec![1.0; mesh.n_vertices()];
    for &v in &fixed {
        phi_n[v] = 0.0;
    }
    let zeros = vec![0.0; mesh.n_vertices()];
    let history = vec![0.0; mesh.n_triangles() * N_QUAD];
    let inputs = PhaseInputs { phi_n: &phi_n, phidot_n: &zeros, history: &history };
    // dt only scales both sides of the increment system
    let sys = assemble_phasefield(&mesh, &disc, &p, &alpha, 1.0, inputs, false)?;
    let dphi = solve_spd(&sys.matrix, &sys.rhs, 1e-13)?;
    let full = disc.phi.dofs.expand(&dphi);
    let phi: Vec<f64> = phi_n.iter().zip(&full).map(|(a, b)| a + b).collect();

    let linf = mesh
        .vertices()
        .iter()
        .zip(&phi)
        .map(|(x, v)| (v - (1.0 - (-x[0].abs() / ell).exp())).abs())
        .fold(0.0, f64::max);
    let d = dissipation(&mesh, &phi, &p) / height;
    Ok(ProfileReport { ell, h: dx, n_elements: mesh.n_triangles(), linf, dissipation_ratio: d / p.gc })
}
