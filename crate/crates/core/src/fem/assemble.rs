use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{
    bubble_gradient, bubble_value, AssembledSystem, DofMap, ElementGeometry, FieldKind, QNorm, Space, N_QUAD,
    QUADRATURE,
};
use crate::error::{Error, Result};
use crate::linalg::SparseSym;
use crate::mesh::{BoundaryTag, TriMesh};
use crate::model::{spectral_split, split_stress, split_tangents, MaterialParams, StressSplit, Sym2};
use crate::tintegrate::{AlphaParams, FieldState};

/// External loading: a normal traction on the Neumann edges, positive in
/// tension.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Loads {
    pub traction: f64,
}

/// Per-mesh data reused by every assembly on that mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh_id: u64,
    pub geometry: Vec<ElementGeometry>,
    pub u: Space,
    pub phi: Space,
    pub enriched: Space,
    /// Undegraded element stiffness, row-major 6×6.
    k0: Vec<[f64; 36]>,
    /// External force on the full displacement numbering.
    pub f_ext: Vec<f64>,
    u_mass: SparseSym,
    phi_mass: SparseSym,
}

impl Discretization {
    pub fn new(mesh: &TriMesh, params: &MaterialParams, loads: Loads) -> Result<Self> {
        Self::with_phase_constraints(mesh, params, loads, &BTreeSet::new())
    }

    /// As [`Discretization::new`], with the phase field held fixed at the
    /// listed vertices.
    pub fn with_phase_constraints(
        mesh: &TriMesh,
        params: &MaterialParams,
        loads: Loads,
        phi_fixed: &BTreeSet<usize>,
    ) -> Result<Self> {
        params.validate()?;
        let u_fixed: BTreeSet<usize> = mesh
            .boundary()
            .iter()
            .filter(|(_, t)| **t == BoundaryTag::Dirichlet)
            .flat_map(|((a, b), _)| [*a, *b])
            .collect();
        let geometry: Vec<ElementGeometry> =
            (0..mesh.n_triangles()).map(|t| ElementGeometry::new(mesh.corners(t))).collect();
        let u = Space::new(mesh, DofMap::new(FieldKind::Vector, mesh, &u_fixed));
        let phi = Space::new(mesh, DofMap::new(FieldKind::Scalar, mesh, phi_fixed));
        let enriched = Space::new(mesh, DofMap::new(FieldKind::Enriched, mesh, phi_fixed));
        let c = params.elasticity_voigt();
        let k0 = geometry.iter().map(|g| element_stiffness(g, &c)).collect();
        let f_ext = external_force(mesh, params, loads);

        let mut u_mass = u.zeros();
        let mut phi_mass = phi.zeros();
        for (t, g) in geometry.iter().enumerate() {
            u.scatter_matrix(&mut u_mass, t, &vector_mass(g.area * params.rho0));
            phi.scatter_matrix(&mut phi_mass, t, &scalar_mass(g.area));
        }
        Ok(Self { mesh_id: mesh.id(), geometry, u, phi, enriched, k0, f_ext, u_mass, phi_mass })
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    /// `ρ₀`-weighted mass matrix on the free displacement dofs.
    pub fn u_mass(&self) -> &SparseSym {
        &self.u_mass
    }

    /// Unweighted mass matrix on the free phase-field dofs.
    pub fn phi_mass(&self) -> &SparseSym {
        &self.phi_mass
    }

    fn check(&self, mesh: &TriMesh) -> Result<()> {
        if mesh.id() != self.mesh_id {
            return Err(Error::InvalidParameter("discretization built for a different mesh".into()));
        }
        Ok(())
    }
}

fn element_stiffness(g: &ElementGeometry, c: &[[f64; 3]; 3]) -> [f64; 36] {
    let b = strain_matrix(g);
    let mut k = [0.0; 36];
    for a in 0..6 {
        let cb: [f64; 3] = [0, 1, 2].map(|i| (0..3).map(|j| c[i][j] * b[j][a]).sum());
        for bb in 0..6 {
            k[a * 6 + bb] = g.area * (0..3).map(|i| b[i][bb] * cb[i]).sum::<f64>();
        }
    }
    k
}

/// Voigt strain-displacement matrix, 3×6.
fn strain_matrix(g: &ElementGeometry) -> [[f64; 6]; 3] {
    let mut b = [[0.0; 6]; 3];
    for i in 0..3 {
        let [gx, gy] = g.grad[i];
        b[0][2 * i] = gx;
        b[1][2 * i + 1] = gy;
        b[2][2 * i] = gy;
        b[2][2 * i + 1] = gx;
    }
    b
}

fn scalar_mass(area: f64) -> [f64; 9] {
    let mut m = [area / 12.0; 9];
    for i in 0..3 {
        m[4 * i] = area / 6.0;
    }
    m
}

fn vector_mass(scale: f64) -> [f64; 36] {
    let mut m = [0.0; 36];
    for a in 0..3 {
        for b in 0..3 {
            let v = if a == b { scale / 6.0 } else { scale / 12.0 };
            m[(2 * a) * 6 + 2 * b] = v;
            m[(2 * a + 1) * 6 + 2 * b + 1] = v;
        }
    }
    m
}

/// Constant strain of triangle `t` for the full displacement vector `u`.
pub fn element_strain(mesh: &TriMesh, g: &ElementGeometry, t: usize, u: &[f64]) -> Sym2 {
    let tri = mesh.triangles()[t];
    let (ux0, uy0) = (u[2 * tri[0]], u[2 * tri[0] + 1]);
    let mut e = Sym2::default();
    for k in 1..3 {
        let (dx, dy) = (u[2 * tri[k]] - ux0, u[2 * tri[k] + 1] - uy0);
        let [gx, gy] = g.grad[k];
        e.xx += gx * dx;
        e.yy += gy * dy;
        e.xy += 0.5 * (gy * dx + gx * dy);
    }
    e
}

/// Tensile energy density per element.
pub fn tensile_energy(mesh: &TriMesh, disc: &Discretization, u: &[f64], params: &MaterialParams) -> Vec<f64> {
    let (l, m) = (params.lambda_2d(), params.mu);
    disc.geometry
        .iter()
        .enumerate()
        .map(|(t, g)| spectral_split(element_strain(mesh, g, t, u), l, m).psi_plus)
        .collect()
}

/// Traction and body-force load on the full displacement numbering.
pub fn external_force(mesh: &TriMesh, params: &MaterialParams, loads: Loads) -> Vec<f64> {
    let mut f = vec![0.0; 2 * mesh.n_vertices()];
    let v = mesh.vertices();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let w = params.rho0 * mesh.area(t) / 3.0;
        for &i in tri {
            f[2 * i] += w * params.body_force[0];
            f[2 * i + 1] += w * params.body_force[1];
        }
        if loads.traction == 0.0 {
            continue;
        }
        for k in 0..3 {
            let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            if mesh.boundary().get(&crate::mesh::edge_key(a, b)) != Some(&BoundaryTag::Neumann) {
                continue;
            }
            // counter-clockwise edge a→b: outward normal times length is (dy, −dx)
            let (dx, dy) = (v[b][0] - v[a][0], v[b][1] - v[a][1]);
            let (fx, fy) = (0.5 * loads.traction * dy, -0.5 * loads.traction * dx);
            for i in [a, b] {
                f[2 * i] += fx;
                f[2 * i + 1] += fy;
            }
        }
    }
    f
}

/// Element average of `g_eff` over the quadrature points.
fn mean_degradation(params: &MaterialParams, phi: [f64; 3]) -> f64 {
    QUADRATURE.iter().map(|(l, w)| w * params.g_eff(l[0] * phi[0] + l[1] * phi[1] + l[2] * phi[2])).sum()
}

/// Momentum increment system on the free displacement dofs.
///
/// `phi` is the current phase-field iterate, `state` holds the kinematics
/// at the start of the step.
pub fn assemble_momentum<'a>(
    mesh: &TriMesh,
    disc: &'a Discretization,
    phi: &[f64],
    params: &MaterialParams,
    alpha: &AlphaParams,
    dt: f64,
    state: &FieldState,
) -> Result<AssembledSystem<'a>> {
    disc.check(mesh)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    let c = alpha.momentum_factor(dt);
    let s = alpha.beta_c * dt * dt / alpha.am_c;
    let ca = alpha.am_c / (2.0 * alpha.beta_c) - 1.0;
    let cv = alpha.am_c / (alpha.beta_c * dt);
    let (l, m) = (params.lambda_2d(), params.mu);
    let (u, v, a) = (&state.u, &state.v, &state.a);

    let locals: Vec<([f64; 36], [f64; 6])> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let geo = &disc.geometry[t];
            let tri = mesh.triangles()[t];
            let gbar = mean_degradation(params, [phi[tri[0]], phi[tri[1]], phi[tri[2]]]);
            let mut ue = [0.0; 6];
            let mut we = [0.0; 6];
            for (k, &i) in tri.iter().enumerate() {
                for d in 0..2 {
                    ue[2 * k + d] = u[2 * i + d];
                    we[2 * k + d] = ca * a[2 * i + d] + cv * v[2 * i + d];
                }
            }
            let me = vector_mass(geo.area * params.rho0);
            let (ke, fint) = match params.stress_split {
                StressSplit::Full => {
                    let mut ke = disc.k0[t];
                    ke.iter_mut().for_each(|x| *x *= gbar);
                    let mut fint = [0.0; 6];
                    for r in 0..6 {
                        fint[r] = (0..6).map(|q| ke[r * 6 + q] * ue[q]).sum();
                    }
                    (ke, fint)
                }
                StressSplit::TensionOnly => {
                    let eps = element_strain(mesh, geo, t, u);
                    let (dp, dm) = split_tangents(eps, l, m);
                    let mut d = [[0.0; 3]; 3];
                    for i in 0..3 {
                        for j in 0..3 {
                            d[i][j] = gbar * dp[i][j] + dm[i][j];
                        }
                    }
                    let (sp, sm) = split_stress(eps, l, m);
                    let sig = sp.scale(gbar).add(sm).to_array();
                    let b = strain_matrix(geo);
                    let ke = element_stiffness(geo, &d);
                    let mut fint = [0.0; 6];
                    for (r, f) in fint.iter_mut().enumerate() {
                        *f = geo.area * (0..3).map(|i| b[i][r] * sig[i]).sum::<f64>();
                    }
                    (ke, fint)
                }
            };
            let mut mat = [0.0; 36];
            let mut rhs = [0.0; 6];
            for r in 0..6 {
                let mut mw = 0.0;
                for q in 0..6 {
                    mat[r * 6 + q] = me[r * 6 + q] + c * ke[r * 6 + q];
                    mw += me[r * 6 + q] * we[q];
                }
                rhs[r] = s * (mw - fint[r]);
            }
            (mat, rhs)
        })
        .collect();

    let mut matrix = disc.u.zeros();
    let mut full = disc.f_ext.iter().map(|f| s * f).collect::<Vec<_>>();
    for (t, (mat, rhs)) in locals.iter().enumerate() {
        disc.u.scatter_matrix(&mut matrix, t, mat);
        disc.u.scatter_full(&mut full, t, rhs);
    }
    let rhs = disc.u.dofs.restrict(&full);
    Ok(AssembledSystem { matrix, rhs, dofs: &disc.u.dofs })
}

/// Phase-field data at the start of the step and the trial history.
#[derive(Debug, Clone, Copy)]
pub struct PhaseInputs<'a> {
    pub phi_n: &'a [f64],
    pub phidot_n: &'a [f64],
    /// History per quadrature point, `N_QUAD` values per triangle.
    pub history: &'a [f64],
}

/// Phase-field increment system, on the P1 space or on its bubble
/// enrichment.
pub fn assemble_phasefield<'a>(
    mesh: &TriMesh,
    disc: &'a Discretization,
    params: &MaterialParams,
    alpha: &AlphaParams,
    dt: f64,
    inputs: PhaseInputs<'_>,
    enriched: bool,
) -> Result<AssembledSystem<'a>> {
    disc.check(mesh)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    if inputs.history.len() != mesh.n_triangles() * N_QUAD {
        return Err(Error::InvalidParameter("history length does not match the mesh".into()));
    }
    let space = if enriched { &disc.enriched } else { &disc.phi };
    let nloc = space.local_size();
    let c = alpha.phase_factor(dt);
    let s = alpha.gamma_j * dt / alpha.am_j;
    let cv = params.eta * (alpha.am_j / alpha.gamma_j - 1.0);
    let ell2 = params.ell * params.ell;
    let hscale = params.ell / params.gc;

    let locals: Vec<([f64; 16], [f64; 4])> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let geo = &disc.geometry[t];
            let tri = mesh.triangles()[t];
            let pn = [inputs.phi_n[tri[0]], inputs.phi_n[tri[1]], inputs.phi_n[tri[2]]];
            let pd = [inputs.phidot_n[tri[0]], inputs.phidot_n[tri[1]], inputs.phidot_n[tri[2]]];
            let gphi = crate::model::p1_gradient(mesh.corners(t), pn);
            let mut mat = [0.0; 16];
            let mut rhs = [0.0; 4];
            for (q, (l, w)) in QUADRATURE.iter().enumerate() {
                let wa = w * geo.area;
                let phi_q = l[0] * pn[0] + l[1] * pn[1] + l[2] * pn[2];
                let pdot_q = l[0] * pd[0] + l[1] * pd[1] + l[2] * pd[2];
                let h = inputs.history[t * N_QUAD + q];
                let (_, g1, g2) = params.degradation.eval(phi_q);
                let weight = hscale * h * g2 + 1.0;
                let source = hscale * h * g1 + phi_q;
                let mut n = [l[0], l[1], l[2], 0.0];
                let mut dn = [geo.grad[0], geo.grad[1], geo.grad[2], [0.0; 2]];
                if enriched {
                    n[3] = bubble_value(*l);
                    dn[3] = bubble_gradient(*l, &geo.grad);
                }
                for a in 0..nloc {
                    for b in 0..nloc {
                        let gg = dn[a][0] * dn[b][0] + dn[a][1] * dn[b][1];
                        mat[a * nloc + b] += wa * ((params.eta + c * weight) * n[a] * n[b] + c * ell2 * gg);
                    }
                    let ggp = dn[a][0] * gphi[0] + dn[a][1] * gphi[1];
                    rhs[a] += s * wa * (n[a] * (1.0 - source) - ell2 * ggp + cv * n[a] * pdot_q);
                }
            }
            (mat, rhs)
        })
        .collect();

    let mut matrix = space.zeros();
    let mut full = vec![0.0; space.dofs.n_full()];
    for (t, (mat, rhs)) in locals.iter().enumerate() {
        space.scatter_matrix(&mut matrix, t, &mat[..nloc * nloc]);
        space.scatter_full(&mut full, t, &rhs[..nloc]);
    }
    let rhs = space.dofs.restrict(&full);
    Ok(AssembledSystem { matrix, rhs, dofs: &space.dofs })
}

/// Element Gram matrix of the time-augmented inner product, row-major with
/// 3 (P1) or 4 (enriched) local dofs.
pub fn qnorm_element(geo: &ElementGeometry, qn: &QNorm, enriched: bool) -> [f64; 16] {
    let nloc = if enriched { 4 } else { 3 };
    let (cm, ck) = (qn.mass_coefficient(), qn.stiffness_coefficient());
    let mut mat = [0.0; 16];
    for (l, w) in QUADRATURE.iter() {
        let wa = w * geo.area;
        let mut n = [l[0], l[1], l[2], 0.0];
        let mut dn = [geo.grad[0], geo.grad[1], geo.grad[2], [0.0; 2]];
        if enriched {
            n[3] = bubble_value(*l);
            dn[3] = bubble_gradient(*l, &geo.grad);
        }
        for a in 0..nloc {
            for b in 0..nloc {
                let gg = dn[a][0] * dn[b][0] + dn[a][1] * dn[b][1];
                mat[a * nloc + b] += wa * (cm * n[a] * n[b] + ck * gg);
            }
        }
    }
    mat
}

/// Gram matrix of the time-augmented phase-field inner product on the free
/// dofs of the P1 or enriched space.
pub fn qnorm_gram(mesh: &TriMesh, disc: &Discretization, qn: &QNorm, enriched: bool) -> Result<SparseSym> {
    disc.check(mesh)?;
    let space = if enriched { &disc.enriched } else { &disc.phi };
    let nloc = space.local_size();
    let mut matrix = space.zeros();
    for (t, geo) in disc.geometry.iter().enumerate() {
        let mat = qnorm_element(geo, qn, enriched);
        space.scatter_matrix(&mut matrix, t, &mat[..nloc * nloc]);
    }
    Ok(matrix)
}
