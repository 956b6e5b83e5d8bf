//! Constitutive relations of the phase-field fracture model.

mod split;

use serde::{Deserialize, Serialize};

pub use split::{psi0, spectral_split, StrainSplit, Sym2};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Residual stiffness kept in fully broken material.
pub const DEFAULT_RESIDUAL_STIFFNESS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Degradation {
    /// `g = φ²`
    Quadratic,
    /// `g = S(φ³ − φ²) + 3φ² − 2φ³`
    Cubic { s: f64 },
}

impl Degradation {
    /// `(g, g', g'')` at `phi`.
    pub fn eval(self, phi: f64) -> (f64, f64, f64) {
        match self {
            Degradation::Quadratic => (phi * phi, 2.0 * phi, 2.0),
            Degradation::Cubic { s } => {
                let p2 = phi * phi;
                let p3 = p2 * phi;
                (
                    s * (p3 - p2) + 3.0 * p2 - 2.0 * p3,
                    s * (3.0 * p2 - 2.0 * phi) + 6.0 * phi - 6.0 * p2,
                    s * (6.0 * phi - 2.0) + 6.0 - 12.0 * phi,
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kinematics {
    PlaneStrain,
    PlaneStress,
}

/// Which part of the stress the phase field degrades.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressSplit {
    /// `σ = g(φ) C:ε`
    Full,
    /// `σ = g(φ) σ⁺ + σ⁻`
    TensionOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub lambda: f64,
    pub mu: f64,
    pub rho0: f64,
    pub gc: f64,
    pub ell: f64,
    pub eta: f64,
    pub degradation: Degradation,
    pub body_force: [f64; 2],
    pub kinematics: Kinematics,
    pub stress_split: StressSplit,
    pub residual_stiffness: f64,
}

impl MaterialParams {
    /// Lamé parameters from Young's modulus and Poisson's ratio.
    pub fn from_young(e: f64, nu: f64) -> (f64, f64) {
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.mu > 0.0) {
            return bad("mu must be positive");
        }
        if !(self.lambda + self.mu > 0.0) {
            return bad("lambda + mu must be positive");
        }
        if !(self.rho0 > 0.0) {
            return bad("rho0 must be positive");
        }
        if !(self.gc > 0.0) {
            return bad("Gc must be positive");
        }
        if !(self.ell > 0.0) {
            return bad("ell must be positive");
        }
        if !(self.eta >= 0.0) {
            return bad("eta must be nonnegative");
        }
        if let Degradation::Cubic { s } = self.degradation {
            if !(s >= 0.0) {
                return bad("cubic degradation needs S >= 0");
            }
        }
        if !(0.0..1.0).contains(&self.residual_stiffness) {
            return bad("residual stiffness must lie in [0, 1)");
        }
        Ok(())
    }

    /// In-plane first Lamé parameter for the chosen kinematics.
    pub fn lambda_2d(&self) -> f64 {
        match self.kinematics {
            Kinematics::PlaneStrain => self.lambda,
            Kinematics::PlaneStress => 2.0 * self.lambda * self.mu / (self.lambda + 2.0 * self.mu),
        }
    }

    /// Degradation with residual stiffness, `(1 − k) g + k`.
    pub fn g_eff(&self, phi: f64) -> f64 {
        let k = self.residual_stiffness;
        (1.0 - k) * self.degradation.eval(phi).0 + k
    }

    /// Isotropic elasticity in Voigt form `[xx, yy, 2xy]`.
    pub fn elasticity_voigt(&self) -> [[f64; 3]; 3] {
        let (l, m) = (self.lambda_2d(), self.mu);
        [[l + 2.0 * m, l, 0.0], [l, l + 2.0 * m, 0.0], [0.0, 0.0, m]]
    }

    pub fn shear_wave_speed(&self) -> f64 {
        (self.mu / self.rho0).sqrt()
    }

    pub fn dilatational_wave_speed(&self) -> f64 {
        ((self.lambda_2d() + 2.0 * self.mu) / self.rho0).sqrt()
    }

    /// Poisson's ratio of the in-plane response.
    pub fn poisson(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }

    /// Rayleigh wave speed, `c_s (0.862 + 1.14ν) / (1 + ν)`.
    pub fn rayleigh_speed(&self) -> f64 {
        let nu = self.poisson();
        self.shear_wave_speed() * (0.862 + 1.14 * nu) / (1.0 + nu)
    }
}

/// Cauchy stress for strain `eps` at phase field `phi`, using `g_eff`.
pub fn stress(eps: Sym2, phi: f64, p: &MaterialParams) -> Sym2 {
    let g = p.g_eff(phi);
    let (l, m) = (p.lambda_2d(), p.mu);
    match p.stress_split {
        StressSplit::Full => eps.hooke(l, m).scale(g),
        StressSplit::TensionOnly => {
            let (sp, sm) = split_stress(eps, l, m);
            sp.scale(g).add(sm)
        }
    }
}

/// Tension and compression parts of the stress, `∂ψ₀±/∂ε`.
pub fn split_stress(eps: Sym2, lambda: f64, mu: f64) -> (Sym2, Sym2) {
    let s = spectral_split(eps, lambda, mu);
    let tr = eps.trace();
    let sp = Sym2::iso(lambda * tr.max(0.0)).add(s.eps_plus.scale(2.0 * mu));
    let sm = Sym2::iso(lambda * tr.min(0.0)).add(s.eps_minus.scale(2.0 * mu));
    (sp, sm)
}

/// Voigt tangents of the tension and compression stresses at `eps`, by
/// central differences.
pub fn split_tangents(eps: Sym2, lambda: f64, mu: f64) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let scale = eps.norm().max(1e-12);
    let h = 1e-6 * scale;
    let mut dp = [[0.0; 3]; 3];
    let mut dm = [[0.0; 3]; 3];
    let base = eps.to_voigt();
    for j in 0..3 {
        let mut a = base;
        let mut b = base;
        a[j] += h;
        b[j] -= h;
        let (pa, ma) = split_stress(Sym2::from_voigt(a), lambda, mu);
        let (pb, mb) = split_stress(Sym2::from_voigt(b), lambda, mu);
        let (pa, ma, pb, mb) = (pa.to_array(), ma.to_array(), pb.to_array(), mb.to_array());
        for i in 0..3 {
            dp[i][j] = (pa[i] - pb[i]) / (2.0 * h);
            dm[i][j] = (ma[i] - mb[i]) / (2.0 * h);
        }
    }
    (dp, dm)
}

/// Running maximum of the tensile energy.
pub fn update_history(h_old: f64, psi_plus: f64) -> f64 {
    h_old.max(psi_plus)
}

/// Fracture energy `∫ Gc/2 ((1 − φ)²/ℓ + ℓ|∇φ|²)` of a P1 field.
pub fn dissipation(mesh: &TriMesh, phi: &[f64], p: &MaterialParams) -> f64 {
    let mut total = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let e = [1.0 - phi[tri[0]], 1.0 - phi[tri[1]], 1.0 - phi[tri[2]]];
        let area = mesh.area(t);
        let sum = e[0] + e[1] + e[2];
        let bulk = area / 12.0 * (e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + sum * sum);
        let g = p1_gradient(mesh.corners(t), [phi[tri[0]], phi[tri[1]], phi[tri[2]]]);
        let grad = area * (g[0] * g[0] + g[1] * g[1]);
        total += 0.5 * p.gc * (bulk / p.ell + p.ell * grad);
    }
    total
}

/// Gradient of the linear interpolant of `v` on a triangle. Built from the
/// differences to the first corner so constant fields give exactly zero.
pub fn p1_gradient(c: [[f64; 2]; 3], v: [f64; 3]) -> [f64; 2] {
    let (x1, y1) = (c[1][0] - c[0][0], c[1][1] - c[0][1]);
    let (x2, y2) = (c[2][0] - c[0][0], c[2][1] - c[0][1]);
    let det = x1 * y2 - x2 * y1;
    let (d1, d2) = (v[1] - v[0], v[2] - v[0]);
    [(d1 * y2 - d2 * y1) / det, (x1 * d2 - x2 * d1) / det]
}
