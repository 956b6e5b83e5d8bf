//! Built-in notched-plate problems and post-processing of the crack.

mod crack;
mod profile;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use crack::{crack_tip, has_branched, symmetry_metric, Notch, TipTracker};
pub use profile::{profile_1d, ProfileReport};

use crate::error::{Error, Result};
use crate::fem::{Loads, N_QUAD};
use crate::mesh::{read_mesh, BoundarySides, NotchedRectangle, TriMesh};
use crate::model::{Degradation, Kinematics, MaterialParams, StressSplit, DEFAULT_RESIDUAL_STIFFNESS};
use crate::tintegrate::FieldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// `ℓ = 5 mm` on a 512 x 256 grid.
    Full,
    /// `ℓ = 10 mm` on a 64 x 32 grid.
    Desk,
}

/// How the initial notch enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotchModel {
    /// Duplicated vertices along the notch line.
    Slit,
    /// `φ = 0` on the notch line, held by a large initial history.
    PhaseField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeshSpec {
    Structured { nx: usize, ny: usize },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub width: f64,
    pub height: f64,
    pub notch_length: f64,
    pub notch_model: NotchModel,
    /// Normal traction on the top and bottom faces, N/m.
    pub traction: f64,
    pub material: MaterialParams,
    pub mesh: MeshSpec,
    pub t_final: f64,
    pub dt0: f64,
    pub tol_max: f64,
}

/// Plate material: E = 208 MPa, ν = 0.3, ρ = 2400 kg/m³, Gc = 0.5 N/m.
fn plate_material(ell: f64, degradation: Degradation) -> MaterialParams {
    let (lambda, mu) = MaterialParams::from_young(208e6, 0.3);
    MaterialParams {
        lambda,
        mu,
        rho0: 2400.0,
        gc: 0.5,
        ell,
        eta: 1e-6,
        degradation,
        body_force: [0.0; 2],
        kinematics: Kinematics::PlaneStrain,
        stress_split: StressSplit::Full,
        residual_stiffness: DEFAULT_RESIDUAL_STIFFNESS,
    }
}

/// Notched plate, 2 m wide and 1 m tall, pulled on its long faces.
pub fn branching_preset(scale: Scale) -> Scenario {
    let (ell, nx, tol_max, name) = match scale {
        Scale::Full => (5e-3, 512, 1e-3, "branching-full"),
        Scale::Desk => (10e-3, 64, 5e-3, "branching-desk"),
    };
    Scenario {
        name: name.into(),
        width: 2.0,
        height: 1.0,
        notch_length: 0.5,
        notch_model: NotchModel::Slit,
        traction: 10e3,
        material: plate_material(ell, Degradation::Quadratic),
        mesh: MeshSpec::Structured { nx, ny: nx / 2 },
        t_final: 28e-3,
        dt0: 1e-5,
        tol_max,
    }
}

/// Cubic-degradation variant at 8 kN/m, optionally on an external mesh.
pub fn cubic_preset(mesh_file: Option<&Path>) -> Result<Scenario> {
    let mut s = branching_preset(Scale::Desk);
    s.name = "cubic".into();
    s.traction = 8e3;
    s.material.degradation = Degradation::Cubic { s: 1e-4 };
    if let Some(p) = mesh_file {
        if !p.exists() {
            return Err(Error::FileNotFound(p.to_path_buf()));
        }
        s.name = "cubic-unstructured".into();
        s.mesh = MeshSpec::File(p.to_path_buf());
        // external meshes carry the notch as a row of vertices, not a slit
        s.notch_model = NotchModel::PhaseField;
    }
    Ok(s)
}

/// Small plate with a load far below the damage threshold.
pub fn elastic_preset() -> Scenario {
    let mut s = branching_preset(Scale::Desk);
    s.name = "elastic".into();
    s.traction = 10.0;
    s.mesh = MeshSpec::Structured { nx: 16, ny: 8 };
    s.t_final = 6e-3;
    s.dt0 = 1e-5;
    s
}

/// Looks a preset up by name.
pub fn preset(name: &str) -> Result<Scenario> {
    match name {
        "branching-desk" | "desk" => Ok(branching_preset(Scale::Desk)),
        "branching-full" | "full" => Ok(branching_preset(Scale::Full)),
        "cubic" => cubic_preset(None),
        "elastic" => Ok(elastic_preset()),
        _ => Err(Error::InvalidParameter(format!("unknown scenario '{name}'"))),
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if !(self.notch_length >= 0.0 && self.notch_length < self.width) {
            return Err(Error::InvalidParameter("notch length must lie in [0, width)".into()));
        }
        if !(self.t_final > 0.0) || !(self.dt0 > 0.0) {
            return Err(Error::InvalidParameter("t_final and dt0 must be positive".into()));
        }
        if !(self.tol_max > 0.0) {
            return Err(Error::InvalidParameter("tol_max must be positive".into()));
        }
        Ok(())
    }

    pub fn loads(&self) -> Loads {
        Loads { traction: self.traction }
    }

    pub fn notch(&self) -> Notch {
        Notch { y: 0.5 * self.height, x_start: 0.0, x_end: self.notch_length }
    }

    pub fn build_mesh(&self) -> Result<TriMesh> {
        match &self.mesh {
            MeshSpec::Structured { nx, ny } => NotchedRectangle {
                width: self.width,
                height: self.height,
                notch_length: self.notch_length,
                nx: *nx,
                ny: *ny,
                slit: self.notch_model == NotchModel::Slit && self.notch_length > 0.0,
            }
            .build(BoundarySides::tension_top_bottom()),
            MeshSpec::File(p) => read_mesh(p),
        }
    }

    /// Resting, undamaged state; with a phase-field notch the notch-line
    /// vertices start broken and their elements carry a large history.
    pub fn initial_state(&self, mesh: &TriMesh) -> FieldState {
        let mut s = FieldState::at_rest(mesh);
        if self.notch_model == NotchModel::PhaseField {
            let n = self.notch();
            let tol = 1e-9 * self.width;
            let on_notch = |p: &[f64; 2]| (p[1] - n.y).abs() < tol && p[0] <= n.x_end + tol;
            for (i, p) in mesh.vertices().iter().enumerate() {
                if on_notch(p) {
                    s.phi[i] = 0.0;
                }
            }
            // keeps φ ≈ 0 there: (1 + 2ℓH/Gc) φ = 1 with φ ~ 1e-3
            let h = 1e3 * self.material.gc / self.material.ell;
            for (t, tri) in mesh.triangles().iter().enumerate() {
                let touching = tri.iter().filter(|&&v| on_notch(&mesh.vertices()[v])).count();
                if touching >= 2 {
                    s.history[t * N_QUAD..(t + 1) * N_QUAD].iter_mut().for_each(|x| *x = h);
                }
            }
        }
        s
    }

    /// Element count of the initial mesh.
    pub fn initial_element_count(&self) -> Result<usize> {
        Ok(self.build_mesh()?.n_triangles())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let p = branching_preset(Scale::Full);
        assert_eq!(p.material.gc, 0.5);
        assert_eq!((p.width, p.height, p.notch_length), (2.0, 1.0, 0.5));
        let m = p.build_mesh().unwrap();
        assert_eq!(m.n_triangles(), 262_144);
        // 263,938 displacement and 131,969 phase-field dofs
        assert_eq!(m.n_vertices(), 131_969);
        let d = branching_preset(Scale::Desk);
        assert_eq!(d.initial_element_count().unwrap(), 4096);
        assert!((d.build_mesh().unwrap().max_element_size() - 0.0442).abs() < 1e-4);
        assert_eq!(d.tol_max, 5e-3);
        let c = cubic_preset(None).unwrap();
        assert_eq!(c.traction, 8e3);
        assert!(matches!(c.material.degradation, Degradation::Cubic { .. }));
        assert!(matches!(cubic_preset(Some(Path::new("/no/such/mesh"))), Err(Error::FileNotFound(_))));
    }

    #[test]
    fn profile_converges() {
        let m = branching_preset(Scale::Desk).material;
        let coarse = profile_1d(&m, m.ell / 2.0).unwrap();
        let fine = profile_1d(&m, m.ell / 10.0).unwrap();
        assert!(fine.linf < coarse.linf);
        assert!(fine.linf < 2e-2, "{}", fine.linf);
        assert!((fine.dissipation_ratio - 1.0).abs() < 0.02, "{}", fine.dissipation_ratio);
    }
}
