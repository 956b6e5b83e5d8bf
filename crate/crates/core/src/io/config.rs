use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adapt::{Bdf3Formula, DriverConfig, IterationBaseline};
use crate::error::{Error, Result};
use crate::model::{Degradation, Kinematics, StressSplit};
use crate::scenario::{preset, MeshSpec, NotchModel, Scenario};

/// Everything a run needs. Scenario fields left `None` keep the preset's
/// value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: String,
    pub mesh_file: Option<PathBuf>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub traction: Option<f64>,
    pub young: Option<f64>,
    pub poisson: Option<f64>,
    pub density: Option<f64>,
    pub gc: Option<f64>,
    pub ell: Option<f64>,
    pub eta: Option<f64>,
    pub degradation: Option<String>,
    pub cubic_s: Option<f64>,
    pub kinematics: Option<Kinematics>,
    pub stress_split: Option<StressSplit>,
    pub residual_stiffness: Option<f64>,
    pub notch_model: Option<NotchModel>,
    pub t_final: Option<f64>,
    pub dt0: Option<f64>,
    pub tol_max: Option<f64>,
    pub driver: DriverConfig,
    pub baseline_iteration_count: bool,
    pub out: PathBuf,
    pub cadence: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "branching-desk".into(),
            mesh_file: None,
            nx: None,
            ny: None,
            traction: None,
            young: None,
            poisson: None,
            density: None,
            gc: None,
            ell: None,
            eta: None,
            degradation: None,
            cubic_s: None,
            kinematics: None,
            stress_split: None,
            residual_stiffness: None,
            notch_model: None,
            t_final: None,
            dt0: None,
            tol_max: None,
            driver: DriverConfig::default(),
            baseline_iteration_count: false,
            out: PathBuf::from("out"),
            cadence: 10,
            seed: 0,
        }
    }
}

/// Keys accepted in configuration files and by `--set`.
pub const KEYS: &[&str] = &[
    "scenario",
    "mesh_file",
    "nx",
    "ny",
    "traction",
    "young",
    "poisson",
    "density",
    "gc",
    "ell",
    "eta",
    "degradation",
    "cubic_s",
    "kinematics",
    "stress_split",
    "residual_stiffness",
    "notch_model",
    "t_final",
    "dt0",
    "rho_inf",
    "tol_max",
    "tol_min",
    "tol_stg",
    "tol_mesh",
    "tol_mesh_rel",
    "chi",
    "rho_abs",
    "rho_rel",
    "rho_tol",
    "h_min",
    "growth_cap",
    "dt_max",
    "dt_min",
    "startup_steps",
    "max_stagger",
    "max_mesh_iterations",
    "solver_rtol",
    "estimator_rtol",
    "adapt_space",
    "adapt_time",
    "baseline_iteration_count",
    "baseline_max_iterations",
    "baseline_grow_below",
    "bdf3",
    "stop_at_branching",
    "max_steps",
    "out",
    "cadence",
    "seed",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

/// `none` clears an optional value.
fn parse_opt<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>> {
    if v == "none" {
        Ok(None)
    } else {
        parse_num(key, v).map(Some)
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let d = &mut self.driver;
        match key.trim() {
            "scenario" => self.scenario = v.to_string(),
            "mesh_file" => self.mesh_file = (v != "none").then(|| PathBuf::from(v)),
            "nx" => self.nx = parse_opt(key, v)?,
            "ny" => self.ny = parse_opt(key, v)?,
            "traction" => self.traction = parse_opt(key, v)?,
            "young" => self.young = parse_opt(key, v)?,
            "poisson" => self.poisson = parse_opt(key, v)?,
            "density" => self.density = parse_opt(key, v)?,
            "gc" => self.gc = parse_opt(key, v)?,
            "ell" => self.ell = parse_opt(key, v)?,
            "eta" => self.eta = parse_opt(key, v)?,
            "degradation" => {
                if !matches!(v, "quadratic" | "cubic" | "none") {
                    return Err(Error::InvalidParameter(format!(
                        "degradation: expected quadratic or cubic, got '{v}'"
                    )));
                }
                self.degradation = (v != "none").then(|| v.to_string());
            }
            "cubic_s" => self.cubic_s = parse_opt(key, v)?,
            "kinematics" => {
                self.kinematics = match v {
                    "plane_strain" => Some(Kinematics::PlaneStrain),
                    "plane_stress" => Some(Kinematics::PlaneStress),
                    "none" => None,
                    _ => return Err(Error::InvalidParameter(format!("kinematics: unknown value '{v}'"))),
                }
            }
            "stress_split" => {
                self.stress_split = match v {
                    "full" => Some(StressSplit::Full),
                    "tension_only" => Some(StressSplit::TensionOnly),
                    "none" => None,
                    _ => return Err(Error::InvalidParameter(format!("stress_split: unknown value '{v}'"))),
                }
            }
            "residual_stiffness" => self.residual_stiffness = parse_opt(key, v)?,
            "notch_model" => {
                self.notch_model = match v {
                    "slit" => Some(NotchModel::Slit),
                    "phase_field" => Some(NotchModel::PhaseField),
                    "none" => None,
                    _ => return Err(Error::InvalidParameter(format!("notch_model: unknown value '{v}'"))),
                }
            }
            "t_final" => self.t_final = parse_opt(key, v)?,
            "dt0" => self.dt0 = parse_opt(key, v)?,
            "rho_inf" => d.rho_inf = parse_num(key, v)?,
            "tol_max" => self.tol_max = parse_opt(key, v)?,
            "tol_min" => d.tol_min = parse_opt(key, v)?,
            "tol_stg" => d.tol_stg = parse_num(key, v)?,
            "tol_mesh" => d.tol_mesh = parse_opt(key, v)?,
            "tol_mesh_rel" => d.tol_mesh_rel = parse_num(key, v)?,
            "chi" => d.chi = parse_num(key, v)?,
            "rho_abs" => d.rho_abs = parse_num(key, v)?,
            "rho_rel" => d.rho_rel = parse_num(key, v)?,
            "rho_tol" => d.rho_tol = parse_num(key, v)?,
            "h_min" => d.h_min = parse_opt(key, v)?,
            "growth_cap" => d.growth_cap = parse_num(key, v)?,
            "dt_max" => d.dt_max = parse_opt(key, v)?,
            "dt_min" => d.dt_min = parse_num(key, v)?,
            "startup_steps" => d.startup_steps = parse_num(key, v)?,
            "max_stagger" => d.max_stagger = parse_num(key, v)?,
            "max_mesh_iterations" => d.max_mesh_iterations = parse_num(key, v)?,
            "solver_rtol" => d.solver_rtol = parse_num(key, v)?,
            "estimator_rtol" => d.estimator_rtol = parse_num(key, v)?,
            "adapt_space" => d.adapt_space = parse_bool(key, v)?,
            "adapt_time" => d.adapt_time = parse_bool(key, v)?,
            "baseline_iteration_count" => self.baseline_iteration_count = parse_bool(key, v)?,
            "baseline_max_iterations" => {
                d.baseline.get_or_insert_with(IterationBaseline::default).max_iterations = parse_num(key, v)?
            }
            "baseline_grow_below" => {
                d.baseline.get_or_insert_with(IterationBaseline::default).grow_below = parse_num(key, v)?
            }
            "bdf3" => {
                d.bdf3 = match v {
                    "divided" => Bdf3Formula::Divided,
                    "verbatim" => Bdf3Formula::Verbatim,
                    _ => return Err(Error::InvalidParameter(format!("bdf3: expected divided or verbatim, got '{v}'"))),
                }
            }
            "stop_at_branching" => d.stop_at_branching = parse_bool(key, v)?,
            "max_steps" => d.max_steps = parse_opt(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "cadence" => self.cadence = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            other => return Err(Error::InvalidParameter(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            cfg.set(k, v).map_err(|e| Error::Parse { line: n + 1, message: e.to_string() })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Self::parse(&text)
    }

    /// The preset with every override applied.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = preset(&self.scenario)?;
        if let Some(p) = &self.mesh_file {
            if !p.exists() {
                return Err(Error::FileNotFound(p.clone()));
            }
            s.mesh = MeshSpec::File(p.clone());
        }
        if self.nx.is_some() || self.ny.is_some() {
            let (nx0, ny0) = match s.mesh {
                MeshSpec::Structured { nx, ny } => (nx, ny),
                MeshSpec::File(_) => (64, 32),
            };
            let nx = self.nx.unwrap_or(nx0);
            let ny = match (self.nx, self.ny) {
                (_, Some(ny)) => ny,
                (Some(nx), None) => ((nx as f64 * s.height / s.width).round() as usize).max(2),
                (None, None) => ny0,
            };
            s.mesh = MeshSpec::Structured { nx, ny };
        }
        let m = &mut s.material;
        if self.young.is_some() || self.poisson.is_some() {
            let nu0 = m.lambda / (2.0 * (m.lambda + m.mu));
            let e0 = 2.0 * m.mu * (1.0 + nu0);
            let (l, mu) =
                crate::model::MaterialParams::from_young(self.young.unwrap_or(e0), self.poisson.unwrap_or(nu0));
            m.lambda = l;
            m.mu = mu;
        }
        macro_rules! take {
            ($src:expr, $dst:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        take!(self.density, m.rho0);
        take!(self.gc, m.gc);
        take!(self.ell, m.ell);
        take!(self.eta, m.eta);
        take!(self.kinematics, m.kinematics);
        take!(self.stress_split, m.stress_split);
        take!(self.residual_stiffness, m.residual_stiffness);
        match (self.degradation.as_deref(), self.cubic_s) {
            (Some("quadratic"), _) => m.degradation = Degradation::Quadratic,
            (Some("cubic"), s_val) => m.degradation = Degradation::Cubic { s: s_val.unwrap_or(1e-4) },
            (None, Some(s_val)) => {
                if let Degradation::Cubic { s } = &mut m.degradation {
                    *s = s_val;
                }
            }
            _ => {}
        }
        take!(self.traction, s.traction);
        take!(self.notch_model, s.notch_model);
        take!(self.t_final, s.t_final);
        take!(self.dt0, s.dt0);
        take!(self.tol_max, s.tol_max);
        s.validate()?;
        Ok(s)
    }

    /// Driver settings matching [`RunConfig::scenario`].
    pub fn driver(&self, scenario: &Scenario) -> Result<DriverConfig> {
        let mut d = self.driver.clone();
        d.tol_max = scenario.tol_max;
        if self.baseline_iteration_count {
            d.baseline.get_or_insert_with(IterationBaseline::default);
        } else {
            d.baseline = None;
        }
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(Scenario, DriverConfig)> {
        if self.cadence == 0 {
            return Err(Error::InvalidParameter("cadence must be at least 1".into()));
        }
        let s = self.scenario()?;
        let d = self.driver(&s)?;
        Ok((s, d))
    }
}
