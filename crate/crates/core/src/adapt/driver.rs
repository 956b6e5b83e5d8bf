use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::spatial::{phase_qnorm, spatial_estimate};
use super::temporal::{next_dt, weighted_error, Bdf3Formula, TimeHistory};
use crate::error::{Error, Result};
use crate::fem::Discretization;
use crate::mesh::{mark_by_fraction, refine, TriMesh};
use crate::model::dissipation;
use crate::scenario::{crack_tip, has_branched, Scenario, TipTracker};
use crate::tintegrate::{alpha_params, staggered_step, FieldState, StaggerOptions};

pub const CSV_HEADER: &str = "step,t,dt,E,n_elements,h_min,n_stagger,dissipation,crack_tip_x,crack_tip_speed";

/// Step-size control from the staggered iteration count, kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationBaseline {
    /// Steps needing more iterations are halved and repeated.
    pub max_iterations: usize,
    /// Steps needing fewer iterations grow the next step.
    pub grow_below: usize,
}

impl Default for IterationBaseline {
    fn default() -> Self {
        Self { max_iterations: 10, grow_below: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverConfig {
    pub rho_inf: f64,
    pub tol_max: f64,
    /// Defaults to `tol_max / 100`.
    pub tol_min: Option<f64>,
    pub tol_stg: f64,
    /// Absolute mesh tolerance; by default `1e-3 ‖φ‖`.
    pub tol_mesh: Option<f64>,
    pub tol_mesh_rel: f64,
    pub chi: f64,
    pub rho_abs: f64,
    pub rho_rel: f64,
    pub rho_tol: f64,
    /// Smallest element diameter refinement may produce; defaults to `ℓ/5`.
    pub h_min: Option<f64>,
    pub growth_cap: f64,
    /// Defaults to `100 Δt⁰`.
    pub dt_max: Option<f64>,
    pub dt_min: f64,
    /// Accepted steps run at `Δt⁰` before the estimator kicks in.
    pub startup_steps: usize,
    pub max_stagger: usize,
    pub max_mesh_iterations: usize,
    pub solver_rtol: f64,
    pub estimator_rtol: f64,
    pub adapt_space: bool,
    pub adapt_time: bool,
    pub baseline: Option<IterationBaseline>,
    pub bdf3: Bdf3Formula,
    pub stop_at_branching: bool,
    /// Optional cap on accepted steps.
    pub max_steps: Option<usize>,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            rho_inf: 0.5,
            tol_max: 1e-3,
            tol_min: None,
            tol_stg: 1e-5,
            tol_mesh: None,
            tol_mesh_rel: 1e-3,
            chi: 0.2,
            rho_abs: 1e-4,
            rho_rel: 1e-4,
            rho_tol: 0.9,
            h_min: None,
            growth_cap: 2.0,
            dt_max: None,
            dt_min: 1e-12,
            startup_steps: 3,
            max_stagger: 50,
            max_mesh_iterations: 10,
            solver_rtol: 1e-10,
            estimator_rtol: 1e-10,
            adapt_space: true,
            adapt_time: true,
            baseline: None,
            bdf3: Bdf3Formula::default(),
            stop_at_branching: false,
            max_steps: None,
        }
    }
}

impl DriverConfig {
    pub fn tol_min(&self) -> f64 {
        self.tol_min.unwrap_or(self.tol_max / 100.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_max", self.tol_max),
            ("tol_min", self.tol_min()),
            ("tol_stg", self.tol_stg),
            ("tol_mesh_rel", self.tol_mesh_rel),
            ("rho_abs", self.rho_abs),
            ("rho_rel", self.rho_rel),
            ("dt_min", self.dt_min),
            ("solver_rtol", self.solver_rtol),
            ("estimator_rtol", self.estimator_rtol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(v) = self.tol_mesh {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter("tol_mesh must be positive".into()));
            }
        }
        if self.tol_min() >= self.tol_max {
            return Err(Error::InvalidParameter("tol_min must be below tol_max".into()));
        }
        if !(self.rho_tol > 0.0 && self.rho_tol <= 1.0) {
            return Err(Error::InvalidParameter("rho_tol must lie in (0, 1]".into()));
        }
        if !(self.chi >= 0.0 && self.chi <= 1.0) {
            return Err(Error::InvalidParameter("chi must lie in [0, 1]".into()));
        }
        if !(self.growth_cap >= 1.0) {
            return Err(Error::InvalidParameter("growth_cap must be at least 1".into()));
        }
        if self.max_stagger == 0 {
            return Err(Error::InvalidParameter("max_stagger must be at least 1".into()));
        }
        if let Some(h) = self.h_min {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter("h_min must be positive".into()));
            }
        }
        alpha_params(self.rho_inf)?;
        Ok(())
    }
}

/// One accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    /// NaN while the estimator is off.
    pub e: f64,
    pub n_elements: usize,
    pub h_min: f64,
    pub n_stagger: usize,
    pub dissipation: f64,
    pub crack_tip_x: Option<f64>,
    pub crack_tip_speed: Option<f64>,
    pub n_rejected: usize,
    pub mesh_iterations: usize,
    pub branched: bool,
}

impl StepRecord {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:e}"));
        format!(
            "{},{:e},{:e},{:e},{},{:e},{},{:e},{},{}",
            self.step,
            self.t,
            self.dt,
            self.e,
            self.n_elements,
            self.h_min,
            self.n_stagger,
            self.dissipation,
            opt(self.crack_tip_x),
            opt(self.crack_tip_speed)
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub records: Vec<StepRecord>,
    pub mesh: TriMesh,
    pub state: FieldState,
    pub rejections: usize,
    /// Reason the run stopped early, if it did.
    pub aborted: Option<String>,
    pub branch_time: Option<f64>,
    pub wall_time: f64,
}

impl RunResult {
    pub fn csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

enum Trial {
    Accept { state: FieldState, iterations: usize, dt_next: f64, e: f64 },
    Reject(f64),
    Refined,
}

struct Run<'a> {
    sc: &'a Scenario,
    cfg: &'a DriverConfig,
    mesh: TriMesh,
    disc: Discretization,
    state: FieldState,
    history: TimeHistory,
    accepted: usize,
}

impl Run<'_> {
    fn h_min(&self) -> f64 {
        self.cfg.h_min.unwrap_or(self.sc.material.ell / 5.0)
    }

    fn attempt(&mut self, dt: f64, mesh_iterations: usize) -> Result<Trial> {
        let cfg = self.cfg;
        let params = &self.sc.material;
        let alpha = alpha_params(cfg.rho_inf)?;
        let opts = StaggerOptions { tol: cfg.tol_stg, max_iter: cfg.max_stagger, solver_rtol: cfg.solver_rtol };
        let out = match staggered_step(&self.mesh, &self.disc, params, &alpha, dt, &self.state, opts) {
            Ok(o) => o,
            Err(Error::SolveFailure { .. }) => return Ok(Trial::Reject(0.5 * dt)),
            Err(e) => return Err(e),
        };
        if !out.converged {
            return Ok(Trial::Reject(0.5 * dt));
        }

        let mut e = f64::NAN;
        let mut dt_next = dt;
        if self.accepted >= cfg.startup_steps {
            if let Some(b) = cfg.baseline {
                if out.iterations > b.max_iterations {
                    return Ok(Trial::Reject(0.5 * dt));
                }
                if out.iterations < b.grow_below {
                    dt_next = cfg.growth_cap * dt;
                }
            } else if cfg.adapt_time {
                let tau = self.history.truncation_error(&out.state.u, dt, cfg.bdf3)?;
                e = weighted_error(&tau, &out.state.u, cfg.rho_abs, cfg.rho_rel)?;
                if e > cfg.tol_max {
                    return Ok(Trial::Reject(next_dt(e, dt, cfg.tol_max, cfg.rho_tol, cfg.growth_cap)));
                }
                if e < cfg.tol_min() {
                    dt_next = next_dt(e, dt, cfg.tol_max, cfg.rho_tol, cfg.growth_cap).min(cfg.growth_cap * dt);
                }
            }
        }

        if cfg.adapt_space && mesh_iterations < cfg.max_mesh_iterations {
            let est = spatial_estimate(
                &self.mesh,
                &self.disc,
                params,
                &alpha,
                dt,
                &self.state,
                &out.state.history,
                cfg.estimator_rtol,
            )?;
            let tol_mesh = match cfg.tol_mesh {
                Some(v) => v,
                None => cfg.tol_mesh_rel * phase_qnorm(&self.mesh, &self.disc, params, &alpha, dt, &out.state.phi)?,
            };
            if est.norm >= tol_mesh {
                let marking = mark_by_fraction(&est.element_errors(), cfg.chi)?;
                match refine(&self.mesh, &marking, self.h_min()) {
                    Ok(new) if new.n_triangles() > self.mesh.n_triangles() => {
                        self.state = self.state.project(&self.mesh, &new)?;
                        self.history.project(&self.mesh, &new)?;
                        self.disc = Discretization::new(&new, params, self.sc.loads())?;
                        self.mesh = new;
                        return Ok(Trial::Refined);
                    }
                    Ok(_) | Err(Error::RefinementFloorReached { .. }) => {}
                    Err(err) => return Err(err),
                }
            }
        }
        Ok(Trial::Accept { state: out.state, iterations: out.iterations, dt_next, e })
    }
}

/// Runs `scenario` under the adaptive scheme. `observer` sees every accepted
/// step; an error from it stops the run. Solver failures end the run early
/// with `aborted` set and the last accepted state kept.
pub fn run(
    scenario: &Scenario,
    cfg: &DriverConfig,
    observer: &mut dyn FnMut(&StepRecord, &TriMesh, &FieldState) -> Result<()>,
) -> Result<RunResult> {
    scenario.validate()?;
    cfg.validate()?;
    let clock = Instant::now();
    let mesh = scenario.build_mesh()?;
    let state = scenario.initial_state(&mesh);
    let disc = Discretization::new(&mesh, &scenario.material, scenario.loads())?;
    let history = TimeHistory::new(state.u.clone());
    let mut run = Run { sc: scenario, cfg, mesh, disc, state, history, accepted: 0 };

    let notch = scenario.notch();
    let seed_radius = 2.0 * scenario.material.ell;
    let dt_max = cfg.dt_max.unwrap_or(100.0 * scenario.dt0);
    let t_end = scenario.t_final;
    let mut dt = scenario.dt0.min(dt_max);
    let mut tracker = TipTracker::new(5);
    let mut records = Vec::new();
    let mut rejections = 0;
    let mut aborted = None;
    let mut branch_time = None;

    'time: while run.state.t < t_end * (1.0 - 1e-12) {
        if cfg.max_steps.is_some_and(|m| run.accepted >= m) {
            break;
        }
        let mut mesh_iterations = 0;
        let mut rejected_here = 0;
        let (new_state, n_stagger, dt_used, dt_next, e) = loop {
            let dt_try = dt.min(t_end - run.state.t);
            match run.attempt(dt_try, mesh_iterations) {
                Ok(Trial::Accept { state, iterations, dt_next, e }) => break (state, iterations, dt_try, dt_next, e),
                Ok(Trial::Refined) => mesh_iterations += 1,
                Ok(Trial::Reject(smaller)) => {
                    rejections += 1;
                    rejected_here += 1;
                    dt = smaller;
                    if dt < cfg.dt_min {
                        aborted =
                            Some(format!("time step {dt:e} below the floor {:e} at t = {:e}", cfg.dt_min, run.state.t));
                        break 'time;
                    }
                }
                Err(e) => {
                    aborted = Some(format!("{e} at t = {:e}", run.state.t));
                    break 'time;
                }
            }
        };

        run.history.push(new_state.u.clone(), dt_used);
        run.state = new_state;
        run.accepted += 1;
        dt = dt_next.min(dt_max);

        let tip = crack_tip(&run.mesh, &run.state.phi, &notch, seed_radius);
        let speed = tracker.push(run.state.t, tip);
        let branched = tip.is_some()
            && has_branched(
                &run.mesh,
                &run.state.phi,
                &notch,
                2.0 * scenario.material.ell,
                0.5 * run.mesh.min_element_size(),
            );
        if branched && branch_time.is_none() {
            branch_time = Some(run.state.t);
        }
        let rec = StepRecord {
            step: run.accepted,
            t: run.state.t,
            dt: dt_used,
            e,
            n_elements: run.mesh.n_triangles(),
            h_min: run.mesh.min_element_size(),
            n_stagger,
            dissipation: dissipation(&run.mesh, &run.state.phi, &scenario.material),
            crack_tip_x: tip,
            crack_tip_speed: speed,
            n_rejected: rejected_here,
            mesh_iterations,
            branched,
        };
        observer(&rec, &run.mesh, &run.state)?;
        records.push(rec);
        if branched && cfg.stop_at_branching {
            break;
        }
    }

    Ok(RunResult {
        records,
        mesh: run.mesh,
        state: run.state,
        rejections,
        aborted,
        branch_time,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}
