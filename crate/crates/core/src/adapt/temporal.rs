use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{project_nodal, TriMesh};

/// How the third time derivative is formed from four displacement levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Bdf3Formula {
    /// Third divided difference on the actual (possibly nonuniform) steps.
    #[default]
    Divided,
    /// The bracketed backward-difference combination scaled by `1/Δt²_{n+1}`.
    /// Only exact for cubics on uniform steps.
    Verbatim,
}

/// Displacements `[u_{n+1}, u_n, u_{n−1}, u_{n−2}]` and steps
/// `[Δt_{n+1}, Δt_n, Δt_{n−1}]`.
#[derive(Debug, Clone, Copy)]
pub struct Snapshots<'a> {
    pub u: [&'a [f64]; 4],
    pub dt: [f64; 3],
}

impl Snapshots<'_> {
    fn check(&self) -> Result<()> {
        let n = self.u[0].len();
        if self.u.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidParameter("snapshots differ in length".into()));
        }
        if self.dt.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidParameter("time steps must be positive".into()));
        }
        Ok(())
    }
}

/// Bracketed combination of first differences shared by both variants.
fn bracket(s: &Snapshots<'_>, i: usize) -> f64 {
    let [a, b, c] = s.dt;
    let [u0, u1, u2, u3] = s.u;
    (u0[i] - u1[i]) / a - (1.0 + a / b) * (u1[i] - u2[i]) / b + a / (b * c) * (u2[i] - u3[i])
}

pub fn bdf3_third_derivative(s: &Snapshots<'_>, formula: Bdf3Formula) -> Result<Vec<f64>> {
    s.check()?;
    let [a, b, c] = s.dt;
    let [u0, u1, u2, u3] = s.u;
    Ok((0..u0.len())
        .map(|i| match formula {
            Bdf3Formula::Divided => {
                let d1 = (u0[i] - u1[i]) / a;
                let d2 = (u1[i] - u2[i]) / b;
                let d3 = (u2[i] - u3[i]) / c;
                6.0 * ((d1 - d2) / (a + b) - (d2 - d3) / (b + c)) / (a + b + c)
            }
            Bdf3Formula::Verbatim => bracket(s, i) / (a * a),
        })
        .collect())
}

/// `τ = Δt²_{n+1} (Δt_n + Δt_{n−1}) / 6 · u⃛`, with the `Δt²_{n+1}` factor
/// cancelled analytically.
pub fn local_truncation_error(s: &Snapshots<'_>, formula: Bdf3Formula) -> Result<Vec<f64>> {
    s.check()?;
    let [a, b, c] = s.dt;
    let [u0, u1, u2, u3] = s.u;
    let k = (b + c) / 6.0;
    Ok((0..u0.len())
        .map(|i| match formula {
            Bdf3Formula::Divided => {
                let d1 = (u0[i] - u1[i]) / a;
                let d2 = (u1[i] - u2[i]) / b;
                let d3 = (u2[i] - u3[i]) / c;
                k * a * a * 6.0 * ((d1 - d2) / (a + b) - (d2 - d3) / (b + c)) / (a + b + c)
            }
            Bdf3Formula::Verbatim => k * bracket(s, i),
        })
        .collect())
}

/// Root-mean-square of `τ_i / (ρ_abs + ρ_rel max(|u_i|, |u_i| + |τ_i|))`.
pub fn weighted_error(tau: &[f64], u: &[f64], rho_abs: f64, rho_rel: f64) -> Result<f64> {
    if tau.is_empty() || tau.len() != u.len() {
        return Err(Error::InvalidParameter("weighted error needs equal, nonempty vectors".into()));
    }
    let sum: f64 = tau
        .iter()
        .zip(u)
        .map(|(t, v)| {
            let w = rho_abs + rho_rel * v.abs().max(v.abs() + t.abs());
            (t / w).powi(2)
        })
        .sum();
    Ok((sum / tau.len() as f64).sqrt())
}

/// `ρ_tol (tol/E)^{1/2} Δt`, or `growth_cap Δt` when `E = 0`.
pub fn next_dt(e: f64, dt: f64, tol: f64, rho_tol: f64, growth_cap: f64) -> f64 {
    if e == 0.0 {
        return dt * growth_cap;
    }
    rho_tol * (tol / e).sqrt() * dt
}

/// Accepted displacement levels and the steps between them, newest first.
#[derive(Debug, Clone, Default)]
pub struct TimeHistory {
    u: VecDeque<Vec<f64>>,
    dt: VecDeque<f64>,
}

impl TimeHistory {
    pub fn new(u0: Vec<f64>) -> Self {
        Self { u: VecDeque::from([u0]), dt: VecDeque::new() }
    }

    /// Records an accepted level `u` reached with step `dt`.
    pub fn push(&mut self, u: Vec<f64>, dt: f64) {
        self.u.push_front(u);
        self.dt.push_front(dt);
        self.u.truncate(3);
        self.dt.truncate(2);
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Truncation error of the candidate `u_np1` reached with `dt`.
    pub fn truncation_error(&self, u_np1: &[f64], dt: f64, formula: Bdf3Formula) -> Result<Vec<f64>> {
        if self.u.len() < 3 || self.dt.len() < 2 {
            return Err(Error::NotEnoughHistory);
        }
        let s = Snapshots { u: [u_np1, &self.u[0], &self.u[1], &self.u[2]], dt: [dt, self.dt[0], self.dt[1]] };
        local_truncation_error(&s, formula)
    }

    pub fn project(&mut self, old: &TriMesh, new: &TriMesh) -> Result<()> {
        for u in self.u.iter_mut() {
            *u = project_nodal(old, new, u, 2)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_and_quadratic_trajectories() {
        let times = [0.0, 0.13, 0.2, 0.5];
        let cube: Vec<Vec<f64>> = times.iter().rev().map(|t: &f64| vec![t.powi(3), 2.0 * t.powi(3)]).collect();
        let dt = [times[3] - times[2], times[2] - times[1], times[1] - times[0]];
        let s = Snapshots { u: [&cube[0], &cube[1], &cube[2], &cube[3]], dt };
        let d = bdf3_third_derivative(&s, Bdf3Formula::Divided).unwrap();
        assert!((d[0] - 6.0).abs() < 1e-9 * 6.0 && (d[1] - 12.0).abs() < 1e-9 * 12.0);
        let sq: Vec<Vec<f64>> = times.iter().rev().map(|t: &f64| vec![t * t]).collect();
        let s = Snapshots { u: [&sq[0], &sq[1], &sq[2], &sq[3]], dt };
        assert!(bdf3_third_derivative(&s, Bdf3Formula::Divided).unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn sine_on_uniform_steps() {
        let h = 1e-3;
        let u: Vec<Vec<f64>> = (0..4).map(|k| vec![(1.0 - k as f64 * h).sin()]).collect();
        for f in [Bdf3Formula::Divided, Bdf3Formula::Verbatim] {
            let s = Snapshots { u: [&u[0], &u[1], &u[2], &u[3]], dt: [h; 3] };
            let d = bdf3_third_derivative(&s, f).unwrap()[0];
            assert!((d + 1f64.cos()).abs() <= 1e-5 + 3.0 * h, "{d}");
        }
    }

    #[test]
    fn weighted_error_examples() {
        assert_eq!(weighted_error(&[0.0, 0.0], &[1.0, 2.0], 1e-4, 1e-4).unwrap(), 0.0);
        let e = weighted_error(&[1e-4], &[0.0], 1e-4, 1e-4).unwrap();
        assert!((e - 1.0 / 1.0001).abs() < 1e-12);
        let a = weighted_error(&[1e-3, 2e-4], &[1.0, 0.5], 0.0, 1e-4).unwrap();
        let b = weighted_error(&[1e3, 2e2], &[1e6, 0.5e6], 0.0, 1e-4).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        assert!(weighted_error(&[], &[], 1e-4, 1e-4).is_err());
    }

    #[test]
    fn controller_examples() {
        assert!((next_dt(1e-3, 1.0, 1e-3, 0.9, 2.0) - 0.9).abs() < 1e-15);
        assert!((next_dt(1e-1, 1.0, 1e-3, 0.9, 2.0) - 0.09).abs() < 1e-15);
        assert!((next_dt(0.25e-3, 1.0, 1e-3, 0.9, 2.0) - 1.8).abs() < 1e-15);
        assert_eq!(next_dt(0.0, 1.0, 1e-3, 0.9, 2.0), 2.0);
    }

    #[test]
    fn history_needs_three_levels() {
        let mut h = TimeHistory::new(vec![0.0]);
        assert!(matches!(h.truncation_error(&[1.0], 1.0, Bdf3Formula::Divided), Err(Error::NotEnoughHistory)));
        h.push(vec![1.0], 1.0);
        h.push(vec![2.0], 1.0);
        let tau = h.truncation_error(&[3.0], 1.0, Bdf3Formula::Divided).unwrap();
        assert!(tau[0].abs() < 1e-15);
        h.push(vec![3.0], 1.0);
        assert_eq!(h.len(), 3);
    }
}
