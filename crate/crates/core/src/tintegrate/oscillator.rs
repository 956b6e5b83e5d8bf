use super::{kinematic_update, AlphaParams, FieldState};
use crate::error::Result;

/// Integrates `ü = −ω² u` with the same increment system and kinematic
/// update as the momentum equation. Returns `(u, u̇)` after `steps` steps.
pub fn oscillator(omega: f64, u0: f64, v0: f64, dt: f64, steps: usize, alpha: &AlphaParams) -> Result<(f64, f64)> {
    let k = omega * omega;
    let mut s =
        FieldState { t: 0.0, u: vec![u0], v: vec![v0], a: vec![-k * u0], phi: vec![], phidot: vec![], history: vec![] };
    let c = alpha.momentum_factor(dt);
    let scale = alpha.beta_c * dt * dt / alpha.am_c;
    let ca = alpha.am_c / (2.0 * alpha.beta_c) - 1.0;
    let cv = alpha.am_c / (alpha.beta_c * dt);
    for _ in 0..steps {
        let rhs = scale * (ca * s.a[0] + cv * s.v[0] - k * s.u[0]);
        let du = rhs / (1.0 + c * k);
        s = kinematic_update(&s, &[du], &[], alpha, dt)?;
    }
    Ok((s.u[0], s.v[0]))
}
