use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generalized-α constants. Intermediate states are `x_n + α ⟦x⟧`.
///
/// Suffix `c` is the second-order (momentum) set and `j` the first-order
/// (phase-field) set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaParams {
    pub rho_inf: f64,
    pub af_c: f64,
    pub am_c: f64,
    pub gamma_c: f64,
    pub beta_c: f64,
    pub af_j: f64,
    pub am_j: f64,
    pub gamma_j: f64,
}

impl AlphaParams {
    pub fn new(rho_inf: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho_inf) {
            return Err(Error::InvalidParameter(format!("rho_inf = {rho_inf} outside [0, 1]")));
        }
        let r = rho_inf;
        let af_c = 1.0 / (1.0 + r);
        let am_c = (2.0 - r) / (1.0 + r);
        let gamma_c = 0.5 + am_c - af_c;
        let beta_c = 0.25 * (1.0 + am_c - af_c).powi(2);
        let af_j = 1.0 / (1.0 + r);
        let am_j = 0.5 * (3.0 - r) / (1.0 + r);
        let gamma_j = 0.5 + am_j - af_j;
        Ok(Self { rho_inf, af_c, am_c, gamma_c, beta_c, af_j, am_j, gamma_j })
    }

    /// Stiffness factor of the momentum increment system.
    pub fn momentum_factor(&self, dt: f64) -> f64 {
        self.beta_c * dt * dt * self.af_c / self.am_c
    }

    /// Operator factor of the phase-field increment system and of the
    /// time-augmented norm.
    pub fn phase_factor(&self, dt: f64) -> f64 {
        self.gamma_j * dt * self.af_j / self.am_j
    }
}

/// Shorthand for [`AlphaParams::new`].
pub fn alpha_params(rho_inf: f64) -> Result<AlphaParams> {
    AlphaParams::new(rho_inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn boxed_values() {
        let a = alpha_params(1.0).unwrap();
        assert!([a.af_c, a.am_c, a.gamma_c, a.af_j, a.am_j, a.gamma_j].iter().all(|&v| close(v, 0.5)));
        assert!(close(a.beta_c, 0.25));
        let a = alpha_params(0.0).unwrap();
        assert_eq!((a.af_c, a.am_c, a.gamma_c, a.beta_c), (1.0, 2.0, 1.5, 1.0));
        assert_eq!((a.af_j, a.am_j, a.gamma_j), (1.0, 1.5, 1.0));
        let a = alpha_params(0.5).unwrap();
        assert!(close(a.af_c, 2.0 / 3.0) && close(a.am_c, 1.0) && close(a.gamma_c, 5.0 / 6.0));
        assert!(close(a.beta_c, 4.0 / 9.0));
        assert!(alpha_params(1.5).is_err() && alpha_params(-0.1).is_err());
    }
}
