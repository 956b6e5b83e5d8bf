use serde::{Deserialize, Serialize};

/// Symmetric 2×2 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Sym2 {
    pub fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Self { xx, yy, xy }
    }

    pub fn iso(a: f64) -> Self {
        Self { xx: a, yy: a, xy: 0.0 }
    }

    /// From Voigt `[xx, yy, γ]` with engineering shear `γ = 2xy`.
    pub fn from_voigt(v: [f64; 3]) -> Self {
        Self { xx: v[0], yy: v[1], xy: 0.5 * v[2] }
    }

    pub fn to_voigt(self) -> [f64; 3] {
        [self.xx, self.yy, 2.0 * self.xy]
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.xx, self.yy, self.xy]
    }

    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }

    /// `a : b`
    pub fn ddot(self, o: Sym2) -> f64 {
        self.xx * o.xx + self.yy * o.yy + 2.0 * self.xy * o.xy
    }

    pub fn norm(self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn scale(self, a: f64) -> Self {
        Self { xx: a * self.xx, yy: a * self.yy, xy: a * self.xy }
    }

    pub fn add(self, o: Sym2) -> Self {
        Self { xx: self.xx + o.xx, yy: self.yy + o.yy, xy: self.xy + o.xy }
    }

    pub fn sub(self, o: Sym2) -> Self {
        self.add(o.scale(-1.0))
    }

    /// `λ tr(ε) I + 2μ ε`
    pub fn hooke(self, lambda: f64, mu: f64) -> Self {
        Sym2::iso(lambda * self.trace()).add(self.scale(2.0 * mu))
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(self) -> (f64, f64) {
        let m = 0.5 * (self.xx + self.yy);
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (m + r, m - r)
    }

    /// `R ε Rᵀ` for rotation angle `theta`.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let r = [[c, -s], [s, c]];
        let e = [[self.xx, self.xy], [self.xy, self.yy]];
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[i][j] += r[i][k] * e[k][l] * r[j][l];
                    }
                }
            }
        }
        Sym2::new(out[0][0], out[1][1], 0.5 * (out[0][1] + out[1][0]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainSplit {
    pub eps_plus: Sym2,
    pub eps_minus: Sym2,
    pub psi_plus: f64,
    pub psi_minus: f64,
}

/// Spectral tension/compression decomposition of a plane strain.
pub fn spectral_split(eps: Sym2, lambda: f64, mu: f64) -> StrainSplit {
    let (l1, l2) = eps.eigenvalues();
    let eps_plus = if l1 <= 0.0 {
        Sym2::default()
    } else if l2 >= 0.0 {
        eps
    } else {
        // only l1 is positive: l1 times the projector onto its eigenvector
        let d = l1 - l2;
        Sym2::new((eps.xx - l2) / d, (eps.yy - l2) / d, eps.xy / d).scale(l1)
    };
    let eps_minus = eps.sub(eps_plus);
    let tr = eps.trace();
    let pos = |x: f64| x.max(0.0);
    let neg = |x: f64| x.min(0.0);
    let psi_plus = 0.5 * lambda * pos(tr).powi(2) + mu * (pos(l1).powi(2) + pos(l2).powi(2));
    let psi_minus = 0.5 * lambda * neg(tr).powi(2) + mu * (neg(l1).powi(2) + neg(l2).powi(2));
    StrainSplit { eps_plus, eps_minus, psi_plus, psi_minus }
}

/// Undegraded strain energy density.
pub fn psi0(eps: Sym2, lambda: f64, mu: f64) -> f64 {
    0.5 * lambda * eps.trace().powi(2) + mu * eps.ddot(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_case() {
        let s = spectral_split(Sym2::new(1.0, -1.0, 0.0), 1.0, 1.0);
        assert_eq!(s.eps_plus, Sym2::new(1.0, 0.0, 0.0));
        assert_eq!(s.eps_minus, Sym2::new(0.0, -1.0, 0.0));
        assert_eq!(s.psi_plus, 1.0);
    }

    #[test]
    fn zero_case() {
        let s = spectral_split(Sym2::default(), 1.0, 1.0);
        assert_eq!((s.psi_plus, s.psi_minus), (0.0, 0.0));
        assert_eq!(s.eps_plus, Sym2::default());
    }

    #[test]
    fn pure_shear_against_principal_axes() {
        let g = 0.01;
        let eps = Sym2::new(0.0, 0.0, g / 2.0);
        let s = spectral_split(eps, 1.0, 1.0);
        assert!((s.psi_plus - 2.5e-5).abs() < 1e-18);
        // rotating by 45 degrees diagonalizes pure shear
        let p = eps.rotate(-std::f64::consts::FRAC_PI_4);
        assert!(p.xy.abs() < 1e-17);
        let e_plus_rot = s.eps_plus.rotate(-std::f64::consts::FRAC_PI_4);
        assert!((e_plus_rot.xx - p.xx.max(0.0)).abs() < 1e-16);
        assert!((e_plus_rot.yy - p.yy.max(0.0)).abs() < 1e-16);
    }
}
