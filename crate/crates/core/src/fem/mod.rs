//! P1 and bubble-enriched P1 spaces on triangles, and the assembly of the
//! momentum and phase-field increment systems.

mod assemble;
mod space;

pub use assemble::{
    assemble_momentum, assemble_phasefield, element_strain, external_force, qnorm_element, qnorm_gram, tensile_energy,
    Discretization, Loads, PhaseInputs,
};
pub use space::{DofMap, FieldKind, Space};

use crate::linalg::SparseSym;
use crate::mesh::Point;

/// Symmetric 6-point rule exact for degree 4: barycentric coordinates and
/// weights relative to the triangle area.
pub const QUADRATURE: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_964_886_32;
    const B1: f64 = 0.108_103_018_168_070_227_36;
    const W1: f64 = 0.223_381_589_678_011_465_70;
    const A2: f64 = 0.091_576_213_509_770_743_46;
    const B2: f64 = 0.816_847_572_980_458_513_08;
    const W2: f64 = 0.109_951_743_655_321_867_64;
    [
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
};

pub const N_QUAD: usize = QUADRATURE.len();

/// Cubic bubble, one at the centroid and zero on the element boundary.
pub fn bubble_value(l: [f64; 3]) -> f64 {
    27.0 * l[0] * l[1] * l[2]
}

/// Gradient of the bubble given the barycentric gradients.
pub fn bubble_gradient(l: [f64; 3], grad: &[[f64; 2]; 3]) -> [f64; 2] {
    let c = [l[1] * l[2], l[0] * l[2], l[0] * l[1]];
    [
        27.0 * (c[0] * grad[0][0] + c[1] * grad[1][0] + c[2] * grad[2][0]),
        27.0 * (c[0] * grad[0][1] + c[1] * grad[1][1] + c[2] * grad[2][1]),
    ]
}

/// Area and barycentric gradients of a triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub grad: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(c: [Point; 3]) -> Self {
        let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
        let mut grad = [[0.0; 2]; 3];
        for (i, g) in grad.iter_mut().enumerate() {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            *g = [(c[j][1] - c[k][1]) / det, (c[k][0] - c[j][0]) / det];
        }
        Self { area: 0.5 * det, grad }
    }
}

/// Induced inner product `η (·,·) + c [(1 + ℓ/Gc)(·,·) + ℓ² (∇·,∇·)]` with
/// time factor `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QNorm {
    pub ell: f64,
    pub gc: f64,
    pub eta: f64,
    pub time_factor: f64,
}

impl QNorm {
    pub fn new(params: &crate::model::MaterialParams, alpha: &crate::tintegrate::AlphaParams, dt: f64) -> Self {
        Self { ell: params.ell, gc: params.gc, eta: params.eta, time_factor: alpha.phase_factor(dt) }
    }

    pub(crate) fn mass_coefficient(&self) -> f64 {
        self.eta + self.time_factor * (1.0 + self.ell / self.gc)
    }

    pub(crate) fn stiffness_coefficient(&self) -> f64 {
        self.time_factor * self.ell * self.ell
    }
}

/// Matrix, right-hand side and the numbering they refer to.
#[derive(Debug, Clone)]
pub struct AssembledSystem<'a> {
    pub matrix: SparseSym,
    pub rhs: Vec<f64>,
    pub dofs: &'a DofMap,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_exact(a: u32, b: u32) -> f64 {
        // ∫ λ1^a λ2^b over the reference triangle, area 1/2
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        f(a) * f(b) / f(a + b + 2)
    }

    #[test]
    fn quadrature_exact_through_degree_four() {
        let wsum: f64 = QUADRATURE.iter().map(|q| q.1).sum();
        assert!((wsum - 1.0).abs() < 1e-15);
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let q: f64 = QUADRATURE.iter().map(|(l, w)| 0.5 * w * l[0].powi(a as i32) * l[1].powi(b as i32)).sum();
                assert!((q - monomial_exact(a, b)).abs() < 1e-15, "{a} {b}");
            }
        }
    }

    #[test]
    fn bubble_values() {
        assert!((bubble_value([1.0 / 3.0; 3]) - 1.0).abs() < 1e-15);
        assert_eq!(bubble_value([1.0, 0.0, 0.0]), 0.0);
        assert_eq!(bubble_value([0.5, 0.5, 0.0]), 0.0);
    }

    #[test]
    fn bubble_gradient_vanishes_at_centroid() {
        let g = ElementGeometry::new([[0.0, 0.0], [2.0, 0.1], [0.3, 1.5]]);
        let b = bubble_gradient([1.0 / 3.0; 3], &g.grad);
        assert!(b[0].abs() < 1e-14 && b[1].abs() < 1e-14);
        let s: [f64; 2] = [0, 1].map(|d| g.grad.iter().map(|v| v[d]).sum());
        assert!(s[0].abs() < 1e-15 && s[1].abs() < 1e-15);
    }
}
