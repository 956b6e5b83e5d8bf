use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::fem::QUADRATURE;
use crate::mesh::{PointLocator, TriMesh};

const BROKEN: f64 = 0.5;

/// Horizontal notch line `y`, spanning `x_start..x_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Notch {
    pub y: f64,
    pub x_start: f64,
    pub x_end: f64,
}

impl Notch {
    fn distance(&self, p: [f64; 2]) -> f64 {
        let x = p[0].clamp(self.x_start, self.x_end);
        ((p[0] - x).powi(2) + (p[1] - self.y).powi(2)).sqrt()
    }
}

fn neighbours(mesh: &TriMesh) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.n_vertices()];
    for (a, b) in mesh.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Rightmost point of the `φ ≤ 0.5` region connected to the notch, with the
/// level crossing interpolated along edges. `None` before nucleation.
pub fn crack_tip(mesh: &TriMesh, phi: &[f64], notch: &Notch, seed_radius: f64) -> Option<f64> {
    let verts = mesh.vertices();
    let adj = neighbours(mesh);
    let mut seen = vec![false; verts.len()];
    let mut queue = VecDeque::new();
    for (i, p) in verts.iter().enumerate() {
        if phi[i] <= BROKEN && notch.distance(*p) <= seed_radius {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    if queue.is_empty() {
        return None;
    }
    let mut tip = f64::NEG_INFINITY;
    while let Some(i) = queue.pop_front() {
        tip = tip.max(verts[i][0]);
        for &j in &adj[i] {
            if phi[j] <= BROKEN {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            } else {
                let s = (BROKEN - phi[i]) / (phi[j] - phi[i]);
                tip = tip.max(verts[i][0] + s * (verts[j][0] - verts[i][0]));
            }
        }
    }
    Some(tip)
}

/// Tip positions over accepted steps and their backward-difference speed.
#[derive(Debug, Clone)]
pub struct TipTracker {
    window: usize,
    samples: VecDeque<(f64, f64)>,
}

impl Default for TipTracker {
    fn default() -> Self {
        Self::new(5)
    }
}

impl TipTracker {
    pub fn new(window: usize) -> Self {
        Self { window: window.max(1), samples: VecDeque::new() }
    }

    /// Records the tip at time `t` and returns the speed over the window, or
    /// `None` with fewer than two known samples.
    pub fn push(&mut self, t: f64, tip: Option<f64>) -> Option<f64> {
        let Some(x) = tip else {
            self.samples.clear();
            return None;
        };
        self.samples.push_back((t, x));
        while self.samples.len() > self.window + 1 {
            self.samples.pop_front();
        }
        let (t0, x0) = *self.samples.front()?;
        let (t1, x1) = *self.samples.back()?;
        (self.samples.len() > 1 && t1 > t0).then(|| (x1 - x0) / (t1 - t0))
    }
}

/// `∫|φ(x, y) − φ(x, 2y_c − y)| / ∫(1 − φ)`, sampled at the quadrature
/// points; zero for an undamaged field.
pub fn symmetry_metric(mesh: &TriMesh, phi: &[f64], y_mirror: f64) -> f64 {
    let loc = PointLocator::new(mesh);
    let mut diff = 0.0;
    let mut damage = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let c = mesh.corners(t);
        let area = mesh.area(t);
        for (b, wq) in QUADRATURE.iter() {
            let x = b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0];
            let y = b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1];
            let v = b[0] * phi[tri[0]] + b[1] * phi[tri[1]] + b[2] * phi[tri[2]];
            let w = wq * area;
            damage += w * (1.0 - v);
            if let Some(m) = loc.evaluate(mesh, phi, [x, 2.0 * y_mirror - y]) {
                diff += w * (v - m).abs();
            }
        }
    }
    if damage <= 0.0 {
        0.0
    } else {
        diff / damage
    }
}

/// True once some vertical line ahead of the notch crosses two separate
/// broken bands.
pub fn has_branched(mesh: &TriMesh, phi: &[f64], notch: &Notch, spacing: f64, step: f64) -> bool {
    let loc = PointLocator::new(mesh);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in mesh.vertices() {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let ny = ((hi[1] - lo[1]) / step).ceil() as usize;
    let mut x = notch.x_end + spacing;
    while x < hi[0] {
        let mut bands = 0;
        let mut inside = false;
        for k in 0..=ny {
            let y = (lo[1] + k as f64 * step).min(hi[1]);
            let broken = loc.evaluate(mesh, phi, [x, y]).is_some_and(|v| v <= BROKEN);
            if broken && !inside {
                bands += 1;
            }
            inside = broken;
        }
        if bands >= 2 {
            return true;
        }
        x += spacing;
    }
    false
}
