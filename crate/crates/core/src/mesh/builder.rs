use std::collections::BTreeMap;

use super::{edge_key, BoundaryTag, Point, TriMesh};
use crate::error::{Error, Result};

/// Tags applied to the four sides of a rectangle. Slit faces are always free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySides {
    pub bottom: BoundaryTag,
    pub right: BoundaryTag,
    pub top: BoundaryTag,
    pub left: BoundaryTag,
}

impl BoundarySides {
    /// Loaded top and bottom, free sides.
    pub fn tension_top_bottom() -> Self {
        Self {
            bottom: BoundaryTag::Neumann,
            right: BoundaryTag::Free,
            top: BoundaryTag::Neumann,
            left: BoundaryTag::Free,
        }
    }
}

/// Structured `[0, width] x [0, height]` rectangle with an optional slit
/// along `y = height / 2` from the left side to `x = notch_length`.
///
/// Each cell is split by a diagonal; the diagonal direction is mirrored
/// across the slit line so the mesh is symmetric about it.
#[derive(Debug, Clone, PartialEq)]
pub struct NotchedRectangle {
    pub width: f64,
    pub height: f64,
    pub notch_length: f64,
    pub nx: usize,
    pub ny: usize,
    /// Duplicate the vertices on the slit so its faces separate.
    pub slit: bool,
}

impl NotchedRectangle {
    pub fn build(&self, sides: BoundarySides) -> Result<TriMesh> {
        let (nx, ny) = (self.nx, self.ny);
        if nx == 0 || ny < 2 || ny % 2 != 0 {
            return Err(Error::InvalidParameter(format!("need nx >= 1 and even ny >= 2, got {nx} x {ny}")));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidParameter("rectangle dimensions must be positive".into()));
        }
        let dx = self.width / nx as f64;
        let dy = self.height / ny as f64;
        let jm = ny / 2;
        // slit vertices strictly left of the tip column
        let tip = (self.notch_length / dx).round() as usize;
        if self.slit && (tip == 0 || tip >= nx) {
            return Err(Error::InvalidParameter(format!("notch length {} not inside the plate", self.notch_length)));
        }
        if self.slit && ((tip as f64) * dx - self.notch_length).abs() > 1e-9 * self.width {
            return Err(Error::InvalidParameter(format!("notch length {} is not on a grid line", self.notch_length)));
        }

        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices: Vec<Point> = Vec::with_capacity((nx + 1) * (ny + 1) + tip);
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([i as f64 * dx, j as f64 * dy]);
            }
        }
        let mut dup = vec![usize::MAX; nx + 1];
        if self.slit {
            for (i, d) in dup.iter_mut().enumerate().take(tip) {
                *d = vertices.len();
                vertices.push([i as f64 * dx, jm as f64 * dy]);
            }
        }
        // lower cells touching the slit use the duplicated vertices
        let lower = |i: usize, j: usize| if j == jm && dup[i] != usize::MAX { dup[i] } else { id(i, j) };

        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (p00, p10, p01, p11) = if j + 1 == jm {
                    (id(i, j), id(i + 1, j), lower(i, j + 1), lower(i + 1, j + 1))
                } else {
                    (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1))
                };
                if j >= jm {
                    triangles.push([p00, p10, p11]);
                    triangles.push([p00, p11, p01]);
                } else {
                    triangles.push([p00, p10, p01]);
                    triangles.push([p10, p11, p01]);
                }
            }
        }

        let mut tags = BTreeMap::new();
        for i in 0..nx {
            tags.insert(edge_key(id(i, 0), id(i + 1, 0)), sides.bottom);
            tags.insert(edge_key(id(i, ny), id(i + 1, ny)), sides.top);
        }
        for j in 0..ny {
            let (l0, l1) = if j + 1 == jm { (id(0, j), lower(0, j + 1)) } else { (id(0, j), id(0, j + 1)) };
            tags.insert(edge_key(l0, l1), sides.left);
            tags.insert(edge_key(id(nx, j), id(nx, j + 1)), sides.right);
        }
        TriMesh::new(vertices, triangles, tags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plate(slit: bool) -> NotchedRectangle {
        NotchedRectangle { width: 1.0, height: 2.0, notch_length: 0.5, nx: 8, ny: 16, slit }
    }

    #[test]
    fn counts_and_area() {
        let m = plate(true).build(BoundarySides::tension_top_bottom()).unwrap();
        assert_eq!(m.n_triangles(), 256);
        assert_eq!(m.n_vertices(), 9 * 17 + 4);
        assert!((m.total_area() - 2.0).abs() < 1e-13);
        assert!(m.conformity_audit().is_ok());
        let free_on_slit = m
            .boundary()
            .iter()
            .filter(|((a, b), t)| **t == BoundaryTag::Free && m.vertices()[*a][1] == 1.0 && m.vertices()[*b][1] == 1.0)
            .count();
        assert_eq!(free_on_slit, 8);
        let neumann = m.boundary().values().filter(|t| **t == BoundaryTag::Neumann).count();
        assert_eq!(neumann, 16);
    }

    #[test]
    fn mirror_symmetric_about_slit_line() {
        let m = plate(false).build(BoundarySides::tension_top_bottom()).unwrap();
        assert_eq!(m.n_vertices(), 9 * 17);
        let mut up: Vec<[i64; 2]> = Vec::new();
        let mut down: Vec<[i64; 2]> = Vec::new();
        for t in 0..m.n_triangles() {
            let c = m.centroid(t);
            let key = [(c[0] * 1e9).round() as i64, ((c[1] - 1.0).abs() * 1e9).round() as i64];
            if c[1] > 1.0 {
                up.push(key);
            } else {
                down.push(key);
            }
        }
        up.sort_unstable();
        down.sort_unstable();
        assert_eq!(up, down);
    }

    #[test]
    fn rejects_bad_notch() {
        let mut p = plate(true);
        p.notch_length = 0.51;
        assert!(p.build(BoundarySides::tension_top_bottom()).is_err());
        p.notch_length = 1.0;
        assert!(p.build(BoundarySides::tension_top_bottom()).is_err());
    }
}
