use super::{Point, TriMesh};

/// Bucket grid for point-in-triangle queries.
#[derive(Debug, Clone)]
pub struct PointLocator {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<usize>,
    items: Vec<usize>,
}

impl PointLocator {
    pub fn new(mesh: &TriMesh) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in mesh.vertices() {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let nt = mesh.n_triangles().max(1);
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let area = ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(extent * extent * 1e-6);
        // about two triangles per bucket
        let cell = (2.0 * area / nt as f64).sqrt().max(extent * 1e-6);
        let nx = (((hi[0] - lo[0]) / cell).floor() as usize + 1).max(1);
        let ny = (((hi[1] - lo[1]) / cell).floor() as usize + 1).max(1);

        let mut counts = vec![0usize; nx * ny + 1];
        let ranges: Vec<[usize; 4]> = (0..mesh.n_triangles())
            .map(|t| {
                let c = mesh.corners(t);
                let (mut a, mut b) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
                for p in &c {
                    for d in 0..2 {
                        a[d] = a[d].min(p[d]);
                        b[d] = b[d].max(p[d]);
                    }
                }
                let i0 = ((a[0] - lo[0]) / cell).floor().max(0.0) as usize;
                let j0 = ((a[1] - lo[1]) / cell).floor().max(0.0) as usize;
                let i1 = (((b[0] - lo[0]) / cell).floor() as usize).min(nx - 1);
                let j1 = (((b[1] - lo[1]) / cell).floor() as usize).min(ny - 1);
                [i0, i1, j0, j1]
            })
            .collect();
        for r in &ranges {
            for j in r[2]..=r[3] {
                for i in r[0]..=r[1] {
                    counts[j * nx + i + 1] += 1;
                }
            }
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let start = counts.clone();
        let mut fill = counts;
        let mut items = vec![0usize; *start.last().unwrap()];
        for (t, r) in ranges.iter().enumerate() {
            for j in r[2]..=r[3] {
                for i in r[0]..=r[1] {
                    let b = j * nx + i;
                    items[fill[b]] = t;
                    fill[b] += 1;
                }
            }
        }
        Self { origin: lo, cell, nx, ny, start, items }
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in
    /// it. Points within a relative `1e-10` of an edge count as inside.
    pub fn locate(&self, mesh: &TriMesh, p: Point) -> Option<(usize, [f64; 3])> {
        let fi = (p[0] - self.origin[0]) / self.cell;
        let fj = (p[1] - self.origin[1]) / self.cell;
        if fi < -1e-9 || fj < -1e-9 {
            return None;
        }
        let i = (fi.max(0.0) as usize).min(self.nx - 1);
        let j = (fj.max(0.0) as usize).min(self.ny - 1);
        let b = j * self.nx + i;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.items[self.start[b]..self.start[b + 1]] {
            let l = barycentric(mesh.corners(t), p);
            let worst = l[0].min(l[1]).min(l[2]);
            if worst >= 0.0 {
                return Some((t, l));
            }
            if best.is_none_or(|(_, _, w)| worst > w) {
                best = Some((t, l, worst));
            }
        }
        best.filter(|(_, _, w)| *w > -1e-10).map(|(t, l, _)| (t, l))
    }

    /// Interpolates a P1 nodal field at `p`.
    pub fn evaluate(&self, mesh: &TriMesh, field: &[f64], p: Point) -> Option<f64> {
        self.locate(mesh, p).map(|(t, l)| {
            let tri = mesh.triangles()[t];
            l[0] * field[tri[0]] + l[1] * field[tri[1]] + l[2] * field[tri[2]]
        })
    }
}

pub fn barycentric(c: [Point; 3], p: Point) -> [f64; 3] {
    let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
    let l1 = ((p[0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (p[1] - c[0][1])) / det;
    let l2 = ((c[1][0] - c[0][0]) * (p[1] - c[0][1]) - (p[0] - c[0][0]) * (c[1][1] - c[0][1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundarySides, NotchedRectangle};

    #[test]
    fn locates_and_interpolates_linear_field() {
        let m = NotchedRectangle { width: 1.0, height: 2.0, notch_length: 0.5, nx: 6, ny: 10, slit: false }
            .build(BoundarySides::tension_top_bottom())
            .unwrap();
        let loc = PointLocator::new(&m);
        let f: Vec<f64> = m.vertices().iter().map(|p| 3.0 * p[0] + p[1]).collect();
        for k in 0..200 {
            let p = [(k as f64 * 0.6180339887).fract(), 2.0 * (k as f64 * 0.7548776662).fract()];
            let v = loc.evaluate(&m, &f, p).unwrap();
            assert!((v - (3.0 * p[0] + p[1])).abs() < 1e-12);
        }
        assert!(loc.locate(&m, [1.5, 0.5]).is_none());
        assert!(loc.locate(&m, [1.0, 2.0]).is_some());
    }
}
