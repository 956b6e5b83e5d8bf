//! Conforming triangulations, newest-vertex bisection and field transfer
//! between refinement levels.

mod builder;
mod io;
mod locate;
mod project;
mod refine;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

pub use builder::{BoundarySides, NotchedRectangle};
pub use io::{read_mesh, read_mesh_str, write_mesh};
pub use locate::PointLocator;
pub use project::{project_history, project_nodal};
pub use refine::{mark_by_fraction, refine, Marking};

use crate::error::{Error, Result};

pub type Point = [f64; 2];
pub type Edge = (usize, usize);

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed)
}

/// Normalized (sorted) edge key.
pub fn edge_key(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    /// Homogeneous displacement constraint.
    Dirichlet,
    /// Loaded by the scenario traction.
    Neumann,
    /// Traction-free.
    Free,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Dirichlet => "dirichlet",
            BoundaryTag::Neumann => "neumann",
            BoundaryTag::Free => "free",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dirichlet" => Some(BoundaryTag::Dirichlet),
            "neumann" => Some(BoundaryTag::Neumann),
            "free" => Some(BoundaryTag::Free),
            _ => None,
        }
    }
}

/// How a mesh was obtained from its predecessor.
#[derive(Debug, Clone)]
pub(crate) struct Genealogy {
    pub parent_id: u64,
    /// For every triangle, the index of the triangle of the parent mesh it
    /// lies in.
    pub parent_triangle: Vec<usize>,
    /// Number of vertices inherited unchanged from the parent.
    pub n_parent_vertices: usize,
    /// Endpoints (in the parent) of the edge each new vertex bisects.
    pub midpoint_of: Vec<Edge>,
}

/// Conforming, positively oriented triangle mesh.
///
/// Triangle `[a, b, c]` has local edge `k` opposite local vertex `k`. The
/// refinement edge is the local edge bisected next by newest-vertex
/// bisection.
#[derive(Debug, Clone)]
pub struct TriMesh {
    id: u64,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    refinement_edge: Vec<u8>,
    boundary: BTreeMap<Edge, BoundaryTag>,
    genealogy: Option<Genealogy>,
}

impl TriMesh {
    /// Builds a root mesh. Clockwise triangles are reoriented, refinement
    /// edges are set to the longest edge and untagged boundary edges are
    /// tagged [`BoundaryTag::Free`].
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, tags: BTreeMap<Edge, BoundaryTag>) -> Result<Self> {
        let nv = vertices.len();
        let mut tris = triangles;
        for (t, tri) in tris.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidParameter(format!("triangle {t} references a missing vertex")));
            }
            let a = signed_area(&vertices, tri);
            if a == 0.0 || !a.is_finite() {
                return Err(Error::InvalidParameter(format!("triangle {t} is degenerate")));
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
        }
        let refinement_edge = tris.iter().map(|t| longest_local_edge(&vertices, t)).collect();
        let incidence = edge_incidence(&tris);
        if let Some((e, _)) = incidence.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidParameter(format!("edge {e:?} shared by more than two triangles")));
        }
        let mut boundary = BTreeMap::new();
        for (e, c) in &incidence {
            if *c == 1 {
                boundary.insert(*e, tags.get(e).copied().unwrap_or(BoundaryTag::Free));
            }
        }
        for e in tags.keys() {
            if !boundary.contains_key(&edge_key(e.0, e.1)) {
                return Err(Error::InvalidParameter(format!("tagged edge {e:?} is not a boundary edge")));
            }
        }
        Ok(Self { id: next_id(), vertices, triangles: tris, refinement_edge, boundary, genealogy: None })
    }

    pub(crate) fn from_refinement(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        refinement_edge: Vec<u8>,
        boundary: BTreeMap<Edge, BoundaryTag>,
        genealogy: Genealogy,
    ) -> Self {
        Self { id: next_id(), vertices, triangles, refinement_edge, boundary, genealogy: Some(genealogy) }
    }

    /// Identity used to check refinement ancestry.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn parent_id(&self) -> Option<u64> {
        self.genealogy.as_ref().map(|g| g.parent_id)
    }

    /// Triangle of the parent mesh that contains triangle `t`.
    pub fn parent_of(&self, t: usize) -> Option<usize> {
        self.genealogy.as_ref().map(|g| g.parent_triangle[t])
    }

    pub(crate) fn genealogy(&self) -> Option<&Genealogy> {
        self.genealogy.as_ref()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn refinement_edge(&self, t: usize) -> usize {
        self.refinement_edge[t] as usize
    }

    pub fn boundary(&self) -> &BTreeMap<Edge, BoundaryTag> {
        &self.boundary
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.corners(t);
        (0..3).map(|k| dist(p[(k + 1) % 3], p[(k + 2) % 3])).fold(0.0, f64::max)
    }

    pub fn min_element_size(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.diameter(t)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_element_size(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.diameter(t)).fold(0.0, f64::max)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let p = self.corners(t);
        [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
    }

    /// All distinct edges, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut e: Vec<Edge> = edge_incidence(&self.triangles).into_keys().collect();
        e.sort_unstable();
        e
    }

    /// Checks that no edge has more than two incident triangles, that the
    /// single-incidence edges are exactly the tagged boundary (no hanging
    /// nodes) and that all triangles are positively oriented.
    pub fn conformity_audit(&self) -> std::result::Result<(), String> {
        let inc = edge_incidence(&self.triangles);
        for (e, c) in &inc {
            match c {
                1 if !self.boundary.contains_key(e) => return Err(format!("edge {e:?} is unmatched (hanging node)")),
                1 => {}
                2 if self.boundary.contains_key(e) => return Err(format!("boundary edge {e:?} is shared")),
                2 => {}
                _ => return Err(format!("edge {e:?} has {c} incident triangles")),
            }
        }
        for e in self.boundary.keys() {
            if !inc.contains_key(e) {
                return Err(format!("boundary edge {e:?} is not a mesh edge"));
            }
        }
        for t in 0..self.n_triangles() {
            if !(self.area(t) > 0.0) {
                return Err(format!("triangle {t} is not positively oriented"));
            }
        }
        Ok(())
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn signed_area(v: &[Point], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn longest_local_edge(v: &[Point], t: &[usize; 3]) -> u8 {
    let mut best = 0;
    let mut len = -1.0;
    for k in 0..3 {
        let l = dist(v[t[(k + 1) % 3]], v[t[(k + 2) % 3]]);
        // ties resolved towards the lowest local index
        if l > len * (1.0 + 1e-12) {
            len = l;
            best = k;
        }
    }
    best as u8
}

pub(crate) fn edge_incidence(tris: &[[usize; 3]]) -> HashMap<Edge, usize> {
    let mut m = HashMap::with_capacity(tris.len() * 2);
    for t in tris {
        for k in 0..3 {
            *m.entry(edge_key(t[(k + 1) % 3], t[(k + 2) % 3])).or_insert(0) += 1;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> TriMesh {
        TriMesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]], BTreeMap::new())
            .unwrap()
    }

    #[test]
    fn reorients_clockwise_triangles() {
        let m = TriMesh::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]], vec![[0, 1, 2]], BTreeMap::new()).unwrap();
        assert!(m.area(0) > 0.0);
        assert!((m.area(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn refinement_edge_is_hypotenuse() {
        let m = unit_square();
        for t in 0..2 {
            let e = m.refinement_edge(t);
            let tri = m.triangles()[t];
            assert_eq!(edge_key(tri[(e + 1) % 3], tri[(e + 2) % 3]), (0, 2));
        }
        assert!(m.conformity_audit().is_ok());
        assert_eq!(m.boundary().len(), 4);
    }

    #[test]
    fn rejects_degenerate_and_nonmanifold() {
        assert!(TriMesh::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], vec![[0, 1, 2]], BTreeMap::new()).is_err());
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0]];
        assert!(TriMesh::new(v, vec![[0, 1, 2], [0, 3, 1], [1, 4, 0]], BTreeMap::new()).is_err());
    }
}
