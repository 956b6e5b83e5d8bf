use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{dist, edge_key, BoundaryTag, Edge, Genealogy, Point, TriMesh};
use crate::error::{Error, Result};

/// Set of triangles selected for refinement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Marking {
    marked: BTreeSet<usize>,
}

impl Marking {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self { marked: indices.into_iter().collect() }
    }

    pub fn all(mesh: &TriMesh) -> Self {
        Self::new(0..mesh.n_triangles())
    }

    pub fn is_empty(&self) -> bool {
        self.marked.is_empty()
    }

    pub fn len(&self) -> usize {
        self.marked.len()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.marked.contains(&t)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.marked.iter().copied()
    }

    /// Fails with [`Error::InvalidMarking`] if an index is out of range.
    pub fn validate(&self, n_triangles: usize) -> Result<()> {
        match self.marked.iter().next_back() {
            Some(&index) if index >= n_triangles => Err(Error::InvalidMarking { index, n_triangles }),
            _ => Ok(()),
        }
    }
}

/// Marks every element whose error reaches `chi` times the largest one.
pub fn mark_by_fraction(errors: &[f64], chi: f64) -> Result<Marking> {
    if !(0.0..=1.0).contains(&chi) {
        return Err(Error::InvalidParameter(format!("chi = {chi} outside [0, 1]")));
    }
    if let Some(i) = errors.iter().position(|e| !(*e >= 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter(format!("element error {i} is {}", errors[i])));
    }
    let max = errors.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(Marking::default());
    }
    let threshold = chi * max;
    Ok(Marking::new(errors.iter().enumerate().filter(|(_, &e)| e >= threshold).map(|(i, _)| i)))
}

/// One round of newest-vertex bisection with conformity closure.
///
/// Marked triangles whose children would fall below `h_min` in diameter are
/// left alone. If that leaves nothing to do for a nonempty marking the call
/// fails with [`Error::RefinementFloorReached`]. An empty marking returns a
/// clone of `mesh`.
pub fn refine(mesh: &TriMesh, marking: &Marking, h_min: f64) -> Result<TriMesh> {
    marking.validate(mesh.n_triangles())?;
    if marking.is_empty() {
        return Ok(mesh.clone());
    }
    let tris = mesh.triangles();
    let verts = mesh.vertices();

    let seeds: Vec<usize> = marking.iter().filter(|&t| bisected_diameter(mesh, t) >= h_min).collect();
    if seeds.is_empty() {
        return Err(Error::RefinementFloorReached { h_min });
    }

    let mut edge_tris: HashMap<Edge, Vec<usize>> = HashMap::with_capacity(tris.len() * 2);
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            edge_tris.entry(local_edge(tri, k)).or_default().push(t);
        }
    }

    // closure: any triangle with a bisected edge must bisect its refinement edge
    let mut split: BTreeSet<Edge> = BTreeSet::new();
    let mut work: Vec<usize> = seeds;
    while let Some(t) = work.pop() {
        let e = local_edge(&tris[t], mesh.refinement_edge(t));
        if split.insert(e) {
            for &nb in &edge_tris[&e] {
                if nb != t {
                    work.push(nb);
                }
            }
        }
    }

    let mut vertices: Vec<Point> = verts.to_vec();
    let mut midpoint: HashMap<Edge, usize> = HashMap::with_capacity(split.len());
    let mut midpoint_of = Vec::with_capacity(split.len());
    for &(a, b) in &split {
        midpoint.insert((a, b), vertices.len());
        vertices.push([0.5 * (verts[a][0] + verts[b][0]), 0.5 * (verts[a][1] + verts[b][1])]);
        midpoint_of.push((a, b));
    }

    let mut triangles = Vec::with_capacity(tris.len() + 3 * split.len());
    let mut ref_edge = Vec::with_capacity(triangles.capacity());
    let mut parent = Vec::with_capacity(triangles.capacity());
    for (t, tri) in tris.iter().enumerate() {
        let r = mesh.refinement_edge(t);
        let Some(&m) = midpoint.get(&local_edge(tri, r)) else {
            triangles.push(*tri);
            ref_edge.push(r as u8);
            parent.push(t);
            continue;
        };
        // rotate so the refinement edge is (b, c)
        let (a, b, c) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
        for child in [[m, a, b], [m, c, a]] {
            match midpoint.get(&edge_key(child[1], child[2])) {
                Some(&m2) => {
                    triangles.push([m2, child[0], child[1]]);
                    triangles.push([m2, child[2], child[0]]);
                    ref_edge.extend([0, 0]);
                    parent.extend([t, t]);
                }
                None => {
                    triangles.push(child);
                    ref_edge.push(0);
                    parent.push(t);
                }
            }
        }
    }

    let mut boundary: BTreeMap<Edge, BoundaryTag> = BTreeMap::new();
    for (&(a, b), &tag) in mesh.boundary() {
        match midpoint.get(&(a, b)) {
            Some(&m) => {
                boundary.insert(edge_key(a, m), tag);
                boundary.insert(edge_key(m, b), tag);
            }
            None => {
                boundary.insert((a, b), tag);
            }
        }
    }

    let genealogy =
        Genealogy { parent_id: mesh.id(), parent_triangle: parent, n_parent_vertices: verts.len(), midpoint_of };
    Ok(TriMesh::from_refinement(vertices, triangles, ref_edge, boundary, genealogy))
}

fn local_edge(tri: &[usize; 3], k: usize) -> Edge {
    edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3])
}

/// Largest diameter among the two children of a single bisection of `t`.
fn bisected_diameter(mesh: &TriMesh, t: usize) -> f64 {
    let r = mesh.refinement_edge(t);
    let p = mesh.corners(t);
    let (a, b, c) = (p[r], p[(r + 1) % 3], p[(r + 2) % 3]);
    let m = [0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])];
    let am = dist(a, m);
    let half = 0.5 * dist(b, c);
    dist(a, b).max(dist(c, a)).max(am).max(half)
}
