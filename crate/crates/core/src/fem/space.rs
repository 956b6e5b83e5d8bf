use std::collections::BTreeSet;

use crate::linalg::{SparseSym, SymPattern};
use crate::mesh::TriMesh;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Two components per vertex, interleaved.
    Vector,
    /// One value per vertex.
    Scalar,
    /// One value per vertex followed by one bubble per triangle.
    Enriched,
}

/// Numbering of the full field and of its unconstrained (free) part.
#[derive(Debug, Clone)]
pub struct DofMap {
    kind: FieldKind,
    n_nodes: usize,
    n_elements: usize,
    reduced: Vec<usize>,
    free: Vec<usize>,
    constrained: Vec<usize>,
}

impl DofMap {
    /// Constrains every component of the listed vertices.
    pub fn new(kind: FieldKind, mesh: &TriMesh, constrained_nodes: &BTreeSet<usize>) -> Self {
        let n_nodes = mesh.n_vertices();
        let n_elements = mesh.n_triangles();
        let n_full = match kind {
            FieldKind::Vector => 2 * n_nodes,
            FieldKind::Scalar => n_nodes,
            FieldKind::Enriched => n_nodes + n_elements,
        };
        let ncomp = if kind == FieldKind::Vector { 2 } else { 1 };
        let mut fixed = vec![false; n_full];
        for &v in constrained_nodes {
            for c in 0..ncomp {
                fixed[v * ncomp + c] = true;
            }
        }
        let mut reduced = vec![NONE; n_full];
        let mut free = Vec::with_capacity(n_full);
        let mut constrained = Vec::new();
        for (i, &f) in fixed.iter().enumerate() {
            if f {
                constrained.push(i);
            } else {
                reduced[i] = free.len();
                free.push(i);
            }
        }
        Self { kind, n_nodes, n_elements, reduced, free, constrained }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn n_full(&self) -> usize {
        self.reduced.len()
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    /// Free index of full dof `i`, if unconstrained.
    pub fn reduced(&self, i: usize) -> Option<usize> {
        match self.reduced[i] {
            NONE => None,
            r => Some(r),
        }
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| full[i]).collect()
    }

    /// Full vector with constrained entries set to zero.
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_full()];
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = free[k];
        }
        out
    }

    /// Full dof indices of triangle `t`, in local order.
    pub fn element_dofs(&self, mesh: &TriMesh, t: usize, out: &mut Vec<usize>) {
        out.clear();
        let tri = mesh.triangles()[t];
        match self.kind {
            FieldKind::Vector => {
                for v in tri {
                    out.extend([2 * v, 2 * v + 1]);
                }
            }
            FieldKind::Scalar => out.extend(tri),
            FieldKind::Enriched => {
                out.extend(tri);
                out.push(self.n_nodes + t);
            }
        }
    }

    pub fn local_size(&self) -> usize {
        match self.kind {
            FieldKind::Vector => 6,
            FieldKind::Scalar => 3,
            FieldKind::Enriched => 4,
        }
    }
}

/// A dof map together with the sparsity of its free block and the value
/// positions of every element's local matrix entries.
#[derive(Debug, Clone)]
pub struct Space {
    pub dofs: DofMap,
    pattern: SymPattern,
    nloc: usize,
    /// Per element, `nloc * nloc` positions (row-major), `NONE` where a dof
    /// is constrained or the entry lies in the upper triangle.
    positions: Vec<usize>,
    full_dofs: Vec<usize>,
}

impl Space {
    pub fn new(mesh: &TriMesh, dofs: DofMap) -> Self {
        let nloc = dofs.local_size();
        let ne = mesh.n_triangles();
        let mut full_dofs = Vec::with_capacity(ne * nloc);
        let mut buf = Vec::with_capacity(nloc);
        for t in 0..ne {
            dofs.element_dofs(mesh, t, &mut buf);
            full_dofs.extend_from_slice(&buf);
        }
        let pairs = full_dofs.chunks(nloc).flat_map(|d| {
            let dofs = &dofs;
            (0..nloc).flat_map(move |a| (0..a).filter_map(move |b| Some((dofs.reduced(d[a])?, dofs.reduced(d[b])?))))
        });
        let pattern = SymPattern::from_adjacency(dofs.n_free(), pairs);
        let mut positions = vec![NONE; ne * nloc * nloc];
        for t in 0..ne {
            let d = &full_dofs[t * nloc..(t + 1) * nloc];
            for a in 0..nloc {
                for b in 0..=a {
                    if let (Some(i), Some(j)) = (dofs.reduced(d[a]), dofs.reduced(d[b])) {
                        positions[(t * nloc + a) * nloc + b] = pattern.position(i, j).expect("pattern covers element");
                    }
                }
            }
        }
        Self { dofs, pattern, nloc, positions, full_dofs }
    }

    pub fn pattern(&self) -> &SymPattern {
        &self.pattern
    }

    pub fn zeros(&self) -> SparseSym {
        SparseSym::zeros(&self.pattern)
    }

    pub fn local_size(&self) -> usize {
        self.nloc
    }

    pub fn element_full_dofs(&self, t: usize) -> &[usize] {
        &self.full_dofs[t * self.nloc..(t + 1) * self.nloc]
    }

    /// Adds a symmetric row-major local matrix of element `t`.
    pub fn scatter_matrix(&self, m: &mut SparseSym, t: usize, local: &[f64]) {
        let n = self.nloc;
        let pos = &self.positions[t * n * n..(t + 1) * n * n];
        let vals = m.values_mut();
        for a in 0..n {
            for b in 0..=a {
                let p = pos[a * n + b];
                if p != NONE {
                    vals[p] += local[a * n + b];
                }
            }
        }
    }

    /// Adds a local vector of element `t` into a full-length vector.
    pub fn scatter_full(&self, v: &mut [f64], t: usize, local: &[f64]) {
        for (&i, &x) in self.element_full_dofs(t).iter().zip(local) {
            v[i] += x;
        }
    }

    pub fn gather(&self, full: &[f64], t: usize, out: &mut [f64]) {
        for (o, &i) in out.iter_mut().zip(self.element_full_dofs(t)) {
            *o = full[i];
        }
    }
}
