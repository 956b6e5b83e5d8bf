use super::TriMesh;
use crate::error::{Error, Result};

/// Transfers a P1 field with `ncomp` interleaved components per vertex from
/// `old` to `new`, which must be `old` itself or its direct refinement.
pub fn project_nodal(old: &TriMesh, new: &TriMesh, values: &[f64], ncomp: usize) -> Result<Vec<f64>> {
    if values.len() != old.n_vertices() * ncomp {
        return Err(Error::InvalidParameter(format!(
            "nodal field has {} entries, expected {}",
            values.len(),
            old.n_vertices() * ncomp
        )));
    }
    if new.id() == old.id() {
        return Ok(values.to_vec());
    }
    let g = match new.genealogy() {
        Some(g) if g.parent_id == old.id() => g,
        _ => return Err(Error::ProjectionTopologyMismatch),
    };
    let mut out = Vec::with_capacity(new.n_vertices() * ncomp);
    out.extend_from_slice(&values[..g.n_parent_vertices * ncomp]);
    for &(a, b) in &g.midpoint_of {
        for c in 0..ncomp {
            out.push(0.5 * (values[a * ncomp + c] + values[b * ncomp + c]));
        }
    }
    Ok(out)
}

/// Transfers quadrature-point data (`nq` values per triangle). Triangles
/// that were not split keep their values; children of a split triangle all
/// receive the parent's maximum, so the field never decreases.
pub fn project_history(old: &TriMesh, new: &TriMesh, values: &[f64], nq: usize) -> Result<Vec<f64>> {
    if values.len() != old.n_triangles() * nq {
        return Err(Error::InvalidParameter(format!(
            "history field has {} entries, expected {}",
            values.len(),
            old.n_triangles() * nq
        )));
    }
    if new.id() == old.id() {
        return Ok(values.to_vec());
    }
    let g = match new.genealogy() {
        Some(g) if g.parent_id == old.id() => g,
        _ => return Err(Error::ProjectionTopologyMismatch),
    };
    let mut n_children = vec![0usize; old.n_triangles()];
    for &p in &g.parent_triangle {
        n_children[p] += 1;
    }
    let mut out = Vec::with_capacity(new.n_triangles() * nq);
    for &p in &g.parent_triangle {
        let src = &values[p * nq..(p + 1) * nq];
        if n_children[p] == 1 {
            out.extend_from_slice(src);
        } else {
            let m = src.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.extend(std::iter::repeat_n(m, nq));
        }
    }
    Ok(out)
}
