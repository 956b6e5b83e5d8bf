use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::fem::N_QUAD;
use crate::mesh::TriMesh;
use crate::tintegrate::FieldState;

/// Legacy ASCII unstructured grid with `u` and `phi` at the points and the
/// element maximum of the history at the cells.
pub fn vtk_string(mesh: &TriMesh, state: &FieldState) -> String {
    let nv = mesh.n_vertices();
    let nt = mesh.n_triangles();
    let mut s = String::with_capacity(64 * (nv + nt));
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "fractura t = {:e}", state.t);
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {nv} double");
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:e} {:e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {nv}");
    let _ = writeln!(s, "VECTORS u double");
    for i in 0..nv {
        let _ = writeln!(s, "{:e} {:e} 0", state.u[2 * i], state.u[2 * i + 1]);
    }
    let _ = writeln!(s, "SCALARS phi double 1\nLOOKUP_TABLE default");
    for p in &state.phi {
        let _ = writeln!(s, "{p:e}");
    }
    let _ = writeln!(s, "CELL_DATA {nt}");
    let _ = writeln!(s, "SCALARS H double 1\nLOOKUP_TABLE default");
    for t in 0..nt {
        let h = state.history[t * N_QUAD..(t + 1) * N_QUAD].iter().copied().fold(0.0, f64::max);
        let _ = writeln!(s, "{h:e}");
    }
    s
}

pub fn write_vtk(path: &Path, mesh: &TriMesh, state: &FieldState) -> Result<()> {
    std::fs::write(path, vtk_string(mesh, state))?;
    Ok(())
}
