//! Plain-text mesh format.
//!
//! ```text
//! # comment
//! vertices N
//! x y            (N lines)
//! triangles M
//! a b c          (M lines, zero-based vertex indices)
//! boundary K
//! a b tag        (K lines, tag is dirichlet | neumann | free)
//! ```
//!
//! The boundary section is optional; untagged boundary edges are free.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{edge_key, BoundaryTag, TriMesh};
use crate::error::{Error, Result};

pub fn read_mesh(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    read_mesh_str(&text)
}

pub fn read_mesh_str(text: &str) -> Result<TriMesh> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut cur = Cursor { lines: &lines, pos: 0 };

    let nv = cur.header("vertices")?.ok_or_else(|| parse_err(cur.line(), "expected 'vertices N'"))?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = cur.next("vertices")?;
        let v = numbers::<f64>(ln, l, 2)?;
        vertices.push([v[0], v[1]]);
    }
    let nt = cur.header("triangles")?.ok_or_else(|| parse_err(cur.line(), "expected 'triangles M'"))?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = cur.next("triangles")?;
        let v = numbers::<usize>(ln, l, 3)?;
        triangles.push([v[0], v[1], v[2]]);
    }
    let mut tags = BTreeMap::new();
    if let Some(nb) = cur.header("boundary")? {
        for _ in 0..nb {
            let (ln, l) = cur.next("boundary")?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(parse_err(ln, "expected 'a b tag'"));
            }
            let a: usize = parts[0].parse().map_err(|_| parse_err(ln, "bad vertex index"))?;
            let b: usize = parts[1].parse().map_err(|_| parse_err(ln, "bad vertex index"))?;
            let tag =
                BoundaryTag::parse(parts[2]).ok_or_else(|| parse_err(ln, format!("unknown tag '{}'", parts[2])))?;
            tags.insert(edge_key(a, b), tag);
        }
    }
    if cur.pos < lines.len() {
        return Err(parse_err(cur.line(), "trailing content"));
    }
    TriMesh::new(vertices, triangles, tags)
}

struct Cursor<'a> {
    lines: &'a [(usize, &'a str)],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&self) -> usize {
        self.lines.get(self.pos).map_or(self.lines.last().map_or(0, |l| l.0), |l| l.0)
    }

    fn next(&mut self, section: &str) -> Result<(usize, &'a str)> {
        let l = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| parse_err(self.line(), format!("unexpected end of file in {section}")))?;
        self.pos += 1;
        Ok(l)
    }

    fn header(&mut self, name: &str) -> Result<Option<usize>> {
        let Some(&(ln, l)) = self.lines.get(self.pos) else {
            return Ok(None);
        };
        let mut it = l.split_whitespace();
        if it.next() != Some(name) {
            return Ok(None);
        }
        let n = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(ln, format!("bad {name} count")))?;
        self.pos += 1;
        Ok(Some(n))
    }
}

pub fn write_mesh(mesh: &TriMesh, path: &Path) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", mesh.n_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {}", p[0], p[1]);
    }
    let _ = writeln!(s, "triangles {}", mesh.n_triangles());
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let tagged: Vec<_> = mesh.boundary().iter().filter(|(_, t)| **t != BoundaryTag::Free).collect();
    let _ = writeln!(s, "boundary {}", tagged.len());
    for ((a, b), t) in tagged {
        let _ = writeln!(s, "{a} {b} {}", t.as_str());
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn numbers<T: std::str::FromStr>(ln: usize, l: &str, n: usize) -> Result<Vec<T>> {
    let v: Vec<T> = l
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| parse_err(ln, format!("cannot parse '{s}'"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(parse_err(ln, format!("expected {n} values, got {}", v.len())));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str =
        "# unit square\nvertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 2\n0 1 2\n0 2 3\nboundary 1\n3 2 neumann\n";

    #[test]
    fn parses_and_round_trips() {
        let m = read_mesh_str(SQUARE).unwrap();
        assert_eq!(m.n_triangles(), 2);
        assert_eq!(m.boundary()[&(2, 3)], BoundaryTag::Neumann);
        assert_eq!(m.boundary()[&(0, 1)], BoundaryTag::Free);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        write_mesh(&m, &p).unwrap();
        let back = read_mesh(&p).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.boundary(), m.boundary());
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(read_mesh(Path::new("/nonexistent/mesh.txt")), Err(Error::FileNotFound(_))));
        assert!(matches!(read_mesh_str("vertices 1\n0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            read_mesh_str("vertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nboundary 1\n0 1 glued\n"),
            Err(Error::Parse { line: 8, .. })
        ));
    }
}
