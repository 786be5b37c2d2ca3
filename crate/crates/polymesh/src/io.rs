//! Text mesh format, versioned header `polymg-mesh v1`:
//!
//! ```text
//! polymg-mesh v1
//! <vertex count>
//! x y                (one per vertex, shortest round-trip decimals)
//! <cell count>
//! k i0 i1 ... i(k-1) (one CCW index loop per cell)
//! ```
//!
//! Faces are never stored; they are regenerated on load.

use crate::{MeshError, PolyMesh};
use geomkit::{Point, Rect};
use std::io::{BufRead, Write};

pub const MESH_HEADER: &str = "polymg-mesh v1";

pub fn write_mesh<W: Write>(w: &mut W, mesh: &PolyMesh) -> Result<(), MeshError> {
    let io = |e: std::io::Error| MeshError::Io(e.to_string());
    writeln!(w, "{MESH_HEADER}").map_err(io)?;
    writeln!(w, "{}", mesh.n_vertices()).map_err(io)?;
    for p in &mesh.vertices {
        writeln!(w, "{} {}", p.x, p.y).map_err(io)?;
    }
    writeln!(w, "{}", mesh.n_cells()).map_err(io)?;
    for loop_idx in &mesh.cells {
        write!(w, "{}", loop_idx.len()).map_err(io)?;
        for i in loop_idx {
            write!(w, " {i}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    Ok(())
}

pub fn write_mesh_file(path: &std::path::Path, mesh: &PolyMesh) -> Result<(), MeshError> {
    let f = std::fs::File::create(path).map_err(|e| MeshError::Io(format!("{path:?}: {e}")))?;
    let mut w = std::io::BufWriter::new(f);
    write_mesh(&mut w, mesh)
}

pub fn read_mesh<R: BufRead>(r: &mut R) -> Result<PolyMesh, MeshError> {
    let io = |e: std::io::Error| MeshError::Io(e.to_string());
    let mut lines = r.lines();
    let mut next_line = || -> Result<String, MeshError> {
        loop {
            match lines.next() {
                Some(line) => {
                    let line = line.map_err(io)?;
                    if !line.trim().is_empty() {
                        return Ok(line);
                    }
                }
                None => return Err(MeshError::Parse("unexpected end of mesh file".into())),
            }
        }
    };
    let header = next_line()?;
    if header.trim() != MESH_HEADER {
        return Err(MeshError::Parse(format!("bad header: {header:?}")));
    }
    let nv: usize = next_line()?
        .trim()
        .parse()
        .map_err(|_| MeshError::Parse("bad vertex count".into()))?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = next_line()?;
        let mut it = line.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MeshError::Parse(format!("bad vertex line: {line}")))?;
        let y: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MeshError::Parse(format!("bad vertex line: {line}")))?;
        vertices.push(Point::new(x, y));
    }
    let nc: usize = next_line()?
        .trim()
        .parse()
        .map_err(|_| MeshError::Parse("bad cell count".into()))?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let line = next_line()?;
        let mut it = line.split_whitespace();
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MeshError::Parse(format!("bad cell line: {line}")))?;
        let idx: Vec<usize> = it
            .map(|t| t.parse().map_err(|_| MeshError::Parse(format!("bad index: {t}"))))
            .collect::<Result<_, _>>()?;
        if idx.len() != k || idx.iter().any(|&i| i >= nv) {
            return Err(MeshError::Parse(format!("inconsistent cell line: {line}")));
        }
        cells.push(idx);
    }
    let domain = Rect::hull_of(&vertices);
    let mut mesh = PolyMesh::from_cells(domain, vertices, cells)?;
    mesh.extract_faces()?;
    Ok(mesh)
}

pub fn read_mesh_file(path: &std::path::Path) -> Result<PolyMesh, MeshError> {
    let f = std::fs::File::open(path).map_err(|e| MeshError::Io(format!("{path:?}: {e}")))?;
    let mut r = std::io::BufReader::new(f);
    read_mesh(&mut r)
}
