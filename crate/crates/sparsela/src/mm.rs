//! Matrix Market coordinate text import/export.

use crate::csr::{CsrMatrix, Triplets};
use crate::LinAlgError;
use std::io::{BufRead, Write};

/// Write in coordinate format. Symmetric matrices store the lower triangle
/// under the `symmetric` qualifier; otherwise `general` is used.
pub fn write_matrix_market<W: Write>(
    w: &mut W,
    a: &CsrMatrix,
    symmetric: bool,
) -> Result<(), LinAlgError> {
    let io = |e: std::io::Error| LinAlgError::Io(e.to_string());
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}").map_err(io)?;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..a.nrows {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let j = j as usize;
            if symmetric && j > i {
                continue;
            }
            entries.push((i, j, v));
        }
    }
    writeln!(w, "{} {} {}", a.nrows, a.ncols, entries.len()).map_err(io)?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v).map_err(io)?;
    }
    Ok(())
}

pub fn read_matrix_market<R: BufRead>(r: &mut R) -> Result<CsrMatrix, LinAlgError> {
    let io = |e: std::io::Error| LinAlgError::Io(e.to_string());
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| LinAlgError::Parse("empty file".into()))?
        .map_err(io)?;
    if !header.starts_with("%%MatrixMarket matrix coordinate real") {
        return Err(LinAlgError::Parse(format!("unsupported header: {header}")));
    }
    let symmetric = header.contains("symmetric");
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line.map_err(io)?;
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        size_line = Some(line);
        break;
    }
    let size_line = size_line.ok_or_else(|| LinAlgError::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| LinAlgError::Parse(format!("bad size token {t}"))))
        .collect::<Result<_, _>>()?;
    if dims.len() != 3 {
        return Err(LinAlgError::Parse("size line needs rows cols nnz".into()));
    }
    let mut t = Triplets::new(dims[0], dims[1]);
    let mut seen = 0usize;
    for line in lines {
        let line = line.map_err(io)?;
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LinAlgError::Parse(format!("bad entry line: {line}")))?;
        let j: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LinAlgError::Parse(format!("bad entry line: {line}")))?;
        let v: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LinAlgError::Parse(format!("bad entry line: {line}")))?;
        t.push(i - 1, j - 1, v);
        if symmetric && i != j {
            t.push(j - 1, i - 1, v);
        }
        seen += 1;
    }
    if seen != dims[2] {
        return Err(LinAlgError::Parse(format!("expected {} entries, found {seen}", dims[2])));
    }
    Ok(t.to_csr())
}
