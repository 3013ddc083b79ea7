//! Matrix Market coordinate real general files.

use std::io::{BufRead, Write};

use super::format::fmt_g;
use crate::assembly::CsrMatrix;
use crate::error::{Error, Result};

pub fn write_matrix_market<W: Write>(m: &CsrMatrix<f64>, mut w: W) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_g(v, 17))?;
    }
    Ok(())
}

/// Reads `general` and `symmetric` real coordinate files.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CsrMatrix<f64>> {
    let bad = |msg: String| Error::parse("Matrix Market", msg);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty input".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let h: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if h.len() < 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(bad(format!("unsupported header '{header}'")));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(bad(format!("unsupported field '{}'", h[3])));
    }
    let symmetric = match h[4].as_str() {
        "general" => false,
        "symmetric" => true,
        s => return Err(bad(format!("unsupported symmetry '{s}'"))),
    };
    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let at = |k: usize| f.get(k).copied().ok_or_else(|| bad(format!("line {}: missing field", ln + 2)));
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("line {}: {e}", ln + 2)));
        match size {
            None => size = Some((int(at(0)?)?, int(at(1)?)?, int(at(2)?)?)),
            Some((nr, nc, _)) => {
                let (i, j) = (int(at(0)?)?, int(at(1)?)?);
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(bad(format!("line {}: index ({i}, {j}) out of range", ln + 2)));
                }
                let v: f64 = at(2)?.parse().map_err(|e| bad(format!("line {}: {e}", ln + 2)))?;
                trip.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    trip.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (nr, nc, nnz) = size.ok_or_else(|| bad("missing size line".into()))?;
    let stored = if symmetric { trip.iter().filter(|t| t.0 >= t.1).count() } else { trip.len() };
    if stored != nnz {
        return Err(bad(format!("expected {nnz} entries, found {stored}")));
    }
    Ok(CsrMatrix::from_triplets(nr, nc, trip))
}
