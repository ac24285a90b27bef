//! Matrix file formats: dense CSV (no header, one row per line) and
//! MatrixMarket coordinate files for sparse data.
//!
//! Values are written with Rust's shortest round-trip float formatting, so a
//! write/read cycle reproduces every entry exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{Matrix, SparseMatrix};

pub fn read_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| Error::parse(path, format!("bad number `{s}` on line {}", rows.len() + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(path, "empty matrix"));
    }
    Matrix::from_rows(&rows).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn write_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for i in 0..m.rows() {
        let line = m.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a MatrixMarket `coordinate real` file (general or symmetric).
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(f).lines();
    let header = match lines.next() {
        Some(l) => l.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::parse(path, "empty file")),
    };
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() < 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(Error::parse(path, "expected `%%MatrixMarket matrix coordinate ...` header"));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(Error::parse(path, format!("unsupported field `{}`", h[3])));
    }
    let symmetric = match h[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::parse(path, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(Error::parse(path, "size line must hold rows, cols and nnz"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(path, format!("bad size `{s}`")));
                size = Some((p(parts[0])?, p(parts[1])?, p(parts[2])?));
            }
            Some((rows, cols, _)) => {
                if parts.len() != 3 {
                    return Err(Error::parse(path, format!("bad entry line `{t}`")));
                }
                let i: usize = parts[0].parse().map_err(|_| Error::parse(path, format!("bad index in `{t}`")))?;
                let j: usize = parts[1].parse().map_err(|_| Error::parse(path, format!("bad index in `{t}`")))?;
                let v: f64 = parts[2].parse().map_err(|_| Error::parse(path, format!("bad value in `{t}`")))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(Error::parse(path, format!("index out of range in `{t}`")));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| Error::parse(path, "missing size line"))?;
    let stored = if symmetric { triplets.iter().filter(|t| t.0 >= t.1).count() } else { triplets.len() };
    if stored != nnz {
        return Err(Error::parse(path, format!("header announces {nnz} entries, found {stored}")));
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

pub fn write_matrix_market(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let io = |e| Error::io(path, e);
    writeln!(w, "%%MatrixMarket matrix coordinate real general").map_err(io)?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz()).map_err(io)?;
    for (i, j, v) in m.triplets() {
        writeln!(w, "{} {} {}", i + 1, j + 1, v).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Dense matrix from either format, chosen by extension (`.mtx` is
/// MatrixMarket, anything else CSV).
pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        Ok(read_matrix_market(path)?.to_dense())
    } else {
        read_csv(path)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}
