//! Matrix Market exchange format: array and coordinate layouts, real
//! values, general or symmetric storage.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use specsub_core::matrix::{ColumnAccess, DenseMatrix, SparseMatrix, SymMatrix};

#[derive(Debug, Clone)]
pub enum MmMatrix {
    Dense(DenseMatrix),
    DenseSymmetric(SymMatrix),
    Sparse(SparseMatrix),
}

impl MmMatrix {
    pub fn into_sym(self) -> Result<SymMatrix> {
        match self {
            MmMatrix::DenseSymmetric(s) => Ok(s),
            MmMatrix::Dense(d) => {
                SymMatrix::from_dense(&d).map_err(|e| anyhow!("not square: {e}"))
            }
            MmMatrix::Sparse(s) => s.to_sym().map_err(|e| anyhow!("not square: {e}")),
        }
    }

    pub fn into_dense(self) -> DenseMatrix {
        match self {
            MmMatrix::Dense(d) => d,
            MmMatrix::DenseSymmetric(s) => s.to_dense(),
            MmMatrix::Sparse(s) => {
                let mut d = DenseMatrix::zeros(s.rows(), s.cols());
                for &(i, j, v) in s.triplets() {
                    d.set(i, j, v);
                    if s.is_symmetric() && i != j {
                        d.set(j, i, v);
                    }
                }
                d
            }
        }
    }
}

pub fn write_dense(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("create {path:?}"))?);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{:.17e}", m.get(i, j))?;
        }
    }
    Ok(())
}

/// Symmetric array format stores the lower triangle, column by column.
pub fn write_symmetric(path: &Path, m: &SymMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("create {path:?}"))?);
    writeln!(w, "%%MatrixMarket matrix array real symmetric")?;
    writeln!(w, "{} {}", m.dim(), m.dim())?;
    for j in 0..m.dim() {
        for i in j..m.dim() {
            writeln!(w, "{:.17e}", m.get(i, j))?;
        }
    }
    Ok(())
}

/// Coordinate format, 1-based indices.
pub fn write_sparse(path: &Path, m: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("create {path:?}"))?);
    let kind = if m.is_symmetric() { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for &(i, j, v) in m.triplets() {
        writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Column vector as an n-by-1 array.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("create {path:?}"))?);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{x:.17e}")?;
    }
    Ok(())
}

pub fn read(path: &Path) -> Result<MmMatrix> {
    let f = File::open(path).with_context(|| format!("open {path:?}"))?;
    let mut lines = BufReader::new(f).lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("empty file"))??;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_lowercase()).collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        bail!("not a MatrixMarket matrix file: {header}");
    }
    let layout = fields[2].as_str();
    let value_type = fields[3].as_str();
    let storage = fields[4].as_str();
    if !matches!(value_type, "real" | "integer") {
        bail!("unsupported value type {value_type} (real expected)");
    }
    let symmetric = match storage {
        "general" => false,
        "symmetric" => true,
        other => bail!("unsupported storage {other}"),
    };

    let mut data_lines = lines
        .filter_map(|l| l.ok())
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size_line = data_lines.next().ok_or_else(|| anyhow!("missing size line"))?;
    let dims: Vec<usize> =
        size_line.split_whitespace().map(|t| t.parse()).collect::<Result<_, _>>()?;

    match layout {
        "array" => {
            if dims.len() != 2 {
                bail!("array size line needs rows cols");
            }
            let (rows, cols) = (dims[0], dims[1]);
            let values: Vec<f64> = data_lines
                .flat_map(|l| {
                    l.split_whitespace().map(|t| t.parse::<f64>()).collect::<Vec<_>>()
                })
                .collect::<Result<_, _>>()?;
            if symmetric {
                if rows != cols {
                    bail!("symmetric matrix must be square");
                }
                let expect = rows * (rows + 1) / 2;
                if values.len() != expect {
                    bail!("expected {expect} lower-triangle entries, got {}", values.len());
                }
                let mut m = SymMatrix::zeros(rows);
                let mut it = values.into_iter();
                for j in 0..cols {
                    for i in j..rows {
                        m.set_sym(i, j, it.next().unwrap());
                    }
                }
                Ok(MmMatrix::DenseSymmetric(m))
            } else {
                if values.len() != rows * cols {
                    bail!("expected {} entries, got {}", rows * cols, values.len());
                }
                let m = DenseMatrix::from_column_major(rows, cols, values)
                    .map_err(|e| anyhow!("{e}"))?;
                Ok(MmMatrix::Dense(m))
            }
        }
        "coordinate" => {
            if dims.len() != 3 {
                bail!("coordinate size line needs rows cols nnz");
            }
            let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
            let mut triplets = Vec::with_capacity(nnz);
            for line in data_lines {
                let mut it = line.split_whitespace();
                let i: usize = it.next().ok_or_else(|| anyhow!("bad triplet"))?.parse()?;
                let j: usize = it.next().ok_or_else(|| anyhow!("bad triplet"))?.parse()?;
                let v: f64 = it.next().ok_or_else(|| anyhow!("bad triplet"))?.parse()?;
                if i == 0 || j == 0 {
                    bail!("coordinate indices are 1-based");
                }
                if v != 0.0 {
                    // symmetric files store the lower triangle: i >= j
                    triplets.push((i - 1, j - 1, v));
                }
            }
            if triplets.len() > nnz {
                bail!("more triplets than declared");
            }
            let m = SparseMatrix::new(rows, cols, triplets, symmetric)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(MmMatrix::Sparse(m))
        }
        other => bail!("unsupported layout {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use specsub_core::RngStream;

    #[test]
    fn dense_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.mtx");
        let m = RngStream::new(3).gaussian_matrix(4, 3);
        write_dense(&path, &m).unwrap();
        let back = read(&path).unwrap().into_dense();
        assert_eq!(back.data(), m.data());
    }

    #[test]
    fn symmetric_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.mtx");
        let g = RngStream::new(5).gaussian_matrix(5, 5);
        let m = SymMatrix::from_dense(&g).unwrap();
        write_symmetric(&path, &m).unwrap();
        let back = read(&path).unwrap().into_sym().unwrap();
        assert_eq!(back.data(), m.data());
    }

    #[test]
    fn sparse_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.mtx");
        let m = SparseMatrix::new(4, 4, vec![(2, 1, -1.5), (3, 3, 2.0)], true).unwrap();
        write_sparse(&path, &m).unwrap();
        match read(&path).unwrap() {
            MmMatrix::Sparse(s) => {
                assert!(s.is_symmetric());
                assert_eq!(s.triplets(), m.triplets());
            }
            other => panic!("expected sparse, got {other:?}"),
        }
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mtx");
        std::fs::write(&path, "%%MatrixMarket matrix array complex general\n2 2\n").unwrap();
        assert!(read(&path).is_err());
        std::fs::write(&path, "hello\n").unwrap();
        assert!(read(&path).is_err());
    }
}
