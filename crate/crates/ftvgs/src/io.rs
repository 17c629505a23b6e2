//! CSV readers and writers for matrices and edge lists.
//!
//! Matrices are written row-major, one signal row per line, comma separated,
//! no header. Values use the shortest decimal representation that round-trips
//! the underlying double, so write-read cycles are lossless and outputs are
//! byte-stable. Edge lists are `u,v` lines with 0-based indices.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signal::TimeVertexSignal;

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_error(path: &Path, line: usize, detail: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        detail: detail.into(),
    }
}

/// Reads a dense matrix from CSV. `skip_header` drops the first line.
pub fn read_matrix_csv(path: &Path, skip_header: bool) -> Result<DMatrix<f64>> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let reader = BufReader::new(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if idx == 0 && skip_header {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| parse_error(path, idx + 1, format!("bad number {field:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    path,
                    idx + 1,
                    format!("expected {} fields, got {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 1, "no data rows"));
    }
    let n = rows.len();
    let t = rows[0].len();
    Ok(DMatrix::from_fn(n, t, |i, j| rows[i][j]))
}

/// Reads a matrix CSV and validates it as a signal.
pub fn read_signal_csv(path: &Path, skip_header: bool) -> Result<TimeVertexSignal> {
    TimeVertexSignal::new(read_matrix_csv(path, skip_header)?)
}

/// Writes a dense matrix as CSV with shortest round-trip number formatting.
pub fn write_matrix_csv(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", matrix[(i, j)]));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads an edge list of `u,v` lines.
pub fn read_edge_list_csv(path: &Path) -> Result<Vec<(usize, usize)>> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let reader = BufReader::new(file);
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |field: Option<&str>| -> Result<usize> {
            field
                .ok_or_else(|| parse_error(path, idx + 1, "expected u,v"))?
                .trim()
                .parse::<usize>()
                .map_err(|e| parse_error(path, idx + 1, format!("bad vertex index: {e}")))
        };
        let u = parse(fields.next())?;
        let v = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(parse_error(path, idx + 1, "expected exactly two fields"));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

/// Writes an edge list as `u,v` lines.
pub fn write_edge_list_csv(path: &Path, edges: &[(usize, usize)]) -> Result<()> {
    let mut out = String::new();
    for &(u, v) in edges {
        out.push_str(&format!("{u},{v}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    write_atomic(path, body.as_bytes())
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let body = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(serde_json::from_str(&body)?)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    file.write_all(bytes).map_err(|e| io_error(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = DMatrix::from_fn(7, 5, |_, _| rng.gen_range(-1.0..1.0f64) * 1e3);
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path, false).unwrap();
        assert_eq!(m, back);

        // writing twice produces identical bytes
        let first = std::fs::read(&path).unwrap();
        write_matrix_csv(&path, &m).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
    }

    #[test]
    fn header_skipping_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "a,b\n1,2\n3,4\n").unwrap();
        let m = read_matrix_csv(&path, true).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert!(read_matrix_csv(&path, false).is_err());

        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(matches!(
            read_matrix_csv(&path, false),
            Err(Error::Parse { line: 2, .. })
        ));

        assert!(matches!(
            read_matrix_csv(Path::new("/nonexistent/m.csv"), false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let edges = vec![(0, 1), (1, 2), (0, 3)];
        write_edge_list_csv(&path, &edges).unwrap();
        assert_eq!(read_edge_list_csv(&path).unwrap(), edges);

        std::fs::write(&path, "0,1,2\n").unwrap();
        assert!(read_edge_list_csv(&path).is_err());
    }
}
