//! Matrix Market serialization: coordinate format (real, general) for
//! matrices and array format for vectors.
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! a write/read cycle reproduces every entry bit-exactly.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use singular_gmres::densela::{DenseMatrix, DenseVector};

use crate::CliError;

const COORD_HEADER: &str = "%%MatrixMarket matrix coordinate real general";
const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

/// Writes a dense matrix in coordinate format, listing only nonzeros with
/// 1-based indices.
pub fn write_matrix(path: &Path, a: &DenseMatrix) -> Result<(), CliError> {
    let mut entries = Vec::new();
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let v = a[(i, j)];
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::new();
    out.push_str(COORD_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", a.rows(), a.cols(), entries.len()));
    for (i, j, v) in entries {
        out.push_str(&format!("{i} {j} {v:e}\n"));
    }
    write_atomic(path, &out)
}

/// Reads a coordinate-format matrix into a dense matrix.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = content_lines(path, &text, COORD_HEADER)?;
    let size = lines
        .next()
        .ok_or_else(|| CliError::parse(path, "missing size line"))?;
    let dims = parse_fields::<usize>(path, size, 3)?;
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows == 0 || cols == 0 {
        return Err(CliError::parse(path, "zero matrix dimension"));
    }
    let mut a = DenseMatrix::zeros(rows, cols);
    let mut seen = 0usize;
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(CliError::parse(path, "entry line must have 3 fields"));
        }
        let i: usize = f[0]
            .parse()
            .map_err(|_| CliError::parse(path, "bad row index"))?;
        let j: usize = f[1]
            .parse()
            .map_err(|_| CliError::parse(path, "bad column index"))?;
        let v: f64 = f[2]
            .parse()
            .map_err(|_| CliError::parse(path, "bad value"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(CliError::parse(path, "entry index out of bounds"));
        }
        a[(i - 1, j - 1)] = v;
        seen += 1;
    }
    if seen != nnz {
        return Err(CliError::parse(path, "entry count disagrees with header"));
    }
    Ok(a)
}

/// Writes a vector in array format (one column).
pub fn write_vector(path: &Path, v: &DenseVector) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(ARRAY_HEADER);
    out.push('\n');
    out.push_str(&format!("{} 1\n", v.len()));
    for x in v.as_slice() {
        out.push_str(&format!("{x:e}\n"));
    }
    write_atomic(path, &out)
}

/// Reads an array-format single-column vector.
pub fn read_vector(path: &Path) -> Result<DenseVector, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = content_lines(path, &text, ARRAY_HEADER)?;
    let size = lines
        .next()
        .ok_or_else(|| CliError::parse(path, "missing size line"))?;
    let dims = parse_fields::<usize>(path, size, 2)?;
    if dims[1] != 1 {
        return Err(CliError::parse(path, "expected a single-column vector"));
    }
    let mut data = Vec::with_capacity(dims[0]);
    for line in lines {
        let x: f64 = line
            .trim()
            .parse()
            .map_err(|_| CliError::parse(path, "bad value"))?;
        data.push(x);
    }
    if data.len() != dims[0] {
        return Err(CliError::parse(path, "value count disagrees with header"));
    }
    DenseVector::from_data(data).map_err(|e| CliError::parse(path, &format!("{e:?}")))
}

/// Skips the banner (verifying the object/format/field kinds) and `%`
/// comment lines, yielding content lines.
fn content_lines<'a>(
    path: &Path,
    text: &'a str,
    expected_header: &str,
) -> Result<impl Iterator<Item = &'a str>, CliError> {
    let mut lines = text.lines();
    let banner = lines
        .next()
        .ok_or_else(|| CliError::parse(path, "empty file"))?;
    let got: Vec<&str> = banner.split_whitespace().collect();
    let want: Vec<&str> = expected_header.split_whitespace().collect();
    if got.len() != want.len()
        || !got
            .iter()
            .zip(&want)
            .all(|(g, w)| g.eq_ignore_ascii_case(w))
    {
        return Err(CliError::parse(path, "unsupported Matrix Market banner"));
    }
    Ok(lines
        .filter(|l| !l.trim_start().starts_with('%'))
        .filter(|l| !l.trim().is_empty()))
}

fn parse_fields<T: std::str::FromStr>(
    path: &Path,
    line: &str,
    n: usize,
) -> Result<Vec<T>, CliError> {
    let fields: Result<Vec<T>, _> = line.split_whitespace().map(str::parse).collect();
    match fields {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(CliError::parse(path, "malformed size line")),
    }
}

/// Writes via a temp file + rename so readers never observe partial output.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
        None => Path::new(&format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        ))
        .to_path_buf(),
    };
    {
        let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(path, e))?;
        f.write_all(content.as_bytes())
            .map_err(|e| CliError::io(path, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn vector_roundtrip_preserves_awkward_floats_bit_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("v.mtx");
        let v = DenseVector::from_data(vec![
            1.0,
            -2.5e-300,
            5e-324,    // smallest positive subnormal
            0.1 + 0.2, // 0.30000000000000004
            -1.7976931348623157e308,
            0.0,
        ])
        .unwrap();
        write_vector(&path, &v).unwrap();
        let w = read_vector(&path).unwrap();
        for (a, b) in v.as_slice().iter().zip(w.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn matrix_roundtrip_preserves_sparsity_and_values() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.mtx");
        let mut a = DenseMatrix::zeros(3, 4);
        a[(0, 0)] = 1.0 / 3.0;
        a[(2, 3)] = -1e-12;
        a[(1, 2)] = 7.0;
        write_matrix(&path, &a).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(COORD_HEADER));
        assert!(text.contains("3 4 3"), "nnz header: {text}");
        let b = read_matrix(&path).unwrap();
        for j in 0..4 {
            for i in 0..3 {
                assert_eq!(a[(i, j)].to_bits(), b[(i, j)].to_bits());
            }
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.mtx");
        for bad in [
            "",
            "%%MatrixMarket matrix coordinate complex general\n1 1 0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        ] {
            std::fs::write(&path, bad).unwrap();
            assert!(read_matrix(&path).is_err(), "accepted: {bad:?}");
        }
    }
}
