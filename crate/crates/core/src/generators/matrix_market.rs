//! Matrix Market reader (coordinate and array, real or integer, general,
//! symmetric or skew-symmetric) and an array-format writer.
//!
//! Values are parsed as exact decimals into double-double, so files written
//! with enough digits round-trip in either precision.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{param, ProblemInstance, ProblemMetadata};
use crate::linalg::Matrix;
use crate::precision::{format_scientific, DoubleDouble, Real};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(Layout, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(line_no, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(line_no, format!("unknown format '{other}'"))),
    };
    match words[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(parse_err(line_no, format!("unsupported field '{other}' (only real data)"))),
    }
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(parse_err(line_no, format!("unsupported symmetry '{other}'"))),
    };
    Ok((layout, symmetry))
}

fn parse_usize(line_no: usize, word: Option<&str>, what: &str) -> Result<usize> {
    word.ok_or_else(|| parse_err(line_no, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid {what}")))
}

fn parse_value(line_no: usize, word: Option<&str>) -> Result<DoubleDouble> {
    let w = word.ok_or_else(|| parse_err(line_no, "missing value"))?;
    w.parse::<DoubleDouble>()
        .map_err(|_| parse_err(line_no, format!("invalid value '{w}'")))
}

/// Reads a Matrix Market stream into a dense extended-precision matrix.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Matrix<DoubleDouble>> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (first_no, first) = match lines.next() {
        Some((no, l)) => (no, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    let (layout, symmetry) = parse_header(first_no, &first)?;

    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(text) => {
            let t = text.trim().to_string();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((no, t)))
            }
        }
        Err(e) => Some(Err(Error::from(e))),
    });

    let (size_no, size_line) = data
        .next()
        .ok_or_else(|| parse_err(first_no + 1, "missing size line"))??;
    let mut words = size_line.split_whitespace();
    let m = parse_usize(size_no, words.next(), "row count")?;
    let n = parse_usize(size_no, words.next(), "column count")?;
    if symmetry != Symmetry::General && m != n {
        return Err(parse_err(size_no, "symmetric storage requires a square matrix"));
    }
    let mut a = Matrix::zeros(m, n);
    let mut last_no = size_no;

    let place = |a: &mut Matrix<DoubleDouble>, i: usize, j: usize, v: DoubleDouble| {
        a[(i, j)] += v;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => a[(j, i)] += v,
                Symmetry::Skew => a[(j, i)] -= v,
            }
        }
    };

    match layout {
        Layout::Coordinate => {
            let nnz = parse_usize(size_no, words.next(), "entry count")?;
            if words.next().is_some() {
                return Err(parse_err(size_no, "trailing data on size line"));
            }
            for k in 0..nnz {
                let (no, line) = data
                    .next()
                    .ok_or_else(|| parse_err(last_no + 1, format!("expected {nnz} entries, found {k}")))??;
                last_no = no;
                let mut w = line.split_whitespace();
                let i = parse_usize(no, w.next(), "row index")?;
                let j = parse_usize(no, w.next(), "column index")?;
                let v = parse_value(no, w.next())?;
                if w.next().is_some() {
                    return Err(parse_err(no, "trailing data on entry line"));
                }
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(parse_err(no, format!("index ({i}, {j}) out of range for {m} x {n}")));
                }
                if symmetry != Symmetry::General && i < j {
                    return Err(parse_err(no, "entry above the diagonal in symmetric storage"));
                }
                if symmetry == Symmetry::Skew && i == j {
                    return Err(parse_err(no, "diagonal entry in skew-symmetric storage"));
                }
                place(&mut a, i - 1, j - 1, v);
            }
        }
        Layout::Array => {
            if words.next().is_some() {
                return Err(parse_err(size_no, "trailing data on size line"));
            }
            let positions: Vec<(usize, usize)> = (0..n)
                .flat_map(|j| {
                    let start = match symmetry {
                        Symmetry::General => 0,
                        Symmetry::Symmetric => j,
                        Symmetry::Skew => j + 1,
                    };
                    (start..m).map(move |i| (i, j))
                })
                .collect();
            let total = positions.len();
            for (k, &(i, j)) in positions.iter().enumerate() {
                let (no, line) = data
                    .next()
                    .ok_or_else(|| parse_err(last_no + 1, format!("expected {total} values, found {k}")))??;
                last_no = no;
                let mut w = line.split_whitespace();
                let v = parse_value(no, w.next())?;
                if w.next().is_some() {
                    return Err(parse_err(no, "more than one value on a line"));
                }
                place(&mut a, i, j, v);
            }
        }
    }
    if let Some(extra) = data.next() {
        let (no, _) = extra?;
        return Err(parse_err(no, "data after the last entry"));
    }
    Ok(a)
}

/// Parses Matrix Market text.
pub fn parse_matrix_market(text: &str) -> Result<Matrix<DoubleDouble>> {
    read_matrix_market(text.as_bytes())
}

fn open(path: &Path) -> Result<Matrix<DoubleDouble>> {
    read_matrix_market(BufReader::new(std::fs::File::open(path)?))
}

/// Loads `A` from a file; `b = A · (1, …, 1)ᵀ`.
pub fn load_matrix_market<T: Real>(path: &Path) -> Result<ProblemInstance<T>> {
    let a = open(path)?.map(T::from_extended);
    let b = a.matvec(&vec![T::one(); a.cols()])?;
    ProblemInstance::new(a, b, metadata(path, None))
}

/// Loads `A` and takes `b` from a second file holding an `m × 1` matrix.
pub fn load_matrix_market_with_rhs<T: Real>(path: &Path, rhs: &Path) -> Result<ProblemInstance<T>> {
    let a = open(path)?.map(T::from_extended);
    let r = open(rhs)?;
    if r.cols() != 1 || r.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "load_matrix_market_with_rhs",
            expected: format!("{} x 1 right-hand side", a.rows()),
            found: format!("{} x {}", r.rows(), r.cols()),
        });
    }
    let b = r.col(0).iter().map(|&x| T::from_extended(x)).collect();
    ProblemInstance::new(a, b, metadata(path, Some(rhs)))
}

fn metadata(path: &Path, rhs: Option<&Path>) -> ProblemMetadata {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix-market".into());
    let mut parameters = vec![param("path", path.display())];
    if let Some(r) = rhs {
        parameters.push(param("rhs", r.display()));
    }
    ProblemMetadata {
        name,
        seed: None,
        parameters,
        singular_values: None,
        eigenvalues: None,
        consistent: rhs.is_none(),
    }
}

/// Writes `a` in array format with `T::DIGITS` significant digits.
pub fn write_matrix_market_array<T: Real, W: Write>(mut w: W, a: &Matrix<T>) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for &x in a.col(j) {
            writeln!(w, "{}", format_scientific(x.to_extended(), T::DIGITS))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f64_matrix(text: &str) -> Matrix<f64> {
        parse_matrix_market(text).unwrap().map(|x| x.to_f64())
    }

    #[test]
    fn coordinate_diagonal() {
        let a = f64_matrix("%%MatrixMarket matrix coordinate real general\n% note\n2 2 2\n1 1 1.0\n2 2 2.0\n");
        assert_eq!(a, Matrix::diagonal(&[1.0, 2.0]));
    }

    #[test]
    fn symmetric_and_skew_expand() {
        let s = f64_matrix("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 3\n");
        assert_eq!(s, Matrix::from_rows(&[&[4.0, 3.0], &[3.0, 0.0]]));
        let k = f64_matrix("%%MatrixMarket matrix array real skew-symmetric\n2 2\n5\n");
        assert_eq!(k, Matrix::from_rows(&[&[0.0, -5.0], &[5.0, 0.0]]));
    }

    #[test]
    fn array_is_column_major() {
        let a = f64_matrix("%%MatrixMarket matrix array integer general\n2 3\n1\n2\n3\n4\n5\n6\n");
        assert_eq!(a, Matrix::from_rows(&[&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0]]));
    }

    fn err_line(text: &str) -> usize {
        match parse_matrix_market(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(err_line("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), 1);
        assert_eq!(err_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"), 3);
        assert_eq!(err_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"), 4);
        assert_eq!(err_line("%%MatrixMarket matrix coordinate real general\n%c\n2 2 1\n1 1 x\n"), 4);
        assert_eq!(err_line("not a header\n"), 1);
        assert_eq!(err_line("%%MatrixMarket matrix array real general\n1 1\n1\n2\n"), 4);
    }

    #[test]
    fn array_round_trip_in_extended_precision() {
        let a = crate::linalg::random_matrix::<DoubleDouble>(3, 2, 4)
            .map(|x| x / DoubleDouble::from_f64(3.0));
        let mut buf = Vec::new();
        write_matrix_market_array(&mut buf, &a).unwrap();
        let b = read_matrix_market(buf.as_slice()).unwrap();
        assert!(a.sub(&b).max_abs().to_f64() < 1e-31);
    }
}
