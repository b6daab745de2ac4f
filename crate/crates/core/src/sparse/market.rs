//! Matrix Market coordinate-format reader.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<Symmetry> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(line_no, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(line_no, format!("unsupported object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(line_no, format!("unsupported format '{}'", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(parse_err(line_no, format!("unsupported field '{other}'"))),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        other => Err(parse_err(line_no, format!("unsupported symmetry '{other}'"))),
    }
}

fn parse_index(line_no: usize, token: Option<&str>, bound: usize, what: &str) -> Result<usize> {
    let token = token.ok_or_else(|| parse_err(line_no, format!("missing {what} index")))?;
    let idx: usize = token
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid {what} index '{token}'")))?;
    if idx == 0 || idx > bound {
        return Err(parse_err(
            line_no,
            format!("{what} index {idx} outside 1..={bound}"),
        ));
    }
    Ok(idx - 1)
}

/// Parses a Matrix Market coordinate stream into CSR.
///
/// Symmetric storage is expanded to both triangles, duplicate entries are
/// summed and indices are converted to 0-based.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_no, header) = match lines.next() {
        Some((no, line)) => (no, line.map_err(|e| parse_err(no, e.to_string()))?),
        None => return Err(parse_err(1, "empty input")),
    };
    let symmetry = parse_header(header_no, &header)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = 0usize;

    for (line_no, line) in lines {
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_ascii_whitespace();
        match size {
            None => {
                let mut dims = [0usize; 3];
                for d in dims.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, "size line needs rows, cols and nnz"))?;
                    *d = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid size entry '{tok}'")))?;
                }
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens on size line"));
                }
                if symmetry == Symmetry::Symmetric && dims[0] != dims[1] {
                    return Err(parse_err(line_no, "symmetric matrix must be square"));
                }
                let cap = if symmetry == Symmetry::Symmetric {
                    2 * dims[2]
                } else {
                    dims[2]
                };
                triplets.reserve(cap);
                size = Some((dims[0], dims[1], dims[2]));
            }
            Some((n_rows, n_cols, nnz)) => {
                if seen == nnz {
                    return Err(parse_err(
                        line_no,
                        format!("more entries than the declared {nnz}"),
                    ));
                }
                let r = parse_index(line_no, tokens.next(), n_rows, "row")?;
                let c = parse_index(line_no, tokens.next(), n_cols, "column")?;
                let tok = tokens
                    .next()
                    .ok_or_else(|| parse_err(line_no, "missing value"))?;
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("invalid value '{tok}'")))?;
                if !v.is_finite() {
                    return Err(parse_err(line_no, "non-finite value"));
                }
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens on entry line"));
                }
                triplets.push((r, c, v));
                if symmetry == Symmetry::Symmetric && r != c {
                    triplets.push((c, r, v));
                }
                seen += 1;
            }
        }
    }

    let (n_rows, n_cols, nnz) = size.ok_or_else(|| parse_err(header_no + 1, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(
            header_no,
            format!("declared {nnz} entries but found {seen}"),
        ));
    }
    CsrMatrix::from_triplets(n_rows, n_cols, &triplets)
}

/// Reads a Matrix Market file from disk.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_market(BufReader::new(file))
}
