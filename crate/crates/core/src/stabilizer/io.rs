//! Text formats for codes.
//!
//! Stabilizer text: one generator per line over `{I, X, Z, Y}`, `#` starts a
//! comment, and an optional `!ebits=c` line marks the last `c` columns as
//! receiver-held.
//!
//! alist: the usual sparse interchange format with 1-indexed adjacency lists
//! padded with zeros. A header of `N M 4` instead of `N M` marks a GF(4)
//! matrix whose adjacency entries are `index value` pairs, value 1, 2, 3
//! standing for 1, ω, ω̄.

use std::fmt::Write as _;

use thiserror::Error;

use super::{PauliString, StabilizerCode, StabilizerError};
use crate::gf4::Gf4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("input contains no data")]
    Empty,
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: malformed entry: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("line {line}: index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        bound: usize,
    },
    #[error("row and column lists disagree at row {row}, column {col}")]
    Inconsistent { row: usize, col: usize },
    #[error("line {line}: {source}")]
    InvalidRow {
        line: usize,
        source: StabilizerError,
    },
    #[error("generators {first} and {second} anticommute")]
    NonCommuting { first: usize, second: usize },
    #[error(transparent)]
    Code(StabilizerError),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_stabilizer_text(text: &str) -> Result<StabilizerCode, FormatError> {
    let mut rows = Vec::new();
    let mut ebits = 0usize;
    for (line, content) in content_lines(text) {
        if let Some(annotation) = content.strip_prefix('!') {
            let value = annotation
                .strip_prefix("ebits=")
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| FormatError::MalformedHeader {
                    line,
                    reason: format!("unknown annotation {content:?}"),
                })?;
            ebits = value;
            continue;
        }
        let row: PauliString = content
            .parse()
            .map_err(|source| FormatError::InvalidRow { line, source })?;
        if let Some(first) = rows.first().map(PauliString::len) {
            if row.len() != first {
                return Err(FormatError::InvalidRow {
                    line,
                    source: StabilizerError::LengthMismatch {
                        expected: first,
                        found: row.len(),
                    },
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(FormatError::Empty);
    }
    StabilizerCode::new(rows, ebits).map_err(|e| match e {
        StabilizerError::NonCommuting { first, second } => {
            FormatError::NonCommuting { first, second }
        }
        other => FormatError::Code(other),
    })
}

pub fn emit_stabilizer_text(code: &StabilizerCode) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# n={} k={} c={} m={}",
        code.n_sent(),
        code.logical_k(),
        code.n_ebits(),
        code.num_checks()
    );
    for row in code.checks() {
        let _ = writeln!(out, "{row}");
    }
    if code.n_ebits() > 0 {
        let _ = writeln!(out, "!ebits={}", code.n_ebits());
    }
    out
}

/// Sparse matrix over GF(4), stored by rows. Binary matrices use only the value 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    num_cols: usize,
    rows: Vec<Vec<(usize, Gf4)>>,
}

impl SparseMatrix {
    /// Entries per row as `(column, value)`; zero values are dropped.
    pub fn from_rows(num_cols: usize, rows: Vec<Vec<(usize, Gf4)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|&(_, v)| !v.is_zero());
                r.sort_by_key(|&(c, _)| c);
                r
            })
            .collect();
        SparseMatrix { num_cols, rows }
    }

    pub fn from_dense(dense: &[Vec<Gf4>]) -> Self {
        let num_cols = dense.first().map_or(0, Vec::len);
        SparseMatrix::from_rows(
            num_cols,
            dense
                .iter()
                .map(|r| r.iter().copied().enumerate().collect())
                .collect(),
        )
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn row(&self, r: usize) -> &[(usize, Gf4)] {
        &self.rows[r]
    }

    pub fn is_binary(&self) -> bool {
        self.rows.iter().flatten().all(|&(_, v)| v == Gf4::ONE)
    }

    pub fn to_dense(&self) -> Vec<Vec<Gf4>> {
        self.rows
            .iter()
            .map(|r| {
                let mut dense = vec![Gf4::ZERO; self.num_cols];
                for &(c, v) in r {
                    dense[c] = v;
                }
                dense
            })
            .collect()
    }

    fn columns(&self) -> Vec<Vec<(usize, Gf4)>> {
        let mut cols = vec![Vec::new(); self.num_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c].push((r, v));
            }
        }
        cols
    }
}

fn gf4_code(v: Gf4) -> usize {
    v.index()
}

pub fn emit_alist(m: &SparseMatrix) -> String {
    let binary = m.is_binary();
    let cols = m.columns();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = m.rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    if binary {
        let _ = writeln!(out, "{} {}", m.num_cols, m.num_rows());
    } else {
        let _ = writeln!(out, "{} {} 4", m.num_cols, m.num_rows());
    }
    let _ = writeln!(out, "{max_col} {max_row}");
    let degrees = |lists: &[Vec<(usize, Gf4)>]| {
        lists
            .iter()
            .map(|l| l.len().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "{}", degrees(&cols));
    let _ = writeln!(out, "{}", degrees(&m.rows));
    let list = |entries: &[(usize, Gf4)], width: usize| {
        let mut toks: Vec<String> = Vec::with_capacity(width * 2);
        for &(i, v) in entries {
            toks.push((i + 1).to_string());
            if !binary {
                toks.push(gf4_code(v).to_string());
            }
        }
        // an empty line would be skipped by the reader, so pad to at least one slot
        for _ in entries.len()..width.max(1) {
            toks.push("0".into());
            if !binary {
                toks.push("0".into());
            }
        }
        toks.join(" ")
    };
    for c in &cols {
        let _ = writeln!(out, "{}", list(c, max_col));
    }
    for r in &m.rows {
        let _ = writeln!(out, "{}", list(r, max_row));
    }
    out
}

fn numbers(line: usize, content: &str) -> Result<Vec<usize>, FormatError> {
    content
        .split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| FormatError::MalformedEntry {
                line,
                reason: format!("not a nonnegative integer: {t:?}"),
            })
        })
        .collect()
}

/// Reads one adjacency line with `degree` entries, dropping zero padding.
fn adjacency(
    line: usize,
    nums: &[usize],
    degree: usize,
    bound: usize,
    pairs: bool,
) -> Result<Vec<(usize, Gf4)>, FormatError> {
    let stride = if pairs { 2 } else { 1 };
    if !nums.len().is_multiple_of(stride) || nums.len() / stride < degree {
        return Err(FormatError::MalformedEntry {
            line,
            reason: format!("expected {degree} entries, found {}", nums.len() / stride),
        });
    }
    let mut out = Vec::with_capacity(degree);
    for (k, chunk) in nums.chunks(stride).enumerate() {
        let idx = chunk[0];
        if k >= degree {
            if idx != 0 {
                return Err(FormatError::MalformedEntry {
                    line,
                    reason: format!("more than {degree} entries"),
                });
            }
            continue;
        }
        if idx == 0 || idx > bound {
            return Err(FormatError::IndexOutOfRange {
                line,
                index: idx,
                bound,
            });
        }
        let value = if pairs {
            match chunk[1] {
                v @ 1..=3 => Gf4::from_bits(v as u8),
                v => {
                    return Err(FormatError::MalformedEntry {
                        line,
                        reason: format!("GF(4) value {v} not in 1..=3"),
                    })
                }
            }
        } else {
            Gf4::ONE
        };
        out.push((idx - 1, value));
    }
    Ok(out)
}

pub fn parse_alist(text: &str) -> Result<SparseMatrix, FormatError> {
    let mut lines = content_lines(text);
    let (l0, header) = lines.next().ok_or(FormatError::Empty)?;
    let header = numbers(l0, header).map_err(|_| FormatError::MalformedHeader {
        line: l0,
        reason: "expected `N M` or `N M 4`".into(),
    })?;
    let (n, m, pairs) = match header.as_slice() {
        [n, m] => (*n, *m, false),
        [n, m, 4] => (*n, *m, true),
        _ => {
            return Err(FormatError::MalformedHeader {
                line: l0,
                reason: "expected `N M` or `N M 4`".into(),
            })
        }
    };
    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>), FormatError> {
        let (line, content) = lines.next().ok_or_else(|| FormatError::MalformedHeader {
            line: l0,
            reason: format!("truncated before {what}"),
        })?;
        Ok((line, numbers(line, content)?))
    };
    let (l1, maxes) = next_numbers("maximum degrees")?;
    if maxes.len() != 2 {
        return Err(FormatError::MalformedHeader {
            line: l1,
            reason: "expected two maximum degrees".into(),
        });
    }
    let (l2, col_deg) = next_numbers("column degrees")?;
    if col_deg.len() != n || col_deg.iter().any(|&d| d > maxes[0]) {
        return Err(FormatError::MalformedHeader {
            line: l2,
            reason: format!("expected {n} column degrees at most {}", maxes[0]),
        });
    }
    let (l3, row_deg) = next_numbers("row degrees")?;
    if row_deg.len() != m || row_deg.iter().any(|&d| d > maxes[1]) {
        return Err(FormatError::MalformedHeader {
            line: l3,
            reason: format!("expected {m} row degrees at most {}", maxes[1]),
        });
    }
    let mut cols = Vec::with_capacity(n);
    for &deg in &col_deg {
        let (line, nums) = next_numbers("column lists")?;
        cols.push(adjacency(line, &nums, deg, m, pairs)?);
    }
    let mut rows = Vec::with_capacity(m);
    for &deg in &row_deg {
        let (line, nums) = next_numbers("row lists")?;
        rows.push(adjacency(line, &nums, deg, n, pairs)?);
    }
    let matrix = SparseMatrix::from_rows(n, rows);
    let mut from_cols = vec![Vec::new(); m];
    for (c, entries) in cols.iter().enumerate() {
        for &(r, v) in entries {
            from_cols[r].push((c, v));
        }
    }
    let from_cols = SparseMatrix::from_rows(n, from_cols);
    if let Some((row, (a, b))) = matrix
        .rows
        .iter()
        .zip(&from_cols.rows)
        .enumerate()
        .find(|(_, (a, b))| a != b)
    {
        let col = a
            .iter()
            .zip(b.iter())
            .find(|(x, y)| x != y)
            .map(|(x, _)| x.0)
            .or_else(|| a.get(b.len()).or(b.get(a.len())).map(|e| e.0))
            .unwrap_or(0);
        return Err(FormatError::Inconsistent { row, col });
    }
    Ok(matrix)
}
