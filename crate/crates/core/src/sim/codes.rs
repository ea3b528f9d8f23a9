//! Named codes and code files.
//!
//! A code source is either a built-in name or a path:
//!
//! * `ea-4-1-1` (alias `4-1-1`): the [[4,1;1]] entanglement-assisted example code;
//! * `cb126`: the Construction-B code used by the acceptance experiments;
//! * `cb:<h>:<o1>,<o2>,...[:<r1>,<r2>,...]`: Construction B with a circulant of
//!   size `h` whose first row has ones at the given offsets, optionally
//!   keeping only the listed rows;
//! * `*.alist`: a classical check matrix. A binary matrix `H` gives the CSS code
//!   with X- and Z-type copies of its rows, a GF(4) matrix goes through
//!   `quaternary_to_pauli`. Non-commuting generators get ebits appended;
//! * anything else: stabilizer text.

use std::path::Path;

use thiserror::Error;

use crate::gf4::Gf4;
use crate::stabilizer::{
    build_code_4_1_1, construction_b, ea_canonicalize, extend_with_ebits, parse_alist,
    parse_stabilizer_text, quaternary_to_pauli, FormatError, PauliString, SparseMatrix,
    StabilizerCode, StabilizerError, SymplecticBasis,
};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("unknown code {0:?}")]
    Unknown(String),
    #[error("bad code spec {spec:?}: {reason}")]
    BadSpec { spec: String, reason: String },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Format { path: String, source: FormatError },
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

/// Circulant size and first-row offsets of `cb126`.
pub const CB126_SIZE: usize = 63;
pub const CB126_OFFSETS: [usize; 3] = [0, 1, 5];

pub const CB126_NAME: &str = "cb126";

pub const BUILTIN_NAMES: [&str; 2] = ["ea-4-1-1", CB126_NAME];

/// First row of a circulant of size `h` with ones at `offsets`.
pub fn circulant_row(h: usize, offsets: &[usize]) -> Vec<bool> {
    let mut row = vec![false; h];
    for &o in offsets {
        row[o % h] ^= true;
    }
    row
}

pub fn cb126() -> StabilizerCode {
    construction_b(&circulant_row(CB126_SIZE, &CB126_OFFSETS), None)
        .expect("circulant CSS codes are dual-containing")
}

fn parse_list(spec: &str, part: &str) -> Result<Vec<usize>, CodeError> {
    part.split(',')
        .map(|t| {
            t.trim().parse().map_err(|_| CodeError::BadSpec {
                spec: spec.to_string(),
                reason: format!("{t:?} is not an index"),
            })
        })
        .collect()
}

fn parse_cb(spec: &str) -> Result<StabilizerCode, CodeError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(CodeError::BadSpec {
            spec: spec.to_string(),
            reason: "expected cb:<size>:<offsets>[:<rows>]".into(),
        });
    }
    let h: usize = parts[1]
        .parse()
        .ok()
        .filter(|&h| h > 0)
        .ok_or_else(|| CodeError::BadSpec {
            spec: spec.to_string(),
            reason: "size must be a positive integer".into(),
        })?;
    let offsets = parse_list(spec, parts[2])?;
    let rows = parts.get(3).map(|p| parse_list(spec, p)).transpose()?;
    Ok(construction_b(
        &circulant_row(h, &offsets),
        rows.as_deref(),
    )?)
}

pub fn builtin_code(name: &str) -> Option<Result<StabilizerCode, CodeError>> {
    match name {
        "ea-4-1-1" | "4-1-1" => Some(Ok(build_code_4_1_1())),
        "cb126" => Some(Ok(cb126())),
        _ if name.starts_with("cb:") => Some(parse_cb(name)),
        _ => None,
    }
}

/// Commuting generators are used as given, redundant rows included.
/// Otherwise an independent subset is canonicalized and extended with ebits.
pub fn code_from_generators(rows: Vec<PauliString>) -> Result<StabilizerCode, StabilizerError> {
    match StabilizerCode::new(rows.clone(), 0) {
        Err(StabilizerError::NonCommuting { .. }) => {}
        other => return other,
    }
    let n = rows[0].len();
    let mut basis = SymplecticBasis::new(n);
    let independent: Vec<PauliString> = rows.into_iter().filter(|r| basis.insert(r)).collect();
    extend_with_ebits(&ea_canonicalize(&independent)?)
}

/// Stabilizer code of a classical check matrix.
pub fn code_from_matrix(h: &SparseMatrix) -> Result<StabilizerCode, StabilizerError> {
    let dense = h.to_dense();
    let rows = if h.is_binary() {
        let typed = |v: Gf4| {
            dense.iter().map(move |r| {
                PauliString::from_symbols(
                    r.iter().map(|&g| if g.is_zero() { g } else { v }).collect(),
                )
            })
        };
        typed(Gf4::ONE).chain(typed(Gf4::OMEGA)).collect()
    } else {
        quaternary_to_pauli(&dense)
    };
    code_from_generators(rows)
}

pub fn load_code_file(path: &Path) -> Result<StabilizerCode, CodeError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: shown.clone(),
        source,
    })?;
    let format = |source| CodeError::Format {
        path: shown.clone(),
        source,
    };
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("alist"))
    {
        let h = parse_alist(&text).map_err(format)?;
        Ok(code_from_matrix(&h)?)
    } else {
        parse_stabilizer_text(&text).map_err(format)
    }
}

/// Resolves a built-in name or a file path.
pub fn load_code(source: &str) -> Result<StabilizerCode, CodeError> {
    if let Some(code) = builtin_code(source) {
        return code;
    }
    let path = Path::new(source);
    if path.exists() {
        load_code_file(path)
    } else {
        Err(CodeError::Unknown(source.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let small = load_code("4-1-1").unwrap();
        assert_eq!(
            (small.n_sent(), small.n_ebits(), small.logical_k()),
            (4, 1, 1)
        );
        let cb = load_code("cb126").unwrap();
        assert_eq!(cb.n_sent(), 126);
        assert_eq!(cb.n_ebits(), 0);
        assert!(cb.logical_k() > 0);
        let custom = load_code("cb:7:0,1,3:0,1,2").unwrap();
        assert_eq!((custom.n_sent(), custom.num_checks()), (14, 6));
        assert!(matches!(
            load_code("cb:7:0,x"),
            Err(CodeError::BadSpec { .. })
        ));
        assert!(matches!(
            load_code("no-such-code"),
            Err(CodeError::Unknown(_))
        ));
    }

    #[test]
    fn quaternary_matrix_gets_ebits() {
        let o = Gf4::ZERO;
        let l = Gf4::ONE;
        let w = Gf4::OMEGA;
        let h = SparseMatrix::from_dense(&[vec![l, w, l, o], vec![l, l, o, l]]);
        let code = code_from_matrix(&h).unwrap();
        assert_eq!(code.n_sent(), 4);
        assert_eq!(code.n_ebits(), 1);
        assert_eq!(code.num_checks(), 4);
    }

    #[test]
    fn redundant_commuting_rows_are_kept() {
        let rows: Vec<PauliString> = ["XXII", "IIXX", "XXXX"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let code = code_from_generators(rows).unwrap();
        assert_eq!(code.num_checks(), 3);
        assert_eq!(code.rank(), 2);
    }
}
