//! Code constructions: the entanglement-assisted route from a classical
//! quaternary check matrix, and the circulant CSS "Construction B".

use super::{symplectic_rank, PauliString, StabilizerCode, StabilizerError};
use crate::gf4::Gf4;

/// Stacks `h` on top of `ω·h`. The rows are read directly as Pauli strings.
pub fn quaternary_to_pauli(h: &[Vec<Gf4>]) -> Vec<PauliString> {
    let top = h.iter().map(|row| PauliString::from_symbols(row.clone()));
    let bottom = h
        .iter()
        .map(|row| PauliString::from_symbols(row.iter().map(|&g| Gf4::OMEGA * g).collect()));
    top.chain(bottom).collect()
}

/// Generators in canonical form: `pair_count` anticommuting pairs first
/// (rows `2i` and `2i + 1`), then mutually commuting rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalGenerators {
    pub generators: Vec<PauliString>,
    pub pair_count: usize,
}

impl CanonicalGenerators {
    pub fn pairs(&self) -> impl Iterator<Item = (&PauliString, &PauliString)> {
        self.generators[..2 * self.pair_count]
            .chunks_exact(2)
            .map(|p| (&p[0], &p[1]))
    }

    pub fn commuting(&self) -> &[PauliString] {
        &self.generators[2 * self.pair_count..]
    }
}

/// Symplectic Gram–Schmidt. Every output row is a product of input rows.
pub fn ea_canonicalize(gens: &[PauliString]) -> Result<CanonicalGenerators, StabilizerError> {
    let first = gens.first().ok_or(StabilizerError::Empty)?;
    let n = first.len();
    for (i, g) in gens.iter().enumerate() {
        if g.len() != n {
            return Err(StabilizerError::LengthMismatch {
                expected: n,
                found: g.len(),
            });
        }
        if g.is_identity() {
            return Err(StabilizerError::ZeroRow { row: i });
        }
    }
    let rank = symplectic_rank(gens);
    if rank < gens.len() {
        return Err(StabilizerError::RankDeficient {
            rank,
            rows: gens.len(),
        });
    }

    let mut pending: std::collections::VecDeque<PauliString> = gens.iter().cloned().collect();
    let mut pairs = Vec::new();
    let mut commuting = Vec::new();
    while let Some(a) = pending.pop_front() {
        let Some(j) = pending.iter().position(|b| a.anticommutes_unchecked(b)) else {
            commuting.push(a);
            continue;
        };
        let b = pending.remove(j).expect("index from position");
        for t in pending.iter_mut() {
            let with_a = t.anticommutes_unchecked(&a);
            let with_b = t.anticommutes_unchecked(&b);
            if with_b {
                t.mul_assign_unchecked(&a);
            }
            if with_a {
                t.mul_assign_unchecked(&b);
            }
        }
        pairs.push(a);
        pairs.push(b);
    }
    let pair_count = pairs.len() / 2;
    pairs.extend(commuting);
    Ok(CanonicalGenerators {
        generators: pairs,
        pair_count,
    })
}

/// Appends one ebit column per anticommuting pair: X on the first row of the
/// pair, Z on the second, identity elsewhere.
pub fn extend_with_ebits(
    canonical: &CanonicalGenerators,
) -> Result<StabilizerCode, StabilizerError> {
    let c = canonical.pair_count;
    let rows = canonical
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut row = g.padded(c);
            if i < 2 * c {
                let col = g.len() + i / 2;
                row.set(col, if i % 2 == 0 { Gf4::ONE } else { Gf4::OMEGA });
            }
            row
        })
        .collect();
    StabilizerCode::new(rows, c)
}

/// The binary matrix `[C, C^T]` restricted to `rows_to_keep` (all rows when `None`),
/// where `C` is the circulant with the given first row.
pub fn construction_b_matrix(
    first_row: &[bool],
    rows_to_keep: Option<&[usize]>,
) -> Result<Vec<Vec<bool>>, StabilizerError> {
    let half = first_row.len();
    let keep: Vec<usize> = match rows_to_keep {
        None => (0..half).collect(),
        Some(rows) => {
            let mut v = rows.to_vec();
            v.sort_unstable();
            v.dedup();
            if let Some(&bad) = v.iter().find(|&&r| r >= half) {
                return Err(StabilizerError::RowOutOfRange {
                    index: bad,
                    rows: half,
                });
            }
            v
        }
    };
    if keep.is_empty() {
        return Err(StabilizerError::NoRows);
    }
    Ok(keep
        .iter()
        .map(|&i| {
            let circ = (0..half).map(|j| first_row[(j + half - i) % half]);
            let circ_t = (0..half).map(|j| first_row[(i + half - j) % half]);
            circ.chain(circ_t).collect()
        })
        .collect())
}

/// Binary `H · H^T == 0`.
pub(crate) fn is_self_orthogonal(h: &[Vec<bool>]) -> bool {
    h.iter().all(|a| {
        h.iter()
            .all(|b| a.iter().zip(b).filter(|(&x, &y)| x && y).count() % 2 == 0)
    })
}

/// CSS code from the dual-containing matrix `H = [C, C^T]`: X-type generators
/// from the rows of `H` followed by Z-type generators from the same rows.
pub fn construction_b(
    first_row: &[bool],
    rows_to_keep: Option<&[usize]>,
) -> Result<StabilizerCode, StabilizerError> {
    let h = construction_b_matrix(first_row, rows_to_keep)?;
    if !is_self_orthogonal(&h) {
        return Err(StabilizerError::NotDualContaining);
    }
    let typed = |value: Gf4| {
        h.iter().map(move |row| {
            PauliString::from_symbols(
                row.iter()
                    .map(|&b| if b { value } else { Gf4::ZERO })
                    .collect(),
            )
        })
    };
    let rows = typed(Gf4::ONE).chain(typed(Gf4::OMEGA)).collect();
    StabilizerCode::new(rows, 0)
}

/// The [[4,1;1]] entanglement-assisted code with one receiver-held ebit column.
pub fn build_code_4_1_1() -> StabilizerCode {
    let rows = ["XZXIX", "XXIXZ", "YZZXI", "ZXXYI"]
        .iter()
        .map(|s| s.parse().expect("valid Pauli string"))
        .collect();
    StabilizerCode::new(rows, 1).expect("commuting generators")
}
