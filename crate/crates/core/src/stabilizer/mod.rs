//! Pauli strings, stabilizer codes, syndromes and the code constructions.
//!
//! Pauli phases are ignored everywhere: syndrome decoding only depends on
//! commutation, and two operators differing by a phase act identically on
//! the code space up to a global phase.
//!
//! Entanglement-assisted codes keep their receiver-held ebit columns after
//! the transmitted columns. Those columns never carry channel errors.

mod construct;
mod io;
mod pauli;
mod symplectic;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use construct::{
    build_code_4_1_1, construction_b, construction_b_matrix, ea_canonicalize, extend_with_ebits,
    quaternary_to_pauli, CanonicalGenerators,
};
pub use io::{
    emit_alist, emit_stabilizer_text, parse_alist, parse_stabilizer_text, FormatError, SparseMatrix,
};
pub use pauli::{commutes, PauliString};
pub use symplectic::{symplectic_rank, SymplecticBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilizerError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid Pauli symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },
    #[error("code has no generators")]
    Empty,
    #[error("generator {row} is the identity")]
    ZeroRow { row: usize },
    #[error("generators {first} and {second} anticommute")]
    NonCommuting { first: usize, second: usize },
    #[error("{ebits} ebit columns exceed row length {len}")]
    TooManyEbits { ebits: usize, len: usize },
    #[error("generators are dependent: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("[C, C^T] is not dual-containing")]
    NotDualContaining,
    #[error("no rows kept")]
    NoRows,
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("syndrome entry {0:?} is not +1 or -1")]
    InvalidSyndrome(String),
}

/// Measured stabilizer outcome; entry `c` is `+1` iff the error commutes with generator `c`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Syndrome(Vec<bool>);

impl Syndrome {
    pub fn trivial(m: usize) -> Self {
        Syndrome(vec![false; m])
    }

    /// Builds a syndrome from `±1` entries.
    pub fn from_signs(signs: &[i8]) -> Result<Self, StabilizerError> {
        signs
            .iter()
            .map(|&s| match s {
                1 => Ok(false),
                -1 => Ok(true),
                other => Err(StabilizerError::InvalidSyndrome(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Syndrome)
    }

    /// One flag per check, `true` where the entry is `-1`.
    pub fn from_flags(flags: Vec<bool>) -> Self {
        Syndrome(flags)
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn signs(&self) -> Vec<i8> {
        self.0.iter().map(|&f| if f { -1 } else { 1 }).collect()
    }

    pub fn sign(&self, c: usize) -> i8 {
        if self.0[c] {
            -1
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&f| !f)
    }

    /// Entrywise product of two syndromes.
    pub fn combine(&self, other: &Syndrome) -> Syndrome {
        Syndrome(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &flag) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if flag { "-1" } else { "+1" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome{self}")
    }
}

impl FromStr for Syndrome {
    type Err = StabilizerError;

    /// Accepts `(-1,+1,+1)`, `-1,1,1` or a bare string of `+`/`-` signs.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if !t.contains(',') && t.chars().all(|c| c == '+' || c == '-') && !t.is_empty() {
            return Ok(Syndrome(t.chars().map(|c| c == '-').collect()));
        }
        t.split(',')
            .map(|tok| match tok.trim().replace('−', "-").as_str() {
                "+1" | "1" => Ok(false),
                "-1" => Ok(true),
                other => Err(StabilizerError::InvalidSyndrome(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Syndrome)
    }
}

/// Stabilizer code given by its m × n_total check matrix over GF(4).
///
/// The last `n_ebits` columns are the receiver-held halves of the ebits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    checks: Vec<PauliString>,
    n_sent: usize,
    n_ebits: usize,
    rank: usize,
}

impl StabilizerCode {
    /// Validates the generators: equal lengths, no identity rows, all pairs commuting.
    pub fn new(checks: Vec<PauliString>, n_ebits: usize) -> Result<Self, StabilizerError> {
        let first = checks.first().ok_or(StabilizerError::Empty)?;
        let n_total = first.len();
        if n_ebits > n_total {
            return Err(StabilizerError::TooManyEbits {
                ebits: n_ebits,
                len: n_total,
            });
        }
        for (i, row) in checks.iter().enumerate() {
            if row.len() != n_total {
                return Err(StabilizerError::LengthMismatch {
                    expected: n_total,
                    found: row.len(),
                });
            }
            if row.is_identity() {
                return Err(StabilizerError::ZeroRow { row: i });
            }
        }
        for i in 0..checks.len() {
            for j in i + 1..checks.len() {
                if checks[i].anticommutes_unchecked(&checks[j]) {
                    return Err(StabilizerError::NonCommuting {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        let rank = symplectic_rank(&checks);
        Ok(StabilizerCode {
            checks,
            n_sent: n_total - n_ebits,
            n_ebits,
            rank,
        })
    }

    pub fn checks(&self) -> &[PauliString] {
        &self.checks
    }

    pub fn check(&self, c: usize) -> &PauliString {
        &self.checks[c]
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn n_sent(&self) -> usize {
        self.n_sent
    }

    pub fn n_ebits(&self) -> usize {
        self.n_ebits
    }

    pub fn n_total(&self) -> usize {
        self.n_sent + self.n_ebits
    }

    /// GF(2) rank of the generators.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of encoded logical qubits, `n + c - rank`.
    pub fn logical_k(&self) -> usize {
        self.n_total() - self.rank
    }

    /// `(k - c) / n`, which may be zero or negative for EA codes.
    pub fn net_rate(&self) -> f64 {
        (self.logical_k() as f64 - self.n_ebits as f64) / self.n_sent as f64
    }

    /// Syndrome of `e`, which may be given over the transmitted columns only or
    /// over all columns.
    pub fn syndrome(&self, e: &PauliString) -> Result<Syndrome, StabilizerError> {
        let e = self.full_width(e)?;
        Ok(Syndrome(
            self.checks
                .iter()
                .map(|row| row.anticommutes_unchecked(&e))
                .collect(),
        ))
    }

    /// Pads a transmitted-only operator with identity on the ebit columns.
    pub fn full_width(&self, e: &PauliString) -> Result<PauliString, StabilizerError> {
        if e.len() == self.n_total() {
            Ok(e.clone())
        } else if e.len() == self.n_sent {
            Ok(e.padded(self.n_ebits))
        } else {
            Err(StabilizerError::LengthMismatch {
                expected: self.n_total(),
                found: e.len(),
            })
        }
    }

    pub fn group_basis(&self) -> SymplecticBasis {
        SymplecticBasis::from_rows(self.n_total(), &self.checks)
    }

    /// True iff `e` lies in the stabilizer group (phases ignored).
    pub fn group_membership(&self, e: &PauliString) -> Result<bool, StabilizerError> {
        let e = self.full_width(e)?;
        Ok(self.group_basis().contains(&e))
    }
}

/// Free-function form of [`StabilizerCode::syndrome`].
pub fn syndrome(code: &StabilizerCode, e: &PauliString) -> Result<Syndrome, StabilizerError> {
    code.syndrome(e)
}

pub fn group_membership(e: &PauliString, code: &StabilizerCode) -> Result<bool, StabilizerError> {
    code.group_membership(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf4::Gf4;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn span_by_enumeration(rows: &[PauliString]) -> Vec<PauliString> {
        let n = rows[0].len();
        (0u32..1 << rows.len())
            .map(|mask| {
                let mut acc = PauliString::identity(n);
                for (i, r) in rows.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        acc.mul_assign_unchecked(r);
                    }
                }
                acc
            })
            .collect()
    }

    #[test]
    fn worked_example_syndromes() {
        let code = build_code_4_1_1();
        assert_eq!(
            code.syndrome(&ps("IIZXI")).unwrap().signs(),
            vec![-1, 1, 1, 1]
        );
        assert_eq!(
            code.syndrome(&ps("IIZX")).unwrap().signs(),
            vec![-1, 1, 1, 1]
        );
        assert_eq!(
            code.syndrome(&ps("IYIII")).unwrap().signs(),
            vec![-1, -1, -1, -1]
        );
        assert!(code
            .syndrome(&PauliString::identity(5))
            .unwrap()
            .is_trivial());
        assert!(code.syndrome(&ps("IIZXII")).is_err());
    }

    #[test]
    fn worked_example_membership() {
        let code = build_code_4_1_1();
        let e = ps("IIZXI").product(&ps("YZIII")).unwrap();
        assert_eq!(e, ps("YZZXI"));
        assert!(code.group_membership(&e).unwrap());
        assert!(code.group_membership(&PauliString::identity(5)).unwrap());
        assert!(!code.group_membership(&ps("IYIII")).unwrap());
        let all = span_by_enumeration(code.checks());
        assert!(!all.contains(&ps("IYIII")));
        assert!(all.contains(&ps("YZZXI")));
    }

    #[test]
    fn constructor_rejects_bad_rows() {
        assert_eq!(StabilizerCode::new(vec![], 0), Err(StabilizerError::Empty));
        assert_eq!(
            StabilizerCode::new(vec![ps("XI"), ps("II")], 0),
            Err(StabilizerError::ZeroRow { row: 1 })
        );
        assert_eq!(
            StabilizerCode::new(vec![ps("XI"), ps("ZI")], 0),
            Err(StabilizerError::NonCommuting {
                first: 0,
                second: 1
            })
        );
        assert!(StabilizerCode::new(vec![ps("XI"), ps("XII")], 0).is_err());
    }

    #[test]
    fn syndrome_parsing() {
        let s: Syndrome = "(-1,+1,+1,+1)".parse().unwrap();
        assert_eq!(s.signs(), vec![-1, 1, 1, 1]);
        assert_eq!(s.to_string(), "(-1,+1,+1,+1)");
        assert_eq!("-+++".parse::<Syndrome>().unwrap(), s);
        assert!("(2,1)".parse::<Syndrome>().is_err());
        assert!(Syndrome::from_signs(&[0]).is_err());
    }

    fn random_commuting_code(n: usize, rows: usize, seed: u64) -> Option<StabilizerCode> {
        // greedy rejection sampling of a commuting set
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut accepted: Vec<PauliString> = Vec::new();
        for _ in 0..200 {
            if accepted.len() == rows {
                break;
            }
            let cand = PauliString::from_symbols(
                (0..n)
                    .map(|_| Gf4::from_bits(rng.random_range(0..4)))
                    .collect(),
            );
            if cand.is_identity() {
                continue;
            }
            if accepted.iter().all(|r| !r.anticommutes_unchecked(&cand)) {
                accepted.push(cand);
            }
        }
        StabilizerCode::new(accepted, 0).ok()
    }

    proptest! {
        #[test]
        fn membership_agrees_with_enumeration(seed in 0u64..500, probe in 0u64..1000) {
            let code = match random_commuting_code(5, 6, seed) { Some(c) => c, None => return Ok(()) };
            let all = span_by_enumeration(code.checks());
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(probe);
            let e = PauliString::from_symbols((0..5).map(|_| Gf4::from_bits(rng.random_range(0..4))).collect());
            prop_assert_eq!(code.group_membership(&e).unwrap(), all.contains(&e));
            // every enumerated element is a member
            let pick = &all[(probe as usize) % all.len()];
            prop_assert!(code.group_membership(pick).unwrap());
        }

        #[test]
        fn syndrome_is_homomorphism(seed in 0u64..200, a in prop::collection::vec(0u8..4, 6), b in prop::collection::vec(0u8..4, 6)) {
            let code = match random_commuting_code(6, 4, seed) { Some(c) => c, None => return Ok(()) };
            let e1 = PauliString::from_symbols(a.into_iter().map(Gf4::from_bits).collect());
            let e2 = PauliString::from_symbols(b.into_iter().map(Gf4::from_bits).collect());
            let s12 = code.syndrome(&e1.product(&e2).unwrap()).unwrap();
            let combined = code.syndrome(&e1).unwrap().combine(&code.syndrome(&e2).unwrap());
            prop_assert_eq!(s12, combined);
        }
    }
}
