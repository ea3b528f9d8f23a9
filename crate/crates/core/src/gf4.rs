//! Arithmetic in GF(4) and the identification of single-qubit Pauli
//! operators with field elements.
//!
//! An element is stored as two bits: bit 0 is the X-part and bit 1 the
//! Z-part of the corresponding Pauli operator. Under this encoding
//!
//! | GF(4) | Pauli | bits |
//! |-------|-------|------|
//! | 0     | I     | 00   |
//! | 1     | X     | 01   |
//! | ω     | Z     | 10   |
//! | ω̄     | Y     | 11   |
//!
//! field addition is bitwise XOR (the Pauli product, phases dropped) and
//! multiplication goes through a 16-entry table.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf4Error {
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// An element of GF(4) = {0, 1, ω, ω̄}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(transparent)]
pub struct Gf4(u8);

// Row/column order 0, 1, ω, ω̄, i.e. indexed by the two-bit encoding.
const MUL_TABLE: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    pub const OMEGA: Gf4 = Gf4(2);
    pub const OMEGA_BAR: Gf4 = Gf4(3);

    /// All four elements in the order 0, 1, ω, ω̄.
    pub const ALL: [Gf4; 4] = [Gf4::ZERO, Gf4::ONE, Gf4::OMEGA, Gf4::OMEGA_BAR];

    /// Builds an element from its two-bit encoding. Only the low two bits are used.
    #[inline]
    pub const fn from_bits(bits: u8) -> Gf4 {
        Gf4(bits & 0b11)
    }

    #[inline]
    pub const fn bits(self) -> u8 {
        self.0
    }

    /// Index in `0..4`, following the order of [`Gf4::ALL`].
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn x_bit(self) -> bool {
        self.0 & 1 != 0
    }

    #[inline]
    pub const fn z_bit(self) -> bool {
        self.0 & 2 != 0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn add(self, other: Gf4) -> Gf4 {
        Gf4(self.0 ^ other.0)
    }

    #[inline]
    pub const fn mul(self, other: Gf4) -> Gf4 {
        Gf4(MUL_TABLE[self.0 as usize][other.0 as usize])
    }

    /// Frobenius conjugation x ↦ x², which swaps ω and ω̄.
    #[inline]
    pub const fn conj(self) -> Gf4 {
        // swapping ω (10) and ω̄ (11) flips the low bit whenever the high bit is set
        Gf4(self.0 ^ (self.0 >> 1))
    }

    /// Absolute trace x + x² into GF(2): 0 on {0, 1}, 1 on {ω, ω̄}.
    #[inline]
    pub const fn trace(self) -> u8 {
        self.0 >> 1
    }

    /// Multiplicative inverse, `None` for zero.
    pub const fn inv(self) -> Option<Gf4> {
        match self.0 {
            0 => None,
            1 => Some(Gf4::ONE),
            2 => Some(Gf4::OMEGA_BAR),
            _ => Some(Gf4::OMEGA),
        }
    }
}

impl Add for Gf4 {
    type Output = Gf4;
    #[inline]
    fn add(self, rhs: Gf4) -> Gf4 {
        Gf4::add(self, rhs)
    }
}

impl AddAssign for Gf4 {
    #[inline]
    fn add_assign(&mut self, rhs: Gf4) {
        *self = *self + rhs;
    }
}

impl Mul for Gf4 {
    type Output = Gf4;
    #[inline]
    fn mul(self, rhs: Gf4) -> Gf4 {
        Gf4::mul(self, rhs)
    }
}

impl fmt::Debug for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "0",
            1 => "1",
            2 => "ω",
            _ => "ω̄",
        })
    }
}

pub fn add(a: Gf4, b: Gf4) -> Gf4 {
    a + b
}

pub fn mul(a: Gf4, b: Gf4) -> Gf4 {
    a * b
}

pub fn trace(a: Gf4) -> u8 {
    a.trace()
}

/// `Tr(Σ_k u_k · conj(v_k))`. Zero iff the corresponding Pauli operators commute.
pub fn trace_inner_product(u: &[Gf4], v: &[Gf4]) -> Result<u8, Gf4Error> {
    if u.len() != v.len() {
        return Err(Gf4Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let sum = u
        .iter()
        .zip(v)
        .fold(Gf4::ZERO, |acc, (&a, &b)| acc + a * b.conj());
    Ok(sum.trace())
}

/// Single-qubit Pauli operator, phase dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliSymbol {
    I,
    X,
    Z,
    Y,
}

impl PauliSymbol {
    pub const ALL: [PauliSymbol; 4] = [
        PauliSymbol::I,
        PauliSymbol::X,
        PauliSymbol::Z,
        PauliSymbol::Y,
    ];

    pub fn from_char(c: char) -> Option<PauliSymbol> {
        match c {
            'I' => Some(PauliSymbol::I),
            'X' => Some(PauliSymbol::X),
            'Z' => Some(PauliSymbol::Z),
            'Y' => Some(PauliSymbol::Y),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliSymbol::I => 'I',
            PauliSymbol::X => 'X',
            PauliSymbol::Z => 'Z',
            PauliSymbol::Y => 'Y',
        }
    }
}

impl From<PauliSymbol> for Gf4 {
    fn from(p: PauliSymbol) -> Gf4 {
        match p {
            PauliSymbol::I => Gf4::ZERO,
            PauliSymbol::X => Gf4::ONE,
            PauliSymbol::Z => Gf4::OMEGA,
            PauliSymbol::Y => Gf4::OMEGA_BAR,
        }
    }
}

impl From<Gf4> for PauliSymbol {
    fn from(g: Gf4) -> PauliSymbol {
        PauliSymbol::ALL[g.index()]
    }
}

impl fmt::Display for PauliSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const O: Gf4 = Gf4::ZERO;
    const L: Gf4 = Gf4::ONE;
    const W: Gf4 = Gf4::OMEGA;
    const WB: Gf4 = Gf4::OMEGA_BAR;

    // Tables written out by hand in 0, 1, ω, ω̄ order.
    const ADD_EXPECTED: [[Gf4; 4]; 4] =
        [[O, L, W, WB], [L, O, WB, W], [W, WB, O, L], [WB, W, L, O]];
    const MUL_EXPECTED: [[Gf4; 4]; 4] = [[O, O, O, O], [O, L, W, WB], [O, W, WB, L], [O, WB, L, W]];

    #[test]
    fn tables_match() {
        for (i, &a) in Gf4::ALL.iter().enumerate() {
            for (j, &b) in Gf4::ALL.iter().enumerate() {
                assert_eq!(a + b, ADD_EXPECTED[i][j], "{a} + {b}");
                assert_eq!(a * b, MUL_EXPECTED[i][j], "{a} * {b}");
            }
        }
    }

    #[test]
    fn named_examples() {
        assert_eq!(add(W, WB), L);
        assert_eq!(add(WB, WB), O);
        assert_eq!(mul(W, W), WB);
        assert_eq!(mul(W, WB), L);
        for x in Gf4::ALL {
            assert_eq!(add(x, O), x);
            assert_eq!(mul(x, L), x);
            assert_eq!(x + x, O);
            assert_eq!(x.conj().conj(), x);
        }
        assert_eq!(W.conj(), WB);
        assert_eq!(L.conj(), L);
        assert_eq!((trace(O), trace(L), trace(W), trace(WB)), (0, 0, 1, 1));
    }

    #[test]
    fn field_axioms() {
        for a in Gf4::ALL {
            if let Some(inv) = a.inv() {
                assert_eq!(a * inv, L);
            } else {
                assert_eq!(a, O);
            }
            // conj is x²
            assert_eq!(a.conj(), a * a);
            for b in Gf4::ALL {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!((a + b).trace(), a.trace() ^ b.trace());
                for c in Gf4::ALL {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
        }
    }

    #[test]
    fn scaling_by_conjugate_is_bijection() {
        for s in [L, W, WB] {
            let mut seen = [false; 4];
            for e in Gf4::ALL {
                seen[(e * s.conj()).index()] = true;
            }
            assert!(seen.iter().all(|&x| x));
        }
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(trace_inner_product(&[L], &[W]).unwrap(), 1);
        // YZIII vs YZZXI
        let u = [WB, W, O, O, O];
        let v = [WB, W, W, L, O];
        assert_eq!(trace_inner_product(&u, &v).unwrap(), 0);
        assert!(trace_inner_product(&u, &v[..3]).is_err());
    }

    #[test]
    fn single_qubit_commutation_matches_pauli_algebra() {
        use PauliSymbol::*;
        for p in PauliSymbol::ALL {
            for q in PauliSymbol::ALL {
                let anti = !(p == I || q == I || p == q);
                let tr = trace_inner_product(&[p.into()], &[q.into()]).unwrap();
                assert_eq!(tr == 1, anti, "{p} {q}");
            }
        }
    }

    #[test]
    fn pauli_bijection() {
        for p in PauliSymbol::ALL {
            assert_eq!(PauliSymbol::from(Gf4::from(p)), p);
            assert_eq!(PauliSymbol::from_char(p.as_char()), Some(p));
        }
        assert_eq!(Gf4::from(PauliSymbol::Y), WB);
        assert_eq!(Gf4::from(PauliSymbol::Z), W);
    }

    fn gf4_vec(len: usize) -> impl Strategy<Value = Vec<Gf4>> {
        prop::collection::vec((0u8..4).prop_map(Gf4::from_bits), len)
    }

    proptest! {
        #[test]
        fn inner_product_symmetric((u, v) in (1usize..12).prop_flat_map(|n| (gf4_vec(n), gf4_vec(n)))) {
            prop_assert_eq!(trace_inner_product(&u, &v).unwrap(), trace_inner_product(&v, &u).unwrap());
        }

        #[test]
        fn self_inner_product_vanishes(u in (1usize..12).prop_flat_map(gf4_vec)) {
            prop_assert_eq!(trace_inner_product(&u, &u).unwrap(), 0);
        }
    }
}
