use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::StabilizerError;
use crate::gf4::{Gf4, PauliSymbol};

/// An n-qubit Pauli operator as a GF(4) vector. Phases are not tracked.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString(Vec<Gf4>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Gf4::ZERO; n])
    }

    pub fn from_symbols(symbols: Vec<Gf4>) -> Self {
        PauliString(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Gf4] {
        &self.0
    }

    pub fn symbols_mut(&mut self) -> &mut [Gf4] {
        &mut self.0
    }

    pub fn get(&self, i: usize) -> Gf4 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, g: Gf4) {
        self.0[i] = g;
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|g| g.is_zero())
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|g| !g.is_zero()).count()
    }

    /// True iff the two operators anticommute. Lengths must agree.
    pub fn anticommutes(&self, other: &PauliString) -> Result<bool, StabilizerError> {
        self.check_len(other)?;
        Ok(self.anticommutes_unchecked(other))
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        // Tr(a·conj(b)) summed over positions reduces to the symplectic form x_a z_b + z_a x_b
        let mut parity = 0u8;
        for (a, b) in self.0.iter().zip(&other.0) {
            let (a, b) = (a.bits(), b.bits());
            parity ^= ((a & 1) & (b >> 1)) ^ ((a >> 1) & (b & 1));
        }
        parity == 1
    }

    /// Phase-free product, i.e. entrywise GF(4) addition.
    pub fn product(&self, other: &PauliString) -> Result<PauliString, StabilizerError> {
        self.check_len(other)?;
        Ok(PauliString(
            self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect(),
        ))
    }

    pub(crate) fn mul_assign_unchecked(&mut self, other: &PauliString) {
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// Appends `extra` identity positions.
    pub fn padded(&self, extra: usize) -> PauliString {
        let mut v = self.0.clone();
        v.resize(v.len() + extra, Gf4::ZERO);
        PauliString(v)
    }

    fn check_len(&self, other: &PauliString) -> Result<(), StabilizerError> {
        if self.len() != other.len() {
            return Err(StabilizerError::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

impl From<Vec<Gf4>> for PauliString {
    fn from(v: Vec<Gf4>) -> Self {
        PauliString(v)
    }
}

impl FromStr for PauliString {
    type Err = StabilizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                PauliSymbol::from_char(c)
                    .map(Gf4::from)
                    .ok_or(StabilizerError::InvalidSymbol {
                        symbol: c,
                        position: i,
                    })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &g in &self.0 {
            write!(f, "{}", PauliSymbol::from(g).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `+1` if `p` and `q` commute, `-1` if they anticommute.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<i8, StabilizerError> {
    Ok(if p.anticommutes(q)? { -1 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf4::trace_inner_product;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert_eq!(commutes(&ps("XX"), &ps("XX")).unwrap(), 1);
        assert_eq!(commutes(&ps("YZZXI"), &ps("IIZXI")).unwrap(), 1);
        assert_eq!(commutes(&ps("XZXIX"), &ps("IIZXI")).unwrap(), -1);
        assert!(commutes(&ps("XX"), &ps("X")).is_err());
    }

    #[test]
    fn product_and_display() {
        assert_eq!(ps("IIZXI").product(&ps("YZIII")).unwrap(), ps("YZZXI"));
        assert_eq!(ps("XZYI").to_string(), "XZYI");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
        prop::collection::vec((0u8..4).prop_map(Gf4::from_bits), n).prop_map(PauliString)
    }

    proptest! {
        #[test]
        fn symplectic_shortcut_matches_trace_form((a, b) in (1usize..16).prop_flat_map(|n| (pauli(n), pauli(n)))) {
            let tr = trace_inner_product(a.symbols(), b.symbols()).unwrap();
            prop_assert_eq!(a.anticommutes(&b).unwrap(), tr == 1);
        }
    }
}
