//! Binary symplectic representation of Pauli strings and GF(2) elimination.
//!
//! Column `j` of an n-qubit operator maps to bit `j` (X-part) and bit `n + j`
//! (Z-part), so X = (1,0), Z = (0,1), Y = (1,1). The phase-free Pauli product
//! becomes XOR of the bit rows.

use super::PauliString;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

pub(crate) fn to_bits(p: &PauliString) -> Vec<u64> {
    let n = p.len();
    let mut words = vec![0u64; words_for(2 * n)];
    for (j, g) in p.symbols().iter().enumerate() {
        if g.x_bit() {
            words[j / 64] |= 1 << (j % 64);
        }
        if g.z_bit() {
            let k = n + j;
            words[k / 64] |= 1 << (k % 64);
        }
    }
    words
}

#[inline]
fn bit(words: &[u64], k: usize) -> bool {
    words[k / 64] >> (k % 64) & 1 == 1
}

fn lowest_set(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Row-echelon basis of the GF(2) span of a set of Pauli strings.
#[derive(Debug, Clone)]
pub struct SymplecticBasis {
    num_qubits: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl SymplecticBasis {
    pub fn new(num_qubits: usize) -> Self {
        SymplecticBasis {
            num_qubits,
            rows: Vec::new(),
        }
    }

    pub fn from_rows<'a, I>(num_qubits: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = &'a PauliString>,
    {
        let mut basis = SymplecticBasis::new(num_qubits);
        for r in rows {
            basis.insert(r);
        }
        basis
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        // each stored row is zero on the pivots of the rows stored before it
        for (pivot, row) in &self.rows {
            if bit(&v, *pivot) {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        v
    }

    /// Adds `p` to the span. Returns false if it was already dependent.
    pub fn insert(&mut self, p: &PauliString) -> bool {
        assert_eq!(p.len(), self.num_qubits, "operator length");
        let v = self.reduce(to_bits(p));
        match lowest_set(&v) {
            Some(pivot) => {
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }

    /// True iff `p` (phases ignored) is a product of the basis operators.
    pub fn contains(&self, p: &PauliString) -> bool {
        if p.len() != self.num_qubits {
            return false;
        }
        lowest_set(&self.reduce(to_bits(p))).is_none()
    }
}

/// GF(2) rank of the symplectic representation of `rows`.
pub fn symplectic_rank(rows: &[PauliString]) -> usize {
    let n = rows.first().map_or(0, PauliString::len);
    SymplecticBasis::from_rows(n, rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn rank_and_membership() {
        let rows = [ps("XXI"), ps("IZZ"), ps("XYZ")];
        // XYZ = XXI · IZZ
        assert_eq!(symplectic_rank(&rows), 2);
        let basis = SymplecticBasis::from_rows(3, &rows);
        assert!(basis.contains(&ps("III")));
        assert!(basis.contains(&ps("XYZ")));
        assert!(!basis.contains(&ps("ZII")));
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let n = 70;
        let mut a = PauliString::identity(n);
        a.set(69, crate::gf4::Gf4::OMEGA_BAR);
        a.set(3, crate::gf4::Gf4::ONE);
        let mut b = PauliString::identity(n);
        b.set(69, crate::gf4::Gf4::OMEGA);
        let basis = SymplecticBasis::from_rows(n, [&a, &b]);
        assert_eq!(basis.rank(), 2);
        let mut c = PauliString::identity(n);
        c.set(69, crate::gf4::Gf4::ONE);
        c.set(3, crate::gf4::Gf4::ONE);
        assert!(basis.contains(&c));
        c.set(4, crate::gf4::Gf4::ONE);
        assert!(!basis.contains(&c));
    }
}
