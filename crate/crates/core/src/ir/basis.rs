use crate::error::{Error, Result};

/// Largest bit list accepted by [`basis_index`].
pub const MAX_INDEX_BITS: usize = 62;

/// Computational basis state `|x⟩` on `width` qubits. Qubit `k` (0-based) is
/// bit `k` of `index`, so the first qubit is the least significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    width: usize,
    index: usize,
}

impl BasisState {
    pub fn new(width: usize, index: usize) -> Result<Self> {
        if width > MAX_INDEX_BITS {
            return Err(Error::IndexOverflow(width));
        }
        if index >> width != 0 {
            return Err(Error::IndexOutOfRange { index, width });
        }
        Ok(BasisState { width, index })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        Ok(BasisState {
            width: bits.len(),
            index: basis_index(bits)?,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn bit(&self, qubit: usize) -> bool {
        bit(self.index, qubit)
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.width).map(|k| self.bit(k) as u8).collect()
    }
}

/// `Σ_k bits[k]·2^k`: the first entry is the least significant digit.
pub fn basis_index(bits: &[u8]) -> Result<usize> {
    if bits.len() > MAX_INDEX_BITS {
        return Err(Error::IndexOverflow(bits.len()));
    }
    bits.iter().rev().try_fold(0usize, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as usize),
        _ => Err(Error::parse(
            "basis_index",
            format!("bit value {b} is not 0 or 1"),
        )),
    })
}

#[inline]
pub fn bit(index: usize, k: usize) -> bool {
    (index >> k) & 1 == 1
}

#[inline]
pub fn with_bit(index: usize, k: usize, value: bool) -> usize {
    (index & !(1 << k)) | ((value as usize) << k)
}

/// Gather bits of `index` at `positions` into a compact little-endian value.
#[inline]
pub fn gather_bits(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &p)| acc | (((index >> p) & 1) << i))
}

/// Overwrite bits of `index` at `positions` with the compact value `local`.
#[inline]
pub fn scatter_bits(index: usize, positions: &[usize], local: usize) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(index, |acc, (i, &p)| with_bit(acc, p, bit(local, i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_examples() {
        assert_eq!(basis_index(&[0]).unwrap(), 0);
        assert_eq!(basis_index(&[1, 0, 0, 0]).unwrap(), 1);
        assert_eq!(basis_index(&[1, 1, 0, 1]).unwrap(), 11);
        assert_eq!(basis_index(&[]).unwrap(), 0);
    }

    #[test]
    fn overflow_rejected() {
        assert!(matches!(
            basis_index(&[0; 63]),
            Err(Error::IndexOverflow(63))
        ));
        assert!(basis_index(&[1; 62]).is_ok());
        assert!(BasisState::new(2, 4).is_err());
    }

    #[test]
    fn non_binary_digit_rejected() {
        assert!(basis_index(&[2]).is_err());
    }

    proptest! {
        #[test]
        fn index_is_bijective(width in 0usize..12, seed in any::<u64>()) {
            let index = (seed as usize) & ((1usize << width) - 1);
            let state = BasisState::new(width, index).unwrap();
            prop_assert_eq!(basis_index(&state.bits()).unwrap(), index);
        }

        #[test]
        fn gather_scatter_round_trip(index in 0usize..1 << 10, local in 0usize..8) {
            let positions = [7, 2, 4];
            let out = scatter_bits(index, &positions, local);
            prop_assert_eq!(gather_bits(out, &positions), local);
        }
    }
}
