//! Slater determinants as α/β occupation bitmasks.
//!
//! Phase convention: a determinant is `a†(α occupied, ascending) a†(β
//! occupied, ascending) |vac⟩`, i.e. the α block precedes the β block.
//! [`Determinant::jw_sign`] converts to the interleaved qubit ordering used by
//! the Jordan-Wigner encoding (qubit `2p` = α orbital `p`, `2p+1` = β).

mod slater_condon;
mod space;

pub use slater_condon::{diagonal_element, for_each_connected, slater_condon_element};
pub use space::{symmetry_complete, DeterminantSpace};

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Determinant {
    pub alpha: u64,
    pub beta: u64,
}

impl Determinant {
    pub const fn new(alpha: u64, beta: u64) -> Self {
        Determinant { alpha, beta }
    }

    pub fn n_alpha(&self) -> usize {
        self.alpha.count_ones() as usize
    }

    pub fn n_beta(&self) -> usize {
        self.beta.count_ones() as usize
    }

    pub fn sector(&self) -> (usize, usize) {
        (self.n_alpha(), self.n_beta())
    }

    /// Number of spin-orbital substitutions relating the two determinants.
    pub fn excitation_degree(&self, other: &Determinant) -> usize {
        (((self.alpha ^ other.alpha).count_ones() + (self.beta ^ other.beta).count_ones()) / 2)
            as usize
    }

    /// Interleaved qubit bitstring: bit `2p` is α of orbital `p`, `2p+1` is β.
    pub fn to_qubits(&self) -> u64 {
        spread(self.alpha) | (spread(self.beta) << 1)
    }

    pub fn from_qubits(bits: u64) -> Self {
        Determinant {
            alpha: compact(bits),
            beta: compact(bits >> 1),
        }
    }

    /// Sign `s` with `|det⟩ = s |qubits⟩`, where the qubit basis state has
    /// its creation operators in ascending qubit order.
    pub fn jw_sign(&self) -> f64 {
        // count (α p, β q) pairs with q < p: those are out of order
        let mut inversions = 0u32;
        let mut a = self.alpha;
        while a != 0 {
            let p = a.trailing_zeros();
            inversions += (self.beta & ((1u64 << p) - 1)).count_ones();
            a &= a - 1;
        }
        if inversions.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `|1100,1100⟩` form, orbital 0 leftmost.
    pub fn to_text(&self, n_orb: usize) -> String {
        format!(
            "|{},{}⟩",
            mask_string(self.alpha, n_orb),
            mask_string(self.beta, n_orb)
        )
    }

    /// Parses the `|alpha,beta⟩` form. Returns the orbital count implied by
    /// the string length.
    pub fn parse_text(s: &str) -> Result<(Determinant, usize)> {
        let bad = || Error::Parse(format!("bad determinant `{s}`"));
        let inner = s
            .trim()
            .strip_prefix('|')
            .and_then(|t| t.strip_suffix('⟩').or_else(|| t.strip_suffix('>')))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        if a.len() != b.len() || a.is_empty() || a.len() > 64 {
            return Err(bad());
        }
        let parse = |t: &str| -> Result<u64> {
            t.chars().enumerate().try_fold(0u64, |m, (i, c)| match c {
                '0' => Ok(m),
                '1' => Ok(m | (1 << i)),
                _ => Err(bad()),
            })
        };
        Ok((Determinant::new(parse(a)?, parse(b)?), a.len()))
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = (64 - (self.alpha | self.beta).leading_zeros()).max(1) as usize;
        f.write_str(&self.to_text(n))
    }
}

/// Aufbau reference: the lowest `n_alpha` / `n_beta` orbitals occupied.
pub fn hf_reference(n_alpha: usize, n_beta: usize, n_orb: usize) -> Result<Determinant> {
    if n_orb > 64 {
        return Err(Error::DimensionMismatch(format!(
            "{n_orb} orbitals exceed the 64-orbital bitmask"
        )));
    }
    for n in [n_alpha, n_beta] {
        if n > n_orb {
            return Err(Error::TooManyElectrons {
                n_electrons: n,
                n_orbitals: n_orb,
            });
        }
    }
    Ok(Determinant::new(low_bits(n_alpha), low_bits(n_beta)))
}

pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn mask_string(m: u64, n: usize) -> String {
    (0..n)
        .map(|i| if m >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Bit `i` of the input moves to bit `2i` (input must fit in 32 bits).
fn spread(x: u64) -> u64 {
    let mut x = x & 0xFFFF_FFFF;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

fn compact(x: u64) -> u64 {
    let mut x = x & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x >> 4)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x >> 8)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x >> 16)) & 0x0000_0000_FFFF_FFFF;
    x
}

/// Iterator over set bit positions.
pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let p = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(p)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hf_reference_examples() {
        let d = hf_reference(2, 2, 4).unwrap();
        assert_eq!((d.alpha, d.beta), (0b0011, 0b0011));
        assert_eq!(d.to_text(4), "|1100,1100⟩");
        assert_eq!(hf_reference(0, 0, 5).unwrap(), Determinant::new(0, 0));
        let fh = hf_reference(8, 8, 10).unwrap();
        assert_eq!(fh.alpha, 0xFF);
        assert_eq!(fh.beta, 0xFF);
        assert!(hf_reference(5, 1, 4).is_err());
    }

    #[test]
    fn text_form() {
        let (d, n) = Determinant::parse_text("|1010,0110⟩").unwrap();
        assert_eq!(n, 4);
        assert_eq!(d, Determinant::new(0b0101, 0b0110));
        assert_eq!(d.to_text(4), "|1010,0110⟩");
        assert!(Determinant::parse_text("|10,1⟩").is_err());
        assert!(Determinant::parse_text("1010,0110").is_err());
        assert!(Determinant::parse_text("|10x0,0110⟩").is_err());
    }

    #[test]
    fn jw_sign_small_cases() {
        // α0 β0: qubit order (0,1) matches block order
        assert_eq!(Determinant::new(0b1, 0b1).jw_sign(), 1.0);
        // α1 β0: block order α1 β0, qubit order β0 (q1) α1 (q2): one swap
        assert_eq!(Determinant::new(0b10, 0b01).jw_sign(), -1.0);
        assert_eq!(Determinant::new(0b11, 0b11).jw_sign(), -1.0);
    }

    proptest! {
        #[test]
        fn qubit_roundtrip(alpha in 0u64..(1 << 20), beta in 0u64..(1 << 20)) {
            let d = Determinant::new(alpha, beta);
            let q = d.to_qubits();
            prop_assert_eq!(q.count_ones() as usize, d.n_alpha() + d.n_beta());
            prop_assert_eq!(Determinant::from_qubits(q), d);
        }

        #[test]
        fn text_roundtrip(alpha in 0u64..(1 << 12), beta in 0u64..(1 << 12)) {
            let d = Determinant::new(alpha, beta);
            let (back, n) = Determinant::parse_text(&d.to_text(12)).unwrap();
            prop_assert_eq!(back, d);
            prop_assert_eq!(n, 12);
        }
    }
}
