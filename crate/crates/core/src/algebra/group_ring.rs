//! The group ring Z_7[A_5]: formal sums of A5 elements with coefficients
//! mod 7, stored densely as 60 residues in canonical element order.
//! All reductions are eager, so equality and serialization are plain
//! byte comparisons.

use super::perm::{cayley, Perm5, A5_ORDER};
use crate::error::{Error, Result};

pub const MODULUS: u8 = 7;
/// Serialized size: one byte per canonical A5 element.
pub const GRE_BYTES: usize = A5_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupRingElem {
    coeffs: [u8; A5_ORDER],
}

impl GroupRingElem {
    pub fn zero() -> Self {
        GroupRingElem {
            coeffs: [0; A5_ORDER],
        }
    }

    /// The ring identity 1·e.
    pub fn one() -> Self {
        Self::monomial(&Perm5::IDENTITY, 1)
    }

    /// A single term c·g. The coefficient is reduced mod 7.
    pub fn monomial(g: &Perm5, c: u8) -> Self {
        let mut coeffs = [0; A5_ORDER];
        coeffs[g.index()] = c % MODULUS;
        GroupRingElem { coeffs }
    }

    pub fn from_coeffs(coeffs: [u8; A5_ORDER]) -> Result<Self> {
        for (index, &value) in coeffs.iter().enumerate() {
            if value >= MODULUS {
                return Err(Error::CoefficientOutOfRange { index, value });
            }
        }
        Ok(GroupRingElem { coeffs })
    }

    pub fn coeff(&self, index: usize) -> u8 {
        self.coeffs[index]
    }

    pub fn coeffs(&self) -> &[u8; A5_ORDER] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = [0; A5_ORDER];
        for k in 0..A5_ORDER {
            coeffs[k] = (self.coeffs[k] + other.coeffs[k]) % MODULUS;
        }
        GroupRingElem { coeffs }
    }

    pub fn neg(&self) -> Self {
        let mut coeffs = [0; A5_ORDER];
        for k in 0..A5_ORDER {
            coeffs[k] = (MODULUS - self.coeffs[k]) % MODULUS;
        }
        GroupRingElem { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Convolution over A5: the coefficient of h in the product is
    /// the sum over g·g' = h of self[g]·other[g'].
    pub fn mul(&self, other: &Self) -> Self {
        let mut acc = [0u32; 64];
        convolve_into(&mut acc, &self.coeffs, &other.coeffs);
        reduce(&acc)
    }

    /// Sum of all coefficients mod 7 — the homomorphism sending every
    /// group element to 1.
    pub fn augmentation(&self) -> u8 {
        (self.coeffs.iter().map(|&c| c as u32).sum::<u32>() % MODULUS as u32) as u8
    }

    pub fn to_bytes(&self) -> [u8; GRE_BYTES] {
        self.coeffs
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != GRE_BYTES {
            return Err(Error::LengthMismatch {
                expected: GRE_BYTES,
                actual: bytes.len(),
            });
        }
        let mut coeffs = [0; A5_ORDER];
        coeffs.copy_from_slice(bytes);
        Self::from_coeffs(coeffs)
    }
}

/// Accumulates the convolution of `x` and `y` into `acc` without reducing.
/// The accumulator is padded to 64 entries so the masked index needs no
/// bounds check; entries 60..64 stay zero. A single product contributes at
/// most 60·36 to one slot, so u32 holds many stacked convolutions.
pub(crate) fn convolve_into(acc: &mut [u32; 64], x: &[u8; A5_ORDER], y: &[u8; A5_ORDER]) {
    let table = cayley();
    for i in 0..A5_ORDER {
        let xi = x[i] as u32;
        if xi == 0 {
            continue;
        }
        let row = &table.product[i];
        for j in 0..A5_ORDER {
            acc[(row[j] & 63) as usize] += xi * y[j] as u32;
        }
    }
}

pub(crate) fn reduce(acc: &[u32; 64]) -> GroupRingElem {
    let mut coeffs = [0u8; A5_ORDER];
    for k in 0..A5_ORDER {
        coeffs[k] = (acc[k] % MODULUS as u32) as u8;
    }
    GroupRingElem { coeffs }
}

/// 1·g — convenience for monomials with unit coefficient.
pub fn basis_elem(index: usize) -> GroupRingElem {
    GroupRingElem::monomial(&Perm5::from_index(index), 1)
}
