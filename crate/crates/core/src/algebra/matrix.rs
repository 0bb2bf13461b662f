//! 3×3 matrices over Z_7[A_5] — the platform semigroup — plus their
//! augmentation image over Z_7. A fully dense matrix serializes to
//! 9·60 = 540 bytes (1620 bits at 3 bits per coefficient).

use super::group_ring::{convolve_into, reduce, GroupRingElem, GRE_BYTES, MODULUS};
use crate::error::{Error, Result};

pub const DIM: usize = 3;
/// Serialized size: nine 60-byte entries in row-major order.
pub const MATRIX_BYTES: usize = DIM * DIM * GRE_BYTES;
/// Information content of a dense matrix: 9 entries × 60 coefficients ×
/// 3 bits = 1620 bits.
pub const MATRIX_BITS: usize = DIM * DIM * GRE_BYTES * 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GRMatrix {
    entries: [[GroupRingElem; DIM]; DIM],
}

impl GRMatrix {
    pub fn zero() -> Self {
        GRMatrix {
            entries: [[GroupRingElem::zero(); DIM]; DIM],
        }
    }

    /// 1·e on the diagonal, 0 elsewhere.
    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.entries[i][i] = GroupRingElem::one();
        }
        m
    }

    pub fn from_entries(entries: [[GroupRingElem; DIM]; DIM]) -> Self {
        GRMatrix { entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> &GroupRingElem {
        &self.entries[row][col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: GroupRingElem) {
        self.entries[row][col] = value;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                m.entries[i][j] = self.entries[i][j].add(&other.entries[i][j]);
            }
        }
        m
    }

    /// Standard matrix product over the group ring; non-commutative.
    /// The three convolutions per output entry share one accumulator and
    /// are reduced mod 7 once.
    pub fn mul(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = [0u32; 64];
                for k in 0..DIM {
                    convolve_into(
                        &mut acc,
                        self.entries[i][k].coeffs(),
                        other.entries[k][j].coeffs(),
                    );
                }
                m.entries[i][j] = reduce(&acc);
            }
        }
        m
    }

    /// Entry-wise augmentation; a semigroup homomorphism onto 3×3
    /// matrices over Z_7.
    pub fn augmentation(&self) -> Z7Matrix {
        let mut cells = [[0u8; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                cells[i][j] = self.entries[i][j].augmentation();
            }
        }
        Z7Matrix { cells }
    }

    pub fn to_bytes(&self) -> [u8; MATRIX_BYTES] {
        let mut bytes = [0u8; MATRIX_BYTES];
        for i in 0..DIM {
            for j in 0..DIM {
                let offset = (i * DIM + j) * GRE_BYTES;
                bytes[offset..offset + GRE_BYTES].copy_from_slice(&self.entries[i][j].to_bytes());
            }
        }
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != MATRIX_BYTES {
            return Err(Error::LengthMismatch {
                expected: MATRIX_BYTES,
                actual: bytes.len(),
            });
        }
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                let offset = (i * DIM + j) * GRE_BYTES;
                m.entries[i][j] = GroupRingElem::from_bytes(&bytes[offset..offset + GRE_BYTES])?;
            }
        }
        Ok(m)
    }
}

/// A 3×3 matrix of residues mod 7 — the augmentation image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Z7Matrix {
    cells: [[u8; DIM]; DIM],
}

impl Z7Matrix {
    pub fn zero() -> Self {
        Z7Matrix {
            cells: [[0; DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.cells[i][i] = 1;
        }
        m
    }

    pub fn from_cells(cells: [[u8; DIM]; DIM]) -> Result<Self> {
        for row in &cells {
            for (index, &value) in row.iter().enumerate() {
                if value >= MODULUS {
                    return Err(Error::CoefficientOutOfRange { index, value });
                }
            }
        }
        Ok(Z7Matrix { cells })
    }

    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.cells[row][col]
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|row| row.iter().all(|&c| c == 0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = 0u32;
                for k in 0..DIM {
                    acc += self.cells[i][k] as u32 * other.cells[k][j] as u32;
                }
                m.cells[i][j] = (acc % MODULUS as u32) as u8;
            }
        }
        m
    }
}
