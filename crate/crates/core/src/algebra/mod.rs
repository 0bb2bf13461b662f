//! Exact arithmetic for A5, the group ring Z_7[A_5] and 3×3 matrices
//! over it, including the augmentation homomorphism.

mod group_ring;
mod matrix;
mod perm;

pub use group_ring::{basis_elem, GroupRingElem, GRE_BYTES, MODULUS};
pub use matrix::{GRMatrix, Z7Matrix, DIM, MATRIX_BITS, MATRIX_BYTES};
pub use perm::{a5_elements, Perm5, A5_ORDER};
