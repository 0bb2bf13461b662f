//! Concrete protocol platforms: the Z_p* toy group and the matrix
//! semigroup over Z_7[A_5] extended by an inner automorphism. Each
//! carries a closed-form fast path that is cross-checked against the
//! generic engine.

mod matrix;
mod toy;

pub use matrix::{mat_pow, matrix_apply, matrix_closed_form, matrix_shared_key, MatrixParams};
pub use toy::{
    geometric_sum_mod, is_prime_u64, modpow_u64, random_prime_below, toy_apply, toy_closed_form,
    ToyParams,
};
