//! Semidirect-product key exchange over non-commutative (semi)groups.
//!
//! The library provides:
//!
//! - exact arithmetic for A5, the group ring Z_7[A_5] and 3×3 matrices
//!   over it ([`algebra`]);
//! - the generic protocol engine: semidirect pair multiplication,
//!   square-and-multiply powering and key derivation over an abstract
//!   platform ([`semidirect`]);
//! - two concrete platforms: the multiplicative group mod p and the
//!   matrix semigroup extended by an inner automorphism ([`platforms`]);
//! - parameter and key generation ([`paramgen`]);
//! - a statistical indistinguishability harness ([`stats`]);
//! - desk-scale attack oracles ([`attacks`]).

pub mod algebra;
pub mod attacks;
mod error;
pub mod paramgen;
pub mod platforms;
pub mod semidirect;
pub mod stats;

pub use error::{Error, Result};
