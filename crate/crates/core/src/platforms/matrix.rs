//! Main instantiation: the semigroup of 3×3 matrices over Z_7[A_5]
//! extended by the inner automorphism φ_H(X) = H⁻¹XH for an invertible
//! public matrix H. A party's transmission has the closed form
//! H^{−m}(HM)^m and the shared key is H^{−(m+n)}(HM)^{m+n}.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::algebra::GRMatrix;
use crate::error::{Error, Result};
use crate::semidirect::Platform;

/// Validated public parameters (M, H, H⁻¹). Construction rejects
/// non-inverses, an M with any nonzero entry augmentation, and pairs
/// where H and HM commute (those would let an eavesdropper compute the
/// key as a plain product of the two transmissions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixParams {
    m: GRMatrix,
    h: GRMatrix,
    h_inv: GRMatrix,
}

impl MatrixParams {
    pub fn new(m: GRMatrix, h: GRMatrix, h_inv: GRMatrix) -> Result<Self> {
        let identity = GRMatrix::identity();
        if h.mul(&h_inv) != identity || h_inv.mul(&h) != identity {
            return Err(Error::NotInverse);
        }
        if !m.augmentation().is_zero() {
            return Err(Error::AugmentationNonzero);
        }
        let hm = h.mul(&m);
        if h.mul(&hm) == hm.mul(&h) {
            return Err(Error::CommutingParameters);
        }
        Ok(MatrixParams { m, h, h_inv })
    }

    pub fn m(&self) -> &GRMatrix {
        &self.m
    }

    pub fn h(&self) -> &GRMatrix {
        &self.h
    }

    pub fn h_inv(&self) -> &GRMatrix {
        &self.h_inv
    }
}

/// X^n by square-and-multiply; n = 0 gives the identity.
pub fn mat_pow(x: &GRMatrix, n: &BigUint) -> GRMatrix {
    if n.is_zero() {
        return GRMatrix::identity();
    }
    let mut acc = x.clone();
    for i in (0..n.bits() - 1).rev() {
        acc = acc.mul(&acc);
        if n.bit(i) {
            acc = acc.mul(x);
        }
    }
    acc
}

/// φ_H^s(X) = H^{−s}·X·H^s, with both powers of H computed by
/// square-and-multiply per call.
pub fn matrix_apply(params: &MatrixParams, s: &BigUint, x: &GRMatrix) -> GRMatrix {
    if s.is_zero() {
        return x.clone();
    }
    let h_pow = mat_pow(&params.h, s);
    let h_inv_pow = mat_pow(&params.h_inv, s);
    h_inv_pow.mul(x).mul(&h_pow)
}

/// H^{−m}(HM)^m — the transmitted first component of (M, φ_H)^m.
pub fn matrix_closed_form(params: &MatrixParams, m: &BigUint) -> Result<GRMatrix> {
    if m.is_zero() {
        return Err(Error::ZeroExponent);
    }
    let hm = params.h.mul(&params.m);
    Ok(mat_pow(&params.h_inv, m).mul(&mat_pow(&hm, m)))
}

/// φ_H^m(received) · own_outbound = H^{−(m+n)}(HM)^{m+n}.
pub fn matrix_shared_key(
    params: &MatrixParams,
    own_exp: &BigUint,
    received: &GRMatrix,
    own_outbound: &GRMatrix,
) -> GRMatrix {
    matrix_apply(params, own_exp, received).mul(own_outbound)
}

impl Platform for MatrixParams {
    type Elem = GRMatrix;

    fn base(&self) -> &GRMatrix {
        &self.m
    }

    fn mul(&self, a: &GRMatrix, b: &GRMatrix) -> GRMatrix {
        a.mul(b)
    }

    fn apply_power(&self, s: &BigUint, x: &GRMatrix) -> GRMatrix {
        matrix_apply(self, s, x)
    }

    fn transmission(&self, n: &BigUint) -> Result<GRMatrix> {
        matrix_closed_form(self, n)
    }
}
