//! Key and parameter generation: private exponents of magnitude 2^t,
//! augmentation-zero random M, and invertible H built as a product of
//! random triangular factors whose inverse is tracked analytically.
//!
//! Everything samples from a caller-supplied RNG so that tests can pin a
//! seed while deployments use an entropy-backed generator.

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use crate::algebra::{GRMatrix, GroupRingElem, Perm5, A5_ORDER, DIM, MATRIX_BYTES, MODULUS};
use crate::error::{Error, Result};
use crate::platforms::MatrixParams;

pub const DEFAULT_FACTOR_COUNT: usize = 20;
/// Attempts at drawing an H with H·(HM) ≠ (HM)·H before giving up.
pub const RESAMPLE_BUDGET: u32 = 100;

/// Magic bytes for the parameter file and the wire protocol.
pub const PARAM_MAGIC: [u8; 4] = *b"SDKX";
pub const PARAM_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecurityParams {
    pub t: u16,
    pub factor_count: usize,
}

impl SecurityParams {
    pub fn new(t: u16, factor_count: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::SecurityParameterTooSmall(t));
        }
        if factor_count == 0 {
            return Err(Error::NoFactors);
        }
        Ok(SecurityParams { t, factor_count })
    }

    pub fn with_default_factors(t: u16) -> Result<Self> {
        Self::new(t, DEFAULT_FACTOR_COUNT)
    }
}

/// Uniform private exponent in [2^(t−1), 2^t) — exactly t bits.
pub fn sample_exponent<R: Rng>(t: u16, rng: &mut R) -> BigUint {
    assert!(t >= 2, "security parameter below 2");
    let low = BigUint::from(1u8) << (t - 1) as u64;
    let high = BigUint::from(1u8) << t as u64;
    rng.gen_biguint_range(&low, &high)
}

/// Unrestricted uniform element of Z_7[A_5].
pub fn sample_gre_uniform<R: Rng>(rng: &mut R) -> GroupRingElem {
    let mut coeffs = [0u8; A5_ORDER];
    for c in coeffs.iter_mut() {
        *c = rng.gen_range(0..MODULUS);
    }
    GroupRingElem::from_coeffs(coeffs).expect("sampled residues are in range")
}

/// Uniform element conditioned on augmentation 0: draw uniformly, then
/// pick a random coefficient and change it, if necessary, so the
/// coefficient sum is 0 mod 7.
pub fn sample_gre_aug_zero<R: Rng>(rng: &mut R) -> GroupRingElem {
    let mut coeffs = [0u8; A5_ORDER];
    for c in coeffs.iter_mut() {
        *c = rng.gen_range(0..MODULUS);
    }
    let fix = rng.gen_range(0..A5_ORDER);
    let rest: u32 = coeffs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != fix)
        .map(|(_, &c)| c as u32)
        .sum();
    coeffs[fix] = ((MODULUS as u32 - rest % MODULUS as u32) % MODULUS as u32) as u8;
    let elem = GroupRingElem::from_coeffs(coeffs).expect("sampled residues are in range");
    debug_assert_eq!(elem.augmentation(), 0);
    elem
}

/// Unrestricted uniform random matrix (used as the comparison matrix N
/// in the statistical experiments).
pub fn sample_matrix_uniform<R: Rng>(rng: &mut R) -> GRMatrix {
    let mut m = GRMatrix::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            m.set_entry(i, j, sample_gre_uniform(rng));
        }
    }
    m
}

/// Public base matrix M: nine independent augmentation-zero entries, so
/// the augmentation image of every transmission is the zero matrix.
pub fn sample_m<R: Rng>(rng: &mut R) -> GRMatrix {
    let mut m = GRMatrix::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            m.set_entry(i, j, sample_gre_aug_zero(rng));
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Upper,
    Lower,
}

/// A triangular matrix with single group elements (invertible monomials)
/// on the diagonal and unrestricted group-ring elements off it.
///
/// Upper: [[g0, u0, u1], [0, g1, u2], [0, 0, g2]]; Lower is the mirror
/// with u0, u1, u2 at (1,0), (2,0), (2,1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularFactor {
    pub orientation: Orientation,
    pub diagonal: [Perm5; DIM],
    pub off_diagonal: [GroupRingElem; DIM],
}

impl TriangularFactor {
    pub fn sample<R: Rng>(rng: &mut R, orientation: Orientation) -> Self {
        let diagonal = std::array::from_fn(|_| Perm5::from_index(rng.gen_range(0..A5_ORDER)));
        let off_diagonal = std::array::from_fn(|_| sample_gre_uniform(rng));
        TriangularFactor {
            orientation,
            diagonal,
            off_diagonal,
        }
    }

    pub fn to_matrix(&self) -> GRMatrix {
        let d: Vec<GroupRingElem> = self
            .diagonal
            .iter()
            .map(|g| GroupRingElem::monomial(g, 1))
            .collect();
        let [u0, u1, u2] = &self.off_diagonal;
        let mut m = GRMatrix::zero();
        for i in 0..DIM {
            m.set_entry(i, i, d[i]);
        }
        match self.orientation {
            Orientation::Upper => {
                m.set_entry(0, 1, *u0);
                m.set_entry(0, 2, *u1);
                m.set_entry(1, 2, *u2);
            }
            Orientation::Lower => {
                m.set_entry(1, 0, *u0);
                m.set_entry(2, 0, *u1);
                m.set_entry(2, 1, *u2);
            }
        }
        m
    }

    /// Exact inverse by back-substitution. Diagonal monomials invert as
    /// group elements; for the upper orientation
    ///   V01 = −d0⁻¹·U01·d1⁻¹, V12 = −d1⁻¹·U12·d2⁻¹,
    ///   V02 = −d0⁻¹·(U01·V12 + U02·V22).
    pub fn inverse(&self) -> GRMatrix {
        let u = self.to_matrix();
        let dinv: Vec<GroupRingElem> = self
            .diagonal
            .iter()
            .map(|g| GroupRingElem::monomial(&g.inverse(), 1))
            .collect();
        let mut v = GRMatrix::zero();
        for i in 0..DIM {
            v.set_entry(i, i, dinv[i]);
        }
        match self.orientation {
            Orientation::Upper => {
                let v12 = dinv[1].mul(u.entry(1, 2)).mul(&dinv[2]).neg();
                let v01 = dinv[0].mul(u.entry(0, 1)).mul(&dinv[1]).neg();
                let v02 = dinv[0]
                    .mul(&u.entry(0, 1).mul(&v12).add(&u.entry(0, 2).mul(&dinv[2])))
                    .neg();
                v.set_entry(0, 1, v01);
                v.set_entry(1, 2, v12);
                v.set_entry(0, 2, v02);
            }
            Orientation::Lower => {
                let v10 = dinv[1].mul(u.entry(1, 0)).mul(&dinv[0]).neg();
                let v21 = dinv[2].mul(u.entry(2, 1)).mul(&dinv[1]).neg();
                let v20 = dinv[2]
                    .mul(&u.entry(2, 0).mul(&dinv[0]).add(&u.entry(2, 1).mul(&v10)))
                    .neg();
                v.set_entry(1, 0, v10);
                v.set_entry(2, 1, v21);
                v.set_entry(2, 0, v20);
            }
        }
        v
    }
}

/// H as a product of `factor_count` random triangular factors in draw
/// order, alternating upper, lower, upper, …; the inverse is the product
/// of the factor inverses in reverse order.
pub fn sample_h<R: Rng>(rng: &mut R, factor_count: usize) -> Result<(GRMatrix, GRMatrix)> {
    if factor_count == 0 {
        return Err(Error::NoFactors);
    }
    let mut h: Option<GRMatrix> = None;
    let mut h_inv: Option<GRMatrix> = None;
    for i in 0..factor_count {
        let orientation = if i % 2 == 0 {
            Orientation::Upper
        } else {
            Orientation::Lower
        };
        let factor = TriangularFactor::sample(rng, orientation);
        let fm = factor.to_matrix();
        let fi = factor.inverse();
        h = Some(match h {
            Some(acc) => acc.mul(&fm),
            None => fm,
        });
        h_inv = Some(match h_inv {
            Some(acc) => fi.mul(&acc),
            None => fi,
        });
    }
    Ok((h.unwrap(), h_inv.unwrap()))
}

/// Full public-parameter generation with the non-commutation rejection
/// loop; reports how many H draws were discarded.
#[derive(Debug, Clone)]
pub struct GeneratedParams {
    pub params: MatrixParams,
    pub h_resamples: u32,
}

pub fn generate_matrix_params<R: Rng>(rng: &mut R, factor_count: usize) -> Result<GeneratedParams> {
    let m = sample_m(rng);
    for attempt in 0..RESAMPLE_BUDGET {
        let (h, h_inv) = sample_h(rng, factor_count)?;
        match MatrixParams::new(m.clone(), h, h_inv) {
            Ok(params) => {
                return Ok(GeneratedParams {
                    params,
                    h_resamples: attempt,
                })
            }
            Err(Error::CommutingParameters) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::ResampleBudgetExhausted(RESAMPLE_BUDGET))
}

/// On-disk public parameter set: magic, version, t, then M, H, H⁻¹.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFile {
    pub t: u16,
    pub params: MatrixParams,
}

impl ParamFile {
    pub const BYTES: usize = 4 + 1 + 2 + 3 * MATRIX_BYTES;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::BYTES);
        out.extend_from_slice(&PARAM_MAGIC);
        out.push(PARAM_VERSION);
        out.extend_from_slice(&self.t.to_be_bytes());
        out.extend_from_slice(&self.params.m().to_bytes());
        out.extend_from_slice(&self.params.h().to_bytes());
        out.extend_from_slice(&self.params.h_inv().to_bytes());
        out
    }

    /// Parses and re-validates: a file that decodes but fails
    /// [`MatrixParams`] validation is rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::BYTES {
            return Err(Error::LengthMismatch {
                expected: Self::BYTES,
                actual: bytes.len(),
            });
        }
        if bytes[..4] != PARAM_MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes[4] != PARAM_VERSION {
            return Err(Error::BadVersion(bytes[4]));
        }
        let t = u16::from_be_bytes([bytes[5], bytes[6]]);
        if t < 2 {
            return Err(Error::SecurityParameterTooSmall(t));
        }
        let m = GRMatrix::from_bytes(&bytes[7..7 + MATRIX_BYTES])?;
        let h = GRMatrix::from_bytes(&bytes[7 + MATRIX_BYTES..7 + 2 * MATRIX_BYTES])?;
        let h_inv = GRMatrix::from_bytes(&bytes[7 + 2 * MATRIX_BYTES..])?;
        Ok(ParamFile {
            t,
            params: MatrixParams::new(m, h, h_inv)?,
        })
    }
}
