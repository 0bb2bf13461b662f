//! The generic protocol engine: arithmetic on pairs (g, φ^r) from the
//! extension of a (semi)group by a cyclic (semi)group of endomorphisms,
//! square-and-multiply powering, and both parties' key-derivation steps.
//!
//! Only the first component of a power is ever transmitted; the engine
//! never materializes the endomorphism power of a received element.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A platform (semi)group together with the public endomorphism φ that
/// extends it. The endomorphism's description lives inside the
/// implementing type (the exponent k for the toy platform, the
/// conjugating pair (H, H⁻¹) for the matrix platform).
pub trait Platform {
    type Elem: Clone + PartialEq;

    /// The public base element (g for the toy group, M for matrices).
    fn base(&self) -> &Self::Elem;

    /// The (semi)group operation.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// φ^s applied to x; s = 0 is the identity map. Platforms implement
    /// this directly so they can beat s-fold application of φ.
    fn apply_power(&self, s: &BigUint, x: &Self::Elem) -> Self::Elem;

    /// First component of (g, φ)^n for the public base g — the element a
    /// party transmits. Platforms with a closed form override this; the
    /// default is the generic square-and-multiply engine.
    fn transmission(&self, n: &BigUint) -> Result<Self::Elem> {
        sd_pow(self, self.base(), n)
    }
}

/// A pair (first, φ^exp). Used only for local powering; received
/// transmissions are bare platform elements.
#[derive(Debug, Clone, PartialEq)]
pub struct SdElement<E> {
    pub first: E,
    pub exp: BigUint,
}

impl<E> SdElement<E> {
    pub fn new(first: E, exp: BigUint) -> Self {
        SdElement { first, exp }
    }
}

/// (g, φ^r) · (h, φ^s) = (φ^s(g)·h, φ^{r+s}).
pub fn sd_mul<P: Platform + ?Sized>(
    platform: &P,
    u: &SdElement<P::Elem>,
    v: &SdElement<P::Elem>,
) -> SdElement<P::Elem> {
    SdElement {
        first: platform.mul(&platform.apply_power(&v.exp, &u.first), &v.first),
        exp: &u.exp + &v.exp,
    }
}

/// First component of (g, φ)^n, n ≥ 1, by square-and-multiply over
/// [`sd_mul`]. Equals the iterated product φ^{n-1}(g)···φ(g)·g.
pub fn sd_pow<P: Platform + ?Sized>(platform: &P, g: &P::Elem, n: &BigUint) -> Result<P::Elem> {
    sd_pow_counted(platform, g, n).map(|(elem, _)| elem)
}

/// Like [`sd_pow`] but also reports how many sd_mul invocations were
/// spent; the count is at most 2·⌊log₂ n⌋ + 1.
pub fn sd_pow_counted<P: Platform + ?Sized>(
    platform: &P,
    g: &P::Elem,
    n: &BigUint,
) -> Result<(P::Elem, u64)> {
    if n.is_zero() {
        return Err(Error::ZeroExponent);
    }
    let base = SdElement::new(g.clone(), BigUint::one());
    let mut acc = base.clone();
    let mut count = 0u64;
    // left-to-right binary powering; the top bit is absorbed by starting
    // from the base itself
    let bits = n.bits();
    for i in (0..bits - 1).rev() {
        acc = sd_mul(platform, &acc, &acc);
        count += 1;
        if n.bit(i) {
            acc = sd_mul(platform, &acc, &base);
            count += 1;
        }
    }
    debug_assert_eq!(acc.exp, *n);
    Ok((acc.first, count))
}

/// One party's key derivation: φ^m(received) · own_outbound, where m is
/// the party's private exponent and own_outbound its earlier
/// transmission.
pub fn derive_shared<P: Platform + ?Sized>(
    platform: &P,
    received: &P::Elem,
    own_exp: &BigUint,
    own_outbound: &P::Elem,
) -> P::Elem {
    platform.mul(&platform.apply_power(own_exp, received), own_outbound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Initiator,
    Responder,
}

/// One party's protocol state. The private exponent never leaves this
/// struct; the derived key is available once [`complete`](Self::complete)
/// has consumed the peer's transmission.
#[derive(Debug)]
pub struct ProtocolSession<'p, P: Platform> {
    role: Role,
    platform: &'p P,
    exponent: BigUint,
    outbound: P::Elem,
    derived: Option<P::Elem>,
}

impl<'p, P: Platform> ProtocolSession<'p, P> {
    pub fn new(role: Role, platform: &'p P, exponent: BigUint) -> Result<Self> {
        if exponent.is_zero() {
            return Err(Error::ZeroExponent);
        }
        let outbound = platform.transmission(&exponent)?;
        Ok(ProtocolSession {
            role,
            platform,
            exponent,
            outbound,
            derived: None,
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// The element this party sends: the first component of (g, φ)^m.
    pub fn outbound(&self) -> &P::Elem {
        &self.outbound
    }

    /// Derives the shared key from the peer's transmission.
    pub fn complete(&mut self, received: &P::Elem) -> &P::Elem {
        let key = derive_shared(self.platform, received, &self.exponent, &self.outbound);
        self.derived = Some(key);
        self.derived.as_ref().unwrap()
    }

    pub fn shared_key(&self) -> Option<&P::Elem> {
        self.derived.as_ref()
    }
}
