//! Toy instantiation: the multiplicative group Z_p* with φ(h) = h^k.
//! The first component of (g, φ)^m has the closed form
//! g^((k^m − 1)/(k − 1)); recovering the shared key here is exactly the
//! classical Diffie-Hellman problem, which is what makes the platform a
//! useful cross-check rather than a serious proposal.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::semidirect::Platform;

/// Public parameters (p, g, k): prime modulus, base element, and the
/// endomorphism exponent. φ is an automorphism iff gcd(k, p−1) = 1;
/// other k are permitted but flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyParams {
    p: u64,
    g: u64,
    k: u64,
    automorphism: bool,
}

impl ToyParams {
    pub fn new(p: u64, g: u64, k: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if g <= 1 || g >= p {
            return Err(Error::InvalidBase { g, p });
        }
        if k <= 1 {
            return Err(Error::InvalidEndomorphismExponent(k));
        }
        let automorphism = gcd(k, p - 1) == 1;
        Ok(ToyParams {
            p,
            g,
            k,
            automorphism,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Whether φ is invertible on Z_p*, i.e. gcd(k, p−1) = 1.
    pub fn is_automorphism(&self) -> bool {
        self.automorphism
    }

    fn phi_power(&self, s: &BigUint, h: u64) -> u64 {
        // h^(k^s) mod p with the exponent reduced mod p−1 (h is a unit)
        let group_order = BigUint::from(self.p - 1);
        let exp = BigUint::from(self.k).modpow(s, &group_order);
        modpow_u64(h, &exp, self.p)
    }
}

impl Platform for ToyParams {
    type Elem = u64;

    fn base(&self) -> &u64 {
        &self.g
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn apply_power(&self, s: &BigUint, x: &u64) -> u64 {
        self.phi_power(s, *x)
    }

    /// g^S mod p with S = 1 + k + … + k^{n−1} reduced mod p−1. Unlike
    /// [`toy_closed_form`] this never materializes the exact exponent,
    /// so it stays cheap for n far beyond word size.
    fn transmission(&self, n: &BigUint) -> Result<u64> {
        if n.is_zero() {
            return Err(Error::ZeroExponent);
        }
        let group_order = BigUint::from(self.p - 1);
        let (sum, _) = geometric_sum_mod(&BigUint::from(self.k), n, &group_order);
        Ok(modpow_u64(self.g, &sum, self.p))
    }
}

/// φ^s(h) = h^(k^s) mod p. Rejects h ≡ 0 mod p; exponents are reduced
/// mod p−1.
pub fn toy_apply(params: &ToyParams, s: &BigUint, h: u64) -> Result<u64> {
    if h.is_multiple_of(params.p) {
        return Err(Error::ZeroElement);
    }
    Ok(params.phi_power(s, h % params.p))
}

/// g^((k^m − 1)/(k − 1)) mod p with the exponent computed exactly over
/// big integers before reduction mod p−1. Cost grows with m, so this is
/// the cross-check route, not the protocol route.
pub fn toy_closed_form(params: &ToyParams, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroExponent);
    }
    let k = BigUint::from(params.k);
    let exponent = (k.pow(m as u32) - BigUint::one()) / (k - BigUint::one());
    let reduced = exponent % BigUint::from(params.p - 1);
    Ok(modpow_u64(params.g, &reduced, params.p))
}

/// (1 + k + … + k^{m−1} mod n, k^m mod n). Divide-and-conquer on m:
/// S(2a) = S(a)·(1 + k^a), S(2a+1) = S(2a)·k + 1.
pub fn geometric_sum_mod(k: &BigUint, m: &BigUint, n: &BigUint) -> (BigUint, BigUint) {
    if m.is_zero() {
        return (BigUint::zero(), BigUint::one() % n);
    }
    let half = m >> 1;
    let (s, kp) = geometric_sum_mod(k, &half, n);
    let s2 = (&s + &s * &kp) % n;
    let kp2 = (&kp * &kp) % n;
    if m.bit(0) {
        ((s2 * k + BigUint::one()) % n, kp2 * k % n)
    } else {
        (s2, kp2)
    }
}

pub fn modpow_u64(base: u64, exp: &BigUint, modulus: u64) -> u64 {
    BigUint::from(base % modulus)
        .modpow(exp, &BigUint::from(modulus))
        .try_into()
        .expect("result below a u64 modulus")
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic Miller-Rabin for u64 (the witness set covers all
/// 64-bit integers).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modpow_u64(a, &BigUint::from(d), n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniform random prime in [3, limit).
pub fn random_prime_below<R: Rng>(rng: &mut R, limit: u64) -> u64 {
    assert!(limit > 3, "no odd primes below {limit}");
    loop {
        let candidate = rng.gen_range(3..limit);
        if is_prime_u64(candidate) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semidirect::sd_pow;

    #[test]
    fn validation_rejects_bad_params() {
        assert!(matches!(ToyParams::new(21, 2, 3), Err(Error::NotPrime(21))));
        assert!(matches!(
            ToyParams::new(23, 1, 3),
            Err(Error::InvalidBase { .. })
        ));
        assert!(matches!(
            ToyParams::new(23, 23, 3),
            Err(Error::InvalidBase { .. })
        ));
        assert!(matches!(
            ToyParams::new(23, 5, 1),
            Err(Error::InvalidEndomorphismExponent(1))
        ));
    }

    #[test]
    fn automorphism_flag_follows_gcd() {
        // p−1 = 22 = 2·11
        assert!(ToyParams::new(23, 5, 3).unwrap().is_automorphism());
        assert!(!ToyParams::new(23, 5, 2).unwrap().is_automorphism());
    }

    #[test]
    fn apply_power_basics() {
        let params = ToyParams::new(23, 5, 3).unwrap();
        assert_eq!(toy_apply(&params, &BigUint::zero(), 17).unwrap(), 17);
        assert_eq!(toy_apply(&params, &BigUint::from(9u32), 1).unwrap(), 1);
        assert!(matches!(
            toy_apply(&params, &BigUint::one(), 0),
            Err(Error::ZeroElement)
        ));
        assert!(matches!(
            toy_apply(&params, &BigUint::one(), 46),
            Err(Error::ZeroElement)
        ));
    }

    #[test]
    fn apply_power_matches_repeated_multiplication() {
        // p = 23, k = 3, s = 2, h = 5 → 5^9 mod 23
        let params = ToyParams::new(23, 5, 3).unwrap();
        let mut expected = 1u64;
        for _ in 0..9 {
            expected = (expected * 5) % 23;
        }
        assert_eq!(
            toy_apply(&params, &BigUint::from(2u32), 5).unwrap(),
            expected
        );
    }

    #[test]
    fn closed_form_small_exponents() {
        let params = ToyParams::new(23, 5, 3).unwrap();
        assert_eq!(toy_closed_form(&params, 1).unwrap(), 5);
        // m = 2 → g^{k+1}
        assert_eq!(
            toy_closed_form(&params, 2).unwrap(),
            modpow_u64(5, &BigUint::from(4u32), 23)
        );
        // m = 4 → E = (81−1)/2 = 40
        assert_eq!(
            toy_closed_form(&params, 4).unwrap(),
            modpow_u64(5, &BigUint::from(40u32), 23)
        );
        assert!(toy_closed_form(&params, 0).is_err());
    }

    #[test]
    fn closed_form_agrees_with_generic_engine() {
        for (p, k) in [(23u64, 3u64), (101, 2), (97, 5), (7919, 3)] {
            let params = ToyParams::new(p, 5 % p, k).unwrap();
            for m in 1..=40u64 {
                let generic = sd_pow(&params, params.base(), &BigUint::from(m)).unwrap();
                assert_eq!(
                    toy_closed_form(&params, m).unwrap(),
                    generic,
                    "p={p} k={k} m={m}"
                );
                assert_eq!(params.transmission(&BigUint::from(m)).unwrap(), generic);
            }
        }
    }

    #[test]
    fn geometric_sum_matches_direct_sum() {
        let k = BigUint::from(3u32);
        let n = BigUint::from(22u32);
        let mut direct = BigUint::zero();
        let mut power = BigUint::one();
        for m in 1..=50u32 {
            direct = (&direct + &power) % &n;
            power = power * &k % &n;
            let (sum, kp) = geometric_sum_mod(&k, &BigUint::from(m), &n);
            assert_eq!(sum, direct, "m={m}");
            assert_eq!(kp, power);
        }
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(2_147_483_647)); // 2^31 − 1
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime_u64(1_000_000_007));
    }
}
