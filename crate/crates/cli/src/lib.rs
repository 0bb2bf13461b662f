//! Library half of the `sdkx` binary: wire framing, the exchange state
//! machine, and small shared helpers. Split out so integration tests can
//! speak the protocol without going through a subprocess.

pub mod exchange;
pub mod wire;

use num_bigint::BigUint;
use num_traits::Zero;

/// Parses a non-negative integer that may use compact scientific
/// notation with an integer mantissa, e.g. "500", "1e44", "25e3".
pub fn parse_big_decimal(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e),
        None => (s, "0"),
    };
    let mantissa: BigUint = mantissa
        .parse()
        .map_err(|_| format!("bad integer mantissa in {s:?}"))?;
    let exponent: u32 = exponent
        .parse()
        .map_err(|_| format!("bad exponent in {s:?}"))?;
    if mantissa.is_zero() && exponent > 0 {
        return Ok(BigUint::zero());
    }
    Ok(mantissa * BigUint::from(10u8).pow(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_scientific() {
        assert_eq!(parse_big_decimal("500").unwrap(), BigUint::from(500u32));
        assert_eq!(parse_big_decimal("1e3").unwrap(), BigUint::from(1000u32));
        assert_eq!(parse_big_decimal("25E2").unwrap(), BigUint::from(2500u32));
        assert_eq!(
            parse_big_decimal("1e44").unwrap().to_string(),
            format!("1{}", "0".repeat(44))
        );
        assert!(parse_big_decimal("1.5e3").is_err());
        assert!(parse_big_decimal("abc").is_err());
    }
}
