//! Exact rational arithmetic used by every exponent formula.
//!
//! All exponents in this crate (kappa, delta, Delta*, s_0, s_1, eta_r*) are
//! rational numbers and must be handled without rounding, since the final
//! G-tilde table is floor-sensitive. We use `num_rational::BigRational`,
//! which already guarantees lowest terms and a positive denominator.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Arbitrary-precision signed rational, always in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_u(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// floor(x) as a BigInt (exact, works for negative values too).
pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Serializes a rational as `{"num": "...", "den": "..."}` decimal strings.
pub fn rat_json(x: &Rat) -> serde_json::Value {
    serde_json::json!({
        "num": x.numer().to_string(),
        "den": x.denom().to_string(),
    })
}

pub fn rat_is_nonneg(x: &Rat) -> bool {
    !x.is_negative()
}

pub fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_of_negative() {
        assert_eq!(floor_int(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(floor_int(&rat(7, 2)), BigInt::from(3));
    }
}
