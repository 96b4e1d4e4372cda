//! Exact rational scalars.
//!
//! Every value in the kernel — diversity values, probabilities, distances,
//! cut weights — is a [`Rat`]: an arbitrary-precision rational kept in lowest
//! terms with a positive denominator. There is no floating-point fast path.
//!
//! The wire form is the string `"p/q"`, or just `"p"` for integers.

use num::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Rational from an integer pair. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// 2^(-p) as an exact rational.
pub fn pow2_neg(p: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << p)
}

/// Parses `"p/q"` or `"p"`. The denominator must be positive; the result is
/// reduced to lowest terms.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::BadRational(s.to_string()))?;
    let den: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| Error::BadRational(s.to_string()))?,
        None => BigInt::one(),
    };
    if den <= BigInt::zero() {
        return Err(Error::BadRational(s.to_string()));
    }
    Ok(Rat::new(num, den))
}

/// Formats in lowest terms: `"p/q"`, or `"p"` when the value is an integer.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}
