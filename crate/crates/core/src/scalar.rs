//! Exact rational scalars.
//!
//! The whole laboratory works over Q. A scalar is an arbitrary-precision
//! rational kept in lowest terms with positive denominator; both invariants
//! are maintained by the underlying representation, so equality is structural
//! and every computation downstream is bit-reproducible.

use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar, always reduced, denominator >= 1.
pub type Scalar = BigRational;

/// Scalar from an integer.
pub fn qi(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Scalar `n/d`. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"p/q"` or `"p"` with optional sign.
pub fn parse(s: &str) -> Result<Scalar, String> {
    let t = s.trim();
    let bad = |why: &str| {
        let mut msg = String::from("invalid rational literal `");
        msg.push_str(s);
        msg.push_str("`: ");
        msg.push_str(why);
        msg
    };
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad("bad numerator"))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad("bad denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(t).map_err(|_| bad("bad integer"))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Formats a scalar as `p/q`, or `p` when the denominator is 1.
pub fn display(x: &Scalar) -> String {
    alloc::format!("{x}")
}

pub fn is_negative(x: &Scalar) -> bool {
    x.is_negative()
}
