//! Scalar abstraction for the recursions.
//!
//! The density recursion, the exponential-series coefficient tables and the
//! zero-indicator polynomial are written once against [`Scalar`] and then
//! instantiated either exactly ([`BigRational`]) or in floating point
//! (`f32`/`f64`). Exact instantiation is what every identity check uses;
//! floating point exists for long runs where rational denominators explode.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

/// A field-like number type the recursions can run over.
pub trait Scalar: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug {
    /// Raise to a small non-negative integer power.
    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the scalar type")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Lossy view for reporting.
    fn to_f64_lossy(&self) -> f64;

    /// `Some(n)` when the value is an exact integer that fits the target.
    fn as_integer(&self) -> Option<BigInt>;
}

impl Scalar for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }

    fn as_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.to_integer())
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn as_integer(&self) -> Option<BigInt> {
        (self.fract() == 0.0 && self.is_finite()).then(|| BigInt::from_f64(*self)).flatten()
    }
}

impl Scalar for f32 {
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }

    fn as_integer(&self) -> Option<BigInt> {
        (self.fract() == 0.0 && self.is_finite()).then(|| BigInt::from_f32(*self)).flatten()
    }
}

/// Convert a rational to the nearest-ish `f64` without overflowing on huge
/// numerators and denominators.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if value.is_zero() {
        return 0.0;
    }
    let numer = value.numer();
    let denom = value.denom();
    let shift = numer.bits().max(denom.bits()).saturating_sub(1000) as usize;
    let n = (numer >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> shift).to_f64().unwrap_or(f64::NAN);
    if d == 0.0 {
        // denominator was shifted away: magnitude is enormous
        return if numer.is_positive() { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    n / d
}

/// Render a rational as a fixed-point decimal string with `digits` fractional
/// digits, rounding half away from zero.
pub fn rational_to_decimal(value: &BigRational, digits: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = value * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    };
    let negative = rounded.is_negative();
    let magnitude = rounded.abs();
    let int_part = &magnitude / &scale;
    let frac_part = &magnitude % &scale;
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&q(15, 8), 3), "1.875");
        assert_eq!(rational_to_decimal(&q(1, 3), 4), "0.3333");
        assert_eq!(rational_to_decimal(&q(2, 3), 2), "0.67");
        assert_eq!(rational_to_decimal(&q(-2, 3), 2), "-0.67");
        assert_eq!(rational_to_decimal(&q(7, 1), 0), "7");
        assert_eq!(rational_to_decimal(&q(1, 200), 1), "0.0");
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(3u8).pow(5000);
        let r = BigRational::new(big.clone(), big * BigInt::from(4));
        assert!((rational_to_f64(&r) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn integer_views() {
        assert_eq!(q(6, 3).as_integer(), Some(BigInt::from(2)));
        assert_eq!(q(1, 2).as_integer(), None);
        assert_eq!(4.0f64.as_integer(), Some(BigInt::from(4)));
        assert_eq!(0.5f32.as_integer(), None);
    }
}
