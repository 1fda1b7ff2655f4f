//! Numeric abstractions shared by every module.
//!
//! Two tiers:
//!
//! * [`Scalar`] is an ordered field with conversions. `f64`, `f32` and
//!   [`Rational`] implement it. Anything that only needs `+ - * /` and
//!   comparisons (sum tables, mixtures, the simplex solver) is written against
//!   this bound, so it can run in exact arithmetic.
//! * [`Real`] adds the transcendental functions (`exp`, `ln`) needed by the
//!   Gibbs family, entropy and divergences. Floating types only.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Arbitrary precision rational used for exact oracles.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute slack for zero tests and pivot selection. Zero for exact types.
    fn tolerance() -> Self;

    /// Slack allowed on "sums to one" checks at construction time.
    fn probability_tolerance() -> Self;

    fn is_exact() -> bool {
        Self::tolerance().is_zero()
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("{x} is not representable"))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_int(x: i64) -> Self {
        Self::from_i64(x).expect("integer conversion")
    }

    fn is_finite_value(&self) -> bool {
        self.to_f64_lossy().is_finite()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }
    fn probability_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-6
    }
    fn probability_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Rational {
    fn tolerance() -> Self {
        Rational::from_integer(BigInt::from(0))
    }
    fn probability_tolerance() -> Self {
        Self::tolerance()
    }
    // Ratio::from_f64 gives the exact binary value of the float; decimal
    // literals such as 0.1 are better served by the nearest simple fraction.
    fn from_f64_lossy(x: f64) -> Self {
        decimal_rational(x)
    }
    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Exact rational for the shortest decimal rendering of `x`.
fn decimal_rational(x: f64) -> Rational {
    assert!(x.is_finite(), "{x} is not representable");
    let text = format!("{x:e}");
    let (mantissa, exponent) = text.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("exponent");
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all_digits: BigInt = format!("{int_part}{frac_part}").parse().expect("digits");
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all_digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all_digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    value
}

/// Floating-point scalars: everything the exponential family needs.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}

/// `|a - b| <= tol`
pub fn approx_eq<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}
