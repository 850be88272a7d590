//! Exact scalar abstraction.
//!
//! Every algorithm in this crate is written against [`Scalar`], an ordered
//! field with exact arithmetic. The trait is implemented for `Ratio<I>` over
//! the integer bases in [`IntBase`]; the crate root fixes the default
//! `Rational = Ratio<BigInt>`. Floating point types are deliberately not
//! scalars: vertex and genericity decisions depend on exact ties.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Integer types that can back an exact rational scalar.
pub trait IntBase:
    Integer + Signed + Clone + Debug + Display + Hash + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;
    /// `None` when the value does not fit.
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

macro_rules! prim_int_base {
    ($($t:ty),*) => {$(
        impl IntBase for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_big(v: &BigInt) -> Option<Self> {
                <$t>::try_from(v).ok()
            }
            fn to_big(&self) -> BigInt {
                BigInt::from(*self)
            }
        }
    )*};
}

prim_int_base!(i64, i128);

impl IntBase for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// An exact ordered field element.
pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Num + Signed + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn from_frac(numer: i64, denom: i64) -> Self;
    fn is_integral(&self) -> bool;
    /// The value as an integer, if it is one.
    fn to_bigint(&self) -> Option<BigInt>;
    fn floor_bigint(&self) -> BigInt;
    fn ceil_bigint(&self) -> BigInt;
    fn numer_big(&self) -> BigInt;
    fn denom_big(&self) -> BigInt;
    /// Lossy conversion for display and CSV only; never used in decisions.
    fn approx_f64(&self) -> f64;
}

impl<I: IntBase> Scalar for Ratio<I> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(I::from_i64(v))
    }

    fn from_bigint(v: &BigInt) -> Self {
        Ratio::from_integer(I::from_big(v).expect("integer out of range for scalar base"))
    }

    fn from_frac(numer: i64, denom: i64) -> Self {
        Ratio::new(I::from_i64(numer), I::from_i64(denom))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().to_big())
    }

    fn floor_bigint(&self) -> BigInt {
        self.floor().numer().to_big()
    }

    fn ceil_bigint(&self) -> BigInt {
        self.ceil().numer().to_big()
    }

    fn numer_big(&self) -> BigInt {
        self.numer().to_big()
    }

    fn denom_big(&self) -> BigInt {
        self.denom().to_big()
    }

    fn approx_f64(&self) -> f64 {
        let n = self.numer().to_big().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_big().to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

/// Parses `"a"`, `"-a"` or `"a/b"`.
pub fn parse_scalar<T: Scalar>(text: &str) -> Option<T> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(T::from_bigint(&n) / T::from_bigint(&d))
}

/// Canonical text form: `"a"` for integers, `"a/b"` otherwise.
pub fn format_scalar<T: Scalar>(v: &T) -> String {
    if v.is_integral() {
        v.numer_big().to_string()
    } else {
        format!("{}/{}", v.numer_big(), v.denom_big())
    }
}

pub(crate) fn sum<'a, T: Scalar>(it: impl IntoIterator<Item = &'a T>) -> T {
    it.into_iter().fold(T::zero(), |acc, x| acc + x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        let x: Rational = parse_scalar("6/4").unwrap();
        assert_eq!(format_scalar(&x), "3/2");
        let y: Rational = parse_scalar("-7").unwrap();
        assert_eq!(format_scalar(&y), "-7");
        assert!(parse_scalar::<Rational>("1/0").is_none());
        assert!(parse_scalar::<Rational>("x").is_none());
    }

    #[test]
    fn floor_ceil() {
        let x = Rational::from_frac(-7, 2);
        assert_eq!(x.floor_bigint(), BigInt::from(-4));
        assert_eq!(x.ceil_bigint(), BigInt::from(-3));
    }

    proptest! {
        #[test]
        fn add_sub_round_trip(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = Rational::from_frac(a, b);
            let y = Rational::from_frac(c, d);
            prop_assert_eq!((x.clone() + y.clone()) - y, x);
        }

        #[test]
        fn small_base_agrees_with_big(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let small = Ratio::<i64>::from_frac(a, b) * Ratio::<i64>::from_frac(c, d);
            let big = Rational::from_frac(a, b) * Rational::from_frac(c, d);
            prop_assert_eq!(format_scalar(&small), format_scalar(&big));
        }
    }
}
