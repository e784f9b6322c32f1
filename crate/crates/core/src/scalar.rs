//! Exact scalar abstraction.
//!
//! Everything in the construction is written against [`Scalar`], a thin
//! extension of the `num-traits` numeric hierarchy with the few operations an
//! exact ordered field needs on top (denominators, integrality, lcm). Two
//! backends are provided: [`Rational`], backed by malachite, and
//! `num_rational::BigRational`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use malachite::base::num::arithmetic::traits::{Abs, Lcm};
use malachite::base::num::basic::traits::{One as _, Zero as _};
use malachite::base::num::conversion::traits::IsInteger;
use malachite::base::num::logic::traits::SignificantBits;
use malachite::{Integer, Natural};
use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, One, Signed, Zero};

/// An exact ordered field element.
///
/// Implementors must be canonical: equal values compare equal, `Display`
/// prints `p` or `p/q` in lowest terms with `q > 0`.
pub trait Scalar:
    Num + NumAssign + Signed + Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    /// `numer / denom`; panics if `denom == 0`.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Builds `numer / denom` from decimal integer strings (an optional
    /// leading `-` on `numer`). Non-reduced input is accepted. Returns `None`
    /// on bad digits or a zero denominator.
    fn parse_ratio(numer: &str, denom: &str) -> Option<Self>;

    /// The denominator in lowest terms, as an integral scalar.
    fn denominator(&self) -> Self;

    fn is_integer(&self) -> bool;

    /// Least common multiple of two integral values (sign ignored).
    fn integer_lcm(&self, other: &Self) -> Self;

    /// Combined significant bits of numerator and denominator.
    fn bits(&self) -> u64;

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a.clone() * b.clone();
    }

    /// `self -= a * b`
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a.clone() * b.clone();
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn div_ref(&self, other: &Self) -> Self {
        self.clone() / other.clone()
    }

    fn is_nonneg(&self) -> bool {
        !self.is_negative()
    }

    /// Parses the canonical text form `p` or `p/q`.
    fn parse_str(s: &str) -> Option<Self> {
        let (numer, denom) = match s.split_once('/') {
            Some((p, q)) => (p, q),
            None => (s, "1"),
        };
        let digits = numer.strip_prefix('-').unwrap_or(numer);
        let is_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !is_digits(digits) || !is_digits(denom) {
            return None;
        }
        Self::parse_ratio(numer, denom)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn parse_ratio(numer: &str, denom: &str) -> Option<Self> {
        let p = BigInt::from_str(numer).ok()?;
        let q = BigInt::from_str(denom).ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    }

    fn denominator(&self) -> Self {
        BigRational::from_integer(self.denom().clone())
    }

    fn is_integer(&self) -> bool {
        BigRational::is_integer(self)
    }

    fn integer_lcm(&self, other: &Self) -> Self {
        BigRational::from_integer(self.to_integer().lcm(&other.to_integer()))
    }

    fn bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

/// Arbitrary-precision rational in canonical form, backed by malachite.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(malachite::Rational);

impl Rational {
    pub fn inner(&self) -> &malachite::Rational {
        &self.0
    }

    pub fn numerator_string(&self) -> String {
        let mut s = self.0.numerator_ref().to_string();
        if self.0 < malachite::Rational::ZERO {
            s.insert(0, '-');
        }
        s
    }
}

impl From<malachite::Rational> for Rational {
    fn from(value: malachite::Rational) -> Self {
        Rational(value)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational(malachite::Rational::from(value))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError;

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid rational literal")
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Rational as Scalar>::parse_str(s).ok_or(ParseRationalError)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(self.0, rhs.0))
            }
        }

        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($tr::$method(&self.0, &rhs.0))
            }
        }

        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($tr::$method(self.0, &rhs.0))
            }
        }

        impl $atr for Rational {
            #[inline]
            fn $amethod(&mut self, rhs: Rational) {
                $atr::$amethod(&mut self.0, rhs.0);
            }
        }

        impl<'a> $atr<&'a Rational> for Rational {
            #[inline]
            fn $amethod(&mut self, rhs: &'a Rational) {
                $atr::$amethod(&mut self.0, &rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);
forward_binop!(Div, div, DivAssign, div_assign);

impl Rem for Rational {
    type Output = Rational;

    /// Truncated remainder `a - b * trunc(a / b)`, matching `num-rational`.
    fn rem(self, rhs: Rational) -> Rational {
        let q = &self.0 / &rhs.0;
        let t = malachite::Rational::from(Integer::rounding_from_rational(&q));
        Rational(self.0 - t * rhs.0)
    }
}

impl RemAssign for Rational {
    fn rem_assign(&mut self, rhs: Rational) {
        let lhs = std::mem::take(self);
        *self = lhs % rhs;
    }
}

trait TruncRational {
    fn rounding_from_rational(q: &malachite::Rational) -> Integer;
}

impl TruncRational for Integer {
    fn rounding_from_rational(q: &malachite::Rational) -> Integer {
        use malachite::base::num::arithmetic::traits::{Ceiling, Floor};
        if q >= &malachite::Rational::ZERO {
            q.floor()
        } else {
            q.ceiling()
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(malachite::Rational::ZERO)
    }

    fn is_zero(&self) -> bool {
        self.0 == malachite::Rational::ZERO
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(malachite::Rational::ONE)
    }
}

impl Num for Rational {
    type FromStrRadixErr = ParseRationalError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseRationalError);
        }
        s.parse()
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        Rational((&self.0).abs())
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Rational::zero()
        } else {
            self - other
        }
    }

    fn signum(&self) -> Self {
        match self.0.cmp(&malachite::Rational::ZERO) {
            Ordering::Less => -Rational::one(),
            Ordering::Equal => Rational::zero(),
            Ordering::Greater => Rational::one(),
        }
    }

    fn is_positive(&self) -> bool {
        self.0 > malachite::Rational::ZERO
    }

    fn is_negative(&self) -> bool {
        self.0 < malachite::Rational::ZERO
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from(v)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(malachite::Rational::from_signeds(numer, denom))
    }

    fn parse_ratio(numer: &str, denom: &str) -> Option<Self> {
        let p = Integer::from_str(numer).ok()?;
        let q = Integer::from_str(denom).ok()?;
        if q == Integer::ZERO {
            return None;
        }
        Some(Rational(malachite::Rational::from_integers(p, q)))
    }

    fn denominator(&self) -> Self {
        Rational(malachite::Rational::from(self.0.to_denominator()))
    }

    fn is_integer(&self) -> bool {
        (&self.0).is_integer()
    }

    fn integer_lcm(&self, other: &Self) -> Self {
        let a: &Natural = self.0.numerator_ref();
        let b: &Natural = other.0.numerator_ref();
        Rational(malachite::Rational::from(a.lcm(b)))
    }

    fn bits(&self) -> u64 {
        self.0.numerator_ref().significant_bits() + self.0.denominator_ref().significant_bits()
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        self.0 += &a.0 * &b.0;
    }

    fn sub_product(&mut self, a: &Self, b: &Self) {
        self.0 -= &a.0 * &b.0;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        Rational(&self.0 * &other.0)
    }

    fn div_ref(&self, other: &Self) -> Self {
        Rational(&self.0 / &other.0)
    }
}
