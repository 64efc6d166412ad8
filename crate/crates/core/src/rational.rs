use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

/// An arbitrary-precision rational, kept in lowest terms with a positive
/// denominator.
///
/// Serializes as `{"num": "...", "den": "...", "double": f64}`: the string
/// fields are lossless, the double is a convenience rounding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("rational with zero denominator"));
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }

    pub fn from_int(v: i64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        ExactRational(BigRational::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_biguint_ratio(num: BigUint, den: BigUint) -> Result<Self> {
        Self::new(
            BigInt::from_biguint(Sign::Plus, num),
            BigInt::from_biguint(Sign::Plus, den),
        )
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(1))
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub(crate) fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// Decimal rendering with `digits` places after the point, rounded to
    /// nearest with ties away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let num = self.0.numer();
        let den = self.0.denom();
        let neg = num.is_negative();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = num.abs() * &scale;
        let (q, r) = num_integer::Integer::div_rem(&scaled, den);
        let q = if &(r * 2u32) >= den { q + 1u32 } else { q };
        let (int_part, frac_part) = num_integer::Integer::div_rem(&q, &scale);
        let sign = if neg && !q.is_zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{:0>width$}", frac_part, width = digits)
        }
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExactRational", 3)?;
        s.serialize_field("num", &self.0.numer().to_string())?;
        s.serialize_field("den", &self.0.denom().to_string())?;
        s.serialize_field("double", &self.to_f64())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: String,
            den: String,
            #[serde(default)]
            #[allow(dead_code)]
            double: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let num: BigInt = raw.num.parse().map_err(de::Error::custom)?;
        let den: BigInt = raw.den.parse().map_err(de::Error::custom)?;
        ExactRational::new(num, den).map_err(de::Error::custom)
    }
}
