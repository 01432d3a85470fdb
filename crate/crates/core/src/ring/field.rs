//! Coefficient fields: the rationals and prime fields of odd characteristic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic in a coefficient field. Elements are plain values; the field
/// value carries whatever context the arithmetic needs (the modulus).
pub trait Field: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// Numerator and denominator of the canonical representative.
    fn to_fraction(&self, a: &Self::Elem) -> (BigInt, BigInt);
    fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem>;
    fn kind(&self) -> CoefficientField;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `a <- a + c * b`
    fn add_mul_assign(&self, a: &mut Self::Elem, c: &Self::Elem, b: &Self::Elem) {
        let t = self.mul(c, b);
        *a = self.add(a, &t);
    }
}

/// The field of rational numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn to_fraction(&self, a: &BigRational) -> (BigInt, BigInt) {
        (a.numer().clone(), a.denom().clone())
    }
    fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<BigRational> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }
    fn kind(&self) -> CoefficientField {
        CoefficientField::Rational
    }
    fn add_mul_assign(&self, a: &mut BigRational, c: &BigRational, b: &BigRational) {
        *a += c * b;
    }
}

/// The prime field `F_p` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        // range first: trial division on a huge modulus would take forever
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!(
                "{p} exceeds the supported modulus range"
            )));
        }
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not an odd prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut base = *a;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        Some(acc)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn to_fraction(&self, a: &u64) -> (BigInt, BigInt) {
        (BigInt::from(*a), BigInt::one())
    }
    fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<u64> {
        let p = BigInt::from(self.p);
        let n = num.mod_floor(&p).to_u64().unwrap_or(0);
        let d = den.mod_floor(&p).to_u64().unwrap_or(0);
        let dinv = self
            .inv(&d)
            .ok_or_else(|| Error::Parse(format!("denominator {den} vanishes mod {}", self.p)))?;
        Ok(self.mul(&n, &dinv))
    }
    fn kind(&self) -> CoefficientField {
        CoefficientField::Prime(self.p)
    }
}

/// A runtime description of the coefficient field, as used on the command
/// line and in serialized output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientField {
    Rational,
    Prime(u64),
}

impl CoefficientField {
    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientField::Rational => 0,
            CoefficientField::Prime(p) => *p,
        }
    }

    /// Whether an integer vanishes in this field.
    pub fn int_is_zero(&self, v: i64) -> bool {
        match self {
            CoefficientField::Rational => v == 0,
            CoefficientField::Prime(p) => v.rem_euclid(*p as i64) == 0,
        }
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rational => write!(f, "Q"),
            CoefficientField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for CoefficientField {
    type Err = Error;

    /// Accepts `Q`, `F<p>` and `Fp:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" || s == "QQ" {
            return Ok(CoefficientField::Rational);
        }
        let digits = s
            .strip_prefix("Fp:")
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::InvalidField(format!("unrecognised field {s:?}")))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidField(format!("unrecognised field {s:?}")));
        }
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::InvalidField(format!("modulus out of range in {s:?}")))?;
        PrimeField::new(p)?;
        Ok(CoefficientField::Prime(p))
    }
}

/// Runs a generic body with the concrete field selected at runtime.
#[macro_export]
macro_rules! with_field {
    ($kind:expr, |$f:ident| $body:expr) => {
        match $kind {
            $crate::ring::CoefficientField::Rational => {
                let $f = $crate::ring::Rationals;
                $body
            }
            $crate::ring::CoefficientField::Prime(p) => {
                let $f = $crate::ring::PrimeField::new(p)
                    .expect("CoefficientField::Prime holds a validated odd prime");
                $body
            }
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_two_and_composites() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(7).is_ok());
        // the largest u64 prime, rejected without trial division
        assert!(PrimeField::new(18_446_744_073_709_551_557).is_err());
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(5).unwrap();
        for a in 1..5 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-7), 3);
    }

    #[test]
    fn parse_field_labels() {
        assert_eq!(
            "Q".parse::<CoefficientField>().unwrap(),
            CoefficientField::Rational
        );
        assert_eq!(
            "F3".parse::<CoefficientField>().unwrap(),
            CoefficientField::Prime(3)
        );
        assert_eq!(
            "Fp:11".parse::<CoefficientField>().unwrap(),
            CoefficientField::Prime(11)
        );
        assert!("F2".parse::<CoefficientField>().is_err());
        assert!("F".parse::<CoefficientField>().is_err());
        assert!("Fp:x".parse::<CoefficientField>().is_err());
        assert!("R".parse::<CoefficientField>().is_err());
    }

    #[test]
    fn rational_fraction_roundtrip() {
        let q = Rationals;
        let x = q
            .from_fraction(&BigInt::from(-6), &BigInt::from(4))
            .unwrap();
        let (n, d) = q.to_fraction(&x);
        assert_eq!((n, d), (BigInt::from(-3), BigInt::from(2)));
    }
}
