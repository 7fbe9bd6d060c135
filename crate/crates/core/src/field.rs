//! Exact scalar fields: prime fields `F_p` and the rationals `Q`.
//!
//! A [`Field`] is a small copyable descriptor; a [`FieldValue`] is a tagged
//! exact scalar that remembers which field it lives in. Mixing values from
//! different fields is an error for the `checked_*` methods and a panic for
//! the operator impls, which are meant for code that already established
//! field consistency (e.g. inside a single polynomial).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest admissible modulus: residues stay below 2^32 so products fit in `u64`.
pub const MAX_PRIME: u64 = u32::MAX as u64;

/// Largest prime whose elements [`Field::elements`] will list.
pub const MAX_ENUMERABLE_PRIME: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported maximum {MAX_PRIME}")]
    ModulusTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({left} and {right})")]
    MixedFields { left: Field, right: Field },
    #[error("field {0} cannot be enumerated")]
    NotEnumerable(Field),
    #[error("cannot parse {input:?} as an element of {field}")]
    ParseValue { input: String, field: Field },
    #[error("cannot parse {0:?} as a field (expected `Q` or `F<p>`)")]
    ParseField(String),
}

/// Trial division; moduli are desk-scale.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Descriptor of the field all values in one computation live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Prime(u64),
    Rational,
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p > MAX_PRIME {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn rational() -> Self {
        Field::Rational
    }

    /// Number of elements, `None` for `Q`.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(*p),
            Field::Rational => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn zero(&self) -> FieldValue {
        self.from_u64(0)
    }

    pub fn one(&self) -> FieldValue {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> FieldValue {
        match *self {
            Field::Prime(p) => FieldValue::Residue {
                value: v % p,
                modulus: p,
            },
            Field::Rational => FieldValue::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u128(&self, v: u128) -> FieldValue {
        match *self {
            Field::Prime(p) => FieldValue::Residue {
                value: (v % p as u128) as u64,
                modulus: p,
            },
            Field::Rational => FieldValue::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_i64(&self, v: i64) -> FieldValue {
        match *self {
            Field::Prime(p) => FieldValue::Residue {
                value: (v as i128).rem_euclid(p as i128) as u64,
                modulus: p,
            },
            Field::Rational => FieldValue::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldValue {
        match *self {
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                FieldValue::Residue {
                    value: r.to_u64().expect("residue below modulus"),
                    modulus: p,
                }
            }
            Field::Rational => FieldValue::Rational(BigRational::from_integer(v.clone())),
        }
    }

    pub fn from_biguint(&self, v: &BigUint) -> FieldValue {
        match *self {
            Field::Prime(p) => FieldValue::Residue {
                value: (v % p).to_u64().expect("residue below modulus"),
                modulus: p,
            },
            Field::Rational => FieldValue::Rational(BigRational::from_integer(BigInt::from(v.clone()))),
        }
    }

    /// `num / den` mapped into the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldValue, FieldError> {
        self.from_bigint(num).checked_div(&self.from_bigint(den))
    }

    /// Parses `"7"`, `"-3"` or `"5/4"`.
    pub fn parse_value(&self, s: &str) -> Result<FieldValue, FieldError> {
        let err = || FieldError::ParseValue {
            input: s.to_string(),
            field: *self,
        };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                self.from_ratio(&n, &d).map_err(|_| err())
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| err())?;
                Ok(self.from_bigint(&n))
            }
        }
    }

    /// All elements `0, 1, …, p−1` of a prime field, in order.
    pub fn elements(&self) -> Result<Vec<FieldValue>, FieldError> {
        match *self {
            Field::Prime(p) if p <= MAX_ENUMERABLE_PRIME => {
                Ok((0..p).map(|value| FieldValue::Residue { value, modulus: p }).collect())
            }
            _ => Err(FieldError::NotEnumerable(*self)),
        }
    }

    pub fn contains(&self, v: &FieldValue) -> bool {
        v.field() == *self
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F{p}"),
            Field::Rational => write!(f, "Q"),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Q" || t == "q" {
            return Ok(Field::Rational);
        }
        let digits = t
            .strip_prefix('F')
            .or_else(|| t.strip_prefix("GF"))
            .ok_or_else(|| FieldError::ParseField(s.to_string()))?;
        let p: u64 = digits.parse().map_err(|_| FieldError::ParseField(s.to_string()))?;
        Field::prime(p)
    }
}

/// Lists `F_p` for a prime `p`; composite or oversized moduli are rejected.
pub fn enumerate_prime_field(p: u64) -> Result<Vec<FieldValue>, FieldError> {
    Field::prime(p)?.elements()
}

/// An exact scalar: a residue modulo a prime, or a rational in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldValue {
    Residue { value: u64, modulus: u64 },
    Rational(BigRational),
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i128) as u64
}

impl FieldValue {
    pub fn field(&self) -> Field {
        match self {
            FieldValue::Residue { modulus, .. } => Field::Prime(*modulus),
            FieldValue::Rational(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldValue::Residue { value, .. } => *value == 0,
            FieldValue::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldValue::Residue { value, .. } => *value == 1,
            FieldValue::Rational(r) => r.is_one(),
        }
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(FieldError::MixedFields {
                left: self.field(),
                right: other.field(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.add_unchecked(&other.neg_ref()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            FieldValue::Residue { value, modulus } => FieldValue::Residue {
                value: mod_inverse(*value, *modulus),
                modulus: *modulus,
            },
            FieldValue::Rational(r) => FieldValue::Rational(r.recip()),
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        match self {
            FieldValue::Residue { value, .. } => *value as f64,
            FieldValue::Rational(r) => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
        }
    }

    fn neg_ref(&self) -> Self {
        match self {
            FieldValue::Residue { value, modulus } => FieldValue::Residue {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            FieldValue::Rational(r) => FieldValue::Rational(-r),
        }
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        match (self, other) {
            (FieldValue::Residue { value: a, modulus }, FieldValue::Residue { value: b, .. }) => FieldValue::Residue {
                value: (a + b) % modulus,
                modulus: *modulus,
            },
            (FieldValue::Rational(a), FieldValue::Rational(b)) => FieldValue::Rational(a + b),
            _ => panic!("{}", mixed(self, other)),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        match (self, other) {
            (FieldValue::Residue { value: a, modulus }, FieldValue::Residue { value: b, .. }) => FieldValue::Residue {
                value: (a * b) % modulus,
                modulus: *modulus,
            },
            (FieldValue::Rational(a), FieldValue::Rational(b)) => FieldValue::Rational(a * b),
            _ => panic!("{}", mixed(self, other)),
        }
    }
}

fn mixed(a: &FieldValue, b: &FieldValue) -> FieldError {
    FieldError::MixedFields {
        left: a.field(),
        right: b.field(),
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Residue { value, .. } => write!(f, "{value}"),
            FieldValue::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            FieldValue::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FieldValue {
    /// True when the value prints with a leading minus sign.
    pub fn is_negative(&self) -> bool {
        matches!(self, FieldValue::Rational(r) if r.is_negative())
    }
}

// Operator impls panic on mixed fields; use `checked_*` at API boundaries.

impl Add<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    fn add(self, rhs: &FieldValue) -> FieldValue {
        self.add_unchecked(rhs)
    }
}

impl Sub<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    fn sub(self, rhs: &FieldValue) -> FieldValue {
        self.add_unchecked(&rhs.neg_ref())
    }
}

impl Mul<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    fn mul(self, rhs: &FieldValue) -> FieldValue {
        self.mul_unchecked(rhs)
    }
}

impl Div<&FieldValue> for &FieldValue {
    type Output = FieldValue;
    /// Panics on division by zero.
    fn div(self, rhs: &FieldValue) -> FieldValue {
        self.checked_div(rhs).expect("field division")
    }
}

impl Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        self.neg_ref()
    }
}

impl Neg for FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        self.neg_ref()
    }
}

impl AddAssign<&FieldValue> for FieldValue {
    fn add_assign(&mut self, rhs: &FieldValue) {
        match (self, rhs) {
            (FieldValue::Residue { value, modulus }, FieldValue::Residue { value: b, .. }) => {
                *value = (*value + b) % *modulus;
            }
            (FieldValue::Rational(a), FieldValue::Rational(b)) => *a += b,
            (a, b) => panic!("{}", mixed(a, b)),
        }
    }
}

impl SubAssign<&FieldValue> for FieldValue {
    fn sub_assign(&mut self, rhs: &FieldValue) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&FieldValue> for FieldValue {
    fn mul_assign(&mut self, rhs: &FieldValue) {
        match (self, rhs) {
            (FieldValue::Residue { value, modulus }, FieldValue::Residue { value: b, .. }) => {
                *value = (*value * b) % *modulus;
            }
            (FieldValue::Rational(a), FieldValue::Rational(b)) => *a *= b,
            (a, b) => panic!("{}", mixed(a, b)),
        }
    }
}
