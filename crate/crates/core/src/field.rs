//! Exact scalar arithmetic over the rationals and prime fields.
//!
//! A [`Field`] is a small copyable handle; a [`FieldElement`] carries its own
//! field so mixed-field arithmetic is detected instead of silently producing
//! garbage. Rationals are kept in lowest terms with a positive denominator,
//! residues are always reduced into `[0, p)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported prime modulus.
pub const MAX_MODULUS: u64 = 1 << 61;

/// User-facing description of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

/// Validated field handle. `modulus == 0` encodes the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    modulus: u64,
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    BASES.iter().all(|&a| {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    })
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field> {
        match spec {
            FieldSpec::Rationals => Ok(Field::rationals()),
            FieldSpec::PrimeField(p) => Field::prime(p),
        }
    }

    pub fn rationals() -> Field {
        Field { modulus: 0 }
    }

    pub fn prime(p: u64) -> Result<Field> {
        if p > MAX_MODULUS || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { modulus: p })
    }

    pub fn spec(&self) -> FieldSpec {
        if self.modulus == 0 {
            FieldSpec::Rationals
        } else {
            FieldSpec::PrimeField(self.modulus)
        }
    }

    /// 0 for the rationals, `p` for `F_p`.
    pub fn characteristic(&self) -> u64 {
        self.modulus
    }

    pub fn is_rationals(&self) -> bool {
        self.modulus == 0
    }

    pub fn modulus(&self) -> Option<u64> {
        (self.modulus != 0).then_some(self.modulus)
    }

    pub fn zero(&self) -> FieldElement {
        self.int(0)
    }

    pub fn one(&self) -> FieldElement {
        self.int(1)
    }

    pub fn neg_one(&self) -> FieldElement {
        self.int(-1)
    }

    pub fn int(&self, v: i64) -> FieldElement {
        if self.modulus == 0 {
            FieldElement::Rational(BigRational::from_integer(BigInt::from(v)))
        } else {
            let m = self.modulus as i128;
            let r = (v as i128).rem_euclid(m) as u64;
            FieldElement::Residue { value: r, modulus: self.modulus }
        }
    }

    pub fn big_int(&self, v: &BigInt) -> FieldElement {
        if self.modulus == 0 {
            FieldElement::Rational(BigRational::from_integer(v.clone()))
        } else {
            let m = BigInt::from(self.modulus);
            let r = v.mod_floor(&m).to_u64().expect("reduced residue fits in u64");
            FieldElement::Residue { value: r, modulus: self.modulus }
        }
    }

    /// `num / den`, rejected when the denominator vanishes in the field.
    pub fn ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldElement> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.modulus == 0 {
            return Ok(FieldElement::Rational(BigRational::new(num.clone(), den.clone())));
        }
        let d = self.big_int(den);
        if d.is_zero() {
            return Err(Error::RationalOverPrimeField(format!("{num}/{den}"), self.modulus));
        }
        self.big_int(num).checked_div(&d)
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement> {
        self.ratio(q.numer(), q.denom())
    }

    /// The element 1/2; unavailable in characteristic two.
    pub fn half(&self) -> Result<FieldElement> {
        if self.modulus == 2 {
            return Err(Error::CharacteristicTwo);
        }
        self.ratio(&BigInt::from(1), &BigInt::from(2))
    }

    /// Parses `12`, `-3`, `+7` or `a/b` (optionally signed).
    pub fn parse_literal(&self, text: &str) -> Result<FieldElement> {
        let bad = || Error::FieldLiteralInvalid(text.to_string());
        let t = text.trim();
        if t.is_empty() {
            return Err(bad());
        }
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a, Some(b)),
            None => (t, None),
        };
        let parse_int = |s: &str, allow_sign: bool| -> Result<BigInt> {
            let digits = if allow_sign {
                s.strip_prefix('+').or_else(|| s.strip_prefix('-')).unwrap_or(s)
            } else {
                s
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let v: BigInt = digits.parse().map_err(|_| bad())?;
            Ok(if s.starts_with('-') { -v } else { v })
        };
        let n = parse_int(num, true)?;
        match den {
            None => Ok(self.big_int(&n)),
            Some(d) => {
                let d = parse_int(d, false)?;
                if d.is_zero() {
                    return Err(bad());
                }
                match self.ratio(&n, &d) {
                    Err(Error::RationalOverPrimeField(..)) => {
                        Err(Error::RationalOverPrimeField(text.to_string(), self.modulus))
                    }
                    other => other,
                }
            }
        }
    }

    /// Uniform sample: the whole field over `F_p`, `{0, .., bound-1}` over Q.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, bound: u64) -> FieldElement {
        if self.modulus == 0 {
            self.int(rng.gen_range(0..bound.max(1)) as i64)
        } else {
            FieldElement::Residue { value: rng.gen_range(0..self.modulus), modulus: self.modulus }
        }
    }

    /// Number of elements that [`Field::sample`] draws from.
    pub fn sample_set_size(&self, bound: u64) -> u64 {
        if self.modulus == 0 {
            bound.max(1)
        } else {
            self.modulus
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modulus {
            0 => write!(f, "Q"),
            p => write!(f, "Fp {p}"),
        }
    }
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if a.is_multiple_of(m) {
        return None;
    }
    // m is prime
    Some(pow_mod(a, m - 2, m))
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::rationals(),
            FieldElement::Residue { modulus, .. } => Field { modulus: *modulus },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_one(),
            FieldElement::Residue { value, .. } => *value == 1,
        }
    }

    /// True for the constants a constant-free circuit may use.
    pub fn is_unit_or_zero(&self) -> bool {
        if self.is_zero() || self.is_one() {
            return true;
        }
        (-self).is_one()
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg_ref()))
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        match self {
            FieldElement::Rational(q) => {
                if q.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(FieldElement::Rational(q.recip()))
                }
            }
            FieldElement::Residue { value, modulus } => inv_mod(*value, *modulus)
                .map(|v| FieldElement::Residue { value: v, modulus: *modulus })
                .ok_or(Error::DivisionByZero),
        }
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        match self {
            FieldElement::Rational(q) => {
                let mut acc = BigRational::one();
                let mut base = q.clone();
                let mut e = exp;
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= &base;
                    }
                    e >>= 1;
                    if e > 0 {
                        base = &base * &base;
                    }
                }
                FieldElement::Rational(acc)
            }
            FieldElement::Residue { value, modulus } => {
                FieldElement::Residue { value: pow_mod(*value, exp, *modulus), modulus: *modulus }
            }
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_integer(),
            FieldElement::Residue { .. } => true,
        }
    }

    /// The integer value of a rational with denominator 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            FieldElement::Rational(q) if q.is_integer() => Some(q.to_integer()),
            FieldElement::Rational(_) => None,
            FieldElement::Residue { value, .. } => Some(BigInt::from(*value)),
        }
    }

    /// The residue of a prime-field element.
    pub fn residue(&self) -> Option<u64> {
        match self {
            FieldElement::Residue { value, .. } => Some(*value),
            FieldElement::Rational(_) => None,
        }
    }

    fn add_unchecked(&self, other: &FieldElement) -> FieldElement {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            (FieldElement::Residue { value: a, modulus }, FieldElement::Residue { value: b, .. }) => {
                FieldElement::Residue { value: add_mod(*a, *b, *modulus), modulus: *modulus }
            }
            _ => panic!("field mismatch in addition"),
        }
    }

    fn mul_unchecked(&self, other: &FieldElement) -> FieldElement {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            (FieldElement::Residue { value: a, modulus }, FieldElement::Residue { value: b, .. }) => {
                FieldElement::Residue { value: mul_mod(*a, *b, *modulus), modulus: *modulus }
            }
            _ => panic!("field mismatch in multiplication"),
        }
    }

    fn neg_ref(&self) -> FieldElement {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(-a),
            FieldElement::Residue { value, modulus } => FieldElement::Residue {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    /// Absolute value of an integral rational; used by weight computations.
    pub fn abs_integer(&self) -> Option<BigInt> {
        self.to_integer().map(|v| v.abs())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

// Operator sugar for internal code paths where both operands are known to
// share a field. Mixed fields panic; use the `checked_*` methods otherwise.
macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                let f: fn(&FieldElement, &FieldElement) -> FieldElement = $body;
                f(self, rhs)
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_unchecked(b));
binop!(Sub, sub, |a, b| a.add_unchecked(&b.neg_ref()));
binop!(Mul, mul, |a, b| a.mul_unchecked(b));

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_field_reduces_literals() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.characteristic(), 7);
        assert_eq!(f.int(10), f.int(3));
        assert_eq!(f.int(10).residue(), Some(3));
    }

    #[test]
    fn rationals_are_canonical() {
        let q = Field::rationals();
        assert_eq!(q.characteristic(), 0);
        let e = q.parse_literal("3/6").unwrap();
        assert_eq!(e.to_string(), "1/2");
        assert!(q.parse_literal("-4/-2").is_err());
        assert_eq!(q.parse_literal("4/2").unwrap(), q.int(2));
    }

    #[test]
    fn composite_modulus_is_rejected() {
        assert_eq!(Field::prime(6), Err(Error::NotPrime(6)));
        assert_eq!(Field::new(FieldSpec::PrimeField(1)), Err(Error::NotPrime(1)));
        assert!(Field::prime(2_305_843_009_213_693_951).is_ok()); // 2^61 - 1
    }

    #[test]
    fn small_examples() {
        let f = Field::prime(7).unwrap();
        assert_eq!(&f.int(3) + &f.int(5), f.int(1));
        assert_eq!(f.int(2).inv().unwrap(), f.int(4));
        let q = Field::rationals();
        let sum = q.parse_literal("1/2").unwrap() + q.parse_literal("1/3").unwrap();
        assert_eq!(sum, q.parse_literal("5/6").unwrap());
    }

    #[test]
    fn errors_surface() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(f.int(1).checked_add(&Field::rationals().one()), Err(Error::FieldMismatch));
        assert!(matches!(f.parse_literal("1/14"), Err(Error::RationalOverPrimeField(..))));
        assert!(matches!(f.parse_literal("x"), Err(Error::FieldLiteralInvalid(_))));
        assert_eq!(Field::prime(2).unwrap().half(), Err(Error::CharacteristicTwo));
        assert_eq!(f.half().unwrap(), f.int(4));
    }

    #[test]
    fn characteristic_consistency() {
        for p in [2u64, 3, 7, 101] {
            let f = Field::prime(p).unwrap();
            let mut acc = f.zero();
            for _ in 0..p {
                acc = acc + f.one();
            }
            assert!(acc.is_zero());
        }
    }

    fn random_elem(f: Field, rng: &mut ChaCha8Rng) -> FieldElement {
        if f.is_rationals() {
            let n = BigInt::from(rng.gen_range(-50i64..50));
            let d = BigInt::from(rng.gen_range(1i64..20));
            f.ratio(&n, &d).unwrap()
        } else {
            f.sample(rng, 0)
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [Field::rationals(), Field::prime(7).unwrap(), Field::prime(1_000_003).unwrap()] {
            for _ in 0..1000 {
                let (a, b, c) = (random_elem(f, &mut rng), random_elem(f, &mut rng), random_elem(f, &mut rng));
                assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a + &b, &b + &a);
                assert_eq!(&a * &b, &b * &a);
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert!((&a - &a).is_zero());
                if !a.is_zero() {
                    assert!((&a * &a.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn normalization_is_idempotent() {
        let q = Field::rationals();
        let e = q.ratio(&BigInt::from(-14), &BigInt::from(-21)).unwrap();
        let again = q.parse_literal(&e.to_string()).unwrap();
        assert_eq!(e, again);
        assert_eq!(e.to_string(), "2/3");
    }
}
