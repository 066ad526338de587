//! Exact scalars over ℚ, ℤ and prime fields.
//!
//! A computation fixes one [`ScalarKind`] up front. Arithmetic between
//! scalars of different kinds is a programming error and panics; matrix-level
//! APIs check kinds first and report [`crate::Error::ScalarMismatch`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScalarKind {
    Rational,
    Integer,
    Prime(u64),
}

impl ScalarKind {
    pub fn is_field(self) -> bool {
        !matches!(self, ScalarKind::Integer)
    }

    pub fn characteristic(self) -> u64 {
        match self {
            ScalarKind::Prime(p) => p,
            _ => 0,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            ScalarKind::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            ScalarKind::Integer => Scalar::Integer(BigInt::from(v)),
            ScalarKind::Prime(p) => Scalar::Prime {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// Reduces a rational into this kind. Fails for non-integral values over
    /// ℤ and for denominators divisible by p over 𝔽_p.
    pub fn from_rational(self, q: &BigRational) -> Option<Scalar> {
        match self {
            ScalarKind::Rational => Some(Scalar::Rational(q.clone())),
            ScalarKind::Integer => q.is_integer().then(|| Scalar::Integer(q.to_integer())),
            ScalarKind::Prime(p) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64()?;
                let den = q.denom().mod_floor(&pb).to_u64()?;
                if den == 0 {
                    return None;
                }
                Some(Scalar::Prime {
                    value: mulmod(num, inv_mod(den, p), p),
                    modulus: p,
                })
            }
        }
    }

    /// Parses `"3"`, `"-2/5"` style strings.
    pub fn parse(self, s: &str) -> Option<Scalar> {
        let s = s.trim();
        let q = if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            BigRational::new(n, d)
        } else {
            BigRational::from_integer(s.parse().ok()?)
        };
        self.from_rational(&q)
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Rational => write!(f, "q"),
            ScalarKind::Integer => write!(f, "z"),
            ScalarKind::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Integer(BigInt),
    Prime { value: u64, modulus: u64 },
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Scalar {
    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Integer(_) => ScalarKind::Integer,
            Scalar::Prime { modulus, .. } => ScalarKind::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Integer(z) => z.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Integer(z) => z.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse; `None` for zero or for non-units of ℤ.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(q) => Some(Scalar::Rational(q.recip())),
            Scalar::Integer(z) => (z.abs().is_one()).then(|| Scalar::Integer(z.clone())),
            Scalar::Prime { value, modulus } => Some(Scalar::Prime {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            }),
        }
    }

    /// Numerator/denominator pair, the exact serialized form.
    pub fn to_fraction(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Rational(q) => (q.numer().clone(), q.denom().clone()),
            Scalar::Integer(z) => (z.clone(), BigInt::one()),
            Scalar::Prime { value, .. } => (BigInt::from(*value), BigInt::one()),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        let (n, d) = self.to_fraction();
        BigRational::new(n, d)
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(
            self.kind(),
            other.kind(),
            "scalar kinds mixed in one computation"
        );
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Integer(z) => write!(f, "{z}"),
            Scalar::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a + b),
            (Scalar::Prime { value: a, modulus }, Scalar::Prime { value: b, .. }) => {
                Scalar::Prime {
                    value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a * b),
            (Scalar::Prime { value: a, modulus }, Scalar::Prime { value: b, .. }) => {
                Scalar::Prime {
                    value: mulmod(*a, *b, *modulus),
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Integer(a) => Scalar::Integer(-a),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl Scalar {
    /// `self * k` for a small integer `k`.
    pub fn scale_i64(&self, k: i64) -> Scalar {
        self * &self.kind().from_i64(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_values_are_reduced() {
        let k = ScalarKind::Prime(7);
        assert_eq!(k.from_i64(-1), Scalar::Prime { value: 6, modulus: 7 });
        let three = k.from_i64(3);
        let inv = three.inverse().unwrap();
        assert!((&three * &inv).is_one());
        assert_eq!(k.parse("1/2").unwrap(), k.from_i64(4));
        assert!(k.parse("1/7").is_none());
    }

    #[test]
    fn rational_parse_normalizes_sign_and_gcd() {
        let q = ScalarKind::Rational.parse("4/-6").unwrap();
        let (n, d) = q.to_fraction();
        assert_eq!((n, d), (BigInt::from(-2), BigInt::from(3)));
        assert!(ScalarKind::Integer.parse("1/2").is_none());
        assert!(ScalarKind::Integer.parse("6/3").is_some());
    }

    #[test]
    #[should_panic(expected = "mixed")]
    fn mixing_kinds_panics() {
        let _ = &ScalarKind::Rational.one() + &ScalarKind::Integer.one();
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(101));
        assert!(!is_prime(1) && !is_prime(91));
    }
}
