use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::RingError;

/// Largest modulus accepted for prime fields; products of residues must fit in `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

/// The coefficient ring of a permutation module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingSpec {
    Rationals,
    PrimeField(u64),
    Integers,
}

impl RingSpec {
    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(RingSpec::PrimeField(p))
    }

    pub fn is_field(self) -> bool {
        !matches!(self, RingSpec::Integers)
    }

    /// Characteristic of the ring (0 for the rationals and the integers).
    pub fn characteristic(self) -> u64 {
        match self {
            RingSpec::PrimeField(p) => p,
            _ => 0,
        }
    }
}

fn is_prime(p: u64) -> bool {
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

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::PrimeField(p) => write!(f, "GF({p})"),
            RingSpec::Integers => write!(f, "Z"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "Q" | "q" => return Ok(RingSpec::Rationals),
            "Z" | "z" => return Ok(RingSpec::Integers),
            _ => {}
        }
        let inner = s
            .strip_prefix("GF(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| RingError::UnknownRing(s.to_string()))?;
        let p: u64 = inner
            .trim()
            .parse()
            .map_err(|_| RingError::UnknownRing(s.to_string()))?;
        RingSpec::prime_field(p)
    }
}

/// An exact ring element. Values are always canonical, so derived equality is
/// mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
    Integer(BigInt),
}

impl Scalar {
    pub fn zero(ring: RingSpec) -> Self {
        Scalar::from_i64(ring, 0)
    }

    pub fn one(ring: RingSpec) -> Self {
        Scalar::from_i64(ring, 1)
    }

    pub fn from_i64(ring: RingSpec, v: i64) -> Self {
        match ring {
            RingSpec::Rationals => Scalar::Rational(BigRational::from_integer(v.into())),
            RingSpec::PrimeField(p) => Scalar::Residue {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
            RingSpec::Integers => Scalar::Integer(v.into()),
        }
    }

    pub fn from_bigint(ring: RingSpec, v: &BigInt) -> Self {
        match ring {
            RingSpec::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            RingSpec::PrimeField(p) => Scalar::Residue {
                value: reduce_bigint(v, p),
                modulus: p,
            },
            RingSpec::Integers => Scalar::Integer(v.clone()),
        }
    }

    /// Maps a rational into `ring`, failing when the value has no image there
    /// (a fraction into the integers, or a denominator divisible by `p`).
    pub fn from_rational(ring: RingSpec, q: &BigRational) -> Result<Self, RingError> {
        match ring {
            RingSpec::Rationals => Ok(Scalar::Rational(q.clone())),
            RingSpec::Integers => {
                if q.is_integer() {
                    Ok(Scalar::Integer(q.to_integer()))
                } else {
                    Err(RingError::NotRepresentable {
                        value: format_rational(q),
                        ring,
                    })
                }
            }
            RingSpec::PrimeField(p) => {
                let num = reduce_bigint(q.numer(), p);
                let den = reduce_bigint(q.denom(), p);
                if den == 0 {
                    return Err(RingError::NotRepresentable {
                        value: format_rational(q),
                        ring,
                    });
                }
                Ok(Scalar::Residue {
                    value: mul_mod(num, inv_mod(den, p), p),
                    modulus: p,
                })
            }
        }
    }

    /// Parses the canonical string forms: `"p/q"` or `"k"` for rationals and
    /// integers, `"k mod p"` (or any rational) for prime fields.
    pub fn parse(ring: RingSpec, s: &str) -> Result<Self, RingError> {
        let s = s.trim();
        if let RingSpec::PrimeField(p) = ring {
            if let Some((value, modulus)) = s.split_once(" mod ") {
                let m: u64 = modulus
                    .trim()
                    .parse()
                    .map_err(|_| RingError::Parse(s.to_string()))?;
                if m != p {
                    return Err(RingError::Mismatch {
                        left: RingSpec::PrimeField(m),
                        right: ring,
                    });
                }
                let v = parse_rational(value)?;
                return Scalar::from_rational(ring, &v);
            }
        }
        let q = parse_rational(s)?;
        Scalar::from_rational(ring, &q)
    }

    pub fn ring(&self) -> RingSpec {
        match self {
            Scalar::Rational(_) => RingSpec::Rationals,
            Scalar::Residue { modulus, .. } => RingSpec::PrimeField(*modulus),
            Scalar::Integer(_) => RingSpec::Integers,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
            Scalar::Integer(z) => z.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
            Scalar::Integer(z) => z.is_one(),
        }
    }

    /// Multiplicative inverse, if it exists in the ring.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(q) => Some(Scalar::Rational(q.recip())),
            Scalar::Residue { value, modulus } => Some(Scalar::Residue {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            }),
            Scalar::Integer(z) => {
                if z.abs().is_one() {
                    Some(Scalar::Integer(z.clone()))
                } else {
                    None
                }
            }
        }
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            Scalar::Integer(z) => Some(z),
            _ => None,
        }
    }

    /// The value as a rational number: exact for rationals and integers, the
    /// least non-negative representative for residues.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Rational(q) => q.clone(),
            Scalar::Residue { value, .. } => BigRational::from_integer((*value).into()),
            Scalar::Integer(z) => BigRational::from_integer(z.clone()),
        }
    }

    fn check_ring(&self, other: &Scalar) {
        debug_assert_eq!(self.ring(), other.ring(), "arithmetic across rings");
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => f.write_str(&format_rational(q)),
            Scalar::Residue { value, modulus } => write!(f, "{value} mod {modulus}"),
            Scalar::Integer(z) => write!(f, "{z}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.check_ring(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a + b) % modulus,
                    modulus: *modulus,
                }
            }
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a + b),
            _ => panic!("arithmetic across rings"),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.check_ring(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a + modulus - b) % modulus,
                    modulus: *modulus,
                }
            }
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a - b),
            _ => panic!("arithmetic across rings"),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.check_ring(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: mul_mod(*a, *b, *modulus),
                    modulus: *modulus,
                }
            }
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a * b),
            _ => panic!("arithmetic across rings"),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            Scalar::Integer(a) => Scalar::Integer(-a),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    result
}

pub(crate) fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64")
}

/// Parses `"k"` or `"p/q"` into a rational in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational, RingError> {
    let s = s.trim();
    let bad = || RingError::Parse(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(RingError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Lowest-terms string: `"k"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}
