//! Concrete meadows: commutative rings with a total multiplicative inverse
//! where `0⁻¹ = 0`.
//!
//! Three carriers are provided: the zero-totalized rationals `Q0`, the prime
//! fields `F_p` (with the inverse of zero set to zero), and the one-element
//! trivial meadow. All arithmetic is exact and every value is kept in a
//! canonical form, so equality of values is structural equality.

mod axioms;
mod term;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use axioms::{check_meadow_axioms, meadow_equations, CheckMode, MeadowEquation};
pub use term::{QuantityEnv, QuantityTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeadowError {
    #[error("value `{value}` does not belong to meadow {meadow}")]
    MixedMeadow { value: String, meadow: String },
    #[error("meadow {0} has an infinite carrier")]
    InfiniteCarrier(String),
    #[error("unbound quantity variable `{0}`")]
    UnboundVariable(String),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("unknown meadow `{0}` (expected q0, f<prime> or trivial)")]
    UnknownMeadow(String),
}

/// A prime modulus, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(p: u64) -> Result<Self, MeadowError> {
        if is_prime(p) {
            Ok(Modulus(p))
        } else {
            Err(MeadowError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Which concrete meadow interprets the quantity sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeadowKind {
    /// The rational numbers with `0⁻¹ = 0`.
    Rationals,
    /// Integers modulo a prime, with `0⁻¹ = 0`.
    PrimeField(Modulus),
    /// The one-element meadow, where `0 = 1`.
    Trivial,
}

impl MeadowKind {
    pub fn prime_field(p: u64) -> Result<Self, MeadowError> {
        Modulus::new(p).map(MeadowKind::PrimeField)
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, MeadowKind::Rationals)
    }

    pub fn zero(&self) -> MeadowValue {
        match self {
            MeadowKind::Rationals => MeadowValue::Rational(BigRational::zero()),
            MeadowKind::PrimeField(p) => MeadowValue::Residue { value: 0, modulus: p.0 },
            MeadowKind::Trivial => MeadowValue::Unit,
        }
    }

    pub fn one(&self) -> MeadowValue {
        match self {
            MeadowKind::Rationals => MeadowValue::Rational(BigRational::one()),
            MeadowKind::PrimeField(p) => MeadowValue::Residue { value: 1 % p.0, modulus: p.0 },
            MeadowKind::Trivial => MeadowValue::Unit,
        }
    }

    /// Interprets an integer as `±(1 + 1 + ... + 1)`.
    pub fn integer(&self, n: &BigInt) -> MeadowValue {
        match self {
            MeadowKind::Rationals => MeadowValue::Rational(BigRational::from_integer(n.clone())),
            MeadowKind::PrimeField(p) => {
                let m = BigInt::from(p.0);
                let r = ((n % &m) + &m) % &m;
                MeadowValue::Residue {
                    value: r.to_u64().expect("residue below a u64 modulus"),
                    modulus: p.0,
                }
            }
            MeadowKind::Trivial => MeadowValue::Unit,
        }
    }

    pub fn numeral(&self, n: &BigUint) -> MeadowValue {
        self.integer(&BigInt::from(n.clone()))
    }

    pub fn contains(&self, v: &MeadowValue) -> bool {
        match (self, v) {
            (MeadowKind::Rationals, MeadowValue::Rational(_)) => true,
            (MeadowKind::PrimeField(p), MeadowValue::Residue { value, modulus }) => {
                *modulus == p.0 && *value < p.0
            }
            (MeadowKind::Trivial, MeadowValue::Unit) => true,
            _ => false,
        }
    }

    fn check(&self, v: &MeadowValue) -> Result<(), MeadowError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(MeadowError::MixedMeadow {
                value: v.to_string(),
                meadow: self.to_string(),
            })
        }
    }

    pub fn add(&self, a: &MeadowValue, b: &MeadowValue) -> Result<MeadowValue, MeadowError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (MeadowValue::Rational(x), MeadowValue::Rational(y)) => MeadowValue::Rational(x + y),
            (
                MeadowValue::Residue { value: x, modulus },
                MeadowValue::Residue { value: y, .. },
            ) => MeadowValue::Residue {
                value: ((*x as u128 + *y as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => MeadowValue::Unit,
        })
    }

    pub fn mul(&self, a: &MeadowValue, b: &MeadowValue) -> Result<MeadowValue, MeadowError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (MeadowValue::Rational(x), MeadowValue::Rational(y)) => MeadowValue::Rational(x * y),
            (
                MeadowValue::Residue { value: x, modulus },
                MeadowValue::Residue { value: y, .. },
            ) => MeadowValue::Residue {
                value: mul_mod(*x, *y, *modulus),
                modulus: *modulus,
            },
            _ => MeadowValue::Unit,
        })
    }

    pub fn neg(&self, a: &MeadowValue) -> Result<MeadowValue, MeadowError> {
        self.check(a)?;
        Ok(match a {
            MeadowValue::Rational(x) => MeadowValue::Rational(-x),
            MeadowValue::Residue { value, modulus } => MeadowValue::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            MeadowValue::Unit => MeadowValue::Unit,
        })
    }

    /// Total inverse: zero maps to zero.
    pub fn inv(&self, a: &MeadowValue) -> Result<MeadowValue, MeadowError> {
        self.check(a)?;
        Ok(match a {
            MeadowValue::Rational(x) if x.is_zero() => a.clone(),
            MeadowValue::Rational(x) => MeadowValue::Rational(x.recip()),
            MeadowValue::Residue { value: 0, .. } => a.clone(),
            // Fermat: v^(p-2) is the inverse of a nonzero residue.
            MeadowValue::Residue { value, modulus } => MeadowValue::Residue {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            MeadowValue::Unit => MeadowValue::Unit,
        })
    }

    pub fn sub(&self, a: &MeadowValue, b: &MeadowValue) -> Result<MeadowValue, MeadowError> {
        self.add(a, &self.neg(b)?)
    }

    pub fn div(&self, a: &MeadowValue, b: &MeadowValue) -> Result<MeadowValue, MeadowError> {
        self.mul(a, &self.inv(b)?)
    }

    /// Every carrier element exactly once, in ascending order.
    pub fn elements(&self) -> Result<Vec<MeadowValue>, MeadowError> {
        match self {
            MeadowKind::Rationals => Err(MeadowError::InfiniteCarrier(self.to_string())),
            MeadowKind::PrimeField(p) => Ok((0..p.0)
                .map(|value| MeadowValue::Residue { value, modulus: p.0 })
                .collect()),
            MeadowKind::Trivial => Ok(vec![MeadowValue::Unit]),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
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

impl fmt::Display for MeadowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeadowKind::Rationals => write!(f, "Q0"),
            MeadowKind::PrimeField(p) => write!(f, "F{}", p.0),
            MeadowKind::Trivial => write!(f, "trivial"),
        }
    }
}

impl FromStr for MeadowKind {
    type Err = MeadowError;

    /// Accepts `q0`, `f<p>` and `trivial`, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "q0" | "q" => Ok(MeadowKind::Rationals),
            "trivial" => Ok(MeadowKind::Trivial),
            _ => match lower.strip_prefix('f').map(|rest| rest.trim().parse::<u64>()) {
                Some(Ok(p)) => MeadowKind::prime_field(p),
                _ => Err(MeadowError::UnknownMeadow(s.to_string())),
            },
        }
    }
}

impl Serialize for MeadowKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An element of a concrete meadow.
///
/// Rationals are always gcd-reduced with a positive denominator (maintained
/// by `BigRational`), residues always lie in `0..modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MeadowValue {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
    Unit,
}

impl MeadowValue {
    pub fn is_zero(&self) -> bool {
        match self {
            MeadowValue::Rational(x) => x.is_zero(),
            MeadowValue::Residue { value, .. } => *value == 0,
            MeadowValue::Unit => true,
        }
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        MeadowValue::Rational(BigRational::new(numer.into(), denom.into()))
    }

    fn rank(&self) -> u8 {
        match self {
            MeadowValue::Rational(_) => 0,
            MeadowValue::Residue { .. } => 1,
            MeadowValue::Unit => 2,
        }
    }
}

impl Ord for MeadowValue {
    /// Rationals by value, residues by representative.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MeadowValue::Rational(x), MeadowValue::Rational(y)) => x.cmp(y),
            (
                MeadowValue::Residue { value: x, modulus: m },
                MeadowValue::Residue { value: y, modulus: n },
            ) => m.cmp(n).then(x.cmp(y)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for MeadowValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MeadowValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeadowValue::Rational(x) if x.is_integer() => write!(f, "{}", x.numer()),
            MeadowValue::Rational(x) => {
                if x.is_negative() {
                    write!(f, "-{}/{}", x.numer().abs(), x.denom())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            MeadowValue::Residue { value, .. } => write!(f, "{value}"),
            MeadowValue::Unit => write!(f, "0"),
        }
    }
}

impl Serialize for MeadowValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
