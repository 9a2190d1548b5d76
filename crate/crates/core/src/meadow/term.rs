use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{MeadowError, MeadowKind, MeadowValue};

/// Syntax tree over the meadow signature `{0, 1, +, ·, −, ⁻¹}`.
///
/// Subtraction and division are not node kinds: `p - q` is `p + (-q)` and
/// `p / q` is `p · q⁻¹`. Numerals `n ≥ 2` are kept as a single node and
/// denote `1 + 1 + ... + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantityTerm {
    Zero,
    One,
    Numeral(BigUint),
    Add(Box<QuantityTerm>, Box<QuantityTerm>),
    Mul(Box<QuantityTerm>, Box<QuantityTerm>),
    Neg(Box<QuantityTerm>),
    Inv(Box<QuantityTerm>),
    Var(String),
}

impl QuantityTerm {
    pub fn var(name: &str) -> Self {
        QuantityTerm::Var(name.to_string())
    }

    pub fn add(l: QuantityTerm, r: QuantityTerm) -> Self {
        QuantityTerm::Add(Box::new(l), Box::new(r))
    }

    pub fn mul(l: QuantityTerm, r: QuantityTerm) -> Self {
        QuantityTerm::Mul(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(t: QuantityTerm) -> Self {
        QuantityTerm::Neg(Box::new(t))
    }

    pub fn inv(t: QuantityTerm) -> Self {
        QuantityTerm::Inv(Box::new(t))
    }

    /// `l - r`, i.e. `l + (-r)`.
    pub fn sub(l: QuantityTerm, r: QuantityTerm) -> Self {
        QuantityTerm::add(l, QuantityTerm::neg(r))
    }

    /// `l / r`, i.e. `l · r⁻¹`.
    pub fn div(l: QuantityTerm, r: QuantityTerm) -> Self {
        QuantityTerm::mul(l, QuantityTerm::inv(r))
    }

    /// The natural number `n` as a term.
    pub fn natural(n: BigUint) -> Self {
        if n.is_zero() {
            QuantityTerm::Zero
        } else if n.is_one() {
            QuantityTerm::One
        } else {
            QuantityTerm::Numeral(n)
        }
    }

    /// A closed term denoting `v` in its own meadow.
    pub fn literal(v: &MeadowValue) -> Self {
        match v {
            MeadowValue::Rational(x) => {
                let magnitude = |n: &num_bigint::BigInt| {
                    QuantityTerm::natural(n.abs().to_biguint().expect("absolute value"))
                };
                let positive = if x.is_integer() {
                    magnitude(x.numer())
                } else {
                    QuantityTerm::div(magnitude(x.numer()), magnitude(x.denom()))
                };
                if x.is_negative() {
                    QuantityTerm::neg(positive)
                } else {
                    positive
                }
            }
            MeadowValue::Residue { value, .. } => QuantityTerm::natural(BigUint::from(*value)),
            MeadowValue::Unit => QuantityTerm::Zero,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            QuantityTerm::Zero | QuantityTerm::One | QuantityTerm::Numeral(_) => {}
            QuantityTerm::Add(l, r) | QuantityTerm::Mul(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            QuantityTerm::Neg(t) | QuantityTerm::Inv(t) => t.collect_vars(out),
            QuantityTerm::Var(name) => {
                out.insert(name.clone());
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Replaces every variable bound in `env` by a literal for its value.
    pub fn substitute(&self, env: &QuantityEnv) -> QuantityTerm {
        match self {
            QuantityTerm::Var(name) => match env.get(name) {
                Some(v) => QuantityTerm::literal(v),
                None => self.clone(),
            },
            QuantityTerm::Add(l, r) => QuantityTerm::add(l.substitute(env), r.substitute(env)),
            QuantityTerm::Mul(l, r) => QuantityTerm::mul(l.substitute(env), r.substitute(env)),
            QuantityTerm::Neg(t) => QuantityTerm::neg(t.substitute(env)),
            QuantityTerm::Inv(t) => QuantityTerm::inv(t.substitute(env)),
            _ => self.clone(),
        }
    }

    /// Homomorphic evaluation in `meadow`.
    pub fn eval(&self, env: &QuantityEnv, meadow: &MeadowKind) -> Result<MeadowValue, MeadowError> {
        match self {
            QuantityTerm::Zero => Ok(meadow.zero()),
            QuantityTerm::One => Ok(meadow.one()),
            QuantityTerm::Numeral(n) => Ok(meadow.numeral(n)),
            QuantityTerm::Add(l, r) => meadow.add(&l.eval(env, meadow)?, &r.eval(env, meadow)?),
            QuantityTerm::Mul(l, r) => meadow.mul(&l.eval(env, meadow)?, &r.eval(env, meadow)?),
            QuantityTerm::Neg(t) => meadow.neg(&t.eval(env, meadow)?),
            QuantityTerm::Inv(t) => meadow.inv(&t.eval(env, meadow)?),
            QuantityTerm::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| MeadowError::UnboundVariable(name.clone())),
        }
    }

    pub fn eval_ground(&self, meadow: &MeadowKind) -> Result<MeadowValue, MeadowError> {
        self.eval(&QuantityEnv::new(), meadow)
    }

    pub fn size(&self) -> usize {
        match self {
            QuantityTerm::Add(l, r) | QuantityTerm::Mul(l, r) => 1 + l.size() + r.size(),
            QuantityTerm::Neg(t) | QuantityTerm::Inv(t) => 1 + t.size(),
            _ => 1,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            QuantityTerm::Add(..) => 0,
            QuantityTerm::Mul(..) => 1,
            QuantityTerm::Neg(_) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        if self.precedence() < level {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            QuantityTerm::Zero => write!(f, "0"),
            QuantityTerm::One => write!(f, "1"),
            QuantityTerm::Numeral(n) => write!(f, "{n}"),
            QuantityTerm::Var(name) => write!(f, "{name}"),
            QuantityTerm::Add(l, r) => {
                l.fmt_at(f, 0)?;
                match r.as_ref() {
                    QuantityTerm::Neg(inner) => {
                        write!(f, " - ")?;
                        inner.fmt_at(f, 1)
                    }
                    _ => {
                        write!(f, " + ")?;
                        r.fmt_at(f, 1)
                    }
                }
            }
            QuantityTerm::Mul(l, r) => {
                l.fmt_at(f, 1)?;
                match r.as_ref() {
                    QuantityTerm::Inv(inner) => {
                        write!(f, " / ")?;
                        inner.fmt_at(f, 2)
                    }
                    _ => {
                        write!(f, " * ")?;
                        r.fmt_at(f, 2)
                    }
                }
            }
            QuantityTerm::Neg(t) => {
                write!(f, "-")?;
                // "--" would lex as two separate minus signs anyway, but
                // "-(-x)" is easier to read.
                t.fmt_at(f, 3)
            }
            QuantityTerm::Inv(t) => {
                write!(f, "inv(")?;
                t.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }

    /// Small numerals as `u64`, used by generators and tests.
    pub fn as_small_numeral(&self) -> Option<u64> {
        match self {
            QuantityTerm::Zero => Some(0),
            QuantityTerm::One => Some(1),
            QuantityTerm::Numeral(n) => n.to_u64(),
            _ => None,
        }
    }
}

impl fmt::Display for QuantityTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Assignment of meadow values to quantity variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuantityEnv(BTreeMap<String, MeadowValue>);

impl QuantityEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, name: &str, value: MeadowValue) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: MeadowValue) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&MeadowValue> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &MeadowValue)> {
        self.0.iter()
    }
}

impl FromIterator<(String, MeadowValue)> for QuantityEnv {
    fn from_iter<I: IntoIterator<Item = (String, MeadowValue)>>(iter: I) -> Self {
        QuantityEnv(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use QuantityTerm as Q;

    #[test]
    fn inverse_of_zero_term() {
        let q = MeadowKind::Rationals;
        assert_eq!(Q::inv(Q::Zero).eval_ground(&q).unwrap(), q.zero());
    }

    #[test]
    fn u_over_u() {
        let q = MeadowKind::Rationals;
        let t = Q::mul(Q::var("u"), Q::inv(Q::var("u")));
        let five = QuantityEnv::new().bind("u", q.integer(&BigInt::from(5)));
        let zero = QuantityEnv::new().bind("u", q.zero());
        assert_eq!(t.eval(&five, &q).unwrap(), q.one());
        assert_eq!(t.eval(&zero, &q).unwrap(), q.zero());
    }

    #[test]
    fn unbound_variable_is_reported() {
        let err = Q::add(Q::One, Q::var("w")).eval_ground(&MeadowKind::Rationals).unwrap_err();
        assert_eq!(err, MeadowError::UnboundVariable("w".into()));
    }

    #[test]
    fn literals_evaluate_to_themselves() {
        let q = MeadowKind::Rationals;
        for (n, d) in [(0, 1), (1, 1), (-1, 1), (7, 1), (-3, 4), (22, 7)] {
            let v = MeadowValue::rational(n, d);
            assert_eq!(Q::literal(&v).eval_ground(&q).unwrap(), v);
        }
        let f5 = MeadowKind::prime_field(5).unwrap();
        for v in f5.elements().unwrap() {
            assert_eq!(Q::literal(&v).eval_ground(&f5).unwrap(), v);
        }
    }

    #[test]
    fn free_vars_and_substitution() {
        let t = Q::sub(Q::var("u"), Q::div(Q::var("v"), Q::var("u")));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["u", "v"]);
        let env = QuantityEnv::new().bind("u", MeadowValue::rational(2, 1));
        let s = t.substitute(&env);
        assert_eq!(s.free_vars().into_iter().collect::<Vec<_>>(), vec!["v"]);
    }

    #[test]
    fn printing_uses_sugar() {
        let t = Q::sub(Q::var("u"), Q::add(Q::var("v"), Q::One));
        assert_eq!(t.to_string(), "u - (v + 1)");
        let t = Q::div(Q::Numeral(3u32.into()), Q::mul(Q::var("u"), Q::var("v")));
        assert_eq!(t.to_string(), "3 / (u * v)");
        assert_eq!(Q::neg(Q::neg(Q::var("u"))).to_string(), "-(-u)");
        assert_eq!(Q::inv(Q::add(Q::One, Q::One)).to_string(), "inv(1 + 1)");
    }
}
