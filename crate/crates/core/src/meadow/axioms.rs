//! The ten meadow equations, checked by evaluation over a concrete carrier.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MeadowError, MeadowKind, MeadowValue, QuantityEnv, QuantityTerm};
use crate::report::{AxiomReport, AxiomResult, Counterexample, PropertyResult, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

impl std::fmt::Display for CheckMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckMode::Exhaustive => write!(f, "exhaustive"),
            CheckMode::Random { count, seed } => write!(f, "random(count={count}, seed={seed})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeadowEquation {
    pub id: &'static str,
    pub name: &'static str,
    pub lhs: QuantityTerm,
    pub rhs: QuantityTerm,
}

/// The defining equations of a meadow over variables `u`, `v`, `w`.
pub fn meadow_equations() -> Vec<MeadowEquation> {
    use QuantityTerm as Q;
    let (u, v, w) = (Q::var("u"), Q::var("v"), Q::var("w"));
    let eq = |id, name, lhs, rhs| MeadowEquation { id, name, lhs, rhs };
    vec![
        eq(
            "M1",
            "additive associativity",
            Q::add(Q::add(u.clone(), v.clone()), w.clone()),
            Q::add(u.clone(), Q::add(v.clone(), w.clone())),
        ),
        eq("M2", "additive commutativity", Q::add(u.clone(), v.clone()), Q::add(v.clone(), u.clone())),
        eq("M3", "additive identity", Q::add(u.clone(), Q::Zero), u.clone()),
        eq("M4", "additive inverse", Q::add(u.clone(), Q::neg(u.clone())), Q::Zero),
        eq(
            "M5",
            "multiplicative associativity",
            Q::mul(Q::mul(u.clone(), v.clone()), w.clone()),
            Q::mul(u.clone(), Q::mul(v.clone(), w.clone())),
        ),
        eq("M6", "multiplicative commutativity", Q::mul(u.clone(), v.clone()), Q::mul(v.clone(), u.clone())),
        eq("M7", "multiplicative identity", Q::mul(u.clone(), Q::One), u.clone()),
        eq(
            "M8",
            "distributivity",
            Q::mul(u.clone(), Q::add(v.clone(), w.clone())),
            Q::add(Q::mul(u.clone(), v.clone()), Q::mul(u.clone(), w)),
        ),
        eq("M9", "reflexivity of inverse", Q::inv(Q::inv(u.clone())), u.clone()),
        eq(
            "M10",
            "restricted inverse law",
            Q::mul(u.clone(), Q::mul(u.clone(), Q::inv(u.clone()))),
            u,
        ),
    ]
}

impl MeadowKind {
    /// A random carrier element; for `Q0` a rational with small numerator and
    /// denominator, zero about one time in ten.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MeadowValue {
        self.sample_bounded(rng, 1000)
    }

    /// As [`MeadowKind::sample`], with `|numerator|, denominator <= bound` for `Q0`.
    pub fn sample_bounded<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> MeadowValue {
        match self {
            MeadowKind::Rationals => {
                if rng.gen_ratio(1, 10) {
                    return self.zero();
                }
                let numer = rng.gen_range(-bound..=bound);
                let denom = rng.gen_range(1..=bound);
                MeadowValue::Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
            }
            MeadowKind::PrimeField(p) => MeadowValue::Residue {
                value: rng.gen_range(0..p.get()),
                modulus: p.get(),
            },
            MeadowKind::Trivial => MeadowValue::Unit,
        }
    }
}

fn assignments(meadow: &MeadowKind, mode: CheckMode) -> Result<Vec<[MeadowValue; 3]>, MeadowError> {
    match mode {
        CheckMode::Exhaustive => {
            let carrier = meadow.elements()?;
            let mut out = Vec::with_capacity(carrier.len().pow(3));
            for u in &carrier {
                for v in &carrier {
                    for w in &carrier {
                        out.push([u.clone(), v.clone(), w.clone()]);
                    }
                }
            }
            Ok(out)
        }
        CheckMode::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| [meadow.sample(&mut rng), meadow.sample(&mut rng), meadow.sample(&mut rng)])
                .collect())
        }
    }
}

fn env_of(values: &[MeadowValue; 3]) -> QuantityEnv {
    ["u", "v", "w"]
        .iter()
        .zip(values)
        .map(|(name, value)| (name.to_string(), value.clone()))
        .collect()
}

fn describe(env: &QuantityEnv, vars: &[&str]) -> BTreeMap<String, String> {
    env.iter()
        .filter(|(k, _)| vars.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.to_string()))
        .collect()
}

/// Checks every meadow equation plus the separation axiom, the cancellation
/// axiom and the general inverse law over `meadow`.
pub fn check_meadow_axioms(meadow: MeadowKind, mode: CheckMode) -> Result<AxiomReport, MeadowError> {
    let points = assignments(&meadow, mode)?;
    let envs: Vec<QuantityEnv> = points.iter().map(env_of).collect();

    let mut axioms = Vec::new();
    for eq in meadow_equations() {
        let vars: Vec<String> = eq.lhs.free_vars().union(&eq.rhs.free_vars()).cloned().collect();
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        let mut counterexample = None;
        for env in &envs {
            let l = eq.lhs.eval(env, &meadow)?;
            let r = eq.rhs.eval(env, &meadow)?;
            if l != r {
                counterexample = Some(Counterexample {
                    assignment: describe(env, &vars),
                    lhs: l.to_string(),
                    rhs: r.to_string(),
                    note: None,
                });
                break;
            }
        }
        axioms.push(AxiomResult {
            id: eq.id.to_string(),
            name: eq.name.to_string(),
            lhs: eq.lhs.to_string(),
            rhs: eq.rhs.to_string(),
            status: if counterexample.is_some() { Status::Fail } else { Status::Pass },
            instances: envs.len(),
            counterexample,
        });
    }

    let zero = meadow.zero();
    let one = meadow.one();
    let separation = if zero != one {
        PropertyResult::pass()
    } else {
        PropertyResult::fail(Counterexample {
            assignment: BTreeMap::new(),
            lhs: zero.to_string(),
            rhs: one.to_string(),
            note: Some("0 = 1 in this meadow".into()),
        })
    };

    let mut cancellation = PropertyResult::pass();
    for env in &envs {
        let (u, v, w) = (&env.get("u").unwrap(), &env.get("v").unwrap(), &env.get("w").unwrap());
        if !u.is_zero() && meadow.mul(u, v)? == meadow.mul(u, w)? && v != w {
            cancellation = PropertyResult::fail(Counterexample {
                assignment: describe(env, &["u", "v", "w"]),
                lhs: v.to_string(),
                rhs: w.to_string(),
                note: Some("u != 0 and u*v = u*w but v != w".into()),
            });
            break;
        }
    }

    let mut general_inverse = PropertyResult::pass();
    for env in &envs {
        let u = env.get("u").unwrap();
        if !u.is_zero() {
            let p = meadow.mul(u, &meadow.inv(u)?)?;
            if p != one {
                general_inverse = PropertyResult::fail(Counterexample {
                    assignment: describe(env, &["u"]),
                    lhs: p.to_string(),
                    rhs: one.to_string(),
                    note: Some("u != 0 but u * inv(u) != 1".into()),
                });
                break;
            }
        }
    }

    Ok(AxiomReport {
        suite: "meadow axioms".into(),
        meadow: meadow.to_string(),
        mode: mode.to_string(),
        axioms,
        separation: Some(separation),
        cancellation: Some(cancellation),
        general_inverse: Some(general_inverse),
    })
}
