//! Random closed terms and pools of atomic actions.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::meadow::{MeadowKind, MeadowValue, QuantityTerm};
use crate::process::{ActionLiteral, ActionName, ProcessTerm, SpecContext};

/// Relative operator frequencies. Need not sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub alt: f64,
    pub seq: f64,
    pub par: f64,
    pub left_merge: f64,
    pub comm_merge: f64,
    pub encap: f64,
    pub guard: f64,
    pub atom: f64,
}

impl Weights {
    /// Shallow, wide terms: sums and sequences dominate so that merges of
    /// them have many summands to interleave.
    pub fn standard() -> Self {
        Weights {
            alt: 0.3,
            seq: 0.25,
            par: 0.15,
            left_merge: 0.0,
            comm_merge: 0.0,
            encap: 0.0,
            guard: 0.1,
            atom: 0.2,
        }
    }

    /// Every operator of the signature.
    pub fn all_operators() -> Self {
        Weights {
            alt: 0.2,
            seq: 0.2,
            par: 0.1,
            left_merge: 0.08,
            comm_merge: 0.08,
            encap: 0.07,
            guard: 0.07,
            atom: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TermGen<'a> {
    ctx: &'a SpecContext,
    pub weights: Weights,
    /// Height bound: the root is at depth 1.
    pub max_depth: usize,
    pub max_arity: usize,
    /// Emit process variables `x`, `y` and quantity variables `u`, `v` too.
    pub open: bool,
    /// Which actions may appear. Declared arities are respected.
    pub actions: Vec<ActionName>,
}

impl<'a> TermGen<'a> {
    pub fn new(ctx: &'a SpecContext) -> Self {
        TermGen {
            ctx,
            weights: Weights::standard(),
            max_depth: 4,
            max_arity: 1,
            open: false,
            actions: ctx.alphabet().iter().cloned().collect(),
        }
    }

    pub fn term<R: Rng + ?Sized>(&self, rng: &mut R) -> ProcessTerm {
        self.term_at(rng, 1)
    }

    fn term_at<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> ProcessTerm {
        if depth >= self.max_depth {
            return self.atom(rng);
        }
        let w = &self.weights;
        let choices = [
            (w.alt, 0u8),
            (w.seq, 1),
            (w.par, 2),
            (w.left_merge, 3),
            (w.comm_merge, 4),
            (w.encap, 5),
            (w.guard, 6),
            (w.atom, 7),
        ];
        let total: f64 = choices.iter().map(|c| c.0).sum();
        let mut pick = rng.gen::<f64>() * total;
        let mut op = 7;
        for (weight, tag) in choices {
            if pick < weight {
                op = tag;
                break;
            }
            pick -= weight;
        }
        let sub = |rng: &mut R| self.term_at(rng, depth + 1);
        match op {
            0 => ProcessTerm::alt(sub(rng), sub(rng)),
            1 => ProcessTerm::seq(sub(rng), sub(rng)),
            2 => ProcessTerm::par(sub(rng), sub(rng)),
            3 => ProcessTerm::left_merge(sub(rng), sub(rng)),
            4 => ProcessTerm::comm_merge(sub(rng), sub(rng)),
            5 => {
                let h = random_subset(self.ctx, rng);
                ProcessTerm::encap(h, sub(rng))
            }
            6 => {
                let q = self.condition(rng);
                ProcessTerm::guard(q, sub(rng))
            }
            _ => self.atom(rng),
        }
    }

    fn atom<R: Rng + ?Sized>(&self, rng: &mut R) -> ProcessTerm {
        if self.open && rng.gen_ratio(1, 5) {
            return ProcessTerm::var(["x", "y"].choose(rng).unwrap());
        }
        let Some(name) = self.actions.choose(rng) else {
            return ProcessTerm::Deadlock;
        };
        let n = match (rng.gen_range(0..10), self.ctx.arity(name)) {
            (0, _) => return ProcessTerm::Deadlock,
            (_, Some(declared)) => declared,
            (1..=5, None) => 0,
            (_, None) => rng.gen_range(1..=self.max_arity.max(1)),
        };
        if n == 0 {
            ProcessTerm::Action(name.clone())
        } else {
            ProcessTerm::DataAction(name.clone(), (0..n).map(|_| self.value_term(rng)).collect())
        }
    }

    fn value_term<R: Rng + ?Sized>(&self, rng: &mut R) -> QuantityTerm {
        if self.open && rng.gen_ratio(1, 4) {
            return QuantityTerm::var(["u", "v"].choose(rng).unwrap());
        }
        QuantityTerm::literal(&small_value(&self.ctx.meadow(), rng))
    }

    /// A guard condition: a literal, or a small expression over literals.
    fn condition<R: Rng + ?Sized>(&self, rng: &mut R) -> QuantityTerm {
        let a = self.value_term(rng);
        match rng.gen_range(0..6) {
            0 => QuantityTerm::sub(a, self.value_term(rng)),
            1 => QuantityTerm::div(a.clone(), a),
            2 => QuantityTerm::mul(a, self.value_term(rng)),
            3 => QuantityTerm::Zero,
            _ => a,
        }
    }
}

/// A carrier element; for `Q0`, a rational with numerator in `-3..=3` and
/// denominator in `1..=3`.
pub fn small_value<R: Rng + ?Sized>(meadow: &MeadowKind, rng: &mut R) -> MeadowValue {
    match meadow {
        MeadowKind::Rationals => MeadowValue::Rational(BigRational::new(
            BigInt::from(rng.gen_range(-3..=3)),
            BigInt::from(rng.gen_range(1..=3)),
        )),
        m => m.sample(rng),
    }
}

pub fn random_subset<R: Rng + ?Sized>(ctx: &SpecContext, rng: &mut R) -> crate::process::EncapSet {
    let names: Vec<&str> = ctx.alphabet().iter().map(ActionName::as_str).filter(|_| rng.gen_bool(0.5)).collect();
    ctx.alphabet().encap_set(names).expect("subset of the alphabet")
}

/// Values that quantity variables range over: the whole carrier of a finite
/// meadow, otherwise `0`, `1` and a few small rationals.
pub fn quantity_values<R: Rng + ?Sized>(meadow: &MeadowKind, rng: &mut R) -> Vec<MeadowValue> {
    match meadow.elements() {
        Ok(carrier) => carrier,
        Err(_) => {
            let mut values = vec![meadow.zero(), meadow.one()];
            while values.len() < 5 {
                let v = small_value(meadow, rng);
                if !values.contains(&v) {
                    values.push(v);
                }
            }
            values
        }
    }
}

/// All tuples of length `n` over `values`.
pub fn tuples(values: &[MeadowValue], n: usize) -> Vec<Vec<MeadowValue>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Every action literal with arity up to `max_arity` and arguments from `values`.
pub fn action_literals(ctx: &SpecContext, values: &[MeadowValue], max_arity: usize) -> Vec<ActionLiteral> {
    let mut out = Vec::new();
    for name in ctx.alphabet().iter() {
        for n in 0..=max_arity {
            for args in tuples(values, n) {
                out.push(ActionLiteral { name: name.clone(), args });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speclang::parse_spec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_terms_respect_the_height_bound() {
        let ctx = parse_spec("act a, b, c; comm a|b=c; meadow F 3;").unwrap();
        let gen = TermGen::new(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let t = gen.term(&mut rng);
            assert!(t.height() <= 4);
            assert!(t.is_process_closed() && t.is_quantity_ground());
        }
    }

    #[test]
    fn tuple_enumeration() {
        let f3 = MeadowKind::prime_field(3).unwrap();
        let carrier = f3.elements().unwrap();
        assert_eq!(tuples(&carrier, 0).len(), 1);
        assert_eq!(tuples(&carrier, 2).len(), 9);
        let ctx = parse_spec("act a, b; meadow F 3;").unwrap();
        assert_eq!(action_literals(&ctx, &carrier, 1).len(), 2 * (1 + 3));
    }

    #[test]
    fn rational_pool_has_zero_and_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values = quantity_values(&MeadowKind::Rationals, &mut rng);
        assert_eq!(values.len(), 5);
        assert!(values.contains(&MeadowKind::Rationals.zero()));
        assert!(values.contains(&MeadowKind::Rationals.one()));
    }
}
