//! The process axioms as executable formulas.
//!
//! Every equation is instantiated with closed terms and checked twice: by
//! comparing normal forms and by the bisimulation oracle in [`crate::lts`].
//! A disagreement between the two is reported as its own failure status.
//!
//! Variable sorts follow their names. `x`, `y`, `z` receive random closed
//! terms, `a`, `b`, `c` receive atomic actions (ground literals, `delta`, or
//! communications of literals), `u`, `v` range over meadow values and `H`
//! over subsets of the alphabet. Schemas over action constants are
//! enumerated instead of sampled.

mod formulas;
pub mod gen;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lts::{self, bisimilar, build_lts};
use crate::meadow::{MeadowValue, QuantityEnv};
use crate::normalizer::{DataCommRoute, NormalizeError, Normalizer};
use crate::process::{ActionLiteral, EncapSet, ProcessTerm, SpecContext};
use crate::report::{AxiomReport, AxiomResult, Counterexample, Status};

use gen::{action_literals, quantity_values, TermGen};

pub use formulas::{ACP_IDS, DERIVED_IDS, ENRICHED_IDS};

/// What one instance asserts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Equal(ProcessTerm, ProcessTerm),
    Atomic(ProcessTerm),
    /// Both premises atomic implies the conclusion atomic.
    AtomicImplies(ProcessTerm, ProcessTerm, ProcessTerm),
}

/// A closed instance together with the assignment that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub assignment: BTreeMap<String, String>,
    pub formula: Formula,
}

enum Plan {
    /// An open formula; its free variables are drawn per sample by sort.
    Sampled { build: fn(&EncapSet) -> Formula, uses_h: bool },
    /// Finitely many closed instances.
    Enumerated(fn(&Pools) -> Vec<Instance>),
}

struct Axiom {
    id: &'static str,
    name: &'static str,
    lhs: &'static str,
    rhs: &'static str,
    plan: Plan,
}

/// Values every instantiation draws from.
struct Pools<'a> {
    ctx: &'a SpecContext,
    values: Vec<MeadowValue>,
    subsets: Vec<EncapSet>,
    atoms: Vec<ProcessTerm>,
}

const MAX_ATOMS: usize = 256;

impl<'a> Pools<'a> {
    fn new(ctx: &'a SpecContext, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = quantity_values(&ctx.meadow(), &mut rng);
        let literals = action_literals(ctx, &values, 2);
        let mut atoms: Vec<ProcessTerm> = literals.iter().map(ActionLiteral::to_term).collect();
        atoms.push(ProcessTerm::Deadlock);
        for l in &literals {
            for r in &literals {
                if l.args == r.args && ctx.comm().get(&l.name, &r.name).is_some() {
                    atoms.push(ProcessTerm::comm_merge(l.to_term(), r.to_term()));
                }
            }
        }
        if atoms.len() > MAX_ATOMS {
            // Keep every constant and communication, thin out data literals.
            atoms.shuffle(&mut rng);
            atoms.sort_by_key(|t| !matches!(t, ProcessTerm::Action(_) | ProcessTerm::Deadlock));
            atoms.truncate(MAX_ATOMS);
        }
        Pools { ctx, values, subsets: ctx.alphabet().subsets(), atoms }
    }

    /// An atomic action; `b` is biased towards partners of `a` so that
    /// communication axioms see defined communications.
    fn atom<R: Rng>(&self, rng: &mut R, partner_of: Option<&ProcessTerm>) -> ProcessTerm {
        if let Some(a) = partner_of {
            if rng.gen_bool(0.5) {
                let partners: Vec<&ProcessTerm> = self
                    .atoms
                    .iter()
                    .filter(|b| communicates(self.ctx, a, b))
                    .collect();
                if let Some(b) = partners.choose(rng) {
                    return (*b).clone();
                }
            }
        }
        self.atoms.choose(rng).cloned().unwrap_or(ProcessTerm::Deadlock)
    }
}

fn literal_of(t: &ProcessTerm) -> Option<(&crate::process::ActionName, usize)> {
    match t {
        ProcessTerm::Action(n) => Some((n, 0)),
        ProcessTerm::DataAction(n, args) => Some((n, args.len())),
        _ => None,
    }
}

fn communicates(ctx: &SpecContext, a: &ProcessTerm, b: &ProcessTerm) -> bool {
    match (literal_of(a), literal_of(b)) {
        (Some((n, i)), Some((m, j))) => i == j && ctx.comm().get(n, m).is_some(),
        _ => false,
    }
}

/// Runs the suites against one context.
#[derive(Debug, Clone)]
pub struct Harness<'a> {
    ctx: &'a SpecContext,
    pub samples: usize,
    pub seed: u64,
    /// Route the normalizer uses for data communication; the oracle always
    /// compares values directly.
    pub route: DataCommRoute,
}

impl<'a> Harness<'a> {
    pub fn new(ctx: &'a SpecContext, samples: usize, seed: u64) -> Self {
        Harness { ctx, samples, seed, route: DataCommRoute::Direct }
    }

    pub fn with_route(mut self, route: DataCommRoute) -> Self {
        self.route = route;
        self
    }

    pub fn check_acp(&self) -> AxiomReport {
        self.run("ACP axioms", formulas::acp())
    }

    pub fn check_enriched(&self) -> AxiomReport {
        self.run("meadow-enriched ACP axioms", formulas::enriched())
    }

    pub fn check_derived(&self) -> AxiomReport {
        self.run("derived equations", formulas::derived())
    }

    fn run(&self, suite: &str, axioms: Vec<Axiom>) -> AxiomReport {
        let pools = Pools::new(self.ctx, self.seed);
        let check = |(i, axiom): (usize, &Axiom)| self.check_axiom(axiom, &pools, axiom_seed(self.seed, i));
        #[cfg(feature = "parallel")]
        let results = {
            use rayon::prelude::*;
            axioms.par_iter().enumerate().map(check).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results = axioms.iter().enumerate().map(check).collect();
        AxiomReport {
            suite: suite.to_string(),
            meadow: self.ctx.meadow().to_string(),
            mode: format!("samples={}, seed={}", self.samples, self.seed),
            axioms: results,
            separation: None,
            cancellation: None,
            general_inverse: None,
        }
    }

    fn instances(&self, axiom: &Axiom, pools: &Pools, seed: u64) -> Vec<Instance> {
        match &axiom.plan {
            Plan::Enumerated(enumerate) => enumerate(pools),
            Plan::Sampled { build, uses_h } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let gen = TermGen::new(self.ctx);
                let k = pools.values.len().max(1);
                (0..self.samples)
                    .map(|i| {
                        let h = pools.subsets.choose(&mut rng).cloned().expect("at least the empty set");
                        let mut assignment = BTreeMap::new();
                        if *uses_h {
                            assignment.insert("H".to_string(), h.to_string());
                        }
                        let open = build(&h);
                        // Premises of an implication are usually atomic, so
                        // that the conclusion is exercised.
                        let implication = matches!(open, Formula::AtomicImplies(..));
                        let mut procs = BTreeMap::new();
                        for var in free_process_vars(&open) {
                            let term = match var.as_str() {
                                "b" => pools.atom(&mut rng, procs.get("a")),
                                "a" | "c" => pools.atom(&mut rng, None),
                                "x" if implication && rng.gen_bool(0.75) => pools.atom(&mut rng, None),
                                "y" if implication && rng.gen_bool(0.75) => pools.atom(&mut rng, procs.get("x")),
                                _ => gen.term(&mut rng),
                            };
                            assignment.insert(var.clone(), term.to_string());
                            procs.insert(var, term);
                        }
                        let mut env = QuantityEnv::new();
                        for (j, var) in free_quantity_vars(&open).into_iter().enumerate() {
                            // Walk the grid of value tuples so that small
                            // carriers are covered exhaustively.
                            let value = pools.values[(i / k.pow(j as u32)) % k].clone();
                            assignment.insert(var.clone(), value.to_string());
                            env.insert(&var, value);
                        }
                        let close = |t: &ProcessTerm| t.substitute(&procs).substitute_quantities(&env);
                        let formula = match &open {
                            Formula::Equal(l, r) => Formula::Equal(close(l), close(r)),
                            Formula::Atomic(t) => Formula::Atomic(close(t)),
                            Formula::AtomicImplies(p, q, c) => Formula::AtomicImplies(close(p), close(q), close(c)),
                        };
                        Instance { assignment, formula }
                    })
                    .collect()
            }
        }
    }

    fn check_axiom(&self, axiom: &Axiom, pools: &Pools, seed: u64) -> AxiomResult {
        let instances = self.instances(axiom, pools, seed);
        let mut normalizer = Normalizer::with_route(self.ctx, self.route);
        let mut status = Status::Pass;
        let mut counterexample = None;
        for instance in &instances {
            let (verdict, cex) = match check_instance(&mut normalizer, self.ctx, instance) {
                Ok(v) => v,
                Err(e) => (Status::Fail, Some(error_counterexample(instance, &e))),
            };
            if severity(verdict) > severity(status) {
                status = verdict;
                counterexample = cex;
            }
            if status == Status::Disagreement {
                break;
            }
        }
        AxiomResult {
            id: axiom.id.to_string(),
            name: axiom.name.to_string(),
            lhs: axiom.lhs.to_string(),
            rhs: axiom.rhs.to_string(),
            status,
            instances: instances.len(),
            counterexample,
        }
    }
}

fn free_process_vars(f: &Formula) -> Vec<String> {
    let terms: Vec<&ProcessTerm> = match f {
        Formula::Equal(l, r) => vec![l, r],
        Formula::Atomic(t) => vec![t],
        Formula::AtomicImplies(p, q, c) => vec![p, q, c],
    };
    let mut vars: Vec<String> = terms.iter().flat_map(|t| t.free_process_vars()).collect();
    vars.sort();
    vars.dedup();
    vars
}

fn free_quantity_vars(f: &Formula) -> Vec<String> {
    let terms: Vec<&ProcessTerm> = match f {
        Formula::Equal(l, r) => vec![l, r],
        Formula::Atomic(t) => vec![t],
        Formula::AtomicImplies(p, q, c) => vec![p, q, c],
    };
    let mut vars: Vec<String> = terms.iter().flat_map(|t| t.free_quantity_vars()).collect();
    vars.sort();
    vars.dedup();
    vars
}

/// Seed of the `index`-th axiom of a run, independent of scheduling.
fn axiom_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Atomicity read off the transition system: at most one transition from
/// the initial state, and it terminates.
fn oracle_atomic(t: &ProcessTerm, ctx: &SpecContext) -> Result<bool, NormalizeError> {
    let l = build_lts(t, ctx)?;
    let out: Vec<_> = l.successors(l.initial()).collect();
    Ok(match out.as_slice() {
        [] => !ctx.alphabet().is_empty(),
        [(_, target)] => l.is_done(*target),
        _ => false,
    })
}

fn severity(s: Status) -> u8 {
    match s {
        Status::Pass | Status::Skipped => 0,
        Status::Fail => 1,
        Status::Disagreement => 2,
    }
}

fn verdict(by_normal_form: bool, by_oracle: bool) -> Status {
    match (by_normal_form, by_oracle) {
        (true, true) => Status::Pass,
        (false, false) => Status::Fail,
        _ => Status::Disagreement,
    }
}

fn check_instance(
    normalizer: &mut Normalizer,
    ctx: &SpecContext,
    instance: &Instance,
) -> Result<(Status, Option<Counterexample>), NormalizeError> {
    let cex = |lhs: String, rhs: String, note: String| Counterexample {
        assignment: instance.assignment.clone(),
        lhs,
        rhs,
        note: Some(note),
    };
    match &instance.formula {
        Formula::Equal(l, r) => {
            let by_nf = normalizer.equal_terms(l, r)?;
            let by_oracle = bisimilar(&lts::build_lts(l, ctx)?, &lts::build_lts(r, ctx)?);
            let status = verdict(by_nf, by_oracle);
            if status == Status::Pass {
                return Ok((status, None));
            }
            let nl = normalizer.normalize(l)?.to_string();
            let nr = normalizer.normalize(r)?.to_string();
            let note = format!("normal forms {}, bisimilar: {by_oracle}", if by_nf { "equal" } else { "differ" });
            Ok((status, Some(cex(nl, nr, note))))
        }
        Formula::Atomic(t) => {
            let status = verdict(normalizer.is_atomic(t)?, oracle_atomic(t, ctx)?);
            if status == Status::Pass {
                return Ok((status, None));
            }
            let nf = normalizer.normalize(t)?.to_string();
            Ok((status, Some(cex(t.to_string(), nf, "not atomic".into()))))
        }
        Formula::AtomicImplies(p, q, c) => {
            if !(normalizer.is_atomic(p)? && normalizer.is_atomic(q)?) {
                return Ok((Status::Pass, None));
            }
            let status = verdict(normalizer.is_atomic(c)?, oracle_atomic(c, ctx)?);
            if status == Status::Pass {
                return Ok((status, None));
            }
            let nf = normalizer.normalize(c)?.to_string();
            Ok((status, Some(cex(c.to_string(), nf, "conclusion not atomic".into()))))
        }
    }
}

fn error_counterexample(instance: &Instance, e: &NormalizeError) -> Counterexample {
    let (lhs, rhs) = match &instance.formula {
        Formula::Equal(l, r) => (l.to_string(), r.to_string()),
        Formula::Atomic(t) => (t.to_string(), String::new()),
        Formula::AtomicImplies(_, _, c) => (c.to_string(), String::new()),
    };
    Counterexample { assignment: instance.assignment.clone(), lhs, rhs, note: Some(e.to_string()) }
}

/// Every row of the ACP table: interleaving, encapsulation and atomicity.
pub fn check_acp_axioms(ctx: &SpecContext, samples: usize, seed: u64) -> AxiomReport {
    Harness::new(ctx, samples, seed).check_acp()
}

/// Guards, data communication, data encapsulation and atomicity of data actions.
pub fn check_enriched_axioms(ctx: &SpecContext, samples: usize, seed: u64) -> AxiomReport {
    Harness::new(ctx, samples, seed).check_enriched()
}

/// Equations that follow from the axioms but are not among them.
pub fn check_derived(ctx: &SpecContext, samples: usize, seed: u64) -> AxiomReport {
    Harness::new(ctx, samples, seed).check_derived()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speclang::parse_spec;

    fn ctx() -> SpecContext {
        parse_spec("act a, b, c, d; comm a|b=c; meadow F 3;").unwrap()
    }

    fn ids(report: &AxiomReport) -> Vec<&str> {
        report.axioms.iter().map(|a| a.id.as_str()).collect()
    }

    #[test]
    fn every_axiom_is_covered() {
        let ctx = ctx();
        let h = Harness::new(&ctx, 3, 0);
        assert_eq!(ids(&h.check_acp()), ACP_IDS);
        assert_eq!(ids(&h.check_enriched()), ENRICHED_IDS);
        assert_eq!(ids(&h.check_derived()), DERIVED_IDS);
    }

    #[test]
    fn suites_pass_on_a_prime_field() {
        let ctx = ctx();
        for report in [check_acp_axioms(&ctx, 40, 7), check_enriched_axioms(&ctx, 40, 7), check_derived(&ctx, 40, 7)] {
            assert!(report.all_pass(), "{report}");
            assert!(report.axioms.iter().all(|a| a.instances > 0));
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let ctx = ctx();
        assert_eq!(check_acp_axioms(&ctx, 10, 5), check_acp_axioms(&ctx, 10, 5));
    }

    #[test]
    fn a_wrong_equation_is_caught_by_both_checks() {
        let ctx = ctx();
        let bad = Instance {
            assignment: BTreeMap::new(),
            formula: Formula::Equal(
                ProcessTerm::seq(ProcessTerm::act("a"), ProcessTerm::alt(ProcessTerm::act("b"), ProcessTerm::act("d"))),
                ProcessTerm::alt(
                    ProcessTerm::seq(ProcessTerm::act("a"), ProcessTerm::act("b")),
                    ProcessTerm::seq(ProcessTerm::act("a"), ProcessTerm::act("d")),
                ),
            ),
        };
        let (status, cex) = check_instance(&mut Normalizer::new(&ctx), &ctx, &bad).unwrap();
        assert_eq!(status, Status::Fail);
        assert!(cex.unwrap().note.unwrap().contains("bisimilar: false"));
    }

    #[test]
    fn guard_chain_route_agrees() {
        let ctx = parse_spec("act send/1, recv/1, comm/1; comm send|recv=comm; meadow F 3;").unwrap();
        let report = Harness::new(&ctx, 20, 1).with_route(DataCommRoute::GuardChain).check_enriched();
        assert!(report.all_pass(), "{report}");
    }
}
