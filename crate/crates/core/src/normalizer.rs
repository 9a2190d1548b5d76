//! Canonical forms for closed process terms.
//!
//! A closed, quantity-ground term is rewritten into a [`BasicTerm`]: a
//! sorted, duplicate-free sum whose summands are either a ground action
//! literal or a literal followed by another basic term. The rewriting is a
//! structural recursion computing head normal forms (the first actions a term
//! can take together with what remains), which distributes encapsulation and
//! guards on the way down and expands the merges by the interleaving laws.
//! Two terms are equal in the axiom system iff their basic terms coincide.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::meadow::{MeadowError, QuantityTerm};
use crate::process::{ActionLiteral, ProcessTerm, SpecContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("term is not closed (free process variables: {process_vars:?}, free quantity variables: {quantity_vars:?})")]
    OpenTerm {
        process_vars: Vec<String>,
        quantity_vars: Vec<String>,
    },
    #[error(transparent)]
    Meadow(#[from] MeadowError),
    #[error("termination measure violated at `{0}`")]
    MeasureViolation(String),
}

/// How the communication of two data-handling actions is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataCommRoute {
    /// Compare the argument tuples as meadow values.
    #[default]
    Direct,
    /// Build the guard chain `(u1 - v1) :> (... :> e''(u1,...,un))` and
    /// evaluate it like any other guarded term.
    GuardChain,
}

/// One head-normal-form step: the process can perform `action` and then
/// behave as `residual`, or terminate successfully when `residual` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub action: ActionLiteral,
    pub residual: Option<ProcessTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Continuation {
    /// Successful termination after the action.
    Done,
    Then(BasicTerm),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Summand {
    pub action: ActionLiteral,
    pub continuation: Continuation,
}

#[derive(Debug)]
struct Node {
    summands: Vec<Summand>,
    fingerprint: u128,
}

/// Canonical normal form. The empty sum is `delta`.
///
/// Continuations are shared, so a basic term is a DAG whose unfolding can be
/// exponentially larger than the term it came from. Equality, ordering and
/// hashing work on the DAG. Summands are ordered by action, then by a
/// structural fingerprint of the continuation.
#[derive(Debug, Clone)]
pub struct BasicTerm(Arc<Node>);

fn fingerprint(summands: &[Summand]) -> u128 {
    let half = |salt: u8| {
        let mut h = DefaultHasher::new();
        salt.hash(&mut h);
        for s in summands {
            s.action.hash(&mut h);
            match &s.continuation {
                Continuation::Done => 0u128.hash(&mut h),
                Continuation::Then(rest) => (rest.0.fingerprint | 1).hash(&mut h),
            }
        }
        h.finish()
    };
    (u128::from(half(0)) << 64) | u128::from(half(1))
}

impl BasicTerm {
    /// Sorts and deduplicates.
    pub fn from_summands(mut summands: Vec<Summand>) -> Self {
        summands.sort();
        summands.dedup();
        let fingerprint = fingerprint(&summands);
        BasicTerm(Arc::new(Node { summands, fingerprint }))
    }

    pub fn summands(&self) -> &[Summand] {
        &self.0.summands
    }

    pub fn is_deadlock(&self) -> bool {
        self.0.summands.is_empty()
    }

    /// The basic term as an ordinary process term (right-nested sums).
    /// Unfolds shared continuations.
    pub fn to_term(&self) -> ProcessTerm {
        ProcessTerm::sum(self.summands().iter().map(|s| match &s.continuation {
            Continuation::Done => s.action.to_term(),
            Continuation::Then(rest) => ProcessTerm::seq(s.action.to_term(), rest.to_term()),
        }))
    }

    /// Total number of summands at all depths of the unfolded term,
    /// saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        fn go(t: &BasicTerm, memo: &mut HashMap<*const Node, u64>) -> u64 {
            if let Some(&n) = memo.get(&Arc::as_ptr(&t.0)) {
                return n;
            }
            let n = t.summands().iter().fold(0u64, |acc, s| {
                acc.saturating_add(match &s.continuation {
                    Continuation::Done => 1,
                    Continuation::Then(rest) => go(rest, memo).saturating_add(1),
                })
            });
            memo.insert(Arc::as_ptr(&t.0), n);
            n
        }
        go(self, &mut HashMap::new())
    }

    /// Number of distinct shared nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if seen.insert(Arc::as_ptr(&t.0)) {
                for s in t.summands() {
                    if let Continuation::Then(rest) = &s.continuation {
                        stack.push(rest);
                    }
                }
            }
        }
        seen.len()
    }

    fn equal(&self, other: &BasicTerm, proven: &mut HashSet<(*const Node, *const Node)>) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.fingerprint != other.0.fingerprint || self.0.summands.len() != other.0.summands.len() {
            return false;
        }
        let key = (Arc::as_ptr(&self.0), Arc::as_ptr(&other.0));
        if proven.contains(&key) {
            return true;
        }
        let same = self.summands().iter().zip(other.summands()).all(|(a, b)| {
            a.action == b.action
                && match (&a.continuation, &b.continuation) {
                    (Continuation::Done, Continuation::Done) => true,
                    (Continuation::Then(x), Continuation::Then(y)) => x.equal(y, proven),
                    _ => false,
                }
        });
        if same {
            proven.insert(key);
        }
        same
    }
}

impl Default for BasicTerm {
    fn default() -> Self {
        BasicTerm::from_summands(Vec::new())
    }
}

impl PartialEq for BasicTerm {
    fn eq(&self, other: &Self) -> bool {
        self.equal(other, &mut HashSet::new())
    }
}

impl Eq for BasicTerm {}

impl Hash for BasicTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.fingerprint.hash(state);
    }
}

impl Ord for BasicTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        // Equal fingerprints of different terms only on a hash collision.
        self.0
            .fingerprint
            .cmp(&other.0.fingerprint)
            .then_with(|| self.summands().cmp(other.summands()))
    }
}

impl PartialOrd for BasicTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_deadlock() {
            return write!(f, "delta");
        }
        for (i, s) in self.summands().iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", s.action)?;
            if let Continuation::Then(rest) = &s.continuation {
                if rest.summands().len() > 1 {
                    write!(f, " . ({rest})")?;
                } else {
                    write!(f, " . {rest}")?;
                }
            }
        }
        Ok(())
    }
}

/// Normalizes terms against one context. Keeps a private memo table of
/// already normalized residuals, so reuse an instance for related terms.
pub struct Normalizer<'a> {
    ctx: &'a SpecContext,
    route: DataCommRoute,
    memo: HashMap<ProcessTerm, BasicTerm>,
    interned: HashSet<BasicTerm>,
}

impl<'a> Normalizer<'a> {
    pub fn new(ctx: &'a SpecContext) -> Self {
        Normalizer { ctx, route: DataCommRoute::Direct, memo: HashMap::new(), interned: HashSet::new() }
    }

    pub fn with_route(ctx: &'a SpecContext, route: DataCommRoute) -> Self {
        Normalizer { ctx, route, memo: HashMap::new(), interned: HashSet::new() }
    }

    pub fn context(&self) -> &SpecContext {
        self.ctx
    }

    /// The first steps of a closed term.
    pub fn head_normal_form(&self, t: &ProcessTerm) -> Result<Vec<Step>, NormalizeError> {
        ensure_closed(t)?;
        self.hnf(t, 0, t.height())
    }

    pub fn normalize(&mut self, t: &ProcessTerm) -> Result<BasicTerm, NormalizeError> {
        ensure_closed(t)?;
        self.normalize_closed(t)
    }

    pub fn equal_terms(&mut self, t1: &ProcessTerm, t2: &ProcessTerm) -> Result<bool, NormalizeError> {
        Ok(self.normalize(t1)? == self.normalize(t2)?)
    }

    /// The atomic-action predicate, read as the least predicate satisfying
    /// the axioms: single actions, and `delta` (which every non-empty
    /// alphabet produces as the communication of two actions with different
    /// arities).
    pub fn is_atomic(&mut self, t: &ProcessTerm) -> Result<bool, NormalizeError> {
        let nf = self.normalize(t)?;
        Ok(match nf.summands() {
            [] => !self.ctx.alphabet().is_empty(),
            [single] => single.continuation == Continuation::Done,
            _ => false,
        })
    }

    fn normalize_closed(&mut self, t: &ProcessTerm) -> Result<BasicTerm, NormalizeError> {
        if let Some(nf) = self.memo.get(t) {
            return Ok(nf.clone());
        }
        let size = t.size();
        let steps = self.hnf(t, 0, t.height())?;
        let mut summands = Vec::with_capacity(steps.len());
        for step in steps {
            let continuation = match step.residual {
                None => Continuation::Done,
                Some(rest) => {
                    if rest.size() >= size {
                        return Err(NormalizeError::MeasureViolation(t.to_string()));
                    }
                    Continuation::Then(self.normalize_closed(&rest)?)
                }
            };
            summands.push(Summand { action: step.action, continuation });
        }
        let nf = BasicTerm::from_summands(summands);
        let nf = match self.interned.get(&nf) {
            Some(shared) => shared.clone(),
            None => {
                self.interned.insert(nf.clone());
                nf
            }
        };
        self.memo.insert(t.clone(), nf.clone());
        Ok(nf)
    }

    fn hnf(&self, t: &ProcessTerm, depth: usize, bound: usize) -> Result<Vec<Step>, NormalizeError> {
        if depth >= bound {
            return Err(NormalizeError::MeasureViolation(t.to_string()));
        }
        let sub = |p: &ProcessTerm| self.hnf(p, depth + 1, bound);
        let meadow = self.ctx.meadow();
        Ok(match t {
            ProcessTerm::Deadlock => Vec::new(),
            ProcessTerm::Action(name) => vec![Step {
                action: ActionLiteral::constant(name.clone()),
                residual: None,
            }],
            ProcessTerm::DataAction(name, args) => {
                let args = args
                    .iter()
                    .map(|q| q.eval_ground(&meadow))
                    .collect::<Result<Vec<_>, _>>()?;
                vec![Step {
                    action: ActionLiteral { name: name.clone(), args },
                    residual: None,
                }]
            }
            ProcessTerm::Alt(l, r) => {
                let mut steps = sub(l)?;
                steps.extend(sub(r)?);
                steps
            }
            ProcessTerm::Seq(p, q) => sub(p)?
                .into_iter()
                .map(|s| Step {
                    action: s.action,
                    residual: Some(match s.residual {
                        None => (**q).clone(),
                        Some(rest) => ProcessTerm::seq(rest, (**q).clone()),
                    }),
                })
                .collect(),
            ProcessTerm::Par(p, q) => {
                let hp = sub(p)?;
                let hq = sub(q)?;
                let mut steps = left_merge_steps(&hp, q);
                steps.extend(left_merge_steps(&hq, p));
                steps.extend(self.comm_steps(&hp, &hq)?);
                steps
            }
            ProcessTerm::LeftMerge(p, q) => left_merge_steps(&sub(p)?, q),
            ProcessTerm::CommMerge(p, q) => self.comm_steps(&sub(p)?, &sub(q)?)?,
            ProcessTerm::Encap(h, p) => sub(p)?
                .into_iter()
                .filter(|s| !h.contains(&s.action.name))
                .map(|s| Step {
                    action: s.action,
                    residual: s.residual.map(|rest| ProcessTerm::encap(h.clone(), rest)),
                })
                .collect(),
            ProcessTerm::Guard(q, p) => {
                // 0 :> x = x, and u :> x = u/u :> x = delta for u != 0.
                if q.eval_ground(&meadow)?.is_zero() {
                    sub(p)?
                } else {
                    Vec::new()
                }
            }
            ProcessTerm::ProcVar(_) => return Err(open_term_error(t)),
        })
    }

    fn comm_steps(&self, left: &[Step], right: &[Step]) -> Result<Vec<Step>, NormalizeError> {
        let mut steps = Vec::new();
        for l in left {
            for r in right {
                if let Some(action) = self.communicate(&l.action, &r.action)? {
                    let residual = match (&l.residual, &r.residual) {
                        (None, None) => None,
                        (Some(k), None) | (None, Some(k)) => Some(k.clone()),
                        (Some(k1), Some(k2)) => Some(ProcessTerm::par(k1.clone(), k2.clone())),
                    };
                    steps.push(Step { action, residual });
                }
            }
        }
        Ok(steps)
    }

    /// The action `l | r` synchronizes to, or `None` for `delta`.
    pub fn communicate(
        &self,
        l: &ActionLiteral,
        r: &ActionLiteral,
    ) -> Result<Option<ActionLiteral>, NormalizeError> {
        let Some(result) = self.ctx.comm().get(&l.name, &r.name) else {
            return Ok(None);
        };
        if l.arity() != r.arity() {
            return Ok(None);
        }
        match self.route {
            DataCommRoute::Direct => Ok((l.args == r.args).then(|| ActionLiteral {
                name: result.clone(),
                args: l.args.clone(),
            })),
            DataCommRoute::GuardChain => {
                let chain = guard_chain(l, r, result);
                let mut steps = self.hnf(&chain, 0, chain.height())?;
                match (steps.pop(), steps.is_empty()) {
                    (None, _) => Ok(None),
                    (Some(Step { action, residual: None }), true) => Ok(Some(action)),
                    _ => Err(NormalizeError::MeasureViolation(chain.to_string())),
                }
            }
        }
    }
}

/// `(u1 - v1) :> ((u2 - v2) :> ... e''(u1, ..., un))` for ground literals.
pub fn guard_chain(l: &ActionLiteral, r: &ActionLiteral, result: &crate::process::ActionName) -> ProcessTerm {
    let body = ActionLiteral { name: result.clone(), args: l.args.clone() }.to_term();
    l.args.iter().zip(&r.args).rev().fold(body, |inner, (u, v)| {
        ProcessTerm::guard(
            QuantityTerm::sub(QuantityTerm::literal(u), QuantityTerm::literal(v)),
            inner,
        )
    })
}

fn left_merge_steps(steps: &[Step], other: &ProcessTerm) -> Vec<Step> {
    steps
        .iter()
        .map(|s| Step {
            action: s.action.clone(),
            residual: Some(match &s.residual {
                None => other.clone(),
                Some(rest) => ProcessTerm::par(rest.clone(), other.clone()),
            }),
        })
        .collect()
}

fn open_term_error(t: &ProcessTerm) -> NormalizeError {
    NormalizeError::OpenTerm {
        process_vars: t.free_process_vars().into_iter().collect(),
        quantity_vars: t.free_quantity_vars().into_iter().collect(),
    }
}

pub(crate) fn ensure_closed(t: &ProcessTerm) -> Result<(), NormalizeError> {
    if t.is_process_closed() && t.is_quantity_ground() {
        Ok(())
    } else {
        Err(open_term_error(t))
    }
}

pub fn head_normal_form(t: &ProcessTerm, ctx: &SpecContext) -> Result<Vec<Step>, NormalizeError> {
    Normalizer::new(ctx).head_normal_form(t)
}

pub fn normalize(t: &ProcessTerm, ctx: &SpecContext) -> Result<BasicTerm, NormalizeError> {
    Normalizer::new(ctx).normalize(t)
}

pub fn equal_terms(t1: &ProcessTerm, t2: &ProcessTerm, ctx: &SpecContext) -> Result<bool, NormalizeError> {
    Normalizer::new(ctx).equal_terms(t1, t2)
}

pub fn is_atomic(t: &ProcessTerm, ctx: &SpecContext) -> Result<bool, NormalizeError> {
    Normalizer::new(ctx).is_atomic(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meadow::{MeadowKind, MeadowValue};
    use crate::process::{ActionName, Alphabet, CommSpec};
    use ProcessTerm as P;
    use QuantityTerm as Q;

    fn ctx(meadow: MeadowKind) -> SpecContext {
        let alphabet = Alphabet::new(["a", "b", "c", "d", "send", "recv", "comm"]).unwrap();
        let mut g = CommSpec::new();
        let n = |s| ActionName::new(s).unwrap();
        g.insert_symmetric(n("a"), n("b"), n("c"));
        g.insert_symmetric(n("send"), n("recv"), n("comm"));
        SpecContext::new(alphabet, g, meadow).unwrap()
    }

    fn f3() -> SpecContext {
        ctx(MeadowKind::prime_field(3).unwrap())
    }

    fn num(n: u32) -> Q {
        Q::natural(n.into())
    }

    fn show(t: &P, c: &SpecContext) -> String {
        normalize(t, c).unwrap().to_string()
    }

    #[test]
    fn deadlock_summand_disappears() {
        let c = f3();
        let steps = head_normal_form(&P::alt(P::act("a"), P::Deadlock), &c).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].action.to_string(), "a");
        assert_eq!(steps[0].residual, None);
    }

    #[test]
    fn merge_head_normal_form() {
        let c = f3();
        let mut shown: Vec<String> = head_normal_form(&P::par(P::act("a"), P::act("b")), &c)
            .unwrap()
            .into_iter()
            .map(|s| format!("{} -> {}", s.action, s.residual.map_or("done".into(), |r| r.to_string())))
            .collect();
        shown.sort();
        assert_eq!(shown, ["a -> b", "b -> a", "c -> done"]);
    }

    #[test]
    fn guard_on_nonzero_blocks() {
        let q0 = ctx(MeadowKind::Rationals);
        assert!(head_normal_form(&P::guard(num(5), P::act("a")), &q0).unwrap().is_empty());
    }

    #[test]
    fn normal_form_examples() {
        let c = f3();
        assert_eq!(show(&P::alt(P::act("a"), P::act("a")), &c), "a");
        assert_eq!(normalize(&P::seq(P::Deadlock, P::act("a")), &c).unwrap(), BasicTerm::default());
        assert_eq!(show(&P::alt(P::act("b"), P::act("a")), &c), "a + b");
        assert_eq!(show(&P::par(P::act("a"), P::act("b")), &c), "a . b + b . a + c");
        assert_eq!(show(&P::guard(Q::One, P::act("a")), &c), "delta");
        assert_eq!(show(&P::seq(P::act("a"), P::Deadlock), &c), "a . delta");
    }

    #[test]
    fn equality_examples() {
        let c = f3();
        let ab = P::alt(P::act("a"), P::act("b"));
        let ba = P::alt(P::act("b"), P::act("a"));
        assert!(equal_terms(&ab, &ba, &c).unwrap());
        assert!(equal_terms(&P::guard(Q::Zero, P::act("a")), &P::act("a"), &c).unwrap());
        let l = P::seq(P::act("a"), P::alt(P::act("b"), P::act("c")));
        let r = P::alt(P::seq(P::act("a"), P::act("b")), P::seq(P::act("a"), P::act("c")));
        assert!(!equal_terms(&l, &r, &c).unwrap());
    }

    #[test]
    fn atomicity() {
        let c = f3();
        assert!(is_atomic(&P::act("d"), &c).unwrap());
        assert!(is_atomic(&P::comm_merge(P::act("a"), P::act("b")), &c).unwrap());
        assert!(!is_atomic(&P::seq(P::act("a"), P::act("b")), &c).unwrap());
        assert!(!is_atomic(&P::alt(P::act("a"), P::act("b")), &c).unwrap());
        assert!(is_atomic(&P::data("send", vec![num(2)]), &c).unwrap());
        // a | a has no communication, so it is delta, which is atomic.
        assert!(is_atomic(&P::comm_merge(P::act("a"), P::act("a")), &c).unwrap());
    }

    #[test]
    fn data_communication() {
        let q0 = ctx(MeadowKind::Rationals);
        let send3 = P::data("send", vec![num(3)]);
        let recv3 = P::data("recv", vec![num(3)]);
        let recv34 = P::data("recv", vec![num(3), num(4)]);
        let recv4 = P::data("recv", vec![num(4)]);
        assert_eq!(show(&P::comm_merge(send3.clone(), recv3.clone()), &q0), "comm(3)");
        assert_eq!(show(&P::comm_merge(send3.clone(), recv34), &q0), "delta");
        assert_eq!(show(&P::comm_merge(send3.clone(), recv4), &q0), "delta");
        assert_eq!(show(&P::comm_merge(send3, P::act("recv")), &q0), "delta");
        // Arguments are evaluated: 6/2 = 3.
        let six_halves = P::data("recv", vec![Q::div(num(6), num(2))]);
        assert_eq!(show(&P::comm_merge(P::data("send", vec![num(3)]), six_halves), &q0), "comm(3)");
    }

    #[test]
    fn guard_chain_route_matches_direct_route() {
        let q0 = ctx(MeadowKind::Rationals);
        let send = ActionLiteral {
            name: ActionName::new("send").unwrap(),
            args: vec![MeadowValue::rational(3, 1)],
        };
        let recv = ActionLiteral { name: ActionName::new("recv").unwrap(), args: send.args.clone() };
        let chain = guard_chain(&send, &recv, &ActionName::new("comm").unwrap());
        assert_eq!(chain.to_string(), "[3 - 3] -> comm(3)");
        let direct = Normalizer::new(&q0).communicate(&send, &recv).unwrap();
        let chained = Normalizer::with_route(&q0, DataCommRoute::GuardChain).communicate(&send, &recv).unwrap();
        assert_eq!(direct, chained);
        assert_eq!(direct.unwrap().to_string(), "comm(3)");
    }

    #[test]
    fn encapsulation_filters_and_distributes() {
        let c = f3();
        let h = c.alphabet().encap_set(["a", "b"]).unwrap();
        let t = P::encap(h, P::par(P::act("a"), P::act("b")));
        assert_eq!(show(&t, &c), "c");
        let h = c.alphabet().encap_set(["send"]).unwrap();
        let t = P::encap(h, P::seq(P::act("a"), P::data("send", vec![num(1)])));
        assert_eq!(show(&t, &c), "a . delta");
    }

    #[test]
    fn open_terms_are_rejected() {
        let c = f3();
        assert!(matches!(normalize(&P::var("x"), &c), Err(NormalizeError::OpenTerm { .. })));
        let t = P::guard(Q::var("u"), P::act("a"));
        assert_eq!(
            normalize(&t, &c),
            Err(NormalizeError::OpenTerm { process_vars: vec![], quantity_vars: vec!["u".into()] })
        );
    }

    #[test]
    fn normal_form_is_idempotent_and_reembeds() {
        let c = f3();
        let t = P::par(P::seq(P::act("a"), P::act("d")), P::alt(P::act("b"), P::data("send", vec![num(2)])));
        let nf = normalize(&t, &c).unwrap();
        assert_eq!(normalize(&nf.to_term(), &c).unwrap(), nf);
    }
}
