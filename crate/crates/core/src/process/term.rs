use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{ActionName, EncapSet};
use crate::meadow::{QuantityEnv, QuantityTerm};

/// Syntax tree of the process sort.
///
/// `ProcVar` doubles as a reference to a named definition; definitions are
/// removed by [`super::SpecContext::inline_definitions`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessTerm {
    Deadlock,
    Action(ActionName),
    DataAction(ActionName, Vec<QuantityTerm>),
    Alt(Box<ProcessTerm>, Box<ProcessTerm>),
    Seq(Box<ProcessTerm>, Box<ProcessTerm>),
    Par(Box<ProcessTerm>, Box<ProcessTerm>),
    LeftMerge(Box<ProcessTerm>, Box<ProcessTerm>),
    CommMerge(Box<ProcessTerm>, Box<ProcessTerm>),
    Encap(EncapSet, Box<ProcessTerm>),
    Guard(QuantityTerm, Box<ProcessTerm>),
    ProcVar(String),
}

impl ProcessTerm {
    /// Panics if `name` is not a valid action name.
    pub fn act(name: &str) -> Self {
        ProcessTerm::Action(ActionName::new(name).expect("valid action name"))
    }

    /// Panics if `name` is not a valid action name.
    pub fn data(name: &str, args: Vec<QuantityTerm>) -> Self {
        ProcessTerm::DataAction(ActionName::new(name).expect("valid action name"), args)
    }

    pub fn var(name: &str) -> Self {
        ProcessTerm::ProcVar(name.to_string())
    }

    pub fn alt(l: ProcessTerm, r: ProcessTerm) -> Self {
        ProcessTerm::Alt(Box::new(l), Box::new(r))
    }

    pub fn seq(l: ProcessTerm, r: ProcessTerm) -> Self {
        ProcessTerm::Seq(Box::new(l), Box::new(r))
    }

    pub fn par(l: ProcessTerm, r: ProcessTerm) -> Self {
        ProcessTerm::Par(Box::new(l), Box::new(r))
    }

    pub fn left_merge(l: ProcessTerm, r: ProcessTerm) -> Self {
        ProcessTerm::LeftMerge(Box::new(l), Box::new(r))
    }

    pub fn comm_merge(l: ProcessTerm, r: ProcessTerm) -> Self {
        ProcessTerm::CommMerge(Box::new(l), Box::new(r))
    }

    pub fn encap(h: EncapSet, t: ProcessTerm) -> Self {
        ProcessTerm::Encap(h, Box::new(t))
    }

    pub fn guard(q: QuantityTerm, t: ProcessTerm) -> Self {
        ProcessTerm::Guard(q, Box::new(t))
    }

    /// Right-nested sum of `terms`; `delta` when empty.
    pub fn sum<I: IntoIterator<Item = ProcessTerm>>(terms: I) -> Self {
        let mut terms: Vec<ProcessTerm> = terms.into_iter().collect();
        let Some(mut acc) = terms.pop() else {
            return ProcessTerm::Deadlock;
        };
        while let Some(t) = terms.pop() {
            acc = ProcessTerm::alt(t, acc);
        }
        acc
    }

    pub fn free_process_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let ProcessTerm::ProcVar(name) = t {
                out.insert(name.clone());
            }
        });
        out
    }

    pub fn free_quantity_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| match t {
            ProcessTerm::DataAction(_, args) => args.iter().for_each(|q| q.collect_vars(&mut out)),
            ProcessTerm::Guard(q, _) => q.collect_vars(&mut out),
            _ => {}
        });
        out
    }

    pub fn is_process_closed(&self) -> bool {
        self.free_process_vars().is_empty()
    }

    pub fn is_quantity_ground(&self) -> bool {
        self.free_quantity_vars().is_empty()
    }

    /// Action names occurring anywhere in the term, with the arities used.
    pub fn action_uses(&self) -> BTreeSet<(ActionName, usize)> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| match t {
            ProcessTerm::Action(n) => {
                out.insert((n.clone(), 0));
            }
            ProcessTerm::DataAction(n, args) => {
                out.insert((n.clone(), args.len()));
            }
            _ => {}
        });
        out
    }

    fn walk<F: FnMut(&ProcessTerm)>(&self, f: &mut F) {
        f(self);
        match self {
            ProcessTerm::Alt(l, r)
            | ProcessTerm::Seq(l, r)
            | ProcessTerm::Par(l, r)
            | ProcessTerm::LeftMerge(l, r)
            | ProcessTerm::CommMerge(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            ProcessTerm::Encap(_, t) | ProcessTerm::Guard(_, t) => t.walk(f),
            _ => {}
        }
    }

    fn map_children<F: FnMut(&ProcessTerm) -> ProcessTerm>(&self, mut f: F) -> ProcessTerm {
        match self {
            ProcessTerm::Alt(l, r) => ProcessTerm::alt(f(l), f(r)),
            ProcessTerm::Seq(l, r) => ProcessTerm::seq(f(l), f(r)),
            ProcessTerm::Par(l, r) => ProcessTerm::par(f(l), f(r)),
            ProcessTerm::LeftMerge(l, r) => ProcessTerm::left_merge(f(l), f(r)),
            ProcessTerm::CommMerge(l, r) => ProcessTerm::comm_merge(f(l), f(r)),
            ProcessTerm::Encap(h, t) => ProcessTerm::encap(h.clone(), f(t)),
            ProcessTerm::Guard(q, t) => ProcessTerm::guard(q.clone(), f(t)),
            _ => self.clone(),
        }
    }

    /// Replaces process variables bound in `bindings`.
    pub fn substitute(&self, bindings: &BTreeMap<String, ProcessTerm>) -> ProcessTerm {
        match self {
            ProcessTerm::ProcVar(name) => bindings.get(name).cloned().unwrap_or_else(|| self.clone()),
            _ => self.map_children(|t| t.substitute(bindings)),
        }
    }

    /// Replaces quantity variables bound in `env` by literals.
    pub fn substitute_quantities(&self, env: &QuantityEnv) -> ProcessTerm {
        match self {
            ProcessTerm::DataAction(n, args) => {
                ProcessTerm::DataAction(n.clone(), args.iter().map(|q| q.substitute(env)).collect())
            }
            ProcessTerm::Guard(q, t) => ProcessTerm::guard(q.substitute(env), t.substitute_quantities(env)),
            _ => self.map_children(|t| t.substitute_quantities(env)),
        }
    }

    /// Number of process-sort nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn height(&self) -> usize {
        match self {
            ProcessTerm::Alt(l, r)
            | ProcessTerm::Seq(l, r)
            | ProcessTerm::Par(l, r)
            | ProcessTerm::LeftMerge(l, r)
            | ProcessTerm::CommMerge(l, r) => 1 + l.height().max(r.height()),
            ProcessTerm::Encap(_, t) | ProcessTerm::Guard(_, t) => 1 + t.height(),
            _ => 1,
        }
    }

    fn level(&self) -> u8 {
        match self {
            ProcessTerm::Alt(..) => 0,
            ProcessTerm::Par(..) | ProcessTerm::LeftMerge(..) | ProcessTerm::CommMerge(..) => 1,
            ProcessTerm::Seq(..) => 2,
            _ => 3,
        }
    }

    fn parallel_symbol(&self) -> Option<&'static str> {
        match self {
            ProcessTerm::Par(..) => Some("||"),
            ProcessTerm::LeftMerge(..) => Some("|_"),
            ProcessTerm::CommMerge(..) => Some("|"),
            _ => None,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        if self.level() < level {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            ProcessTerm::Deadlock => write!(f, "delta"),
            ProcessTerm::Action(n) => write!(f, "{n}"),
            ProcessTerm::DataAction(n, args) => {
                write!(f, "{n}(")?;
                for (i, q) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{q}")?;
                }
                write!(f, ")")
            }
            ProcessTerm::ProcVar(name) => write!(f, "{name}"),
            ProcessTerm::Alt(l, r) => {
                l.fmt_at(f, 0)?;
                write!(f, " + ")?;
                r.fmt_at(f, 1)
            }
            ProcessTerm::Seq(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " . ")?;
                r.fmt_at(f, 3)
            }
            ProcessTerm::Par(l, r) | ProcessTerm::LeftMerge(l, r) | ProcessTerm::CommMerge(l, r) => {
                let symbol = self.parallel_symbol().unwrap();
                // Different parallel operators never chain without parentheses.
                match l.parallel_symbol() {
                    Some(s) if s != symbol => {
                        write!(f, "(")?;
                        l.fmt_at(f, 0)?;
                        write!(f, ")")?;
                    }
                    _ => l.fmt_at(f, 1)?,
                }
                write!(f, " {symbol} ")?;
                r.fmt_at(f, 2)
            }
            ProcessTerm::Encap(h, t) => {
                write!(f, "encap({h}, ")?;
                t.fmt_at(f, 0)?;
                write!(f, ")")
            }
            ProcessTerm::Guard(q, t) => {
                write!(f, "[{q}] -> ")?;
                t.fmt_at(f, 3)
            }
        }
    }
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ProcessTerm as P;

    #[test]
    fn free_variables_of_both_sorts() {
        let t = P::alt(P::var("x"), P::act("a"));
        assert_eq!(t.free_process_vars(), BTreeSet::from(["x".to_string()]));
        assert!(t.free_quantity_vars().is_empty());

        let t = P::guard(QuantityTerm::var("u"), P::act("a"));
        assert!(t.free_process_vars().is_empty());
        assert_eq!(t.free_quantity_vars(), BTreeSet::from(["u".to_string()]));

        assert!(P::Deadlock.free_process_vars().is_empty());
        assert!(P::Deadlock.free_quantity_vars().is_empty());
    }

    #[test]
    fn substitution() {
        let t = P::seq(P::var("x"), P::guard(QuantityTerm::var("u"), P::var("y")));
        let bindings = BTreeMap::from([("x".to_string(), P::act("a")), ("y".to_string(), P::act("b"))]);
        let env = QuantityEnv::new().bind("u", crate::meadow::MeadowValue::rational(0, 1));
        let s = t.substitute(&bindings).substitute_quantities(&env);
        assert!(s.is_process_closed() && s.is_quantity_ground());
        assert_eq!(s.to_string(), "a . [0] -> b");
    }

    #[test]
    fn printing_respects_precedence() {
        let t = P::alt(P::act("a"), P::seq(P::act("b"), P::act("c")));
        assert_eq!(t.to_string(), "a + b . c");
        let t = P::seq(P::alt(P::act("a"), P::act("b")), P::act("c"));
        assert_eq!(t.to_string(), "(a + b) . c");
        let t = P::par(P::left_merge(P::act("a"), P::act("b")), P::act("c"));
        assert_eq!(t.to_string(), "(a |_ b) || c");
        let t = P::par(P::par(P::act("a"), P::act("b")), P::act("c"));
        assert_eq!(t.to_string(), "a || b || c");
        let t = P::par(P::act("a"), P::par(P::act("b"), P::act("c")));
        assert_eq!(t.to_string(), "a || (b || c)");
        let t = P::seq(P::act("a"), P::seq(P::act("b"), P::act("c")));
        assert_eq!(t.to_string(), "a . (b . c)");
    }

    #[test]
    fn sum_of_nothing_is_deadlock() {
        assert_eq!(P::sum(vec![]), P::Deadlock);
        assert_eq!(P::sum(vec![P::act("a"), P::act("b"), P::act("c")]).to_string(), "a + (b + c)");
    }
}
