//! Labelled transition systems of closed terms and strong bisimilarity.
//!
//! States are the residual terms reachable by head-normal-form steps, kept
//! exactly as produced (no sorting, no deduplication of summands), plus one
//! absorbing `Done` state for successful termination. Bisimilarity is decided
//! by signature-based partition refinement on the disjoint union of two
//! systems and never looks at normal forms.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};

use crate::normalizer::{NormalizeError, Normalizer};
use crate::process::{ActionLiteral, ProcessTerm, SpecContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    Term(ProcessTerm),
    /// Successful termination.
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    states: Vec<State>,
    initial: usize,
    transitions: BTreeSet<(usize, ActionLiteral, usize)>,
}

impl Lts {
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transitions(&self) -> impl Iterator<Item = &(usize, ActionLiteral, usize)> {
        self.transitions.iter()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn done_state(&self) -> Option<usize> {
        self.states.iter().position(|s| *s == State::Done)
    }

    pub fn is_done(&self, state: usize) -> bool {
        self.states[state] == State::Done
    }

    pub fn successors(&self, state: usize) -> impl Iterator<Item = (&ActionLiteral, usize)> {
        self.transitions
            .iter()
            .filter(move |(s, _, _)| *s == state)
            .map(|(_, a, t)| (a, *t))
    }

    /// Graphviz rendering; the `Done` state is double-circled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  start [shape=point];\n");
        for (i, s) in self.states.iter().enumerate() {
            match s {
                State::Term(t) => {
                    let _ = writeln!(out, "  s{i} [label=\"{}\"];", escape(&t.to_string()));
                }
                State::Done => {
                    let _ = writeln!(out, "  s{i} [shape=doublecircle, label=\"done\"];");
                }
            }
        }
        let _ = writeln!(out, "  start -> s{};", self.initial);
        for (s, a, t) in &self.transitions {
            let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", escape(&a.to_string()));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Lts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} states, {} transitions, initial s{}", self.num_states(), self.num_transitions(), self.initial)?;
        for (i, s) in self.states.iter().enumerate() {
            match s {
                State::Term(t) => writeln!(f, "  s{i} = {t}")?,
                State::Done => writeln!(f, "  s{i} = done")?,
            }
        }
        for (s, a, t) in &self.transitions {
            writeln!(f, "  s{s} --{a}--> s{t}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct StateJson {
    id: usize,
    label: String,
    done: bool,
}

#[derive(Serialize)]
struct TransitionJson {
    from: usize,
    action: String,
    to: usize,
}

#[derive(Serialize)]
struct LtsJson {
    initial: usize,
    states: Vec<StateJson>,
    transitions: Vec<TransitionJson>,
}

impl Serialize for Lts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LtsJson {
            initial: self.initial,
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(id, s)| match s {
                    State::Term(t) => StateJson { id, label: t.to_string(), done: false },
                    State::Done => StateJson { id, label: "done".into(), done: true },
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(from, a, to)| TransitionJson { from: *from, action: a.to_string(), to: *to })
                .collect(),
        }
        .serialize(serializer)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Explores every state reachable from `t`.
pub fn build_lts(t: &ProcessTerm, ctx: &SpecContext) -> Result<Lts, NormalizeError> {
    let normalizer = Normalizer::new(ctx);
    // Reject open terms up front; residuals of closed terms stay closed.
    normalizer.head_normal_form(t)?;

    let mut states = vec![State::Term(t.clone())];
    let mut index: HashMap<ProcessTerm, usize> = HashMap::from([(t.clone(), 0)]);
    let mut done: Option<usize> = None;
    let mut transitions = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        let State::Term(term) = states[i].clone() else { continue };
        for step in normalizer.head_normal_form(&term)? {
            let target = match step.residual {
                None => *done.get_or_insert_with(|| {
                    states.push(State::Done);
                    states.len() - 1
                }),
                Some(rest) => match index.get(&rest) {
                    Some(&j) => j,
                    None => {
                        states.push(State::Term(rest.clone()));
                        let j = states.len() - 1;
                        index.insert(rest, j);
                        queue.push_back(j);
                        j
                    }
                },
            };
            transitions.insert((i, step.action, target));
        }
    }

    Ok(Lts { states, initial: 0, transitions })
}

/// Coarsest stable partition of the disjoint union, as a block number per state.
fn refine(systems: &[&Lts]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = systems
        .iter()
        .map(|l| (0..l.num_states()).map(|s| usize::from(l.is_done(s))).collect())
        .collect();
    let mut count = blocks.iter().flatten().collect::<BTreeSet<_>>().len();
    let outgoing: Vec<Vec<Vec<(&ActionLiteral, usize)>>> = systems
        .iter()
        .map(|l| {
            let mut out = vec![Vec::new(); l.num_states()];
            for (s, a, t) in &l.transitions {
                out[*s].push((a, *t));
            }
            out
        })
        .collect();

    loop {
        let mut ids: HashMap<(usize, Vec<(&ActionLiteral, usize)>), usize> = HashMap::new();
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(systems.len());
        for (k, l) in systems.iter().enumerate() {
            let mut row = Vec::with_capacity(l.num_states());
            for s in 0..l.num_states() {
                let mut signature: Vec<(&ActionLiteral, usize)> =
                    outgoing[k][s].iter().map(|(a, t)| (*a, blocks[k][*t])).collect();
                signature.sort();
                signature.dedup();
                let fresh = ids.len();
                row.push(*ids.entry((blocks[k][s], signature)).or_insert(fresh));
            }
            next.push(row);
        }
        let new_count = ids.len();
        blocks = next;
        if new_count == count {
            return blocks;
        }
        count = new_count;
    }
}

/// Strong bisimilarity of the initial states, with successful termination
/// distinguished from deadlock.
pub fn bisimilar(l1: &Lts, l2: &Lts) -> bool {
    let blocks = refine(&[l1, l2]);
    blocks[0][l1.initial] == blocks[1][l2.initial]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meadow::MeadowKind;
    use crate::process::{ActionName, Alphabet, CommSpec};
    use ProcessTerm as P;

    fn ctx() -> SpecContext {
        let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
        let mut g = CommSpec::new();
        g.insert_symmetric(ActionName::new("a").unwrap(), ActionName::new("b").unwrap(), ActionName::new("c").unwrap());
        SpecContext::new(alphabet, g, MeadowKind::prime_field(3).unwrap()).unwrap()
    }

    fn lts(t: &P) -> Lts {
        build_lts(t, &ctx()).unwrap()
    }

    #[test]
    fn single_action() {
        let l = lts(&P::act("a"));
        assert_eq!(l.num_states(), 2);
        assert_eq!(l.num_transitions(), 1);
        assert_eq!(l.done_state(), Some(1));
    }

    #[test]
    fn deadlock_has_one_state() {
        let l = lts(&P::Deadlock);
        assert_eq!(l.num_states(), 1);
        assert_eq!(l.num_transitions(), 0);
        assert_eq!(l.done_state(), None);
    }

    #[test]
    fn merge_with_communication() {
        // a || b: initial, b (after a), a (after b), done.
        let l = lts(&P::par(P::act("a"), P::act("b")));
        assert_eq!(l.num_states(), 4);
        let labels: BTreeSet<String> = l.successors(0).map(|(a, _)| a.to_string()).collect();
        assert_eq!(labels, BTreeSet::from(["a".into(), "b".into(), "c".into()]));
        let (_, after_a) = l.successors(0).find(|(a, _)| a.to_string() == "a").unwrap();
        let next: Vec<String> = l.successors(after_a).map(|(a, _)| a.to_string()).collect();
        assert_eq!(next, ["b"]);
    }

    #[test]
    fn bisimilarity_examples() {
        assert!(bisimilar(&lts(&P::alt(P::act("a"), P::act("a"))), &lts(&P::act("a"))));
        let l = P::seq(P::act("a"), P::alt(P::act("b"), P::act("c")));
        let r = P::alt(P::seq(P::act("a"), P::act("b")), P::seq(P::act("a"), P::act("c")));
        assert!(!bisimilar(&lts(&l), &lts(&r)));
        assert!(bisimilar(&lts(&P::Deadlock), &lts(&P::Deadlock)));
    }

    #[test]
    fn termination_differs_from_deadlock() {
        assert!(!bisimilar(&lts(&P::act("a")), &lts(&P::seq(P::act("a"), P::Deadlock))));
        assert!(!bisimilar(&lts(&P::act("a")), &lts(&P::alt(P::act("a"), P::seq(P::act("a"), P::Deadlock)))));
    }

    #[test]
    fn dot_output() {
        let dot = lts(&P::act("a")).to_dot();
        assert!(dot.contains("s1 [shape=doublecircle"));
        assert!(dot.contains("s0 -> s1 [label=\"a\"]"));
        let dot = lts(&P::Deadlock).to_dot();
        assert!(!dot.contains("s0 ->"));
    }

    #[test]
    fn json_and_text_output() {
        let l = lts(&P::act("a"));
        let json = serde_json::to_value(&l).unwrap();
        assert_eq!(json["initial"], 0);
        assert_eq!(json["states"][1]["done"], true);
        assert_eq!(json["transitions"][0]["action"], "a");
        assert_eq!(l.to_string(), "2 states, 1 transitions, initial s0\n  s0 = a\n  s1 = done\n  s0 --a--> s1\n");
    }

    #[test]
    fn open_terms_have_no_lts() {
        assert!(build_lts(&P::var("x"), &ctx()).is_err());
    }
}
