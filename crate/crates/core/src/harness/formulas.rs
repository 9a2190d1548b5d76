use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gen::tuples;
use super::{Axiom, Formula, Instance, Plan, Pools};
use crate::meadow::{MeadowValue, QuantityTerm as Q};
use crate::process::{ActionLiteral, ActionName, EncapSet, ProcessTerm as P};

pub const ACP_IDS: [&str; 24] = [
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13", "A14", "A15",
    "A16", "A17", "A18", "A19", "A20", "A21", "A22", "A23", "A24",
];

pub const ENRICHED_IDS: [&str; 17] = [
    "E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E10", "E11", "E12", "E13", "E14", "E15",
    "E16", "E17",
];

pub const DERIVED_IDS: [&str; 3] = ["D1", "D2", "D3"];

/// Enumerations longer than this are thinned to a fixed pseudo-random subset.
const MAX_ENUMERATED: usize = 3000;

fn x() -> P {
    P::var("x")
}
fn y() -> P {
    P::var("y")
}
fn z() -> P {
    P::var("z")
}
fn a() -> P {
    P::var("a")
}
fn b() -> P {
    P::var("b")
}
fn u() -> Q {
    Q::var("u")
}
fn v() -> Q {
    Q::var("v")
}
/// `q / q`
fn unit(q: Q) -> Q {
    Q::div(q.clone(), q)
}

fn sampled(id: &'static str, name: &'static str, lhs: &'static str, rhs: &'static str, build: fn(&EncapSet) -> Formula) -> Axiom {
    Axiom { id, name, lhs, rhs, plan: Plan::Sampled { build, uses_h: false } }
}

fn sampled_h(id: &'static str, name: &'static str, lhs: &'static str, rhs: &'static str, build: fn(&EncapSet) -> Formula) -> Axiom {
    Axiom { id, name, lhs, rhs, plan: Plan::Sampled { build, uses_h: true } }
}

fn enumerated(id: &'static str, name: &'static str, lhs: &'static str, rhs: &'static str, f: fn(&Pools) -> Vec<Instance>) -> Axiom {
    Axiom { id, name, lhs, rhs, plan: Plan::Enumerated(f) }
}

fn eq(l: P, r: P) -> Formula {
    Formula::Equal(l, r)
}

fn instance<const N: usize>(pairs: [(&str, String); N], formula: Formula) -> Instance {
    Instance {
        assignment: pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        formula,
    }
}

fn show_tuple(values: &[MeadowValue]) -> String {
    let shown: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("({})", shown.join(","))
}

fn literal(name: &ActionName, args: &[MeadowValue]) -> P {
    ActionLiteral { name: name.clone(), args: args.to_vec() }.to_term()
}

fn thin(mut instances: Vec<Instance>) -> Vec<Instance> {
    if instances.len() > MAX_ENUMERATED {
        instances.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
        instances.truncate(MAX_ENUMERATED);
    }
    instances
}

fn encap_constants(pools: &Pools, blocked: bool) -> Vec<Instance> {
    let mut out = Vec::new();
    for h in &pools.subsets {
        for e in pools.ctx.alphabet().iter().filter(|e| h.contains(e) == blocked) {
            let rhs = if blocked { P::Deadlock } else { P::Action(e.clone()) };
            out.push(instance(
                [("H", h.to_string()), ("e", e.to_string())],
                eq(P::encap(h.clone(), P::Action(e.clone())), rhs),
            ));
        }
    }
    thin(out)
}

fn encap_data(pools: &Pools, blocked: bool) -> Vec<Instance> {
    let mut out = Vec::new();
    for h in &pools.subsets {
        for e in pools.ctx.alphabet().iter().filter(|e| h.contains(e) == blocked) {
            for n in 1..=2 {
                for args in tuples(&pools.values, n) {
                    let act = literal(e, &args);
                    let rhs = if blocked { P::Deadlock } else { act.clone() };
                    out.push(instance(
                        [("H", h.to_string()), ("e", e.to_string()), ("u", show_tuple(&args))],
                        eq(P::encap(h.clone(), act), rhs),
                    ));
                }
            }
        }
    }
    thin(out)
}

/// `e(us) | e'(vs)` for every pair of names and argument tuples of the given
/// lengths that `keep` accepts.
fn data_comm_pairs(
    pools: &Pools,
    lengths: &[(usize, usize)],
    keep: impl Fn(Option<&ActionName>) -> bool,
    rhs: impl Fn(&ActionName, &ActionName, &[MeadowValue], &[MeadowValue]) -> P,
) -> Vec<Instance> {
    let mut out = Vec::new();
    let names: Vec<&ActionName> = pools.ctx.alphabet().iter().collect();
    for e in &names {
        for e2 in &names {
            let result = pools.ctx.comm().get(e, e2);
            if !keep(result) {
                continue;
            }
            for &(n, m) in lengths {
                for us in tuples(&pools.values, n) {
                    for vs in tuples(&pools.values, m) {
                        out.push(instance(
                            [
                                ("e", e.to_string()),
                                ("e'", e2.to_string()),
                                ("u", show_tuple(&us)),
                                ("v", show_tuple(&vs)),
                            ],
                            eq(P::comm_merge(literal(e, &us), literal(e2, &vs)), rhs(e, e2, &us, &vs)),
                        ));
                    }
                }
            }
        }
    }
    thin(out)
}

pub(super) fn acp() -> Vec<Axiom> {
    vec![
        sampled("A1", "commutativity of +", "x + y", "y + x", |_| eq(P::alt(x(), y()), P::alt(y(), x()))),
        sampled("A2", "associativity of +", "(x + y) + z", "x + (y + z)", |_| {
            eq(P::alt(P::alt(x(), y()), z()), P::alt(x(), P::alt(y(), z())))
        }),
        sampled("A3", "idempotence of +", "x + x", "x", |_| eq(P::alt(x(), x()), x())),
        sampled("A4", "right distributivity", "(x + y) . z", "x . z + y . z", |_| {
            eq(P::seq(P::alt(x(), y()), z()), P::alt(P::seq(x(), z()), P::seq(y(), z())))
        }),
        sampled("A5", "associativity of .", "(x . y) . z", "x . (y . z)", |_| {
            eq(P::seq(P::seq(x(), y()), z()), P::seq(x(), P::seq(y(), z())))
        }),
        sampled("A6", "deadlock is a unit of +", "x + delta", "x", |_| eq(P::alt(x(), P::Deadlock), x())),
        sampled("A7", "deadlock is a left zero of .", "delta . x", "delta", |_| {
            eq(P::seq(P::Deadlock, x()), P::Deadlock)
        }),
        enumerated("A8", "encapsulation passes e if e not in H", "encap(H, e)", "e", |p| encap_constants(p, false)),
        enumerated("A9", "encapsulation blocks e if e in H", "encap(H, e)", "delta", |p| encap_constants(p, true)),
        enumerated("A10", "encapsulation of deadlock", "encap(H, delta)", "delta", |p| {
            p.subsets
                .iter()
                .map(|h| instance([("H", h.to_string())], eq(P::encap(h.clone(), P::Deadlock), P::Deadlock)))
                .collect()
        }),
        sampled_h("A11", "encapsulation distributes over +", "encap(H, x + y)", "encap(H, x) + encap(H, y)", |h| {
            eq(P::encap(h.clone(), P::alt(x(), y())), P::alt(P::encap(h.clone(), x()), P::encap(h.clone(), y())))
        }),
        sampled_h("A12", "encapsulation distributes over .", "encap(H, x . y)", "encap(H, x) . encap(H, y)", |h| {
            eq(P::encap(h.clone(), P::seq(x(), y())), P::seq(P::encap(h.clone(), x()), P::encap(h.clone(), y())))
        }),
        sampled("A13", "expansion of merge", "x || y", "(x |_ y + y |_ x) + x | y", |_| {
            eq(
                P::par(x(), y()),
                P::alt(P::alt(P::left_merge(x(), y()), P::left_merge(y(), x())), P::comm_merge(x(), y())),
            )
        }),
        sampled("A14", "left merge of an action", "a |_ x", "a . x", |_| eq(P::left_merge(a(), x()), P::seq(a(), x()))),
        sampled("A15", "left merge of a prefix", "a . x |_ y", "a . (x || y)", |_| {
            eq(P::left_merge(P::seq(a(), x()), y()), P::seq(a(), P::par(x(), y())))
        }),
        sampled("A16", "left merge distributes over +", "(x + y) |_ z", "x |_ z + y |_ z", |_| {
            eq(P::left_merge(P::alt(x(), y()), z()), P::alt(P::left_merge(x(), z()), P::left_merge(y(), z())))
        }),
        sampled("A17", "communication with a prefix", "a | b . x", "(a | b) . x", |_| {
            eq(P::comm_merge(a(), P::seq(b(), x())), P::seq(P::comm_merge(a(), b()), x()))
        }),
        sampled("A18", "communication of two prefixes", "a . x | b . y", "(a | b) . (x || y)", |_| {
            eq(
                P::comm_merge(P::seq(a(), x()), P::seq(b(), y())),
                P::seq(P::comm_merge(a(), b()), P::par(x(), y())),
            )
        }),
        sampled("A19", "communication distributes over +", "(x + y) | z", "x | z + y | z", |_| {
            eq(P::comm_merge(P::alt(x(), y()), z()), P::alt(P::comm_merge(x(), z()), P::comm_merge(y(), z())))
        }),
        sampled("A20", "commutativity of |", "x | y", "y | x", |_| eq(P::comm_merge(x(), y()), P::comm_merge(y(), x()))),
        sampled("A21", "associativity of |", "(x | y) | z", "x | (y | z)", |_| {
            eq(P::comm_merge(P::comm_merge(x(), y()), z()), P::comm_merge(x(), P::comm_merge(y(), z())))
        }),
        sampled("A22", "deadlock does not communicate", "delta | x", "delta", |_| {
            eq(P::comm_merge(P::Deadlock, x()), P::Deadlock)
        }),
        enumerated("A23", "constants are atomic", "isact(e)", "", |p| {
            p.ctx
                .alphabet()
                .iter()
                .map(|e| instance([("e", e.to_string())], Formula::Atomic(P::Action(e.clone()))))
                .collect()
        }),
        sampled("A24", "communication of atomic actions is atomic", "isact(x) & isact(y) => isact(x | y)", "", |_| {
            Formula::AtomicImplies(x(), y(), P::comm_merge(x(), y()))
        }),
    ]
}

pub(super) fn enriched() -> Vec<Axiom> {
    vec![
        sampled("E1", "zero guard", "[0] -> x", "x", |_| eq(P::guard(Q::Zero, x()), x())),
        sampled("E2", "one guard", "[1] -> x", "delta", |_| eq(P::guard(Q::One, x()), P::Deadlock)),
        sampled("E3", "guard normalization", "[u] -> x", "[u / u] -> x", |_| {
            eq(P::guard(u(), x()), P::guard(unit(u()), x()))
        }),
        sampled("E4", "nested guards", "[u] -> [v] -> x", "[1 - (1 - u / u) * (1 - v / v)] -> x", |_| {
            let cond = Q::sub(Q::One, Q::mul(Q::sub(Q::One, unit(u())), Q::sub(Q::One, unit(v()))));
            eq(P::guard(u(), P::guard(v(), x())), P::guard(cond, x()))
        }),
        sampled("E5", "sum of guards", "[u] -> x + [v] -> x", "[u / u * (v / v)] -> x", |_| {
            eq(P::alt(P::guard(u(), x()), P::guard(v(), x())), P::guard(Q::mul(unit(u()), unit(v())), x()))
        }),
        sampled("E6", "guarded deadlock", "[u] -> delta", "delta", |_| eq(P::guard(u(), P::Deadlock), P::Deadlock)),
        sampled("E7", "guard distributes over +", "[u] -> (x + y)", "[u] -> x + [u] -> y", |_| {
            eq(P::guard(u(), P::alt(x(), y())), P::alt(P::guard(u(), x()), P::guard(u(), y())))
        }),
        sampled("E8", "guard of a sequence", "[u] -> (x . y)", "([u] -> x) . y", |_| {
            eq(P::guard(u(), P::seq(x(), y())), P::seq(P::guard(u(), x()), y()))
        }),
        sampled("E9", "guard and left merge", "([u] -> x) |_ y", "[u] -> (x |_ y)", |_| {
            eq(P::left_merge(P::guard(u(), x()), y()), P::guard(u(), P::left_merge(x(), y())))
        }),
        sampled("E10", "guard and communication", "([u] -> x) | y", "[u] -> (x | y)", |_| {
            eq(P::comm_merge(P::guard(u(), x()), y()), P::guard(u(), P::comm_merge(x(), y())))
        }),
        sampled_h("E11", "guard and encapsulation", "encap(H, [u] -> x)", "[u] -> encap(H, x)", |h| {
            eq(P::encap(h.clone(), P::guard(u(), x())), P::guard(u(), P::encap(h.clone(), x())))
        }),
        enumerated(
            "E12",
            "communication of data actions if e | e' = e''",
            "e(u1,...,un) | e'(v1,...,vn)",
            "[u1 - v1] -> ... -> [un - vn] -> e''(u1,...,un)",
            |p| {
                data_comm_pairs(p, &[(0, 0), (1, 1), (2, 2)], |r| r.is_some(), |e, e2, us, vs| {
                    let result = p.ctx.comm().get(e, e2).expect("filtered to defined communications");
                    us.iter().zip(vs).rev().fold(literal(result, us), |inner, (ui, vi)| {
                        P::guard(Q::sub(Q::literal(ui), Q::literal(vi)), inner)
                    })
                })
            },
        ),
        enumerated(
            "E13",
            "data actions do not communicate if e | e' = delta",
            "e(u1,...,un) | e'(v1,...,vn)",
            "delta",
            |p| data_comm_pairs(p, &[(0, 0), (1, 1), (2, 2)], |r| r.is_none(), |_, _, _, _| P::Deadlock),
        ),
        enumerated(
            "E14",
            "data actions of different arity do not communicate",
            "e(u1,...,un) | e'(v1,...,vm)",
            "delta  if n != m",
            |p| {
                let lengths = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
                data_comm_pairs(p, &lengths, |_| true, |_, _, _, _| P::Deadlock)
            },
        ),
        enumerated("E15", "encapsulation passes e(u) if e not in H", "encap(H, e(u1,...,un))", "e(u1,...,un)", |p| {
            encap_data(p, false)
        }),
        enumerated("E16", "encapsulation blocks e(u) if e in H", "encap(H, e(u1,...,un))", "delta", |p| {
            encap_data(p, true)
        }),
        enumerated("E17", "data actions are atomic", "isact(e(u1,...,un))", "", |p| {
            let mut out = Vec::new();
            for e in p.ctx.alphabet().iter() {
                for n in 0..=2 {
                    for args in tuples(&p.values, n) {
                        out.push(instance(
                            [("e", e.to_string()), ("u", show_tuple(&args))],
                            Formula::Atomic(literal(e, &args)),
                        ));
                    }
                }
            }
            thin(out)
        }),
    ]
}

pub(super) fn derived() -> Vec<Axiom> {
    vec![
        sampled("D1", "communication with a trailing action", "a . x | b", "(a | b) . x", |_| {
            eq(P::comm_merge(P::seq(a(), x()), b()), P::seq(P::comm_merge(a(), b()), x()))
        }),
        sampled("D2", "communication distributes over + on the right", "x | (y + z)", "x | y + x | z", |_| {
            eq(P::comm_merge(x(), P::alt(y(), z())), P::alt(P::comm_merge(x(), y()), P::comm_merge(x(), z())))
        }),
        sampled("D3", "guard on the right of communication", "x | [u] -> y", "[u] -> (x | y)", |_| {
            eq(P::comm_merge(x(), P::guard(u(), y())), P::guard(u(), P::comm_merge(x(), y())))
        }),
    ]
}
