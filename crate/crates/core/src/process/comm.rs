use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{ActionName, Alphabet};

/// The communication function: a partial map from pairs of action names to
/// action names. Pairs without an entry communicate to `delta`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommSpec(BTreeMap<(ActionName, ActionName), ActionName>);

impl CommSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `γ(left, right) = result` in one direction only.
    pub fn insert(&mut self, left: ActionName, right: ActionName, result: ActionName) {
        self.0.insert((left, right), result);
    }

    /// Sets both `γ(left, right)` and `γ(right, left)`.
    pub fn insert_symmetric(&mut self, left: ActionName, right: ActionName, result: ActionName) {
        self.0.insert((right.clone(), left.clone()), result.clone());
        self.0.insert((left, right), result);
    }

    pub fn get(&self, left: &ActionName, right: &ActionName) -> Option<&ActionName> {
        self.0.get(&(left.clone(), right.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActionName, &ActionName, &ActionName)> {
        self.0.iter().map(|((l, r), c)| (l, r, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn compose(&self, left: Option<&ActionName>, right: Option<&ActionName>) -> Option<&ActionName> {
        self.get(left?, right?)
    }

    /// Checks symmetry and compatibility with associativity of the
    /// communication merge, and that every name is in `alphabet`.
    pub fn validate(&self, alphabet: &Alphabet) -> ValidationReport {
        let mut violations = Vec::new();

        let mut unknown = BTreeSet::new();
        for (l, r, c) in self.iter() {
            for n in [l, r, c] {
                if !alphabet.contains(n) {
                    unknown.insert(n.clone());
                }
            }
        }
        violations.extend(unknown.into_iter().map(CommViolation::UnknownAction));

        for (l, r, c) in self.iter() {
            let back = self.get(r, l);
            if back != Some(c) {
                violations.push(CommViolation::Asymmetric {
                    left: l.clone(),
                    right: r.clone(),
                    forward: c.clone(),
                    backward: back.cloned(),
                });
            }
        }

        // Every name that takes part in γ, plus the alphabet.
        let mut names: BTreeSet<&ActionName> = alphabet.iter().collect();
        for (l, r, c) in self.iter() {
            names.extend([l, r, c]);
        }
        for &x in &names {
            for &y in &names {
                for &z in &names {
                    let left = self.compose(self.get(x, y), Some(z));
                    let right = self.compose(Some(x), self.get(y, z));
                    if left != right {
                        violations.push(CommViolation::NonAssociative {
                            triple: (x.clone(), y.clone(), z.clone()),
                            left: left.cloned(),
                            right: right.cloned(),
                        });
                    }
                }
            }
        }

        ValidationReport { violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommViolation {
    UnknownAction(ActionName),
    Asymmetric {
        left: ActionName,
        right: ActionName,
        forward: ActionName,
        backward: Option<ActionName>,
    },
    NonAssociative {
        triple: (ActionName, ActionName, ActionName),
        left: Option<ActionName>,
        right: Option<ActionName>,
    },
}

fn or_delta(n: &Option<ActionName>) -> String {
    n.as_ref().map_or_else(|| "delta".to_string(), ToString::to_string)
}

impl fmt::Display for CommViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommViolation::UnknownAction(n) => write!(f, "action `{n}` is not declared"),
            CommViolation::Asymmetric { left, right, forward, backward } => write!(
                f,
                "asymmetric at ({left},{right}): {left}|{right} = {forward} but {right}|{left} = {}",
                or_delta(backward)
            ),
            CommViolation::NonAssociative { triple: (x, y, z), left, right } => write!(
                f,
                "not associative at ({x},{y},{z}): ({x}|{y})|{z} = {} but {x}|({y}|{z}) = {}",
                or_delta(left),
                or_delta(right)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<CommViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", lines.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> ActionName {
        ActionName::new(s).unwrap()
    }

    #[test]
    fn symmetric_singleton_is_valid() {
        let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
        let mut g = CommSpec::new();
        g.insert(n("a"), n("b"), n("c"));
        g.insert(n("b"), n("a"), n("c"));
        assert!(g.validate(&alphabet).is_valid());
    }

    #[test]
    fn one_sided_entry_is_asymmetric() {
        let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
        let mut g = CommSpec::new();
        g.insert(n("a"), n("b"), n("c"));
        let report = g.validate(&alphabet);
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("asymmetric at (a,b)")));
    }

    #[test]
    fn chained_communication_breaks_associativity() {
        // (a|b)|d = c|d = e, but b|d = delta so a|(b|d) = delta.
        let alphabet = Alphabet::new(["a", "b", "c", "d", "e"]).unwrap();
        let mut g = CommSpec::new();
        g.insert_symmetric(n("a"), n("b"), n("c"));
        g.insert_symmetric(n("c"), n("d"), n("e"));
        let report = g.validate(&alphabet);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            CommViolation::NonAssociative { triple, left: Some(l), right: None }
                if *triple == (n("a"), n("b"), n("d")) && *l == n("e")
        )));
        assert!(report.violations.iter().all(|v| matches!(v, CommViolation::NonAssociative { .. })));
    }

    #[test]
    fn undeclared_result_is_reported() {
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let mut g = CommSpec::new();
        g.insert_symmetric(n("a"), n("b"), n("c"));
        assert!(g.validate(&alphabet).violations.contains(&CommViolation::UnknownAction(n("c"))));
    }

    // Brute-force associativity check over an explicit table, independent of
    // `validate`'s iteration order.
    fn associative_by_table(table: &BTreeMap<(usize, usize), usize>, size: usize) -> bool {
        let get = |x: Option<usize>, y: Option<usize>| x.zip(y).and_then(|k| table.get(&k).copied());
        (0..size).all(|x| {
            (0..size).all(|y| {
                (0..size).all(|z| get(get(Some(x), Some(y)), Some(z)) == get(Some(x), get(Some(y), Some(z))))
            })
        })
    }

    proptest! {
        #[test]
        fn symmetrized_maps_are_accepted_iff_associative(
            entries in proptest::collection::vec((0usize..4, 0usize..4, 0usize..4), 0..5)
        ) {
            let names = ["a", "b", "c", "d"];
            let alphabet = Alphabet::new(names).unwrap();
            let mut table = BTreeMap::new();
            let mut g = CommSpec::new();
            for (l, r, c) in entries {
                table.insert((l, r), c);
                table.insert((r, l), c);
            }
            for (&(l, r), &c) in &table {
                g.insert(n(names[l]), n(names[r]), n(names[c]));
            }
            // A later entry may overwrite one direction; keep the table symmetric.
            let symmetric = table.iter().all(|(&(l, r), c)| table.get(&(r, l)) == Some(c));
            let report = g.validate(&alphabet);
            prop_assert_eq!(report.is_valid(), symmetric && associative_by_table(&table, 4));
            if report.is_valid() {
                prop_assert!(g.validate(&alphabet).is_valid());
            }
        }
    }
}
