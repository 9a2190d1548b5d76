//! Process terms over the two-sorted signature: ACP operators on the process
//! sort, meadow terms on the quantity sort, and the two operators that connect
//! them (data-handling actions and the guarded command).

mod comm;
mod context;
mod term;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::meadow::MeadowValue;

pub use comm::{CommSpec, CommViolation, ValidationReport};
pub use context::SpecContext;
pub use term::ProcessTerm;

/// Words that cannot name an action.
pub const RESERVED: &[&str] = &["delta", "encap"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcessError {
    #[error("`{0}` is not a valid action name")]
    InvalidActionName(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("undefined name `{0}`")]
    UndefinedName(String),
    #[error("`{0}` is defined more than once")]
    Redefinition(String),
    #[error("definition of `{0}` refers to itself")]
    RecursiveDefinition(String),
    #[error("definition of `{0}` must be a closed process term")]
    OpenDefinition(String),
    #[error("action `{name}` declared with arity {declared} but used with {used} argument(s)")]
    ArityMismatch { name: String, declared: usize, used: usize },
    #[error("invalid communication function: {0}")]
    InvalidComm(ValidationReport),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// An atomic action name. `delta` is never an action name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionName(String);

impl ActionName {
    pub fn new(name: &str) -> Result<Self, ProcessError> {
        if is_identifier(name) && !RESERVED.contains(&name) {
            Ok(ActionName(name.to_string()))
        } else {
            Err(ProcessError::InvalidActionName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The finite set of action names of a specification.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet(BTreeSet<ActionName>);

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, ProcessError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| ActionName::new(n.as_ref()))
            .collect::<Result<_, _>>()
            .map(Alphabet)
    }

    pub fn insert(&mut self, name: ActionName) {
        self.0.insert(name);
    }

    pub fn contains(&self, name: &ActionName) -> bool {
        self.0.contains(name)
    }

    pub fn contains_str(&self, name: &str) -> bool {
        self.0.iter().any(|n| n.as_str() == name)
    }

    pub fn get(&self, name: &str) -> Option<&ActionName> {
        self.0.iter().find(|n| n.as_str() == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActionName> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds an encapsulation set, rejecting names outside the alphabet.
    pub fn encap_set<I, S>(&self, names: I) -> Result<EncapSet, ProcessError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for n in names {
            match self.get(n.as_ref()) {
                Some(name) => {
                    set.insert(name.clone());
                }
                None => return Err(ProcessError::UnknownAction(n.as_ref().to_string())),
            }
        }
        Ok(EncapSet(set))
    }

    /// Every subset of the alphabet, smallest first.
    pub fn subsets(&self) -> Vec<EncapSet> {
        let names: Vec<&ActionName> = self.0.iter().collect();
        let mut out: Vec<EncapSet> = (0u64..1 << names.len())
            .map(|mask| {
                EncapSet(
                    names
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, n)| (*n).clone())
                        .collect(),
                )
            })
            .collect();
        out.sort_by_key(|s| s.0.len());
        out
    }
}

/// A set `H` of action names blocked by encapsulation. Only obtainable from
/// [`Alphabet::encap_set`], so it is always a subset of some alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncapSet(BTreeSet<ActionName>);

impl EncapSet {
    pub fn contains(&self, name: &ActionName) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActionName> {
        self.0.iter()
    }

    pub fn is_subset_of(&self, alphabet: &Alphabet) -> bool {
        self.0.iter().all(|n| alphabet.contains(n))
    }
}

impl fmt::Display for EncapSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(ActionName::as_str).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// A ground atomic action: a name with a (possibly empty) tuple of values.
/// The empty tuple is the plain constant action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionLiteral {
    pub name: ActionName,
    pub args: Vec<MeadowValue>,
}

impl ActionLiteral {
    pub fn constant(name: ActionName) -> Self {
        ActionLiteral { name, args: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn to_term(&self) -> ProcessTerm {
        if self.args.is_empty() {
            ProcessTerm::Action(self.name.clone())
        } else {
            ProcessTerm::DataAction(
                self.name.clone(),
                self.args.iter().map(crate::meadow::QuantityTerm::literal).collect(),
            )
        }
    }
}

impl Ord for ActionLiteral {
    /// Name, then arity, then arguments left to right.
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then(self.args.len().cmp(&other.args.len()))
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl PartialOrd for ActionLiteral {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ActionLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.name);
        }
        let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
        write!(f, "{}({})", self.name, args.join(","))
    }
}
