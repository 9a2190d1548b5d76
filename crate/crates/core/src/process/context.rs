use std::collections::BTreeMap;

use super::{ActionName, Alphabet, CommSpec, EncapSet, ProcessError, ProcessTerm};
use crate::meadow::MeadowKind;

/// Everything a process term is interpreted against: the alphabet, the
/// communication function, the meadow of data values, named encapsulation
/// sets and non-recursive process definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecContext {
    alphabet: Alphabet,
    comm: CommSpec,
    meadow: MeadowKind,
    arities: BTreeMap<ActionName, usize>,
    sets: BTreeMap<String, EncapSet>,
    definitions: Vec<(String, ProcessTerm)>,
}

impl SpecContext {
    /// Fails unless `comm` is symmetric, associativity-compatible and over `alphabet`.
    pub fn new(alphabet: Alphabet, comm: CommSpec, meadow: MeadowKind) -> Result<Self, ProcessError> {
        let report = comm.validate(&alphabet);
        if !report.is_valid() {
            return Err(ProcessError::InvalidComm(report));
        }
        Ok(SpecContext {
            alphabet,
            comm,
            meadow,
            arities: BTreeMap::new(),
            sets: BTreeMap::new(),
            definitions: Vec::new(),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn comm(&self) -> &CommSpec {
        &self.comm
    }

    pub fn meadow(&self) -> MeadowKind {
        self.meadow
    }

    /// The same context over a different meadow.
    pub fn with_meadow(&self, meadow: MeadowKind) -> Self {
        SpecContext { meadow, ..self.clone() }
    }

    pub fn declare_arity(&mut self, name: &ActionName, arity: usize) -> Result<(), ProcessError> {
        if !self.alphabet.contains(name) {
            return Err(ProcessError::UnknownAction(name.to_string()));
        }
        self.arities.insert(name.clone(), arity);
        Ok(())
    }

    pub fn arity(&self, name: &ActionName) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn define_set(&mut self, name: &str, set: EncapSet) -> Result<(), ProcessError> {
        if self.sets.contains_key(name) {
            return Err(ProcessError::Redefinition(name.to_string()));
        }
        self.sets.insert(name.to_string(), set);
        Ok(())
    }

    pub fn set(&self, name: &str) -> Option<&EncapSet> {
        self.sets.get(name)
    }

    pub fn sets(&self) -> impl Iterator<Item = (&String, &EncapSet)> {
        self.sets.iter()
    }

    /// Adds a named process. The body may only mention earlier definitions,
    /// so definitions are acyclic by construction; it is stored inlined.
    pub fn define(&mut self, name: &str, body: ProcessTerm) -> Result<(), ProcessError> {
        if self.alphabet.contains_str(name) || self.definition(name).is_some() {
            return Err(ProcessError::Redefinition(name.to_string()));
        }
        if body.free_process_vars().contains(name) {
            return Err(ProcessError::RecursiveDefinition(name.to_string()));
        }
        self.check_arities(&body)?;
        let body = self.inline_definitions(&body)?;
        if !body.is_quantity_ground() {
            return Err(ProcessError::OpenDefinition(name.to_string()));
        }
        self.definitions.push((name.to_string(), body));
        Ok(())
    }

    pub fn definition(&self, name: &str) -> Option<&ProcessTerm> {
        self.definitions.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&str, &ProcessTerm)> {
        self.definitions.iter().map(|(n, t)| (n.as_str(), t))
    }

    /// Replaces every reference to a named definition by its body.
    pub fn inline_definitions(&self, t: &ProcessTerm) -> Result<ProcessTerm, ProcessError> {
        let mut bindings = BTreeMap::new();
        for name in t.free_process_vars() {
            match self.definition(&name) {
                Some(body) => {
                    bindings.insert(name, body.clone());
                }
                None => return Err(ProcessError::UndefinedName(name)),
            }
        }
        Ok(t.substitute(&bindings))
    }

    /// Checks action names against the alphabet and declared arities.
    pub fn check_arities(&self, t: &ProcessTerm) -> Result<(), ProcessError> {
        for (name, used) in t.action_uses() {
            if !self.alphabet.contains(&name) {
                return Err(ProcessError::UnknownAction(name.to_string()));
            }
            if let Some(declared) = self.arity(&name) {
                if declared != used {
                    return Err(ProcessError::ArityMismatch { name: name.to_string(), declared, used });
                }
            }
        }
        Ok(())
    }
}
