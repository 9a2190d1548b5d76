//! Structured results of axiom checks, shared by the meadow and process suites.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The normal-form check and the bisimulation oracle gave different verdicts.
    Disagreement,
    Skipped,
}

impl Status {
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Disagreement)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Disagreement => "DISAGREE",
            Status::Skipped => "SKIP",
        };
        f.pad(s)
    }
}

/// The first failing instance of a formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub assignment: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let assignment: Vec<String> =
            self.assignment.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        write!(f, "{{{}}}: {} vs {}", assignment.join(", "), self.lhs, self.rhs)?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub id: String,
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub status: Status,
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Outcome of a non-equational property such as the separation axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl PropertyResult {
    pub fn pass() -> Self {
        PropertyResult { status: Status::Pass, counterexample: None }
    }

    pub fn fail(counterexample: Counterexample) -> Self {
        PropertyResult { status: Status::Fail, counterexample: Some(counterexample) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub suite: String,
    pub meadow: String,
    pub mode: String,
    pub axioms: Vec<AxiomResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<PropertyResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cancellation: Option<PropertyResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub general_inverse: Option<PropertyResult>,
}

impl AxiomReport {
    /// Number of failing equations; the model properties are not counted.
    pub fn failures(&self) -> usize {
        self.axioms.iter().filter(|a| a.status.is_failure()).count()
    }

    pub fn all_pass(&self) -> bool {
        self.failures() == 0
    }

    pub fn get(&self, id: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.id == id)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} [{} / {}]", self.suite, self.meadow, self.mode)?;
        for a in &self.axioms {
            let formula = if a.rhs.is_empty() {
                a.lhs.clone()
            } else {
                format!("{} = {}", a.lhs, a.rhs)
            };
            writeln!(f, "{:<8} {:<8} {}  [{} instances]", a.status, a.id, formula, a.instances)?;
            if let Some(cex) = &a.counterexample {
                writeln!(f, "         counterexample {cex}")?;
            }
        }
        for (label, prop) in [
            ("separation", &self.separation),
            ("cancellation", &self.cancellation),
            ("general inverse law", &self.general_inverse),
        ] {
            if let Some(p) = prop {
                writeln!(f, "{:<8} {label}", p.status)?;
                if let Some(cex) = &p.counterexample {
                    writeln!(f, "         counterexample {cex}")?;
                }
            }
        }
        Ok(())
    }
}
