//! Meadow-enriched ACP process algebra.
//!
//! * [`meadow`]: zero-totalized arithmetic (`Q0`, `F_p`, the trivial meadow)
//!   and checks of the meadow equations.
//! * [`process`]: process terms, alphabets, communication functions and
//!   specification contexts.
//! * [`normalizer`]: canonical basic terms for closed terms, deciding equality.
//! * [`lts`]: an independent bisimulation oracle over labelled transition systems.
//! * [`harness`]: the process axioms as machine-checked formulas.
//! * [`speclang`]: the `.acpm` text format.

pub mod harness;
pub mod lts;
pub mod meadow;
pub mod normalizer;
pub mod process;
pub mod report;
pub mod speclang;
