//! Coherent-logic toolkit: a forward-chaining prover for the coherent
//! fragment of first-order logic, natural-deduction proof objects with an
//! independent checker, an XML interchange document model, and text
//! backends targeting Isabelle/Isar, Coq, LaTeX, HTML and plain text.

pub mod engine;
pub mod export;
pub mod logic;
pub mod proof;
pub mod tptp;
pub mod vernacular;

pub use logic::{
    Atom, CoherentFormula, Constant, Disjunct, NamedFormula, PredicateSymbol, Role, Signature,
    Term, Theory, Variable,
};
pub use proof::{CheckResult, ClosingKind, Outcome, ProofClosing, ProofStep, ProofTree, StepKind};
pub use vernacular::{Chapter, ChapterItem, Frontpage, VernacularDocument};
