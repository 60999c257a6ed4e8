//! Trace properties: guarded formulas, lemmas and their evaluation.

mod checker;
mod eval;
mod formula;

pub use checker::{check_lemma, check_theory, check_with, LemmaReport, Verdict};
pub use eval::{atom_patterns, holds, is_relevant, match_fact, Assignment, Evaluator};
pub use formula::{check_guarded, Atom, Binders, Formula, GuardIssue, Lemma, LemmaMode, QVar, Quantifier, TimeVar, TraceFormula};
