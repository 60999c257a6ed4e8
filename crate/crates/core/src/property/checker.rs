use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::eval::{atom_patterns, is_relevant, Evaluator};
use super::formula::{Lemma, LemmaMode};
use crate::execution::{Bounds, Engine, Explorer, SearchStats, Trace};
use crate::theory::Theory;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No violating trace within the bounds; `traces` prefixes were examined.
    VerifiedUpToBound { bounds: Bounds, traces: usize },
    Falsified(Trace),
    WitnessFound(Trace),
    NoWitnessUpToBound { bounds: Bounds, traces: usize },
}

impl Verdict {
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::Falsified(t) | Verdict::WitnessFound(t) => Some(t),
            _ => None,
        }
    }

    /// Stable lower-case tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::VerifiedUpToBound { .. } => "verified",
            Verdict::Falsified(_) => "falsified",
            Verdict::WitnessFound(_) => "witness-found",
            Verdict::NoWitnessUpToBound { .. } => "no-witness",
        }
    }

    /// The formula truth value a carried trace must have.
    pub fn claimed_truth(&self) -> Option<bool> {
        match self {
            Verdict::Falsified(_) => Some(false),
            Verdict::WitnessFound(_) => Some(true),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub verdict: Verdict,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

/// Decide a lemma by pruned bounded search.
pub fn check_lemma(theory: &Theory, lemma: &Lemma, bounds: Bounds) -> Verdict {
    check_with(&Engine::new(theory, bounds), lemma).verdict
}

/// Like [`check_lemma`], reusing an engine and reporting search statistics.
///
/// The event bound is deepened one step at a time, so a returned trace has
/// as few rule events as possible; among those it is the first in
/// exploration order. Statistics are those of the last search.
pub fn check_with(engine: &Engine, lemma: &Lemma) -> LemmaReport {
    let start = Instant::now();
    let rw = &engine.adversary.rewrite;
    let patterns = atom_patterns(&lemma.formula);
    let ordered = lemma.formula.uses_order();
    let want = lemma.mode == LemmaMode::ExistsTrace;
    let bounds = engine.bounds;
    let mut found = None;
    let mut stats = SearchStats::default();
    for max_events in 0..=bounds.max_events {
        let mut shallow = engine.clone();
        shallow.bounds.max_events = max_events;
        let (t, s) = Explorer::new(&shallow).search(
            |f| is_relevant(&patterns, f),
            ordered,
            |events| Evaluator::new(rw, events).holds(&lemma.formula) == want,
        );
        stats = s;
        if t.is_some() {
            found = t;
            break;
        }
    }
    let verdict = match (found, want) {
        (Some(t), true) => Verdict::WitnessFound(t),
        (Some(t), false) => Verdict::Falsified(t),
        (None, true) => Verdict::NoWitnessUpToBound { bounds, traces: stats.nodes },
        (None, false) => Verdict::VerifiedUpToBound { bounds, traces: stats.nodes },
    };
    LemmaReport { lemma: lemma.clone(), verdict, stats, elapsed: start.elapsed() }
}

/// Check every lemma of the theory (or those named in `only`), in parallel.
/// Reports come back in theory order.
pub fn check_theory(theory: &Theory, bounds: Bounds, only: &[String]) -> Vec<LemmaReport> {
    let engine = Engine::new(theory, bounds);
    let lemmas: Vec<&Lemma> =
        theory.lemmas.iter().filter(|l| only.is_empty() || only.iter().any(|n| **n == *l.name)).collect();
    lemmas.par_iter().map(|l| check_with(&engine, l)).collect()
}
