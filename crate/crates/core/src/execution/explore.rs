use std::collections::HashMap;

use super::{Bounds, Engine, Event, State, Trace};
use crate::term::{FreshName, Name, Term};
use crate::theory::{Fact, Theory};

/// Every trace reachable within the bounds, as a lazy depth-first
/// enumeration of all prefixes (the empty trace first). No pruning.
pub fn explore(theory: &Theory, bounds: Bounds) -> TraceIter {
    let engine = Engine::new(theory, bounds);
    let initial = engine.initial_state();
    TraceIter { stack: vec![(initial.clone(), Vec::new())], engine, initial }
}

pub struct TraceIter {
    engine: Engine,
    initial: State,
    stack: Vec<(State, Vec<Event>)>,
}

impl TraceIter {
    pub fn engine(&self) -> &Engine {
        &self.engine
    }
}

impl Iterator for TraceIter {
    type Item = Trace;

    fn next(&mut self) -> Option<Trace> {
        let (state, events) = self.stack.pop()?;
        let children = self.engine.successors(&state);
        for c in children.iter().rev() {
            let (next, new) = self.engine.fire_choice(&state, c);
            let mut evs = events.clone();
            evs.extend(new);
            self.stack.push((next, evs));
        }
        Some(Trace { initial: self.initial.clone(), events, final_state: state })
    }
}

/// State plus the projection of the action history onto relevant facts,
/// with fresh names renamed canonically. Equal keys mean the two
/// configurations are equal up to a bijective renaming of fresh names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalKey {
    projection: Vec<Vec<Fact>>,
    linear: Vec<(Fact, usize)>,
    persistent: Vec<Fact>,
    known: Vec<Term>,
    public: Vec<Term>,
}

fn erase_term(t: &Term) -> Term {
    match t {
        Term::Fresh(n) => Term::App(Name::from(format!("~{}", n.label)), Vec::new()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(erase_term).collect()),
        other => other.clone(),
    }
}

fn erase(f: &Fact) -> Fact {
    f.map_terms(erase_term)
}

struct Renamer {
    map: HashMap<u32, u32>,
}

impl Renamer {
    fn visit(&mut self, t: &Term) {
        match t {
            Term::Fresh(n) => {
                let k = self.map.len() as u32;
                self.map.entry(n.index).or_insert(k);
            }
            Term::App(_, args) => args.iter().for_each(|a| self.visit(a)),
            _ => {}
        }
    }

    fn visit_fact(&mut self, f: &Fact) {
        f.args.iter().for_each(|a| self.visit(a));
    }

    fn term(&self, t: &Term) -> Term {
        t.map_fresh(&mut |n: &FreshName| FreshName { label: n.label.clone(), index: self.map[&n.index] })
    }

    fn fact(&self, f: &Fact) -> Fact {
        f.map_terms(|t| self.term(t))
    }
}

/// Canonical form of a search node. If `ordered` is false the projection is
/// treated as a multiset of per-event groups.
pub fn canonical_key(state: &State, projection: &[Vec<Fact>], ordered: bool) -> CanonicalKey {
    let mut groups: Vec<Vec<Fact>> = projection
        .iter()
        .map(|g| {
            let mut g = g.clone();
            g.sort_by_cached_key(erase);
            g
        })
        .collect();
    if !ordered {
        groups.sort_by_cached_key(|g| g.iter().map(erase).collect::<Vec<_>>());
    }
    let mut linear: Vec<(&Fact, usize)> = state.linear.iter().map(|(f, n)| (f, *n)).collect();
    linear.sort_by_cached_key(|(f, n)| (erase(f), *n));
    let mut persistent: Vec<&Fact> = state.persistent.iter().collect();
    persistent.sort_by_cached_key(|f| erase(f));
    let mut known: Vec<&Term> = state.knowledge.terms().collect();
    known.sort_by_cached_key(|t| erase_term(t));

    let mut r = Renamer { map: HashMap::new() };
    groups.iter().flatten().for_each(|f| r.visit_fact(f));
    linear.iter().for_each(|(f, _)| r.visit_fact(f));
    persistent.iter().for_each(|f| r.visit_fact(f));
    known.iter().for_each(|t| r.visit(t));

    let projection = groups.iter().map(|g| g.iter().map(|f| r.fact(f)).collect()).collect();
    let mut linear: Vec<(Fact, usize)> = linear.iter().map(|(f, n)| (r.fact(f), *n)).collect();
    linear.sort();
    let mut persistent: Vec<Fact> = persistent.iter().map(|f| r.fact(f)).collect();
    persistent.sort();
    let mut known: Vec<Term> = known.iter().map(|t| r.term(t)).collect();
    known.sort();
    CanonicalKey { projection, linear, persistent, known, public: state.knowledge.public_atoms().cloned().collect() }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search nodes expanded; each is a distinct trace prefix up to renaming.
    pub nodes: usize,
    /// Nodes skipped because an equivalent node with at least the same budget was seen.
    pub pruned: usize,
}

/// Pruned depth-first search over trace prefixes.
pub struct Explorer<'e> {
    engine: &'e Engine,
}

impl<'e> Explorer<'e> {
    pub fn new(engine: &'e Engine) -> Self {
        Explorer { engine }
    }

    /// Visit trace prefixes in canonical order, skipping nodes equivalent to
    /// one already seen with at least the same remaining budget. `relevant`
    /// selects the action facts `check` depends on; `check` is only called at
    /// the root and when a step added relevant facts. Stops at the first
    /// prefix for which `check` returns true.
    pub fn search(
        &self,
        relevant: impl Fn(&Fact) -> bool,
        ordered: bool,
        mut check: impl FnMut(&[Event]) -> bool,
    ) -> (Option<Trace>, SearchStats) {
        let engine = self.engine;
        let bounds = engine.bounds;
        let initial = engine.initial_state();
        let mut stats = SearchStats::default();
        let mut visited: HashMap<CanonicalKey, Vec<(usize, usize)>> = HashMap::new();
        // state, events, projection, whether the last step changed the projection
        let mut stack: Vec<(State, Vec<Event>, Vec<Vec<Fact>>, bool)> =
            vec![(initial.clone(), Vec::new(), Vec::new(), true)];
        while let Some((state, events, projection, changed)) = stack.pop() {
            let key = canonical_key(&state, &projection, ordered);
            let budget = remaining(&bounds, &state);
            let seen = visited.entry(key).or_default();
            if seen.iter().any(|&(e, f)| e >= budget.0 && f >= budget.1) {
                stats.pruned += 1;
                continue;
            }
            seen.push(budget);
            stats.nodes += 1;
            if changed && check(&events) {
                return (Some(Trace { initial, events, final_state: state }), stats);
            }
            let children = engine.successors(&state);
            for c in children.iter().rev() {
                let (next, new) = engine.fire_choice(&state, c);
                let mut proj = projection.clone();
                let mut grew = false;
                for e in &new {
                    let group: Vec<Fact> = e.actions.iter().filter(|f| relevant(f)).cloned().collect();
                    if !group.is_empty() {
                        proj.push(group);
                        grew = true;
                    }
                }
                let mut evs = events.clone();
                evs.extend(new);
                stack.push((next, evs, proj, grew));
            }
        }
        (None, stats)
    }
}

fn remaining(bounds: &Bounds, state: &State) -> (usize, usize) {
    (
        bounds.max_events.saturating_sub(state.rule_events),
        bounds.max_fresh.saturating_sub(state.fresh_counter as usize),
    )
}
