//! Multiset rewriting semantics with an implicit network adversary.

mod explore;

pub use explore::{canonical_key, explore, CanonicalKey, Explorer, SearchStats, TraceIter};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deduction::{Adversary, KnowledgeBase};
use crate::term::{match_with, FreshName, Name, Sort, Substitution, Term, Var};
use crate::theory::{Fact, Premise, ProtocolRule, Reserved, Theory};

/// Exploration limits. `max_events` counts rule instances; adversary and
/// fresh-name events do not count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    pub max_events: usize,
    pub max_fresh: usize,
    pub adv_depth: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_events: 10, max_fresh: 6, adv_depth: 4 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct State {
    pub linear: BTreeMap<Fact, usize>,
    pub persistent: BTreeSet<Fact>,
    pub knowledge: KnowledgeBase,
    pub fresh_counter: u32,
    pub rule_events: usize,
    pub next_timepoint: usize,
}

impl State {
    pub fn linear_facts(&self) -> impl Iterator<Item = &Fact> {
        self.linear.iter().flat_map(|(f, n)| std::iter::repeat_n(f, *n))
    }

    pub fn linear_len(&self) -> usize {
        self.linear.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// A rule instance. `premises` are the ground premise facts that were
    /// present (including `Fr` and `In`), `conclusions` the ground conclusions.
    Rule { rule: Name, subst: Substitution, premises: Vec<Fact>, conclusions: Vec<Fact> },
    Fresh { name: Term },
    /// The adversary captures an output.
    AdvReceive { term: Term },
    /// The adversary builds a term by applying a function symbol.
    AdvConstruct { term: Term },
    /// The adversary injects a term into an `In` premise.
    AdvSend { term: Term },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub timepoint: usize,
    pub kind: EventKind,
    pub actions: Vec<Fact>,
}

impl Event {
    pub fn rule_name(&self) -> Option<&str> {
        match &self.kind {
            EventKind::Rule { rule, .. } => Some(rule),
            _ => None,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} ", self.timepoint)?;
        match &self.kind {
            EventKind::Rule { rule, .. } => write!(f, "{rule}")?,
            EventKind::Fresh { name } => write!(f, "fresh {name}")?,
            EventKind::AdvReceive { term } => write!(f, "receive {term}")?,
            EventKind::AdvConstruct { term } => write!(f, "construct {term}")?,
            EventKind::AdvSend { term } => write!(f, "isend {term}")?,
        }
        if !self.actions.is_empty() {
            write!(f, " [")?;
            for (i, a) in self.actions.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub initial: State,
    pub events: Vec<Event>,
    pub final_state: State,
}

impl Trace {
    pub fn rule_events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e.kind, EventKind::Rule { .. }))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A rule instance chosen for firing: the rule and a substitution binding
/// every variable of its expanded form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Choice {
    pub rule: Name,
    pub subst: Substitution,
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule, self.subst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("no rule named `{0}`")]
    UnknownRule(String),
    #[error("rule instance `{0}` is not enabled in this state")]
    NotEnabled(String),
    #[error("event {0} does not match the replayed execution")]
    ReplayMismatch(usize),
}

/// Per-rule data precomputed from the expanded rule.
#[derive(Clone, Debug)]
struct CompiledRule {
    rule: ProtocolRule,
    facts: Vec<Fact>,
    fresh: Vec<Var>,
    inputs: Vec<Term>,
    absent: Vec<Fact>,
    // `$X` variables of actions and conclusions that no premise binds
    free_public: Vec<Var>,
}

/// Executes a theory under fixed bounds.
#[derive(Clone, Debug)]
pub struct Engine {
    pub theory: Theory,
    pub bounds: Bounds,
    pub adversary: Adversary,
    rules: Vec<CompiledRule>,
}

impl Engine {
    pub fn new(theory: &Theory, bounds: Bounds) -> Self {
        let rw = theory.rewrite_system();
        let mut rules: Vec<CompiledRule> = theory.rules.iter().map(|r| compile(&r.expanded(&rw))).collect();
        rules.sort_by(|a, b| a.rule.name.cmp(&b.rule.name));
        Engine { theory: theory.clone(), bounds, adversary: Adversary::for_theory(theory, bounds.adv_depth), rules }
    }

    /// Start state: nothing but the public atoms the theory mentions.
    pub fn initial_state(&self) -> State {
        let mut kb = KnowledgeBase::new();
        for t in self.theory.public_atoms() {
            kb.add_public(t);
        }
        State { knowledge: kb, ..State::default() }
    }

    fn compiled(&self, name: &str) -> Option<&CompiledRule> {
        self.rules.iter().find(|r| &*r.rule.name == name)
    }

    /// Every enabled rule instance, sorted by rule name then substitution.
    pub fn enabled(&self, state: &State) -> Vec<Choice> {
        let mut out = Vec::new();
        for r in &self.rules {
            for subst in self.instances(state, r) {
                out.push(Choice { rule: r.rule.name.clone(), subst });
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Enabled choices that stay within the event and fresh-name bounds.
    pub fn successors(&self, state: &State) -> Vec<Choice> {
        if state.rule_events >= self.bounds.max_events {
            return Vec::new();
        }
        self.enabled(state)
            .into_iter()
            .filter(|c| {
                let r = self.compiled(&c.rule).expect("choice from enabled");
                state.fresh_counter as usize + r.fresh.len() <= self.bounds.max_fresh
            })
            .collect()
    }

    fn instances(&self, state: &State, r: &CompiledRule) -> Vec<Substitution> {
        let mut partial = Vec::new();
        let mut used = BTreeMap::new();
        match_facts(state, &r.facts, 0, Substitution::new(), &mut used, &mut partial);

        let mut out = BTreeSet::new();
        'next: for mut s in partial {
            for (i, v) in r.fresh.iter().enumerate() {
                if s.contains(v) {
                    continue 'next;
                }
                let name = FreshName { label: v.name.clone(), index: state.fresh_counter + i as u32 };
                s.insert(v.clone(), Term::Fresh(name));
            }
            let mut with_inputs = vec![s];
            for p in &r.inputs {
                with_inputs = with_inputs
                    .iter()
                    .flat_map(|s| self.adversary.candidates(&state.knowledge, p, s))
                    .collect();
                if with_inputs.is_empty() {
                    continue 'next;
                }
            }
            for mut s in with_inputs {
                if r.absent.iter().any(|f| present(state, f, &s, &self.adversary)) {
                    continue;
                }
                for v in &r.free_public {
                    if !s.contains(v) {
                        s.insert(v.clone(), Term::Pub(v.name.clone()));
                    }
                }
                out.insert(s);
            }
        }
        out.into_iter().collect()
    }

    /// Fire an enabled rule instance. Fails if the choice is not enabled.
    pub fn step(&self, state: &State, choice: &Choice) -> Result<(State, Vec<Event>), ExecError> {
        let r = self.compiled(&choice.rule).ok_or_else(|| ExecError::UnknownRule(choice.rule.to_string()))?;
        if !self.instances(state, r).contains(&choice.subst) {
            return Err(ExecError::NotEnabled(choice.to_string()));
        }
        Ok(self.fire(state, r, &choice.subst))
    }

    /// Fire a choice known to be enabled.
    pub(crate) fn fire_choice(&self, state: &State, choice: &Choice) -> (State, Vec<Event>) {
        let r = self.compiled(&choice.rule).expect("choice from enabled");
        self.fire(state, r, &choice.subst)
    }

    fn fire(&self, state: &State, r: &CompiledRule, s: &Substitution) -> (State, Vec<Event>) {
        let adv = &self.adversary;
        let rw = &adv.rewrite;
        let mut next = state.clone();
        let mut events = Vec::new();
        let mut push = |next: &mut State, kind: EventKind, actions: Vec<Fact>| {
            events.push(Event { timepoint: next.next_timepoint, kind, actions });
            next.next_timepoint += 1;
        };

        for v in &r.fresh {
            push(&mut next, EventKind::Fresh { name: s.get(v).expect("fresh bound").clone() }, Vec::new());
        }
        next.fresh_counter += r.fresh.len() as u32;

        let mut inputs = Vec::new();
        for p in &r.inputs {
            let t = rw.apply(s, p);
            let d = adv.derivable(&next.knowledge, &t).expect("enabled input is derivable");
            for u in d.constructions() {
                push(&mut next, EventKind::AdvConstruct { term: u.clone() }, vec![k_fact(u)]);
            }
            push(&mut next, EventKind::AdvSend { term: t.clone() }, vec![k_fact(&t)]);
            inputs.push(t);
        }

        let mut premises = Vec::new();
        for p in &r.rule.premises {
            let Premise::Present(f) = p else { continue };
            let g = f.apply(rw, s);
            if f.reserved().is_none() && !f.persistent {
                let n = next.linear.get_mut(&g).expect("linear premise present");
                *n -= 1;
                if *n == 0 {
                    next.linear.remove(&g);
                }
            }
            premises.push(g);
        }

        let mut actions: Vec<Fact> = inputs.iter().map(|t| Fact::new("In", vec![t.clone()])).collect();
        actions.extend(r.rule.actions.iter().map(|a| a.apply(rw, s)));
        let mut outputs = Vec::new();
        let mut conclusions = Vec::new();
        for c in &r.rule.conclusions {
            let g = c.apply(rw, s);
            match g.reserved() {
                Some(Reserved::Out) => {
                    actions.push(Fact::new("Out", g.args.clone()));
                    outputs.push(g.args[0].clone());
                }
                _ if g.persistent => {
                    next.persistent.insert(g.clone());
                }
                _ => *next.linear.entry(g.clone()).or_insert(0) += 1,
            }
            conclusions.push(g);
        }
        next.rule_events += 1;
        push(
            &mut next,
            EventKind::Rule { rule: r.rule.name.clone(), subst: s.clone(), premises, conclusions },
            actions,
        );

        for t in outputs {
            let learned = adv.learn(&mut next.knowledge, &t);
            if !learned.is_empty() {
                let acts = learned.iter().map(k_fact).collect();
                push(&mut next, EventKind::AdvReceive { term: t }, acts);
            }
        }
        (next, events)
    }

    /// Re-execute the rule events of `trace` from its initial state, checking
    /// that every event is reproduced. Returns the final state.
    pub fn replay(&self, trace: &Trace) -> Result<State, ExecError> {
        let mut state = trace.initial.clone();
        let mut i = 0;
        while i < trace.events.len() {
            // the rule event of the next step follows its fresh and adversary events
            let Some(offset) = trace.events[i..].iter().position(|e| matches!(e.kind, EventKind::Rule { .. })) else {
                return Err(ExecError::ReplayMismatch(i));
            };
            let EventKind::Rule { rule, subst, .. } = &trace.events[i + offset].kind else { unreachable!() };
            let choice = Choice { rule: rule.clone(), subst: subst.clone() };
            let (next, events) = self.step(&state, &choice)?;
            let n = events.len();
            if trace.events.get(i..i + n) != Some(&events[..]) {
                return Err(ExecError::ReplayMismatch(i));
            }
            state = next;
            i += n;
        }
        Ok(state)
    }
}

fn k_fact(t: &Term) -> Fact {
    Fact::new("K", vec![t.clone()])
}

fn compile(rule: &ProtocolRule) -> CompiledRule {
    let mut facts = Vec::new();
    let mut fresh = Vec::new();
    let mut inputs = Vec::new();
    let mut absent = Vec::new();
    for p in &rule.premises {
        match p {
            Premise::Present(f) => match f.reserved() {
                Some(Reserved::Fr) => {
                    if let Some(Term::Var(v)) = f.args.first() {
                        fresh.push(v.clone());
                    }
                }
                Some(Reserved::In) => inputs.push(f.args[0].clone()),
                _ => facts.push(f.clone()),
            },
            Premise::Absent(f) => absent.push(f.clone()),
        }
    }
    // persistent facts first: they never conflict and prune early
    facts.sort_by_key(|f| !f.persistent);
    let mut bound = Vec::new();
    for p in &rule.premises {
        if let Premise::Present(f) = p {
            f.collect_vars(&mut bound);
        }
    }
    let mut free_public = Vec::new();
    for f in rule.actions.iter().chain(&rule.conclusions) {
        for v in f.args.iter().flat_map(|a| a.vars()) {
            if v.sort == Sort::Pub && !bound.contains(&v) && !free_public.contains(&v) {
                free_public.push(v);
            }
        }
    }
    CompiledRule { rule: rule.clone(), facts, fresh, inputs, absent, free_public }
}

fn match_fact(pattern: &Fact, fact: &Fact, s: Substitution) -> Option<Substitution> {
    if pattern.name != fact.name || pattern.args.len() != fact.args.len() || pattern.persistent != fact.persistent {
        return None;
    }
    pattern.args.iter().zip(&fact.args).try_fold(s, |s, (p, g)| match_with(p, g, s))
}

fn match_facts(
    state: &State,
    patterns: &[Fact],
    i: usize,
    s: Substitution,
    used: &mut BTreeMap<Fact, usize>,
    out: &mut Vec<Substitution>,
) {
    let Some(p) = patterns.get(i) else {
        out.push(s);
        return;
    };
    if p.persistent {
        for f in &state.persistent {
            if let Some(s2) = match_fact(p, f, s.clone()) {
                match_facts(state, patterns, i + 1, s2, used, out);
            }
        }
    } else {
        for (f, n) in &state.linear {
            let u = used.get(f).copied().unwrap_or(0);
            if u >= *n {
                continue;
            }
            if let Some(s2) = match_fact(p, f, s.clone()) {
                used.insert(f.clone(), u + 1);
                match_facts(state, patterns, i + 1, s2, used, out);
                used.insert(f.clone(), u);
            }
        }
    }
}

/// Whether some persistent fact matches the instantiated negated premise.
fn present(state: &State, f: &Fact, s: &Substitution, adv: &Adversary) -> bool {
    let inst = Fact { persistent: true, ..f.map_terms(|t| adv.rewrite.normalize(&s.apply_raw(t))) };
    state.persistent.iter().any(|g| match_fact(&inst, g, Substitution::new()).is_some())
}
