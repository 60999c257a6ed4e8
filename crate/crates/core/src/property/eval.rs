use std::collections::{BTreeMap, BTreeSet};

use super::formula::{Atom, Formula, QVar, Quantifier, TimeVar};
use crate::execution::Event;
use crate::term::{match_with, RewriteSystem, Substitution, Term};
use crate::theory::Fact;

/// Values of quantified variables, e.g. a witness for an `Ex` prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    pub msgs: Substitution,
    pub times: BTreeMap<TimeVar, usize>,
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.msgs.iter().map(|(v, t)| format!("{v} = {t}")).collect();
        parts.extend(self.times.iter().map(|(i, t)| format!("#{i} = {t}")));
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Whether `fact` is an instance of `pattern`, extending `s`.
pub fn match_fact(pattern: &Fact, fact: &Fact, s: Substitution) -> Option<Substitution> {
    if pattern.name != fact.name || pattern.args.len() != fact.args.len() {
        return None;
    }
    pattern.args.iter().zip(&fact.args).try_fold(s, |s, (p, g)| match_with(p, g, s))
}

/// Evaluates formulas over the action facts of a trace.
pub struct Evaluator<'a> {
    rw: &'a RewriteSystem,
    facts: Vec<(usize, &'a Fact)>,
    timepoints: Vec<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(rw: &'a RewriteSystem, events: &'a [Event]) -> Self {
        let facts = events.iter().flat_map(|e| e.actions.iter().map(move |f| (e.timepoint, f))).collect();
        Evaluator { rw, facts, timepoints: events.iter().map(|e| e.timepoint).collect() }
    }

    pub fn holds(&self, f: &Formula) -> bool {
        self.eval(f, &Assignment::default())
    }

    /// For a formula with an outermost `Ex` block, the first satisfying
    /// assignment of that block.
    pub fn witness(&self, f: &Formula) -> Option<Assignment> {
        match f {
            Formula::Quant(Quantifier::Ex, vars, body) => {
                let env = Assignment::default();
                self.assignments(vars, body, &env, true).into_iter().find(|a| self.eval(body, a))
            }
            _ => None,
        }
    }

    fn eval(&self, f: &Formula, env: &Assignment) -> bool {
        match f {
            Formula::Atom(a) => self.eval_atom(a, env),
            Formula::Not(x) => !self.eval(x, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Quant(q, vars, body) => {
                let ex = *q == Quantifier::Ex;
                let mut candidates = self.assignments(vars, body, env, ex).into_iter();
                if ex {
                    candidates.any(|a| self.eval(body, &a))
                } else {
                    candidates.all(|a| self.eval(body, &a))
                }
            }
        }
    }

    fn eval_atom(&self, a: &Atom, env: &Assignment) -> bool {
        match a {
            Atom::Action { fact, time, .. } => {
                let at = env.times.get(time).copied();
                let pattern = self.instantiate(fact, env);
                self.facts
                    .iter()
                    .filter(|(t, _)| at.is_none_or(|i| i == *t))
                    .any(|(_, g)| match_fact(&pattern, g, Substitution::new()).is_some())
            }
            Atom::Less(i, j) => match (env.times.get(i), env.times.get(j)) {
                (Some(a), Some(b)) => a < b,
                _ => false,
            },
            Atom::EqTime(i, j) => match (env.times.get(i), env.times.get(j)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
            Atom::EqTerm(x, y) => {
                self.rw.normalize(&env.msgs.apply_raw(x)) == self.rw.normalize(&env.msgs.apply_raw(y))
            }
        }
    }

    fn instantiate(&self, fact: &Fact, env: &Assignment) -> Fact {
        fact.map_terms(|t| {
            let t = env.msgs.apply_raw(t);
            if t.is_ground() {
                self.rw.normalize(&t)
            } else {
                t
            }
        })
    }

    /// Candidate assignments for a quantifier block. Assignments that make a
    /// guarding conjunction false are left out: for `Ex` the conjuncts of the
    /// body, for `All` the conjuncts of an implication's premise. Variables
    /// the guards do not bind range over the values that matching any atom
    /// mentioning them can produce.
    fn assignments(&self, vars: &[QVar], body: &Formula, env: &Assignment, ex: bool) -> Vec<Assignment> {
        let guards: Vec<&Atom> = match (ex, body) {
            (true, b) => conjuncts(b),
            (false, Formula::Implies(a, _)) => conjuncts(a),
            _ => Vec::new(),
        };
        let mut partial = vec![env.clone()];
        for g in guards {
            let Atom::Action { fact, time, .. } = g else { continue };
            if !mentions(g, vars) {
                continue;
            }
            let mut next = Vec::new();
            for a in &partial {
                next.extend(self.match_atom(fact, time, a, vars));
            }
            partial = next;
            if partial.is_empty() {
                return partial;
            }
        }
        // remaining variables: independent domains
        let mut out = BTreeSet::new();
        for a in partial {
            let mut acc = vec![a];
            for v in vars {
                let mut next = Vec::new();
                for a in acc {
                    let bound = match v {
                        QVar::Msg(m) => a.msgs.contains(m),
                        QVar::Time(t) => a.times.contains_key(t),
                    };
                    if bound {
                        next.push(a);
                        continue;
                    }
                    for value in self.domain(v, body, &a) {
                        let mut b = a.clone();
                        match (v, value) {
                            (QVar::Msg(m), Value::Msg(t)) => {
                                b.msgs.insert(m.clone(), t);
                            }
                            (QVar::Time(i), Value::Time(t)) => {
                                b.times.insert(i.clone(), t);
                            }
                            _ => continue,
                        }
                        next.push(b);
                    }
                }
                acc = next;
            }
            out.extend(acc);
        }
        out.into_iter().collect()
    }

    /// Extensions of `env` under which the action atom matches some fact,
    /// binding only the block's variables.
    fn match_atom(&self, fact: &Fact, time: &TimeVar, env: &Assignment, vars: &[QVar]) -> Vec<Assignment> {
        let pattern = self.instantiate(fact, env);
        let at = env.times.get(time).copied();
        let binds_time = vars.contains(&QVar::Time(time.clone()));
        let mut out = Vec::new();
        for (t, g) in &self.facts {
            if at.is_some_and(|i| i != *t) {
                continue;
            }
            if at.is_none() && !binds_time {
                continue;
            }
            let Some(s) = match_fact(&pattern, g, Substitution::new()) else { continue };
            let mut a = env.clone();
            for (v, val) in s.iter() {
                if vars.contains(&QVar::Msg(v.clone())) {
                    a.msgs.insert(v.clone(), val.clone());
                }
            }
            if at.is_none() {
                a.times.insert(time.clone(), *t);
            }
            out.push(a);
        }
        out
    }

    fn domain(&self, v: &QVar, body: &Formula, env: &Assignment) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        let mut anchored = false;
        body.visit_atoms(&mut |atom| {
            let Atom::Action { fact, time, .. } = atom else { return };
            match v {
                QVar::Time(i) if time == i => {
                    anchored = true;
                    let pattern = self.instantiate(fact, env);
                    for (t, g) in &self.facts {
                        if match_fact(&pattern, g, Substitution::new()).is_some() {
                            out.insert(Value::Time(*t));
                        }
                    }
                }
                QVar::Msg(m) if fact.args.iter().any(|a| a.contains_var(m)) => {
                    let pattern = self.instantiate(fact, env);
                    for (_, g) in &self.facts {
                        if let Some(s) = match_fact(&pattern, g, Substitution::new()) {
                            if let Some(val) = s.get(m) {
                                out.insert(Value::Msg(val.clone()));
                            }
                        }
                    }
                }
                _ => {}
            }
        });
        // an unguarded timepoint ranges over every event
        if !anchored {
            if let QVar::Time(_) = v {
                out.extend(self.timepoints.iter().map(|t| Value::Time(*t)));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Value {
    Msg(Term),
    Time(usize),
}

fn conjuncts(f: &Formula) -> Vec<&Atom> {
    match f {
        Formula::Atom(a) => vec![a],
        Formula::And(a, b) => {
            let mut v = conjuncts(a);
            v.extend(conjuncts(b));
            v
        }
        _ => Vec::new(),
    }
}

fn mentions(a: &Atom, vars: &[QVar]) -> bool {
    let Atom::Action { fact, time, .. } = a else { return false };
    vars.iter().any(|v| match v {
        QVar::Time(t) => t == time,
        QVar::Msg(m) => fact.args.iter().any(|x| x.contains_var(m)),
    })
}

/// Whether `f` holds on the trace given by `events`.
pub fn holds(f: &Formula, events: &[Event], rw: &RewriteSystem) -> bool {
    Evaluator::new(rw, events).holds(f)
}

/// Whether some action-atom pattern of `f` matches `fact`; only such facts
/// can influence the truth of `f`.
pub fn is_relevant(patterns: &[Fact], fact: &Fact) -> bool {
    patterns.iter().any(|p| match_fact(p, fact, Substitution::new()).is_some())
}

/// Action-atom patterns of a formula, with variables kept free.
pub fn atom_patterns(f: &Formula) -> Vec<Fact> {
    let mut out: Vec<Fact> = Vec::new();
    for (fact, _, _) in f.action_atoms() {
        if !out.contains(fact) {
            out.push(fact.clone());
        }
    }
    out
}
