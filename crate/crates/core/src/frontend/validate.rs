//! Semantic checks on a syntactically well-formed theory.

use std::collections::{BTreeMap, BTreeSet};

use super::diagnostic::{Code, Diagnostic};
use crate::property::{check_guarded, GuardIssue};
use crate::term::{Name, Sort, Term, TermError, Var};
use crate::theory::{Fact, FactKind, FactSpans, Premise, ProtocolRule, Reserved, Span, Theory};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Premise,
    Action,
    Conclusion,
}

/// Action fact names every trace records implicitly, in addition to user actions.
pub const IMPLICIT_ACTIONS: &[&str] = &["In", "Out", "K"];

/// Check every rule and lemma invariant. Returns errors and warnings; the
/// theory is valid iff no error is present.
pub fn validate(theory: &Theory) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen_rules: BTreeSet<&str> = BTreeSet::new();
    // name -> (arity, kind) fixed by first use
    let mut schemas: BTreeMap<Name, (usize, FactKind)> = BTreeMap::new();

    for eq in &theory.equations {
        for t in [&eq.lhs, &eq.rhs] {
            if let Err(e) = theory.signature.check(t) {
                out.push(term_error(e, Span::default()));
            }
        }
    }

    for rule in &theory.rules {
        if !seen_rules.insert(&rule.name) {
            out.push(Diagnostic::error(
                Code::DuplicateRule,
                rule.spans.name,
                format!("duplicate rule name `{}`", rule.name),
            ));
        }
        check_applications(theory, rule, &mut out);
        let sites = fact_sites(rule);
        for (pos, fact, negated, spans) in &sites {
            check_reserved(*pos, fact, *negated, spans, &mut out);
            if fact.reserved().is_none() {
                let kind = if *negated { FactKind::Persistent } else { fact.kind() };
                check_schema(&mut schemas, fact, kind, spans, &mut out);
            }
        }
        check_negations(&sites, &schemas, &mut out);
        check_bindings(theory, rule, &mut out);
    }

    check_lemmas(theory, &mut out);
    out
}

fn term_error(e: TermError, span: Span) -> Diagnostic {
    match e {
        TermError::Undeclared(f) => Diagnostic::error(
            Code::UndeclaredFunction,
            span,
            format!("undeclared function symbol `{f}`"),
        )
        .with_hint("declare it with `functions: name/arity`"),
        TermError::Arity { .. } => Diagnostic::error(Code::ArityMismatch, span, e.to_string()),
        TermError::BuiltinConflict(..) => Diagnostic::error(Code::BuiltinConflict, span, e.to_string()),
    }
}

fn check_applications(theory: &Theory, rule: &ProtocolRule, out: &mut Vec<Diagnostic>) {
    let spans = &rule.spans;
    let all_spans: Vec<&FactSpans> = spans
        .lets
        .iter()
        .chain(&spans.premises)
        .chain(&spans.actions)
        .chain(&spans.conclusions)
        .collect();
    if !all_spans.is_empty() {
        for fs in all_spans {
            for (f, n, sp) in &fs.apps {
                let err = match theory.signature.arity(f) {
                    None => Some(TermError::Undeclared(f.to_string())),
                    Some(a) if a != *n => Some(TermError::Arity { name: f.to_string(), expected: a, got: *n }),
                    _ => None,
                };
                if let Some(e) = err {
                    out.push(term_error(e, *sp));
                }
            }
        }
        return;
    }
    // rules built programmatically carry no positions
    let terms = rule
        .lets
        .iter()
        .map(|(_, t)| t)
        .chain(rule.premises.iter().flat_map(|p| &p.fact().args))
        .chain(rule.actions.iter().chain(&rule.conclusions).flat_map(|f| &f.args));
    for t in terms {
        if let Err(e) = theory.signature.check(t) {
            out.push(term_error(e, spans.name));
        }
    }
}

fn fact_sites(rule: &ProtocolRule) -> Vec<(Position, &Fact, bool, FactSpans)> {
    let span_of = |v: &Vec<FactSpans>, i: usize| v.get(i).cloned().unwrap_or_else(|| FactSpans {
        span: rule.spans.name,
        name: rule.spans.name,
        ..Default::default()
    });
    let mut sites = Vec::new();
    for (i, p) in rule.premises.iter().enumerate() {
        let negated = matches!(p, Premise::Absent(_));
        sites.push((Position::Premise, p.fact(), negated, span_of(&rule.spans.premises, i)));
    }
    for (i, f) in rule.actions.iter().enumerate() {
        sites.push((Position::Action, f, false, span_of(&rule.spans.actions, i)));
    }
    for (i, f) in rule.conclusions.iter().enumerate() {
        sites.push((Position::Conclusion, f, false, span_of(&rule.spans.conclusions, i)));
    }
    sites
}

fn check_reserved(pos: Position, fact: &Fact, negated: bool, spans: &FactSpans, out: &mut Vec<Diagnostic>) {
    let Some(r) = fact.reserved() else { return };
    let at = spans.name;
    let name = &fact.name;
    if r == Reserved::K {
        out.push(Diagnostic::error(Code::KInRule, at, "`K` facts are reserved for the adversary"));
        return;
    }
    if negated {
        out.push(Diagnostic::error(
            Code::NegatedNonPersistent,
            at,
            format!("`not(...)` cannot wrap the reserved fact `{name}`"),
        ));
        return;
    }
    match (pos, r) {
        (Position::Action, _) => {
            out.push(
                Diagnostic::error(Code::ReservedInAction, at, format!("`{name}` cannot be used as an action"))
                    .with_hint("In and Out actions are recorded implicitly"),
            );
            return;
        }
        (Position::Conclusion, Reserved::Fr) => {
            out.push(Diagnostic::error(Code::FrInConclusion, at, "`Fr` facts may only appear in premises"));
            return;
        }
        (Position::Conclusion, Reserved::In) => {
            out.push(Diagnostic::error(Code::InInConclusion, at, "`In` facts may only appear in premises"));
            return;
        }
        (Position::Premise, Reserved::Out) => {
            out.push(Diagnostic::error(Code::OutInPremise, at, "`Out` facts may only appear in conclusions"));
            return;
        }
        _ => {}
    }
    if fact.persistent {
        out.push(Diagnostic::error(Code::ReservedPersistent, at, format!("`{name}` facts are linear")));
    }
    if fact.args.len() != 1 {
        out.push(Diagnostic::error(
            Code::ReservedArity,
            at,
            format!("`{name}` takes exactly one argument, got {}", fact.args.len()),
        ));
        return;
    }
    if r == Reserved::Fr && !matches!(&fact.args[0], Term::Var(v) if v.sort == Sort::Fresh) {
        let at = spans.vars.first().map(|(_, s)| *s).unwrap_or(at);
        out.push(
            Diagnostic::error(Code::FrNotFreshVariable, at, "the argument of `Fr` must be a fresh variable")
                .with_hint("write `Fr(~x)`"),
        );
    }
}

fn check_schema(
    schemas: &mut BTreeMap<Name, (usize, FactKind)>,
    fact: &Fact,
    kind: FactKind,
    spans: &FactSpans,
    out: &mut Vec<Diagnostic>,
) {
    match schemas.get(&fact.name) {
        None => {
            schemas.insert(fact.name.clone(), (fact.args.len(), kind));
        }
        Some(&(arity, k)) => {
            if arity != fact.args.len() {
                out.push(Diagnostic::error(
                    Code::FactKindMismatch,
                    spans.name,
                    format!("fact `{}` used with {} argument(s), earlier with {arity}", fact.name, fact.args.len()),
                ));
            } else if k != kind {
                let word = |k: FactKind| if k == FactKind::Persistent { "persistent" } else { "linear" };
                out.push(Diagnostic::error(
                    Code::FactKindMismatch,
                    spans.name,
                    format!("fact `{}` used as {}, earlier as {}", fact.name, word(kind), word(k)),
                ));
            }
        }
    }
}

fn check_negations(
    sites: &[(Position, &Fact, bool, FactSpans)],
    schemas: &BTreeMap<Name, (usize, FactKind)>,
    out: &mut Vec<Diagnostic>,
) {
    for (_, fact, negated, spans) in sites {
        if *negated && fact.reserved().is_none() {
            if let Some((_, FactKind::Linear)) = schemas.get(&fact.name) {
                out.push(Diagnostic::error(
                    Code::NegatedNonPersistent,
                    spans.name,
                    format!("`not(...)` requires a persistent fact, but `{}` is linear", fact.name),
                ));
            }
        }
    }
}

fn check_bindings(theory: &Theory, rule: &ProtocolRule, out: &mut Vec<Diagnostic>) {
    let rw = theory.rewrite_system();
    let expanded = rule.expanded(&rw);
    let mut bound: Vec<Var> = Vec::new();
    for p in &expanded.premises {
        if let Premise::Present(f) = p {
            f.collect_vars(&mut bound);
        }
    }
    let mut reported: BTreeSet<Var> = BTreeSet::new();
    let mut report = |v: &Var, site: &str, fallback: Span, out: &mut Vec<Diagnostic>| {
        if !reported.insert(v.clone()) {
            return;
        }
        let at = locate_var(rule, v).unwrap_or(fallback);
        out.push(
            Diagnostic::error(Code::UnboundVariable, at, format!("variable `{v}` in {site} is not bound by a premise"))
                .with_hint("bind it in a premise, e.g. `In(..)`, `Fr(~x)` or a state fact"),
        );
    };
    let fallback = |v: &Vec<FactSpans>, i: usize| v.get(i).map(|s| s.span).unwrap_or(rule.spans.name);
    for (i, p) in expanded.premises.iter().enumerate() {
        if let Premise::Absent(f) = p {
            for v in vars_of(f) {
                if !bound.contains(&v) && v.sort != Sort::Pub {
                    report(&v, "a negated premise", fallback(&rule.spans.premises, i), out);
                }
            }
        }
    }
    for (i, f) in expanded.actions.iter().enumerate() {
        for v in vars_of(f) {
            if !bound.contains(&v) && v.sort != Sort::Pub {
                report(&v, "an action", fallback(&rule.spans.actions, i), out);
            }
        }
    }
    for (i, f) in expanded.conclusions.iter().enumerate() {
        for v in vars_of(f) {
            if !bound.contains(&v) && v.sort != Sort::Pub {
                report(&v, "a conclusion", fallback(&rule.spans.conclusions, i), out);
            }
        }
    }
}

fn vars_of(f: &Fact) -> Vec<Var> {
    let mut vs = Vec::new();
    f.collect_vars(&mut vs);
    vs.dedup();
    vs
}

/// Position of the first occurrence of `v` outside premises, or anywhere.
fn locate_var(rule: &ProtocolRule, v: &Var) -> Option<Span> {
    let s = &rule.spans;
    s.actions
        .iter()
        .chain(&s.conclusions)
        .chain(&s.lets)
        .chain(&s.premises)
        .flat_map(|fs| &fs.vars)
        .find(|(w, _)| w == v)
        .map(|(_, sp)| *sp)
}

fn check_lemmas(theory: &Theory, out: &mut Vec<Diagnostic>) {
    let mut emitted: BTreeSet<(Name, usize)> = BTreeSet::new();
    for r in &theory.rules {
        for a in &r.actions {
            emitted.insert((a.name.clone(), a.args.len()));
        }
    }
    for n in IMPLICIT_ACTIONS {
        emitted.insert((Name::from(*n), 1));
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for lemma in &theory.lemmas {
        if !seen.insert(&lemma.name) {
            out.push(Diagnostic::error(
                Code::DuplicateLemma,
                lemma.span,
                format!("duplicate lemma name `{}`", lemma.name),
            ));
        }
        for issue in check_guarded(&lemma.formula) {
            out.push(match issue {
                GuardIssue::Unguarded(v) => Diagnostic::error(
                    Code::UnguardedFormula,
                    lemma.binders.get(&v).unwrap_or(lemma.span),
                    format!("lemma `{}`: quantified variable `{v}` does not occur in an action atom", lemma.name),
                ),
                GuardIssue::Free(v) => Diagnostic::error(
                    Code::FreeFormulaVariable,
                    lemma.span,
                    format!("lemma `{}`: variable `{v}` is not quantified", lemma.name),
                ),
            });
        }
        for (fact, _, span) in lemma.formula.action_atoms() {
            if !emitted.contains(&(fact.name.clone(), fact.args.len())) {
                out.push(Diagnostic::warning(
                    Code::UnusedAction,
                    span,
                    format!(
                        "lemma `{}` refers to action `{}/{}`, which no rule emits",
                        lemma.name,
                        fact.name,
                        fact.args.len()
                    ),
                ));
            }
        }
    }
}
