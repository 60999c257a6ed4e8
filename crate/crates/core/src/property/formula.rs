use std::fmt;

use crate::term::{Name, Term, Var};
use crate::theory::{Fact, Span};

/// A timepoint variable such as `#i`.
pub type TimeVar = Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Ex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QVar {
    Msg(Var),
    Time(TimeVar),
}

impl fmt::Display for QVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QVar::Msg(v) => write!(f, "{v}"),
            QVar::Time(t) => write!(f, "#{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    /// `F(t1..tn) @ #i`
    Action { fact: Fact, time: TimeVar, span: Span },
    Less(TimeVar, TimeVar),
    EqTime(TimeVar, TimeVar),
    EqTerm(Term, Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Vec<QVar>, Box<Formula>),
}

/// A guarded trace formula.
pub type TraceFormula = Formula;

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn action(fact: Fact, time: &str) -> Formula {
        Formula::Atom(Atom::Action { fact, time: Name::from(time), span: Span::default() })
    }

    pub fn less(i: &str, j: &str) -> Formula {
        Formula::Atom(Atom::Less(Name::from(i), Name::from(j)))
    }

    pub fn eq_time(i: &str, j: &str) -> Formula {
        Formula::Atom(Atom::EqTime(Name::from(i), Name::from(j)))
    }

    /// Every action atom in the formula.
    pub fn action_atoms(&self) -> Vec<(&Fact, &TimeVar, Span)> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Action { fact, time, span } = a {
                out.push((fact, time, *span));
            }
        });
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(x) => x.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::Quant(_, _, body) => body.visit_atoms(f),
        }
    }

    /// Whether any `#i < #j` atom occurs; without one, truth does not depend on event order.
    pub fn uses_order(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if matches!(a, Atom::Less(..)) {
                found = true;
            }
        });
        found
    }

    /// Negation normal form: negations only directly above atoms, no implications.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::Atom(_), true) => self.clone(),
            (Formula::Atom(_), false) => Formula::not(self.clone()),
            (Formula::Not(x), p) => x.nnf_signed(!p),
            (Formula::And(a, b), true) => Formula::and(a.nnf_signed(true), b.nnf_signed(true)),
            (Formula::And(a, b), false) => Formula::or(a.nnf_signed(false), b.nnf_signed(false)),
            (Formula::Or(a, b), true) => Formula::or(a.nnf_signed(true), b.nnf_signed(true)),
            (Formula::Or(a, b), false) => Formula::and(a.nnf_signed(false), b.nnf_signed(false)),
            (Formula::Implies(a, b), true) => Formula::or(a.nnf_signed(false), b.nnf_signed(true)),
            (Formula::Implies(a, b), false) => Formula::and(a.nnf_signed(true), b.nnf_signed(false)),
            (Formula::Quant(q, vs, body), p) => {
                let q = match (q, p) {
                    (q, true) => *q,
                    (Quantifier::All, false) => Quantifier::Ex,
                    (Quantifier::Ex, false) => Quantifier::All,
                };
                Formula::Quant(q, vs.clone(), Box::new(body.nnf_signed(p)))
            }
        }
    }
}

fn write_fact(f: &mut fmt::Formatter<'_>, fact: &Fact) -> fmt::Result {
    write!(f, "{}(", fact.name)?;
    for (i, a) in fact.args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Action { fact, time, .. } => {
                write_fact(f, fact)?;
                write!(f, " @ #{time}")
            }
            Atom::Less(i, j) => write!(f, "#{i} < #{j}"),
            Atom::EqTime(i, j) => write!(f, "#{i} = #{j}"),
            Atom::EqTerm(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

/// Fully parenthesized rendering; parses back to the same formula.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => write!(f, "not({x})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} ==> {b})"),
            Formula::Quant(q, vs, body) => {
                write!(f, "({}", if *q == Quantifier::All { "All" } else { "Ex" })?;
                for v in vs {
                    write!(f, " {v}")?;
                }
                write!(f, ". {body})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaMode {
    AllTraces,
    ExistsTrace,
}

impl fmt::Display for LemmaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaMode::AllTraces => "all-traces",
            LemmaMode::ExistsTrace => "exists-trace",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma {
    pub name: Name,
    pub mode: LemmaMode,
    pub formula: TraceFormula,
    pub span: Span,
    pub binders: Binders,
}

/// Source positions of quantified variables, keyed by their printed form
/// (`x`, `#i`). Like [`Span`], never part of equality.
#[derive(Clone, Debug, Default)]
pub struct Binders(pub Vec<(String, Span)>);

impl Binders {
    pub fn get(&self, var: &str) -> Option<Span> {
        self.0.iter().find(|(v, _)| v == var).map(|(_, s)| *s)
    }
}

impl PartialEq for Binders {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Binders {}

impl Lemma {
    pub fn new(name: &str, mode: LemmaMode, formula: TraceFormula) -> Self {
        Lemma { name: Name::from(name), mode, formula, span: Span::default(), binders: Binders::default() }
    }
}

/// Variables that are not anchored by an action atom, or that are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardIssue {
    Unguarded(String),
    Free(String),
}

/// Check that every quantified variable occurs in an action atom of its
/// quantifier's body and that no variable is free.
pub fn check_guarded(f: &Formula) -> Vec<GuardIssue> {
    let mut issues = Vec::new();
    check_scope(f, &mut Vec::new(), &mut issues);
    issues
}

fn check_scope(f: &Formula, scope: &mut Vec<QVar>, issues: &mut Vec<GuardIssue>) {
    match f {
        Formula::Atom(a) => {
            let mut msg_vars = Vec::new();
            let mut times: Vec<&TimeVar> = Vec::new();
            match a {
                Atom::Action { fact, time, .. } => {
                    fact.collect_vars(&mut msg_vars);
                    times.push(time);
                }
                Atom::Less(i, j) | Atom::EqTime(i, j) => times.extend([i, j]),
                Atom::EqTerm(x, y) => {
                    x.collect_vars(&mut msg_vars);
                    y.collect_vars(&mut msg_vars);
                }
            }
            for v in msg_vars {
                if !scope.contains(&QVar::Msg(v.clone())) {
                    let s = v.to_string();
                    if !issues.contains(&GuardIssue::Free(s.clone())) {
                        issues.push(GuardIssue::Free(s));
                    }
                }
            }
            for t in times {
                if !scope.contains(&QVar::Time(t.clone())) {
                    let s = format!("#{t}");
                    if !issues.contains(&GuardIssue::Free(s.clone())) {
                        issues.push(GuardIssue::Free(s));
                    }
                }
            }
        }
        Formula::Not(x) => check_scope(x, scope, issues),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_scope(a, scope, issues);
            check_scope(b, scope, issues);
        }
        Formula::Quant(_, vs, body) => {
            let mut anchored_msg = Vec::new();
            let mut anchored_time = Vec::new();
            for (fact, time, _) in body.action_atoms() {
                fact.collect_vars(&mut anchored_msg);
                anchored_time.push(time.clone());
            }
            for v in vs {
                let ok = match v {
                    QVar::Msg(m) => anchored_msg.contains(m),
                    QVar::Time(t) => anchored_time.contains(t),
                };
                if !ok {
                    issues.push(GuardIssue::Unguarded(v.to_string()));
                }
            }
            let n = scope.len();
            scope.extend(vs.iter().cloned());
            check_scope(body, scope, issues);
            scope.truncate(n);
        }
    }
}
