//! Protocol theories: facts, rules, and the validated theory container.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::property::Lemma;
use crate::term::{Name, RewriteEquation, RewriteSystem, Signature, Substitution, Term, Var};

/// Source position. Spans never participate in structural equality, ordering or hashing.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn contains(&self, line: u32, col: u32) -> bool {
        self.line == line && col >= self.col && (col as usize) < self.col as usize + (self.end - self.start).max(1)
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl PartialOrd for Span {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Span {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

/// Reserved fact names with fixed semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reserved {
    Fr,
    In,
    Out,
    K,
}

impl Reserved {
    pub fn of(name: &str) -> Option<Reserved> {
        match name {
            "Fr" => Some(Reserved::Fr),
            "In" => Some(Reserved::In),
            "Out" => Some(Reserved::Out),
            "K" => Some(Reserved::K),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactKind {
    Linear,
    Persistent,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub name: Name,
    pub args: Vec<Term>,
    pub persistent: bool,
}

impl Fact {
    pub fn new(name: &str, args: Vec<Term>) -> Self {
        Fact { name: Name::from(name), args, persistent: false }
    }

    pub fn persistent(name: &str, args: Vec<Term>) -> Self {
        Fact { name: Name::from(name), args, persistent: true }
    }

    pub fn reserved(&self) -> Option<Reserved> {
        Reserved::of(&self.name)
    }

    pub fn kind(&self) -> FactKind {
        if self.persistent {
            FactKind::Persistent
        } else {
            FactKind::Linear
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Fact {
        Fact { name: self.name.clone(), args: self.args.iter().map(&mut f).collect(), persistent: self.persistent }
    }

    pub fn apply(&self, rw: &RewriteSystem, s: &Substitution) -> Fact {
        self.map_terms(|t| rw.apply(s, t))
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.persistent {
            write!(f, "!")?;
        }
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A premise is either a fact to consume/read or a persistent fact that must be absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Premise {
    Present(Fact),
    Absent(Fact),
}

impl Premise {
    pub fn fact(&self) -> &Fact {
        match self {
            Premise::Present(f) | Premise::Absent(f) => f,
        }
    }
}

/// Source positions of the pieces of one fact.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactSpans {
    pub span: Span,
    pub name: Span,
    /// Every variable occurrence in the fact's arguments.
    pub vars: Vec<(Var, Span)>,
    /// Every function application: symbol, argument count, position of the symbol.
    pub apps: Vec<(Name, usize, Span)>,
}

#[derive(Clone, Debug, Default)]
pub struct RuleSpans {
    pub name: Span,
    pub lets: Vec<FactSpans>,
    pub premises: Vec<FactSpans>,
    pub actions: Vec<FactSpans>,
    pub conclusions: Vec<FactSpans>,
}

// positions are metadata, like `Span`
impl PartialEq for RuleSpans {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for RuleSpans {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolRule {
    pub name: Name,
    pub lets: Vec<(Var, Term)>,
    pub premises: Vec<Premise>,
    pub actions: Vec<Fact>,
    pub conclusions: Vec<Fact>,
    pub spans: RuleSpans,
}

impl ProtocolRule {
    /// Substitution that inlines every `let` binding (later bindings may use earlier ones).
    pub fn let_substitution(&self) -> Substitution {
        let mut s = Substitution::new();
        for (v, t) in &self.lets {
            let t = s.apply_raw(t);
            s.insert(v.clone(), t);
        }
        s
    }

    /// The rule with `let` bindings inlined and every pattern normalized.
    pub fn expanded(&self, rw: &RewriteSystem) -> ProtocolRule {
        let s = self.let_substitution();
        let fix = |f: &Fact| f.map_terms(|t| rw.normalize(&s.apply_raw(t)));
        ProtocolRule {
            name: self.name.clone(),
            lets: Vec::new(),
            premises: self
                .premises
                .iter()
                .map(|p| match p {
                    Premise::Present(f) => Premise::Present(fix(f)),
                    Premise::Absent(f) => Premise::Absent(fix(f)),
                })
                .collect(),
            actions: self.actions.iter().map(fix).collect(),
            conclusions: self.conclusions.iter().map(fix).collect(),
            spans: self.spans.clone(),
        }
    }
}

/// Name, arity and kind of a fact, as used across a theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactSchema {
    pub name: Name,
    pub arity: usize,
    pub kind: FactKind,
    pub reserved: Option<Reserved>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub name: Name,
    pub signature: Signature,
    pub equations: Vec<RewriteEquation>,
    pub rules: Vec<ProtocolRule>,
    pub lemmas: Vec<Lemma>,
}

impl Theory {
    pub fn empty(name: &str) -> Self {
        Theory {
            name: Name::from(name),
            signature: Signature::builtin(),
            equations: Vec::new(),
            rules: Vec::new(),
            lemmas: Vec::new(),
        }
    }

    pub fn rewrite_system(&self) -> RewriteSystem {
        RewriteSystem::with_user(&self.equations)
    }

    pub fn rule(&self, name: &str) -> Option<&ProtocolRule> {
        self.rules.iter().find(|r| &*r.name == name)
    }

    pub fn lemma(&self, name: &str) -> Option<&Lemma> {
        self.lemmas.iter().find(|l| &*l.name == name)
    }

    /// Fact schemas in first-use order. The first occurrence of a name fixes its
    /// arity and kind; `not(F)` refers to the persistent fact `!F`.
    pub fn schemas(&self) -> BTreeMap<Name, FactSchema> {
        let mut out: BTreeMap<Name, FactSchema> = BTreeMap::new();
        let mut add = |f: &Fact, from_negation: bool| {
            if from_negation && out.contains_key(&f.name) {
                return;
            }
            out.entry(f.name.clone()).or_insert_with(|| FactSchema {
                name: f.name.clone(),
                arity: f.args.len(),
                kind: if f.persistent || from_negation { FactKind::Persistent } else { FactKind::Linear },
                reserved: f.reserved(),
            });
        };
        for r in &self.rules {
            for p in &r.premises {
                match p {
                    Premise::Present(f) => add(f, false),
                    Premise::Absent(_) => {}
                }
            }
            r.actions.iter().for_each(|f| add(f, false));
            r.conclusions.iter().for_each(|f| add(f, false));
        }
        for r in &self.rules {
            for p in &r.premises {
                if let Premise::Absent(f) = p {
                    add(f, true)
                }
            }
        }
        out
    }

    /// String constants and public names mentioned anywhere in the rules.
    pub fn public_atoms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        let mut visit = |t: &Term| {
            for s in t.subterms() {
                match s {
                    Term::Const(_) | Term::Pub(_) => {
                        if !out.contains(s) {
                            out.push(s.clone())
                        }
                    }
                    Term::Var(v) if v.sort == crate::term::Sort::Pub => {
                        let p = Term::Pub(v.name.clone());
                        if !out.contains(&p) {
                            out.push(p)
                        }
                    }
                    _ => {}
                }
            }
        };
        for r in &self.rules {
            for (_, t) in &r.lets {
                visit(t)
            }
            for p in &r.premises {
                p.fact().args.iter().for_each(&mut visit)
            }
            for f in r.actions.iter().chain(&r.conclusions) {
                f.args.iter().for_each(&mut visit)
            }
        }
        out.sort();
        out
    }
}
