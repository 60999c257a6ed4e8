//! Sorted symbolic terms.
//!
//! A [`Term`] is either a variable, a fresh name produced by an `Fr` fact, a
//! public name, a quoted string constant, or the application of a function
//! symbol. Equality of fresh names is by index only.

mod rewrite;
mod signature;
mod subst;
mod unify;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use rewrite::{builtin_equations, EquationError, RewriteEquation, RewriteSystem};
pub use signature::{FunctionSignature, Signature, TermError, BUILTIN_FUNCTIONS};
pub use subst::Substitution;
pub use unify::{match_term, match_with, unify, unify_with};

/// Interned-ish identifier. Cheap to clone and `Send`.
pub type Name = Arc<str>;

/// Sort of a message variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Msg,
    Fresh,
    Pub,
}

impl Sort {
    /// Whether a ground term of the given shape may be bound to a variable of this sort.
    pub fn admits(self, t: &Term) -> bool {
        match self {
            Sort::Msg => true,
            Sort::Fresh => matches!(t, Term::Fresh(_) | Term::Var(Var { sort: Sort::Fresh, .. })),
            Sort::Pub => matches!(t, Term::Pub(_) | Term::Var(Var { sort: Sort::Pub, .. })),
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Sort::Msg => "",
            Sort::Fresh => "~",
            Sort::Pub => "$",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Self {
        Var { name: Name::from(name), sort }
    }

    pub fn msg(name: &str) -> Self {
        Var::new(name, Sort::Msg)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sort.prefix(), self.name)
    }
}

/// A fresh name: `label` is the rule variable it was drawn for, `index` is the
/// unique allocation number within one execution.
#[derive(Clone, Debug)]
pub struct FreshName {
    pub label: Name,
    pub index: u32,
}

impl PartialEq for FreshName {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Eq for FreshName {}

impl Hash for FreshName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state)
    }
}

impl PartialOrd for FreshName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FreshName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index.cmp(&other.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Fresh(FreshName),
    Pub(Name),
    Const(Name),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn fresh(label: &str, index: u32) -> Term {
        Term::Fresh(FreshName { label: Name::from(label), index })
    }

    pub fn public(name: &str) -> Term {
        Term::Pub(Name::from(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Name::from(name))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(Name::from(f), args)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::app("pair", vec![a, b])
    }

    /// Right-nested tuple: `<a, b, c>` is `pair(a, pair(b, c))`.
    pub fn tuple(mut items: Vec<Term>) -> Term {
        assert!(!items.is_empty(), "empty tuple");
        let mut acc = items.pop().unwrap();
        while let Some(t) = items.pop() {
            acc = Term::pair(t, acc);
        }
        acc
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    /// Atoms (including nullary constants) have depth 0; an application is one deeper than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) if !args.is_empty() => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }

    /// Public atoms the adversary always knows.
    pub fn is_public_atom(&self) -> bool {
        matches!(self, Term::Pub(_) | Term::Const(_))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }

    /// All subterms in pre-order, including `self`.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            if let Term::App(_, args) = t {
                stack.extend(args.iter().rev());
            }
        }
        out
    }

    pub fn fresh_names(&self, out: &mut Vec<FreshName>) {
        match self {
            Term::Fresh(n) => out.push(n.clone()),
            Term::App(_, args) => args.iter().for_each(|a| a.fresh_names(out)),
            _ => {}
        }
    }

    /// Replace every fresh name using `f`.
    pub fn map_fresh(&self, f: &mut impl FnMut(&FreshName) -> FreshName) -> Term {
        match self {
            Term::Fresh(n) => Term::Fresh(f(n)),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_fresh(f)).collect()),
            t => t.clone(),
        }
    }

    /// Subterm at a position (sequence of argument indices).
    pub fn at(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                Term::App(_, args) => args.get(*i)?.at(rest),
                _ => None,
            },
        }
    }

    /// Copy of `self` with the subterm at `pos` replaced.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Term {
        match pos.split_first() {
            None => new,
            Some((i, rest)) => match self {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[*i] = args[*i].replace_at(rest, new);
                    Term::App(f.clone(), args)
                }
                _ => panic!("position out of range"),
            },
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Fresh(n) => write!(f, "~{}#{}", n.label, n.index),
            Term::Pub(n) => write!(f, "${n}"),
            Term::Const(c) => write!(f, "'{c}'"),
            Term::App(g, args) if &**g == "pair" && args.len() == 2 => {
                write!(f, "<{}", args[0])?;
                let mut rest = &args[1];
                while let Term::App(h, inner) = rest {
                    if &**h != "pair" || inner.len() != 2 {
                        break;
                    }
                    write!(f, ", {}", inner[0])?;
                    rest = &inner[1];
                }
                write!(f, ", {rest}>")
            }
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_equality_ignores_label() {
        assert_eq!(Term::fresh("k", 3), Term::fresh("n", 3));
        assert_ne!(Term::fresh("k", 3), Term::fresh("k", 4));
    }

    #[test]
    fn tuple_desugars_to_nested_pairs() {
        let t = Term::tuple(vec![Term::constant("a"), Term::constant("b"), Term::constant("c")]);
        assert_eq!(
            t,
            Term::pair(Term::constant("a"), Term::pair(Term::constant("b"), Term::constant("c")))
        );
        assert_eq!(t.to_string(), "<'a', 'b', 'c'>");
    }

    #[test]
    fn depth_counts_applications() {
        let k = Term::fresh("k", 1);
        assert_eq!(k.depth(), 0);
        let t = Term::app("enc", vec![Term::app("hash", vec![k.clone()]), k]);
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn sort_admission() {
        assert!(Sort::Fresh.admits(&Term::fresh("k", 0)));
        assert!(!Sort::Fresh.admits(&Term::public("A")));
        assert!(!Sort::Pub.admits(&Term::fresh("k", 0)));
        assert!(Sort::Msg.admits(&Term::public("A")));
    }
}
