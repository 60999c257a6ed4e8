use std::collections::BTreeMap;
use std::fmt;

use super::{Term, Var};

/// Finite map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: Var, t: Term) -> Self {
        let mut s = Self::new();
        s.map.insert(v, t);
        s
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) -> Option<Term> {
        self.map.insert(v, t)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.map.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Homomorphic replacement without normalization.
    pub fn apply_raw(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_raw(a)).collect()),
            _ => t.clone(),
        }
    }

    /// `self` followed by `other`: applying the result equals applying `self` then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<Var, Term> =
            self.map.iter().map(|(v, t)| (v.clone(), other.apply_raw(t))).collect();
        for (v, t) in &other.map {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        map.retain(|v, t| *t != Term::Var(v.clone()));
        Substitution { map }
    }

    /// Keep only the bindings for `vars`.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            map: self.map.iter().filter(|(v, _)| vars.contains(v)).map(|(v, t)| (v.clone(), t.clone())).collect(),
        }
    }

    /// Whether `other` agrees with `self` on every variable `self` binds.
    pub fn is_extended_by(&self, other: &Substitution) -> bool {
        self.map.iter().all(|(v, t)| other.map.get(v) == Some(t))
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution { map: iter.into_iter().collect() }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Sort;

    #[test]
    fn compose_is_sequential_application() {
        let x = Var::msg("x");
        let y = Var::msg("y");
        let s1 = Substitution::singleton(x.clone(), Term::Var(y.clone()));
        let s2 = Substitution::singleton(y.clone(), Term::constant("a"));
        let c = s1.compose(&s2);
        let t = Term::app("h", vec![Term::Var(x), Term::Var(y)]);
        assert_eq!(c.apply_raw(&t), s2.apply_raw(&s1.apply_raw(&t)));
        assert_eq!(c.apply_raw(&c.apply_raw(&t)), c.apply_raw(&t));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let t = Term::app("enc", vec![Term::var("m", Sort::Msg), Term::var("k", Sort::Fresh)]);
        assert_eq!(Substitution::new().apply_raw(&t), t);
    }
}
