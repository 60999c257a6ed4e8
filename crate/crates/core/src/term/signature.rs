use std::collections::BTreeMap;

use thiserror::Error;

use super::{Name, Term};

/// Function symbols available in every theory.
pub const BUILTIN_FUNCTIONS: &[(&str, usize)] = &[
    ("pair", 2),
    ("fst", 1),
    ("snd", 1),
    ("enc", 2),
    ("dec", 2),
    ("aenc", 2),
    ("adec", 2),
    ("pk", 1),
    ("sign", 2),
    ("verify", 3),
    ("getmsg", 1),
    ("true", 0),
    ("mac", 2),
    ("hash", 1),
];

/// Built-ins that carry no equation and may therefore be redeclared with another arity.
const FREE_BUILTINS: &[&str] = &["mac", "hash"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSignature {
    pub name: Name,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("undeclared function symbol `{0}`")]
    Undeclared(String),
    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("`{0}` is a built-in with fixed arity {1}")]
    BuiltinConflict(String, usize),
}

/// Function symbols of a theory: the built-ins plus user declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Name, usize>,
    declared: Vec<FunctionSignature>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Signature {
    pub fn builtin() -> Self {
        Signature {
            arities: BUILTIN_FUNCTIONS.iter().map(|(n, a)| (Name::from(*n), *a)).collect(),
            declared: Vec::new(),
        }
    }

    /// Restricted signature, used for closure computations over a subset of symbols.
    pub fn only(symbols: &[(&str, usize)]) -> Self {
        Signature {
            arities: symbols.iter().map(|(n, a)| (Name::from(*n), *a)).collect(),
            declared: Vec::new(),
        }
    }

    /// Add a user declaration. Redeclaring a symbol with the same arity is a no-op.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<(), TermError> {
        match self.arities.get(name) {
            Some(&a) if a == arity => {}
            Some(&a) => {
                let builtin = BUILTIN_FUNCTIONS.iter().any(|(n, _)| *n == name);
                if builtin && !FREE_BUILTINS.contains(&name) {
                    return Err(TermError::BuiltinConflict(name.to_string(), a));
                }
                if !builtin || self.declared.iter().any(|d| &*d.name == name) {
                    return Err(TermError::Arity {
                        name: name.to_string(),
                        expected: a,
                        got: arity,
                    });
                }
                self.arities.insert(Name::from(name), arity);
            }
            None => {
                self.arities.insert(Name::from(name), arity);
            }
        }
        if !self.declared.iter().any(|d| &*d.name == name) {
            self.declared.push(FunctionSignature { name: Name::from(name), arity });
        }
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    /// User declarations in source order.
    pub fn declared(&self) -> &[FunctionSignature] {
        &self.declared
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.arities.iter().map(|(n, a)| (n, *a))
    }

    /// Nullary symbols: public constants such as `true`.
    pub fn constants(&self) -> impl Iterator<Item = Term> + '_ {
        self.arities
            .iter()
            .filter(|(_, a)| **a == 0)
            .map(|(n, _)| Term::App(n.clone(), Vec::new()))
    }

    /// Every application in `t` uses a declared symbol at its declared arity.
    pub fn check(&self, t: &Term) -> Result<(), TermError> {
        if let Term::App(f, args) = t {
            match self.arity(f) {
                None => return Err(TermError::Undeclared(f.to_string())),
                Some(a) if a != args.len() => {
                    return Err(TermError::Arity {
                        name: f.to_string(),
                        expected: a,
                        got: args.len(),
                    })
                }
                _ => {}
            }
            for a in args {
                self.check(a)?;
            }
        }
        Ok(())
    }
}
