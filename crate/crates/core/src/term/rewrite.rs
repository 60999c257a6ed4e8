use std::fmt;

use thiserror::Error;

use super::{match_term, Signature, Sort, Substitution, Term, Var};

/// An oriented equation `lhs = rhs`, applied left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteEquation {
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("left-hand side must be a function application")]
    VariableLhs,
    #[error("right-hand side must be a variable of the left-hand side or a ground constant")]
    NotSubtermConvergent,
}

impl RewriteEquation {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self, EquationError> {
        if !matches!(lhs, Term::App(..)) {
            return Err(EquationError::VariableLhs);
        }
        let ok = match &rhs {
            Term::Var(v) => lhs.contains_var(v),
            t => t.is_ground() && t.depth() == 0,
        };
        if !ok {
            return Err(EquationError::NotSubtermConvergent);
        }
        Ok(RewriteEquation { lhs, rhs })
    }

    fn root(&self) -> &str {
        match &self.lhs {
            Term::App(f, _) => f,
            _ => unreachable!("checked at construction"),
        }
    }
}

impl fmt::Display for RewriteEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

fn v(n: &str) -> Term {
    Term::Var(Var::new(n, Sort::Msg))
}

fn app(f: &str, args: Vec<Term>) -> Term {
    Term::app(f, args)
}

/// Built-in subterm-convergent equations.
pub fn builtin_equations() -> Vec<RewriteEquation> {
    let eq = |l, r| RewriteEquation::new(l, r).expect("built-in equation is well formed");
    vec![
        eq(app("fst", vec![Term::pair(v("x"), v("y"))]), v("x")),
        eq(app("snd", vec![Term::pair(v("x"), v("y"))]), v("y")),
        eq(app("dec", vec![app("enc", vec![v("m"), v("k")]), v("k")]), v("m")),
        eq(
            app("adec", vec![app("aenc", vec![v("m"), app("pk", vec![v("k")])]), v("k")]),
            v("m"),
        ),
        eq(
            app(
                "verify",
                vec![app("sign", vec![v("m"), v("k")]), v("m"), app("pk", vec![v("k")])],
            ),
            app("true", vec![]),
        ),
        eq(app("getmsg", vec![app("sign", vec![v("m"), v("k")])]), v("m")),
    ]
}

/// Equations of a theory, used to compute normal forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteSystem {
    equations: Vec<RewriteEquation>,
}

impl Default for RewriteSystem {
    fn default() -> Self {
        Self::builtin()
    }
}

impl RewriteSystem {
    pub fn builtin() -> Self {
        RewriteSystem { equations: builtin_equations() }
    }

    /// Built-ins plus user equations; duplicates of built-ins are dropped.
    pub fn with_user(user: &[RewriteEquation]) -> Self {
        let mut sys = Self::builtin();
        for e in user {
            if !sys.equations.contains(e) {
                sys.equations.push(e.clone());
            }
        }
        sys
    }

    pub fn equations(&self) -> &[RewriteEquation] {
        &self.equations
    }

    /// Normal form of `t` (innermost strategy).
    pub fn normalize(&self, t: &Term) -> Term {
        match t {
            Term::App(f, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.normalize(a)).collect();
                let t = Term::App(f.clone(), args);
                match self.rewrite_root(&t) {
                    // right-hand sides are subterms of normal forms or constants
                    Some(r) => r,
                    None => t,
                }
            }
            other => other.clone(),
        }
    }

    /// Normalize after checking every symbol against `sig`.
    pub fn normalize_checked(&self, sig: &Signature, t: &Term) -> Result<Term, super::TermError> {
        sig.check(t)?;
        Ok(self.normalize(t))
    }

    /// One rewrite step at the root, if some equation applies.
    pub fn rewrite_root(&self, t: &Term) -> Option<Term> {
        let Term::App(f, _) = t else { return None };
        self.equations
            .iter()
            .filter(|e| e.root() == &**f)
            .find_map(|e| match_term(&e.lhs, t).map(|s| s.apply_raw(&e.rhs)))
    }

    /// Positions of all redexes in `t`.
    pub fn redex_positions(&self, t: &Term) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_redexes(t, &mut Vec::new(), &mut out);
        out
    }

    fn collect_redexes(&self, t: &Term, pos: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if self.rewrite_root(t).is_some() {
            out.push(pos.clone());
        }
        if let Term::App(_, args) = t {
            for (i, a) in args.iter().enumerate() {
                pos.push(i);
                self.collect_redexes(a, pos, out);
                pos.pop();
            }
        }
    }

    /// Rewrite the redex at `pos`; `None` if there is none there.
    pub fn rewrite_at(&self, t: &Term, pos: &[usize]) -> Option<Term> {
        let sub = t.at(pos)?;
        let r = self.rewrite_root(sub)?;
        Some(t.replace_at(pos, r))
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        self.redex_positions(t).is_empty()
    }

    /// Apply `s` and normalize.
    pub fn apply(&self, s: &Substitution, t: &Term) -> Term {
        self.normalize(&s.apply_raw(t))
    }
}
