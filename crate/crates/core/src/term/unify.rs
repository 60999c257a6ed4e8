//! Syntactic matching and most-general unification with occurs check.
//!
//! Both work on terms that are already in normal form; there is no narrowing.

use super::{Sort, Substitution, Term, Var};

/// Find the least `σ` with `σ(pattern) = ground`.
pub fn match_term(pattern: &Term, ground: &Term) -> Option<Substitution> {
    match_with(pattern, ground, Substitution::new())
}

/// Extend `subst` so that it maps `pattern` onto `ground`.
pub fn match_with(pattern: &Term, ground: &Term, mut subst: Substitution) -> Option<Substitution> {
    if match_into(pattern, ground, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn match_into(pattern: &Term, ground: &Term, subst: &mut Substitution) -> bool {
    match (pattern, ground) {
        (Term::Var(v), _) => {
            if let Some(bound) = subst.get(v) {
                return bound == ground;
            }
            if !v.sort.admits(ground) {
                return false;
            }
            subst.insert(v.clone(), ground.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_into(x, y, subst))
        }
        (p, g) => p == g,
    }
}

/// Most general unifier of `a` and `b`.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    unify_with(a, b, &Substitution::new())
}

/// Most general unifier of `a` and `b` extending `base`.
pub fn unify_with(a: &Term, b: &Term, base: &Substitution) -> Option<Substitution> {
    let mut bindings: Vec<(Var, Term)> = base.iter().map(|(v, t)| (v.clone(), t.clone())).collect();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((s, t)) = stack.pop() {
        let s = walk(&s, &bindings);
        let t = walk(&t, &bindings);
        if s == t {
            continue;
        }
        match (&s, &t) {
            (Term::Var(v), Term::Var(w)) => {
                // bind the less specific variable
                if v.sort == Sort::Msg {
                    bindings.push((v.clone(), t.clone()));
                } else if w.sort == Sort::Msg || v.sort == w.sort {
                    bindings.push((w.clone(), s.clone()));
                } else {
                    return None;
                }
            }
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if !v.sort.admits(other) || occurs(v, other, &bindings) {
                    return None;
                }
                bindings.push((v.clone(), other.clone()));
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ => return None,
        }
    }
    let vars: Vec<Var> = bindings.iter().map(|(v, _)| v.clone()).collect();
    Some(vars.into_iter().map(|v| {
        let t = resolve(&Term::Var(v.clone()), &bindings);
        (v, t)
    })
    .filter(|(v, t)| *t != Term::Var(v.clone()))
    .collect())
}

fn lookup<'a>(v: &Var, bindings: &'a [(Var, Term)]) -> Option<&'a Term> {
    bindings.iter().rev().find(|(w, _)| w == v).map(|(_, t)| t)
}

fn walk(t: &Term, bindings: &[(Var, Term)]) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v) = &cur {
        match lookup(v, bindings) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn resolve(t: &Term, bindings: &[(Var, Term)]) -> Term {
    match walk(t, bindings) {
        Term::App(f, args) => Term::App(f, args.iter().map(|a| resolve(a, bindings)).collect()),
        other => other,
    }
}

fn occurs(v: &Var, t: &Term, bindings: &[(Var, Term)]) -> bool {
    match walk(t, bindings) {
        Term::Var(w) => &w == v,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, bindings)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n, Sort::Msg)
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn match_decomposes_structure() {
        let pat = Term::app("enc", vec![v("m"), v("k")]);
        let n5 = Term::fresh("n", 5);
        let ground = Term::app("enc", vec![c("message"), n5.clone()]);
        let s = match_term(&pat, &ground).unwrap();
        assert_eq!(s.get(&Var::msg("m")), Some(&c("message")));
        assert_eq!(s.get(&Var::msg("k")), Some(&n5));
    }

    #[test]
    fn match_variable_against_compound() {
        let h = Term::app("hash", vec![c("a")]);
        let s = match_term(&v("v"), &h).unwrap();
        assert_eq!(s.get(&Var::msg("v")), Some(&h));
    }

    #[test]
    fn nonlinear_pattern_conflict() {
        let pat = Term::pair(v("x"), v("x"));
        assert!(match_term(&pat, &Term::pair(c("a"), c("b"))).is_none());
        assert!(match_term(&pat, &Term::pair(c("a"), c("a"))).is_some());
    }

    #[test]
    fn match_respects_sorts() {
        let pat = Term::var("k", Sort::Fresh);
        assert!(match_term(&pat, &Term::public("A")).is_none());
        assert!(match_term(&pat, &Term::fresh("k", 1)).is_some());
    }

    #[test]
    fn unify_identity() {
        assert_eq!(unify(&v("x"), &v("x")), Some(Substitution::new()));
    }

    #[test]
    fn unify_occurs_check() {
        assert_eq!(unify(&v("x"), &Term::app("f", vec![v("x")])), None);
    }

    #[test]
    fn unify_enc() {
        let a = Term::app("enc", vec![v("m"), v("k")]);
        let b = Term::app("enc", vec![v("k2"), c("c")]);
        let s = unify(&a, &b).unwrap();
        assert_eq!(s.get(&Var::msg("m")), Some(&v("k2")));
        assert_eq!(s.get(&Var::msg("k")), Some(&c("c")));
        assert_eq!(s.apply_raw(&a), s.apply_raw(&b));
    }

    #[test]
    fn unify_fresh_with_pub_fails() {
        let a = Term::var("x", Sort::Fresh);
        let b = Term::var("y", Sort::Pub);
        assert!(unify(&a, &b).is_none());
        assert!(unify(&a, &Term::public("A")).is_none());
    }

    #[test]
    fn unify_msg_var_takes_sorted_var() {
        let a = Term::var("x", Sort::Fresh);
        let s = unify(&v("m"), &a).unwrap();
        assert_eq!(s.get(&Var::msg("m")), Some(&a));
    }

    #[test]
    fn unify_chains_resolve_fully() {
        // f(x, y, x) =? f(y, z, 'a')
        let a = Term::app("f", vec![v("x"), v("y"), v("x")]);
        let b = Term::app("f", vec![v("y"), v("z"), c("a")]);
        let s = unify(&a, &b).unwrap();
        assert_eq!(s.apply_raw(&a), s.apply_raw(&b));
        assert_eq!(s.apply_raw(&s.apply_raw(&a)), s.apply_raw(&a));
    }
}
