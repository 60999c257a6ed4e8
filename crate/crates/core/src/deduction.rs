//! Dolev-Yao adversary knowledge.
//!
//! Knowledge is kept analyzed: every term obtainable by applying an equation
//! to a known term, with the remaining arguments derivable, is stored along
//! with its derivation. Derivability of a target then only needs composition
//! on top of the analyzed set, bounded by the depth of the composed terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::term::{match_term, Name, RewriteEquation, RewriteSystem, Signature, Substitution, Term};
use crate::theory::Theory;

/// How the adversary obtains a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// A term the adversary received.
    Known(Term),
    /// A public name, string constant or nullary function symbol.
    Public(Term),
    /// Application of a function symbol to derived arguments.
    Compose { term: Term, args: Vec<Derivation> },
    /// Application of an equation: `redex` normalizes to `term`.
    Deconstruct { term: Term, redex: Term, args: Vec<Derivation> },
}

impl Derivation {
    pub fn term(&self) -> &Term {
        match self {
            Derivation::Known(t) | Derivation::Public(t) => t,
            Derivation::Compose { term, .. } | Derivation::Deconstruct { term, .. } => term,
        }
    }

    /// Rebuild the root bottom-up from the leaves.
    pub fn replay(&self, rw: &RewriteSystem) -> Term {
        match self {
            Derivation::Known(t) | Derivation::Public(t) => t.clone(),
            Derivation::Compose { term, args } | Derivation::Deconstruct { redex: term, args, .. } => {
                let Term::App(f, _) = term else { return term.clone() };
                rw.normalize(&Term::App(f.clone(), args.iter().map(|a| a.replay(rw)).collect()))
            }
        }
    }

    /// Whether the tree replays to its root and every inner node's stored term
    /// matches what its children produce.
    pub fn is_sound(&self, rw: &RewriteSystem) -> bool {
        match self {
            Derivation::Known(_) | Derivation::Public(_) => true,
            Derivation::Compose { term, args } => {
                args.iter().all(|a| a.is_sound(rw)) && self.replay(rw) == *term
            }
            Derivation::Deconstruct { term, redex, args } => {
                let Term::App(f, rargs) = redex else { return false };
                args.len() == rargs.len()
                    && args.iter().zip(rargs).all(|(a, r)| a.is_sound(rw) && a.term() == r)
                    && rw.normalize(&Term::App(f.clone(), args.iter().map(|a| a.term().clone()).collect())) == *term
            }
        }
    }

    /// Terms built by composition, children before parents.
    pub fn constructions(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_constructions(&mut out);
        out
    }

    fn collect_constructions<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Derivation::Known(_) | Derivation::Public(_) => {}
            Derivation::Compose { term, args } => {
                args.iter().for_each(|a| a.collect_constructions(out));
                out.push(term);
            }
            Derivation::Deconstruct { args, .. } => args.iter().for_each(|a| a.collect_constructions(out)),
        }
    }

    /// Deepest composed term, or 0 if nothing is composed.
    pub fn construction_depth(&self) -> usize {
        self.constructions().iter().map(|t| t.depth()).max().unwrap_or(0)
    }

    /// Leaves that are received terms.
    pub fn leaves(&self) -> Vec<&Term> {
        match self {
            Derivation::Known(t) => vec![t],
            Derivation::Public(_) => Vec::new(),
            Derivation::Compose { args, .. } | Derivation::Deconstruct { args, .. } => {
                args.iter().flat_map(|a| a.leaves()).collect()
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::Known(t) => write!(f, "known {t}"),
            Derivation::Public(t) => write!(f, "public {t}"),
            Derivation::Compose { term, args } => {
                write!(f, "compose {term} [")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "]")
            }
            Derivation::Deconstruct { term, redex, args } => {
                write!(f, "deconstruct {redex} -> {term} [")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// The adversary's knowledge: an analyzed set of ground normal terms, plus
/// the public atoms seen so far. Only grows.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    known: BTreeMap<Term, Arc<Derivation>>,
    public: BTreeSet<Term>,
    // terms that match an equation argument whose side conditions are not yet derivable
    pending: BTreeSet<Term>,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.known.keys().eq(other.known.keys()) && self.public == other.public
    }
}

impl Eq for KnowledgeBase {}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Analyzed (non-public) terms.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.known.keys()
    }

    pub fn public_atoms(&self) -> impl Iterator<Item = &Term> {
        self.public.iter()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.known.contains_key(t) || self.public.contains(t)
    }

    pub fn len(&self) -> usize {
        self.known.len() + self.public.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known.is_empty() && self.public.is_empty()
    }

    pub fn add_public(&mut self, t: Term) {
        self.public.insert(t);
    }

    /// Rename fresh names in every term (used for canonical state keys).
    pub fn map_fresh(&self, f: &mut impl FnMut(&crate::term::FreshName) -> crate::term::FreshName) -> Vec<Term> {
        self.known.keys().map(|t| t.map_fresh(f)).collect()
    }
}

/// Signature, equations and depth bound the adversary works with.
#[derive(Clone, Debug)]
pub struct Adversary {
    pub signature: Signature,
    pub rewrite: RewriteSystem,
    pub depth_bound: usize,
}

impl Adversary {
    pub fn new(signature: Signature, rewrite: RewriteSystem, depth_bound: usize) -> Self {
        Adversary { signature, rewrite, depth_bound }
    }

    pub fn builtin(depth_bound: usize) -> Self {
        Self::new(Signature::builtin(), RewriteSystem::builtin(), depth_bound)
    }

    pub fn for_theory(theory: &Theory, depth_bound: usize) -> Self {
        Self::new(theory.signature.clone(), theory.rewrite_system(), depth_bound)
    }

    /// Knowledge base containing the given terms, analyzed.
    pub fn knowledge(&self, terms: &[Term]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for t in terms {
            self.learn(&mut kb, t);
        }
        kb
    }

    fn is_public(&self, t: &Term) -> bool {
        match t {
            Term::Pub(_) | Term::Const(_) => true,
            Term::App(f, args) => args.is_empty() && self.signature.arity(f) == Some(0),
            _ => false,
        }
    }

    /// Add a received term and close under deconstruction. Returns the
    /// newly analyzed terms in the order they were learned.
    pub fn learn(&self, kb: &mut KnowledgeBase, t: &Term) -> Vec<Term> {
        let t = self.rewrite.normalize(t);
        if self.is_public(&t) {
            kb.public.insert(t);
            return Vec::new();
        }
        if kb.known.contains_key(&t) {
            return Vec::new();
        }
        let mut learned = Vec::new();
        let mut queue = vec![t.clone()];
        kb.known.insert(t.clone(), Arc::new(Derivation::Known(t.clone())));
        learned.push(t);
        loop {
            while let Some(s) = queue.pop() {
                self.deconstruct(kb, &s, &mut queue, &mut learned);
            }
            // new knowledge may unlock earlier blocked terms
            let retry: Vec<Term> = kb.pending.iter().cloned().collect();
            let before = learned.len();
            for s in retry {
                kb.pending.remove(&s);
                self.deconstruct(kb, &s, &mut queue, &mut learned);
            }
            if queue.is_empty() && learned.len() == before {
                break;
            }
        }
        learned
    }

    fn deconstruct(&self, kb: &mut KnowledgeBase, s: &Term, queue: &mut Vec<Term>, learned: &mut Vec<Term>) {
        let mut blocked = false;
        for eq in self.rewrite.equations() {
            let Term::Var(_) = &eq.rhs else { continue };
            let Term::App(g, ps) = &eq.lhs else { continue };
            for (i, p) in ps.iter().enumerate() {
                if !matches!(p, Term::App(..)) {
                    continue;
                }
                let Some(sigma) = match_term(p, s) else { continue };
                match self.apply_equation(kb, eq, g, ps, i, &sigma, s) {
                    Some((r, d)) => {
                        if self.is_public(&r) {
                            kb.public.insert(r);
                        } else if !kb.known.contains_key(&r) {
                            kb.known.insert(r.clone(), Arc::new(d));
                            queue.push(r.clone());
                            learned.push(r);
                        }
                    }
                    None => blocked = true,
                }
            }
        }
        if blocked {
            kb.pending.insert(s.clone());
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_equation(
        &self,
        kb: &KnowledgeBase,
        eq: &RewriteEquation,
        g: &Name,
        ps: &[Term],
        i: usize,
        sigma: &Substitution,
        s: &Term,
    ) -> Option<(Term, Derivation)> {
        let mut args = Vec::with_capacity(ps.len());
        let mut redex = Vec::with_capacity(ps.len());
        for (j, p) in ps.iter().enumerate() {
            if j == i {
                args.push((*kb.known[s]).clone());
                redex.push(s.clone());
                continue;
            }
            let q = sigma.apply_raw(p);
            // arguments with unconstrained variables are not supported as side conditions
            if !q.is_ground() {
                return None;
            }
            let q = self.rewrite.normalize(&q);
            args.push(self.derivable(kb, &q)?);
            redex.push(q);
        }
        let term = self.rewrite.normalize(&sigma.apply_raw(&eq.rhs));
        Some((term.clone(), Derivation::Deconstruct { term, redex: Term::App(g.clone(), redex), args }))
    }

    /// A derivation of `target` (ground, normal) whose composed terms have
    /// depth at most the bound.
    pub fn derivable(&self, kb: &KnowledgeBase, target: &Term) -> Option<Derivation> {
        if let Some(d) = kb.known.get(target) {
            return Some((**d).clone());
        }
        if self.is_public(target) {
            return Some(Derivation::Public(target.clone()));
        }
        match target {
            Term::App(f, args)
                if !args.is_empty()
                    && self.signature.arity(f) == Some(args.len())
                    && target.depth() <= self.depth_bound =>
            {
                let args = args.iter().map(|a| self.derivable(kb, a)).collect::<Option<Vec<_>>>()?;
                Some(Derivation::Compose { term: target.clone(), args })
            }
            _ => None,
        }
    }

    /// Like [`Adversary::derivable`] without building the tree.
    pub fn can_derive(&self, kb: &KnowledgeBase, target: &Term) -> bool {
        if kb.known.contains_key(target) || self.is_public(target) {
            return true;
        }
        match target {
            Term::App(f, args) => {
                !args.is_empty()
                    && self.signature.arity(f) == Some(args.len())
                    && target.depth() <= self.depth_bound
                    && args.iter().all(|a| self.can_derive(kb, a))
            }
            _ => false,
        }
    }

    /// Every term of depth at most the bound the adversary can derive, plus
    /// analyzed terms and public atoms of any depth. Exponential; meant for
    /// small signatures.
    pub fn saturate(&self, kb: &KnowledgeBase) -> BTreeSet<Term> {
        let d = self.depth_bound;
        let mut set: BTreeSet<Term> = kb.known.keys().chain(kb.public.iter()).cloned().collect();
        set.extend(self.signature.constants());
        let symbols: Vec<(Name, usize)> =
            self.signature.symbols().filter(|(_, a)| *a > 0).map(|(n, a)| (n.clone(), a)).collect();
        loop {
            let usable: Vec<Term> = set.iter().filter(|t| t.depth() < d).cloned().collect();
            let mut fresh = BTreeSet::new();
            for (f, arity) in &symbols {
                for_each_tuple(&usable, *arity, &mut |tuple| {
                    let raw = Term::App(f.clone(), tuple.to_vec());
                    let nf = self.rewrite.normalize(&raw);
                    if !set.contains(&nf) {
                        fresh.insert(nf);
                    }
                });
            }
            if fresh.is_empty() {
                return set;
            }
            set.extend(fresh);
        }
    }

    /// Instances of `pattern` under extensions of `subst` that the adversary
    /// can derive. Unbound variables range over known terms and public atoms;
    /// applications are either matched against known terms or composed.
    pub fn candidates(&self, kb: &KnowledgeBase, pattern: &Term, subst: &Substitution) -> Vec<Substitution> {
        let mut out = BTreeSet::new();
        self.collect_candidates(kb, pattern, subst, &mut out);
        out.into_iter().collect()
    }

    fn collect_candidates(
        &self,
        kb: &KnowledgeBase,
        pattern: &Term,
        subst: &Substitution,
        out: &mut BTreeSet<Substitution>,
    ) {
        let p = subst.apply_raw(pattern);
        if p.is_ground() {
            if self.can_derive(kb, &self.rewrite.normalize(&p)) {
                out.insert(subst.clone());
            }
            return;
        }
        match &p {
            Term::Var(v) => {
                for t in kb.known.keys().chain(kb.public.iter()) {
                    if v.sort.admits(t) {
                        let mut s = subst.clone();
                        s.insert(v.clone(), t.clone());
                        out.insert(s);
                    }
                }
            }
            Term::App(f, args) => {
                for t in kb.known.keys() {
                    if let Some(s) = crate::term::match_with(&p, t, subst.clone()) {
                        out.insert(s);
                    }
                }
                if args.is_empty() || self.signature.arity(f) != Some(args.len()) {
                    return;
                }
                let mut partial = BTreeSet::from([subst.clone()]);
                for a in args {
                    let mut next = BTreeSet::new();
                    for s in &partial {
                        self.collect_candidates(kb, a, s, &mut next);
                    }
                    partial = next;
                    if partial.is_empty() {
                        return;
                    }
                }
                for s in partial {
                    let t = s.apply_raw(&p);
                    if t.depth() <= self.depth_bound && self.rewrite.is_normal(&t) {
                        out.insert(s);
                    }
                }
            }
            _ => {}
        }
    }
}

fn for_each_tuple(items: &[Term], n: usize, f: &mut impl FnMut(&[Term])) {
    fn go(items: &[Term], n: usize, acc: &mut Vec<Term>, f: &mut impl FnMut(&[Term])) {
        if acc.len() == n {
            f(acc);
            return;
        }
        for t in items {
            acc.push(t.clone());
            go(items, n, acc, f);
            acc.pop();
        }
    }
    go(items, n, &mut Vec::with_capacity(n), f)
}

/// Derivability over the built-in signature: analyze `kb`, then derive `target`.
pub fn derivable(kb: &[Term], target: &Term, depth_bound: usize) -> Option<Derivation> {
    let adv = Adversary::builtin(depth_bound);
    let kb = adv.knowledge(kb);
    adv.derivable(&kb, &adv.rewrite.normalize(target))
}

/// Saturation over an explicit signature.
pub fn saturate(kb: &[Term], signature: Signature, depth_bound: usize) -> BTreeSet<Term> {
    let adv = Adversary::new(signature, RewriteSystem::builtin(), depth_bound);
    adv.saturate(&adv.knowledge(kb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Var;

    fn k(i: u32) -> Term {
        Term::fresh("k", i)
    }

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    fn app(f: &str, a: Vec<Term>) -> Term {
        Term::app(f, a)
    }

    #[test]
    fn decrypt_with_known_key() {
        let d = derivable(&[app("enc", vec![c("message"), k(0)]), k(0)], &c("message"), 3);
        // public constants are derivable regardless; use a fresh plaintext instead
        assert!(d.is_some());
        let m = Term::fresh("m", 1);
        let d = derivable(&[app("enc", vec![m.clone(), k(0)]), k(0)], &m, 3).unwrap();
        assert!(matches!(d, Derivation::Deconstruct { .. }));
        assert_eq!(d.replay(&RewriteSystem::builtin()), m);
    }

    #[test]
    fn no_decryption_without_key() {
        let m = Term::fresh("m", 1);
        assert!(derivable(&[app("enc", vec![m.clone(), k(0)])], &m, 4).is_none());
    }

    #[test]
    fn composition() {
        let m = Term::fresh("m", 0);
        let pk = app("pk", vec![k(0)]);
        let target = app("aenc", vec![m.clone(), pk.clone()]);
        let d = derivable(&[m, pk], &target, 2).unwrap();
        assert!(matches!(d, Derivation::Compose { .. }));
    }

    #[test]
    fn getmsg_opens_signatures() {
        let v = Term::fresh("v", 0);
        let d = derivable(&[app("sign", vec![v.clone(), k(0)])], &v, 3).unwrap();
        assert!(d.is_sound(&RewriteSystem::builtin()));
    }

    #[test]
    fn blocked_terms_open_later() {
        let adv = Adversary::builtin(3);
        let m = Term::fresh("m", 1);
        let mut kb = adv.knowledge(&[app("enc", vec![m.clone(), k(0)])]);
        assert!(!adv.can_derive(&kb, &m));
        let learned = adv.learn(&mut kb, &k(0));
        assert_eq!(learned, vec![k(0), m.clone()]);
        assert!(adv.can_derive(&kb, &m));
    }

    #[test]
    fn depth_bounds_composition() {
        let a = Term::fresh("a", 0);
        let t = app("hash", vec![app("hash", vec![a.clone()])]);
        assert!(derivable(std::slice::from_ref(&a), &t, 1).is_none());
        assert!(derivable(&[a], &t, 2).is_some());
    }

    #[test]
    fn saturate_contains_constants_and_opens_encryption() {
        let adv = Adversary::new(Signature::only(&[("enc", 2), ("dec", 2)]), RewriteSystem::builtin(), 1);
        let a = Term::fresh("a", 0);
        let b = Term::fresh("b", 1);
        let mut kb = adv.knowledge(&[app("enc", vec![a.clone(), b.clone()]), b]);
        kb.add_public(c("x"));
        let s = adv.saturate(&kb);
        assert!(s.contains(&a));
        assert!(s.contains(&c("x")));
    }

    #[test]
    fn candidates_match_known_terms() {
        let adv = Adversary::builtin(2);
        let sk = k(0);
        let msg = app("sign", vec![Term::public("S"), sk.clone()]);
        let kb = adv.knowledge(std::slice::from_ref(&msg));
        let s = Var::new("S", crate::term::Sort::Pub);
        let sk_var = Var::new("sk", crate::term::Sort::Fresh);
        let pattern = app("sign", vec![Term::Var(s.clone()), Term::Var(sk_var.clone())]);
        let bound = Substitution::singleton(sk_var, sk.clone());
        let found = adv.candidates(&kb, &pattern, &bound);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].get(&s), Some(&Term::public("S")));
    }
}
