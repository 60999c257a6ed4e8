//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

pub mod dot;
pub mod malformed;
pub mod terms;
use msr_prover::term::{RewriteSystem, Signature, Term, BUILTIN_FUNCTIONS};
use rand::rngs::StdRng;
use rand::Rng;

pub fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus(name: &str) -> String {
    let path = corpus_path(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Brute-force closure: start from `kb` and the public atoms among the
/// subterms of `kb` and `target`, then apply every function symbol to every
/// tuple of known terms until nothing new appears. Results are kept only if
/// they lie in that subterm universe; a composed term that does not rewrite
/// must respect the depth bound.
pub fn closure_oracle(kb: &[Term], target: &Term, depth_bound: usize) -> bool {
    let rw = RewriteSystem::builtin();
    let sig = Signature::builtin();
    let mut universe: BTreeSet<Term> = BTreeSet::new();
    for t in kb.iter().chain(std::iter::once(target)) {
        for s in t.subterms() {
            universe.insert(s.clone());
        }
    }
    let truth = Term::app("true", vec![]);
    universe.insert(truth.clone());
    let mut known: BTreeSet<Term> = kb.iter().cloned().collect();
    known.insert(truth);
    for t in &universe {
        if matches!(t, Term::Pub(_) | Term::Const(_)) {
            known.insert(t.clone());
        }
    }
    let symbols: Vec<(String, usize)> = BUILTIN_FUNCTIONS
        .iter()
        .filter(|(_, a)| *a > 0)
        .map(|(n, a)| (n.to_string(), *a))
        .collect();
    loop {
        let items: Vec<Term> = known.iter().cloned().collect();
        let mut added = Vec::new();
        for (f, n) in &symbols {
            let mut idx = vec![0usize; *n];
            'tuples: loop {
                let raw = Term::app(f, idx.iter().map(|&i| items[i].clone()).collect());
                let nf = rw.normalize(&raw);
                let rewrote = nf != raw;
                if universe.contains(&nf) && !known.contains(&nf) && (rewrote || raw.depth() <= depth_bound) {
                    added.push(nf);
                }
                // next tuple
                let mut k = 0;
                loop {
                    if k == *n {
                        break 'tuples;
                    }
                    idx[k] += 1;
                    if idx[k] < items.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
        let before = known.len();
        known.extend(added);
        if known.len() == before {
            break;
        }
    }
    let _ = sig;
    known.contains(target)
}

/// All terms of depth at most `depth` over `atoms` and `symbols`, with no
/// normalization (the symbols are expected to carry no equations).
pub fn enumerate_terms(atoms: &[Term], symbols: &[(&str, usize)], depth: usize) -> BTreeSet<Term> {
    let mut level: BTreeSet<Term> = atoms.iter().cloned().collect();
    for _ in 0..depth {
        let items: Vec<Term> = level.iter().cloned().collect();
        let mut next = level.clone();
        for (f, n) in symbols {
            for tuple in tuples(&items, *n) {
                next.insert(Term::app(f, tuple));
            }
        }
        level = next;
    }
    level
}

fn tuples(items: &[Term], n: usize) -> Vec<Vec<Term>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in tuples(items, n - 1) {
        for t in items {
            let mut v = vec![t.clone()];
            v.extend(rest.iter().cloned());
            out.push(v);
        }
    }
    out
}

/// Random ground term over the built-in signature with the given atoms.
pub fn random_term(rng: &mut StdRng, atoms: &[Term], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    let (f, n) = BUILTIN_FUNCTIONS[rng.gen_range(0..BUILTIN_FUNCTIONS.len())];
    let args = (0..n).map(|_| random_term(rng, atoms, depth - 1)).collect();
    Term::app(f, args)
}

/// Random ground term biased towards constructor shapes whose destructors
/// have equations, so analysis has something to do.
pub fn random_message(rng: &mut StdRng, atoms: &[Term], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    let sub = |rng: &mut StdRng| random_message(rng, atoms, depth - 1);
    match rng.gen_range(0..8) {
        0 => Term::app("pair", vec![sub(rng), sub(rng)]),
        1 => Term::app("enc", vec![sub(rng), sub(rng)]),
        2 => {
            let m = sub(rng);
            Term::app("aenc", vec![m, Term::app("pk", vec![sub(rng)])])
        }
        3 => Term::app("sign", vec![sub(rng), sub(rng)]),
        4 => Term::app("hash", vec![sub(rng)]),
        5 => Term::app("mac", vec![sub(rng), sub(rng)]),
        6 => Term::app("pk", vec![sub(rng)]),
        _ => random_term(rng, atoms, depth),
    }
}

/// Pick 1 to 3 atoms of mixed kinds.
pub fn random_atoms(rng: &mut StdRng) -> Vec<Term> {
    let n = rng.gen_range(1..=3);
    (0..n)
        .map(|i| match rng.gen_range(0..3) {
            0 => Term::fresh("n", i),
            1 => Term::public(["A", "B", "C"][i as usize]),
            _ => Term::constant(["a", "b", "c"][i as usize]),
        })
        .collect()
}
