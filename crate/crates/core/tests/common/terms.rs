//! Term generators and the algebraic checks run on them.

use msr_prover::term::{unify, RewriteSystem, Sort, Term, BUILTIN_FUNCTIONS};
use rand::rngs::StdRng;
use rand::Rng;

pub fn ground_atoms() -> Vec<Term> {
    vec![
        Term::fresh("n", 0),
        Term::fresh("k", 1),
        Term::public("A"),
        Term::public("B"),
        Term::constant("m"),
        Term::app("true", vec![]),
    ]
}

/// Random ground term of depth at most `depth` in which destructors are
/// often placed over a matching constructor, so that normalization has
/// redexes at many positions.
pub fn random_reducible(rng: &mut StdRng, atoms: &[Term], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    if depth < 3 || rng.gen_bool(0.5) {
        let (f, n) = BUILTIN_FUNCTIONS[rng.gen_range(0..BUILTIN_FUNCTIONS.len())];
        let args = (0..n).map(|_| random_reducible(rng, atoms, depth - 1)).collect();
        return Term::app(f, args);
    }
    // destructor over constructor; keys may sit under pk, one level deeper
    let m = random_reducible(rng, atoms, depth - 2);
    let k = random_reducible(rng, atoms, depth - 3);
    match rng.gen_range(0..6) {
        0 => Term::app("fst", vec![Term::pair(m, k)]),
        1 => Term::app("snd", vec![Term::pair(m, k)]),
        2 => Term::app("dec", vec![Term::app("enc", vec![m, k.clone()]), k]),
        3 => {
            let pk = Term::app("pk", vec![k.clone()]);
            Term::app("adec", vec![Term::app("aenc", vec![m, pk]), k])
        }
        4 => {
            let pk = Term::app("pk", vec![k.clone()]);
            Term::app("verify", vec![Term::app("sign", vec![m.clone(), k]), m, pk])
        }
        _ => Term::app("getmsg", vec![Term::app("sign", vec![m, k])]),
    }
}

/// Normalize by rewriting randomly chosen redexes, checking that every step
/// shrinks the term (which bounds the number of steps).
pub fn normalize_randomly(rw: &RewriteSystem, t: &Term, rng: &mut StdRng) -> Result<Term, String> {
    let mut t = t.clone();
    loop {
        let redexes = rw.redex_positions(&t);
        if redexes.is_empty() {
            return Ok(t);
        }
        let pos = &redexes[rng.gen_range(0..redexes.len())];
        let next = rw.rewrite_at(&t, pos).ok_or_else(|| format!("no redex at {pos:?} in {t}"))?;
        if next.size() >= t.size() {
            return Err(format!("rewrite step did not shrink {t} to {next}"));
        }
        t = next;
    }
}

/// Normal forms exist, are reached by any rewrite order, and are fixed points.
pub fn check_normalization(rw: &RewriteSystem, t: &Term, rng: &mut StdRng) -> Result<(), String> {
    let nf = rw.normalize(t);
    if !rw.is_normal(&nf) {
        return Err(format!("normalize({t}) = {nf} still has a redex"));
    }
    if rw.normalize(&nf) != nf {
        return Err(format!("normalize is not idempotent on {nf}"));
    }
    let other = normalize_randomly(rw, t, rng)?;
    if other != nf {
        return Err(format!("{t}: innermost gives {nf}, random order gives {other}"));
    }
    Ok(())
}

/// Destructors undo their constructors on ground `m` and `k`.
pub fn check_round_trips(rw: &RewriteSystem, m: &Term, k: &Term) -> Result<(), String> {
    let want_m = rw.normalize(m);
    let want_k = rw.normalize(k);
    let pk = Term::app("pk", vec![k.clone()]);
    let cases = [
        ("dec/enc", Term::app("dec", vec![Term::app("enc", vec![m.clone(), k.clone()]), k.clone()]), &want_m),
        ("adec/aenc", Term::app("adec", vec![Term::app("aenc", vec![m.clone(), pk]), k.clone()]), &want_m),
        ("fst/pair", Term::app("fst", vec![Term::pair(m.clone(), k.clone())]), &want_m),
        ("snd/pair", Term::app("snd", vec![Term::pair(m.clone(), k.clone())]), &want_k),
    ];
    for (what, t, want) in cases {
        let got = rw.normalize(&t);
        if &got != want {
            return Err(format!("{what}: {t} normalizes to {got}, expected {want}"));
        }
    }
    Ok(())
}

/// Random term over a few variables and atoms without equations applied.
pub fn random_open_term(rng: &mut StdRng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..5) {
            0 => Term::var(["x", "y", "z"][rng.gen_range(0..3)], Sort::Msg),
            1 => Term::var("f", Sort::Fresh),
            2 => Term::fresh("n", rng.gen_range(0..2)),
            3 => Term::public(["A", "B"][rng.gen_range(0..2)]),
            _ => Term::constant("c"),
        };
    }
    let (f, n) = [("pair", 2), ("enc", 2), ("pk", 1), ("hash", 1)][rng.gen_range(0..4)];
    let args = (0..n).map(|_| random_open_term(rng, depth - 1)).collect();
    Term::app(f, args)
}

/// A pair of open terms that unify about half the time: the second is often
/// an instance of the first with some subterms replaced by variables.
pub fn random_unify_pair(rng: &mut StdRng) -> (Term, Term) {
    let a = random_open_term(rng, 3);
    if rng.gen_bool(0.3) {
        return (a, random_open_term(rng, 3));
    }
    let mut b = a.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let positions = positions(&b);
        let pos = &positions[rng.gen_range(0..positions.len())];
        let new = if rng.gen_bool(0.5) {
            Term::var(["x", "y", "z", "w"][rng.gen_range(0..4)], Sort::Msg)
        } else {
            random_open_term(rng, 1)
        };
        b = b.replace_at(pos, new);
    }
    (a, b)
}

fn positions(t: &Term) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    if let Term::App(_, args) = t {
        for (i, a) in args.iter().enumerate() {
            out.extend(positions(a).into_iter().map(|mut p| {
                p.insert(0, i);
                p
            }));
        }
    }
    out
}

/// If `a` and `b` unify, the unifier makes them syntactically equal and
/// respects variable sorts. Returns whether they unified.
pub fn check_unify(a: &Term, b: &Term) -> Result<bool, String> {
    let Some(s) = unify(a, b) else { return Ok(false) };
    let (sa, sb) = (s.apply_raw(a), s.apply_raw(b));
    if sa != sb {
        return Err(format!("unifier {s:?} of {a} and {b} gives {sa} and {sb}"));
    }
    for (v, t) in s.iter() {
        if !v.sort.admits(t) {
            return Err(format!("unifier of {a} and {b} binds {v} to {t}"));
        }
    }
    Ok(true)
}
