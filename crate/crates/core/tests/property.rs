mod common;

use common::corpus;
use msr_prover::execution::{explore, Bounds, Engine};
use msr_prover::frontend::parse_theory;
use msr_prover::property::{check_lemma, holds, Evaluator, Formula, Lemma, LemmaMode, Verdict};
use msr_prover::term::{RewriteSystem, Term};
use msr_prover::theory::Theory;

fn theory(name: &str) -> Theory {
    parse_theory(&corpus(name)).unwrap()
}

fn bounds(max_events: usize) -> Bounds {
    Bounds { max_events, ..Bounds::default() }
}

#[test]
fn replay_possible_has_witness() {
    let t = theory("replay_attack.spthy");
    let v = check_lemma(&t, &t.lemmas[0], Bounds::default());
    let Verdict::WitnessFound(trace) = &v else { panic!("{v:?}") };
    let rw = RewriteSystem::builtin();
    let w = Evaluator::new(&rw, &trace.events).witness(&t.lemmas[0].formula).unwrap();
    let m = w.msgs.iter().next().unwrap().1.clone();
    assert!(matches!(&m, Term::App(f, args) if &**f == "mac" && args[0] == Term::constant("message")));
    assert!(w.times["i"] < w.times["j"]);
}

#[test]
fn no_replay_attack_verified() {
    let t = theory("prevent_replay.spthy");
    let v = check_lemma(&t, &t.lemmas[0], bounds(8));
    assert!(matches!(v, Verdict::VerifiedUpToBound { .. }), "{v:?}");
}

#[test]
fn dropping_the_guard_falsifies() {
    let t = theory("prevent_replay_no_guard.spthy");
    let v = check_lemma(&t, &t.lemmas[0], Bounds::default());
    let Verdict::Falsified(trace) = &v else { panic!("{v:?}") };
    assert!(!holds(&t.lemmas[0].formula, &trace.events, &RewriteSystem::builtin()));
    let engine = Engine::new(&t, Bounds::default());
    assert_eq!(engine.replay(trace).unwrap(), trace.final_state);
}

#[test]
fn all_prefix_is_vacuous_on_empty_trace() {
    let t = theory("prevent_replay.spthy");
    assert!(holds(&t.lemmas[0].formula, &[], &RewriteSystem::builtin()));
}

/// Exhaustive evaluation of every explored trace against the pruned search.
fn brute_force(t: &Theory, lemma: &Lemma, b: Bounds) -> bool {
    let rw = t.rewrite_system();
    let want = lemma.mode == LemmaMode::ExistsTrace;
    explore(t, b).any(|tr| holds(&lemma.formula, &tr.events, &rw) == want)
}

#[test]
fn pruned_search_agrees_with_exhaustive_evaluation() {
    for name in ["replay_attack.spthy", "prevent_replay.spthy", "prevent_replay_no_guard.spthy"] {
        let t = theory(name);
        for n in 0..=5 {
            for lemma in &t.lemmas {
                let found = brute_force(&t, lemma, bounds(n));
                let v = check_lemma(&t, lemma, bounds(n));
                assert_eq!(v.trace().is_some(), found, "{name} {} at {n}: {v:?}", lemma.name);
            }
        }
    }
}

#[test]
fn duality_of_all_and_ex() {
    let t = theory("prevent_replay.spthy");
    let lemma = &t.lemmas[0];
    let negated = Lemma::new("Dual", LemmaMode::ExistsTrace, Formula::not(lemma.formula.clone()));
    for n in 0..=5 {
        let a = check_lemma(&t, lemma, bounds(n));
        let b = check_lemma(&t, &negated, bounds(n));
        assert_eq!(matches!(a, Verdict::Falsified(_)), matches!(b, Verdict::WitnessFound(_)));
    }
}
