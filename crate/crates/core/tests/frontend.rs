mod common;

use common::corpus;
use msr_prover::frontend::{parse, parse_theory, pretty_print, Code};
use msr_prover::property::LemmaMode;
use msr_prover::theory::{Premise, Reserved};


#[test]
fn replay_attack_parses() {
    let parsed = parse(&corpus("replay_attack.spthy"));
    assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
    let t = parsed.theory.unwrap();
    let names: Vec<&str> = t.rules.iter().map(|r| &*r.name).collect();
    assert_eq!(names, ["Register_Key", "Client_Sends_Message", "Server_Receives_Message"]);
    assert_eq!(t.lemmas.len(), 1);
    assert_eq!(&*t.lemmas[0].name, "Replay_Possible");
    assert_eq!(t.lemmas[0].mode, LemmaMode::ExistsTrace);
    assert_eq!(t.signature.arity("mac"), Some(2));
    assert_eq!(t.signature.declared().len(), 1);
}

#[test]
fn prevent_replay_parses() {
    let parsed = parse(&corpus("prevent_replay.spthy"));
    assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
    let t = parsed.theory.unwrap();
    assert_eq!(t.rules.len(), 3);
    assert_eq!(&*t.lemmas[0].name, "No_Replay_Attack");
    let client = t.rule("Client_Sends_Message").unwrap();
    // the two premise lists around the let block are merged
    assert_eq!(client.premises.len(), 2);
    assert_eq!(client.lets.len(), 1);
    let server = t.rule("Server_Receives_Message").unwrap();
    assert!(matches!(&server.premises[2], Premise::Absent(f) if &*f.name == "Nonce" && f.persistent));
    let schemas = t.schemas();
    assert!(schemas["Nonce"].kind == msr_prover::theory::FactKind::Persistent);
    assert_eq!(schemas["Fr"].reserved, Some(Reserved::Fr));
}

#[test]
fn let_before_or_after_premises_is_the_same_rule() {
    let a = "theory T begin functions: mac/2
        rule R: let m = mac('x', ~k) in [ Fr(~k) ] --> [ Out(m) ] end";
    let b = "theory T begin functions: mac/2
        rule R: [ Fr(~k) ] let m = mac('x', ~k) in --> [ Out(m) ] end";
    assert_eq!(parse_theory(a).unwrap(), parse_theory(b).unwrap());
}

#[test]
fn functions_only() {
    let t = parse_theory("theory F begin functions: enc/2, dec/2, hash/1 end").unwrap();
    assert_eq!(t.signature.declared().len(), 3);
    assert!(t.rules.is_empty());
}

#[test]
fn out_in_premise_is_rejected() {
    let err = parse_theory("theory T begin rule R: [ Out(x) ] --> [ ] end").unwrap_err();
    assert!(err.iter().any(|d| d.code == Code::OutInPremise), "{err:?}");
}

#[test]
fn round_trip_corpus() {
    for name in ["replay_attack.spthy", "prevent_replay.spthy"] {
        let t = parse_theory(&corpus(name)).unwrap();
        let printed = pretty_print(&t);
        let again = parse_theory(&printed).unwrap_or_else(|e| panic!("{printed}\n{e:?}"));
        assert_eq!(t, again, "{printed}");
    }
}

#[test]
fn crafted_malformed_inputs_report_code_and_position() {
    for m in common::malformed::MALFORMED {
        let p = msr_prover::frontend::parse(m.src);
        println!("{}: {:?}", m.name, p.diagnostics.iter().map(|d| format!("{} {}:{}", d.code, d.line, d.col)).collect::<Vec<_>>());
        let hit = p.diagnostics.iter().find(|d| d.code.as_str() == m.code);
        let d = hit.unwrap_or_else(|| panic!("{}: no {} in {:?}", m.name, m.code, p.diagnostics));
        assert_eq!((d.line, d.col), (m.line, m.col), "{}: {d}", m.name);
    }
}
