use std::fmt::Write;

use crate::property::LemmaMode;
use crate::theory::{Fact, Premise, ProtocolRule, Theory};

/// Render a theory in the surface syntax. Parsing the output yields a
/// structurally equal theory.
pub fn pretty_print(theory: &Theory) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "theory {}\nbegin\n", theory.name);
    let declared = theory.signature.declared();
    if !declared.is_empty() {
        let list: Vec<String> = declared.iter().map(|d| format!("{}/{}", d.name, d.arity)).collect();
        let _ = writeln!(s, "functions: {}\n", list.join(", "));
    }
    if !theory.equations.is_empty() {
        let list: Vec<String> = theory.equations.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(s, "equations: {}\n", list.join(",\n           "));
    }
    for r in &theory.rules {
        s.push_str(&pretty_rule(r));
        s.push('\n');
    }
    for l in &theory.lemmas {
        let mode = match l.mode {
            LemmaMode::AllTraces => "",
            LemmaMode::ExistsTrace => " exists-trace",
        };
        let _ = writeln!(s, "lemma {}{mode}:\n  \"{}\"\n", l.name, l.formula);
    }
    s.push_str("end\n");
    s
}

fn fact_list(facts: impl Iterator<Item = String>) -> String {
    let items: Vec<String> = facts.collect();
    if items.is_empty() {
        "[ ]".to_string()
    } else {
        format!("[ {} ]", items.join(", "))
    }
}

fn fact(f: &Fact) -> String {
    f.to_string()
}

pub fn pretty_rule(r: &ProtocolRule) -> String {
    let mut s = format!("rule {}:\n", r.name);
    if !r.lets.is_empty() {
        s.push_str("  let\n");
        for (v, t) in &r.lets {
            let _ = writeln!(s, "    {v} = {t}");
        }
        s.push_str("  in\n");
    }
    let premises = r.premises.iter().map(|p| match p {
        Premise::Present(f) => fact(f),
        Premise::Absent(f) => format!("not({f})"),
    });
    let _ = writeln!(s, "  {}", fact_list(premises));
    if r.actions.is_empty() {
        s.push_str("  -->\n");
    } else {
        let acts: Vec<String> = r.actions.iter().map(fact).collect();
        let _ = writeln!(s, "  --[ {} ]->", acts.join(", "));
    }
    let _ = writeln!(s, "  {}", fact_list(r.conclusions.iter().map(fact)));
    s
}
