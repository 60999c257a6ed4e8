mod common;

use std::process::Command;

use common::corpus_path;
use common::dot::check_dot;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_msr-prover")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn prevent_replay_is_verified() {
    let file = corpus_path("prevent_replay.spthy");
    let (code, out, _) = run(&["prove", &file, "--prove", "--max-events", "8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("No_Replay_Attack (all-traces): verified up to bound ("), "{out}");
    assert!(out.contains("analyzed: "));
    assert!(out.contains("processing time: "));
}

#[test]
fn permission_voucher_table() {
    let file = corpus_path("permission_voucher.spthy");
    let (code, out, _) = run(&["prove", &file, "--prove"]);
    assert_eq!(code, 0, "{out}");
    for lemma in
        ["Authentication", "Voucher_Authenticity", "Visitor_Pass_Authenticity", "Data_Items_Confidentiality", "Mutual_Authentication"]
    {
        let line = out.lines().find(|l| l.trim_start().starts_with(&format!("{lemma} ("))).unwrap();
        assert!(line.contains("(all-traces):") && line.contains("verified up to bound"), "{line}");
    }
    // verdicts share one column
    let cols: Vec<usize> = out.lines().filter(|l| l.contains("verified up to bound")).map(|l| l.find("verified").unwrap()).collect();
    assert!(cols.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn falsified_lemma_exits_one_and_prints_trace() {
    let file = corpus_path("prevent_replay_no_guard.spthy");
    let (code, out, _) = run(&["prove", &file]);
    assert_eq!(code, 1);
    assert!(out.contains("No_Replay_Attack (all-traces): falsified - found trace"), "{out}");
    assert!(out.contains("Server_Receives_Message"));
}

#[test]
fn graph_dir_receives_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = corpus_path("replay_attack.spthy");
    let (code, _, _) = run(&["prove", &file, "--graph-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let dot = std::fs::read_to_string(dir.path().join("Replay_Possible.dot")).unwrap();
    check_dot(&dot).unwrap();
}

#[test]
fn json_report() {
    let file = corpus_path("replay_attack.spthy");
    let (code, out, _) = run(&["prove", &file, "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["bounds"]["max_events"], 10);
    assert_eq!(v["all_expectations_met"], true);
    let lemmas = v["lemmas"].as_array().unwrap();
    assert_eq!(lemmas.len(), 1);
    assert_eq!(lemmas[0]["verdict"], "witness-found");
    assert!(lemmas[0]["trace"].as_array().unwrap().iter().any(|e| e["kind"] == "adv_send"));
}

#[test]
fn text_and_json_agree_and_runs_are_deterministic() {
    let file = corpus_path("permission_voucher_skip_pin.spthy");
    let (c1, text1, _) = run(&["prove", &file]);
    let (_, text2, _) = run(&["prove", &file]);
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("processing time")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&text1), strip(&text2));
    let (c2, json, _) = run(&["prove", &file, "--format", "json"]);
    assert_eq!((c1, c2), (1, 1));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for l in v["lemmas"].as_array().unwrap() {
        let name = l["name"].as_str().unwrap();
        let line = text1.lines().find(|x| x.starts_with(&format!("  {name} ("))).unwrap();
        let word = match l["verdict"].as_str().unwrap() {
            "verified" => "verified up to bound",
            "falsified" => "falsified",
            other => panic!("{other}"),
        };
        assert!(line.contains(word), "{line}");
    }
}

#[test]
fn lemma_filter() {
    let file = corpus_path("permission_voucher.spthy");
    let (code, out, _) = run(&["prove", &file, "--lemma", "Mutual_Authentication", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lemmas"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_exit_two() {
    let pv = corpus_path("permission_voucher.spthy");
    assert_eq!(run(&["prove", "missing.spthy"]).0, 2);
    let (code, _, err) = run(&["prove", &pv, "--lemma", "Nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("Nope"));
    assert_eq!(run(&["prove", &pv, "--max-events", "0"]).0, 2);
    assert_eq!(run(&["prove", &pv, "--adv-depth", "x"]).0, 2);
    assert_eq!(run(&["prove", &pv, "--format", "xml"]).0, 2);
}

#[test]
fn invalid_theory_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spthy");
    std::fs::write(&path, "theory Bad\nbegin\nrule R: [ Foo(x) ] --> [ Out(y) ]\nend\n").unwrap();
    let (code, _, err) = run(&["prove", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.spthy:3:"), "{err}");
    assert!(err.contains("UNBOUND_VARIABLE"), "{err}");
}

#[test]
fn thread_cap_does_not_change_results() {
    let file = corpus_path("permission_voucher_no_nonce_guard.spthy");
    let capped = Command::new(env!("CARGO_BIN_EXE_msr-prover"))
        .args(["prove", &file, "--format", "json"])
        .env("MSR_PROVER_THREADS", "1")
        .output()
        .unwrap();
    let (_, free, _) = run(&["prove", &file, "--format", "json"]);
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v["elapsed_ms"] = 0.into();
        for l in v["lemmas"].as_array_mut().unwrap() {
            l["elapsed_ms"] = 0.into();
        }
        v
    };
    assert_eq!(strip(&String::from_utf8(capped.stdout).unwrap()), strip(&free));
}
