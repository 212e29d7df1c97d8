use std::io::Write;
use std::process::{Command, Output, Stdio};

fn pbv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbv")).args(args).output().unwrap()
}

fn pbv_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pbv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&pbv(&["prove", "--system", "bv", "[a|a']"])), 0);
    assert_eq!(code(&pbv(&["prove", "--system", "bv", "[a|b]"])), 1);
    assert_eq!(code(&pbv(&["prove", "--system", "bv", "[a|"])), 2);
    assert_eq!(code(&pbv(&["prove", "--system", "bv", "--budget", "1", "(<a;b>*[a'|b'])"])), 3);
}

#[test]
fn certificates_recheck() {
    let o = pbv(&["prove", "--system", "bvu", "[<a;b>|<a';b'>]"]);
    assert_eq!(code(&o), 0);
    let dir = tempdir();
    let cert = dir.join("p.cert");
    std::fs::write(&cert, stdout(&o)).unwrap();
    let o = pbv(&["prove", "--system", "bvu", "--check", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn sequent_search_output_rechecks() {
    let o = pbv(&["sequent", "search", "[<a;b>|<a';b'>]"]);
    assert_eq!(code(&o), 0);
    let dir = tempdir();
    let proof = dir.join("p.sexp");
    std::fs::write(&proof, stdout(&o)).unwrap();
    let o = pbv(&["sequent", "check", "--cut-free", proof.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn json_outputs_reparse() {
    for args in [
        vec!["parse", "--json", "[a|a']"],
        vec!["graph", "--json", "[(a*b)|c]"],
        vec!["prove", "--json", "--system", "bv", "[a|a']"],
        vec!["pomset-prove", "--json", "[a|a']"],
        vec!["net-check", "--json", "[a|a']"],
        vec!["tiu", "--json", "2"],
        vec!["counterexample", "--json"],
    ] {
        let o = pbv(&args);
        let text = stdout(&o);
        serde_json::from_str::<serde_json::Value>(&text)
            .unwrap_or_else(|e| panic!("bad JSON from {args:?}: {e}\n{text}"));
    }
}

#[test]
fn sat_pipeline_round_trips() {
    let dimacs = "p cnf 2 2\n1 -2 0\n-1 2 0\n";
    let dir = tempdir();
    let cnf = dir.join("f.cnf");
    std::fs::write(&cnf, dimacs).unwrap();
    let cnf = cnf.to_str().unwrap();

    // satisfiable instance: the reduction graph has an æ-cycle and the
    // proofification sequent is pomset-unprovable
    assert_eq!(code(&pbv(&["oracle", "sat", cnf])), 0);
    let g = pbv(&["reduce", "sat2rb", cnf]);
    assert_eq!(code(&g), 0);
    let graph = dir.join("g.json");
    std::fs::write(&graph, stdout(&g)).unwrap();
    assert_eq!(code(&pbv(&["oracle", "aecycle", graph.to_str().unwrap()])), 0);

    let s = pbv(&["reduce", "sat2seq", cnf]);
    assert_eq!(code(&s), 0);
    assert_eq!(code(&pbv_stdin(&["pomset-prove", "-"], &stdout(&s))), 1);

    // proofification of the emitted graph parses and agrees
    let seq = pbv(&["reduce", "rb2seq", graph.to_str().unwrap()]);
    assert_eq!(code(&seq), 0);
    assert_eq!(code(&pbv_stdin(&["pomset-prove", "-"], &stdout(&seq))), 1);
}

#[test]
fn counterexample_separates() {
    let o = pbv(&["counterexample"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("pomset: provable; BV: unprovable"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pbv-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
