//! End-to-end checks of the pkb binary: flag handling, exit codes, the
//! repl loop over piped stdin, and the shape of text and structured
//! output. Everything runs from the workspace root so the fixture paths
//! in the commands read like the ones in the readme.

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn pkb(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pkb"));
    cmd.args(args).current_dir(root());
    cmd
}

fn run(args: &[&str]) -> Output {
    pkb(args).output().expect("spawn pkb")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["query", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    let missing_arg = run(&["query"]);
    assert_eq!(missing_arg.status.code(), Some(1));

    let no_kb = run(&["query", "can(car, move)?"]);
    assert_eq!(no_kb.status.code(), Some(1));
    assert!(stderr(&no_kb).contains("--kb"), "{}", stderr(&no_kb));

    let unknown_flag = run(&["query", "x?", "--frobnicate"]);
    assert_eq!(unknown_flag.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let absent = run(&["query", "can(car, move)?", "--kb", "kb/fixtures/no_such.pkb"]);
    assert_eq!(absent.status.code(), Some(2));
    assert!(stderr(&absent).contains("no_such.pkb"), "{}", stderr(&absent));

    let bad_query = run(&["query", "p(", "--kb", "kb/fixtures/example_format.pkb"]);
    assert_eq!(bad_query.status.code(), Some(2));
    assert!(stderr(&bad_query).contains("line 1"), "{}", stderr(&bad_query));
}

#[test]
fn query_prints_probability_and_status() {
    let out = run(&["query", "can(car, move)?", "--kb", "kb/fixtures/example_format.pkb"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "p=0.72  entailed\n");

    let open = run(&["query", "can(X, move)?", "--kb", "kb/fixtures/example_format.pkb"]);
    let text = stdout(&open);
    assert!(text.contains("X = car  p=0.72  entailed"), "{text}");
    assert!(text.contains("X = animal  p=0.6  entailed"), "{text}");

    let top = run(&["query", "can(X, move)?", "--kb", "kb/fixtures/example_format.pkb", "--top", "1"]);
    let text = stdout(&top);
    assert!(text.contains("car"), "{text}");
    assert!(!text.contains("animal"), "{text}");
}

#[test]
fn unknown_query_prints_unknown() {
    let out = run(&["query", "flies(cow)?", "--kb", "kb/fixtures/example_format.pkb"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "unknown\n");
}

#[test]
fn explain_prints_the_trace() {
    let out = run(&[
        "query",
        "isa(programmer, organism)?",
        "--kb",
        "kb/fixtures/base_scheme.pkb",
        "--explain",
    ]);
    let text = stdout(&out);
    assert!(text.contains("c1"), "{text}");
    assert!(text.contains("f1"), "{text}");
    assert!(text.contains("f2"), "{text}");
}

#[test]
fn pkb_path_resolves_bare_names() {
    let out = pkb(&["query", "can(car, move)?", "--kb", "example_format.pkb"])
        .env("PKB_PATH", root().join("kb/fixtures"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "p=0.72  entailed\n");
}

#[test]
fn structured_output_is_byte_stable() {
    let args = [
        "query",
        "can(X, move)?",
        "--kb",
        "kb/fixtures/example_format.pkb",
        "--format",
        "structured",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    for line in stdout(&first).lines() {
        let record: serde_json::Value = serde_json::from_str(line).expect(line);
        assert!(record["prob"].is_string(), "{line}");
        assert!(record["status"].is_string(), "{line}");
    }
}

fn repl(input: &str, kb: &str) -> String {
    let mut child = pkb(&["repl", "--kb", kb])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    stdout(&out)
}

#[test]
fn repl_asserts_queries_and_resets() {
    let text = repl(
        "assert isa(eat_i, eat).\n\
         assert theme(eat_i, nachos).\n\
         assert property(nachos, \"crispy\").\n\
         subevent(eat_i, E)?\n\
         reset.\n\
         subevent(eat_i, E)?\n\
         quit.\n",
        "kb/fixtures/event_roles.pkb",
    );
    assert!(text.contains("E = \"crunch\"  p=0.9  entailed"), "{text}");
    assert!(text.contains("E = \"salivate\"  p=0.5  entailed"), "{text}");
    assert!(text.contains("session cleared"), "{text}");
    let after_reset = text.rsplit("session cleared").next().unwrap();
    assert!(after_reset.contains("unknown"), "{text}");
    assert!(!after_reset.contains("crunch"), "{text}");
}

#[test]
fn repl_survives_malformed_input() {
    let text = repl(
        "assert isa(eat_i, eat).\n\
         assert broken(((.\n\
         nonsense query ((\n\
         isa(eat_i, Z)?\n\
         quit.\n",
        "kb/fixtures/event_roles.pkb",
    );
    assert!(text.contains("error"), "{text}");
    // The session survives both bad lines: the earlier assert still answers.
    assert!(text.contains("Z = eat  p=1  entailed"), "{text}");
}

#[test]
fn ingest_reports_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("crowd.pkb");
    let out = run(&[
        "ingest",
        "data/crowd_sample.csv",
        "--kb",
        "kb/fixtures/hierarchy.pkb",
        "--ontology",
        "kb/seed.ont",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("added 5, dropped 2"), "{text}");
    assert!(text.contains("unreadable rating `x`"), "{text}");
    assert!(text.contains("only 2 ratings"), "{text}");
    assert!(text.contains("Animal (level 5): 3 facts"), "{text}");
    assert!(text.contains("strongly_likely 100.0% (3)"), "{text}");

    let written = std::fs::read_to_string(&out_path).unwrap();
    assert!(written.contains("@src=crowd"), "{written}");
    let check = run(&["check", "--kb", out_path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0), "{}", stderr(&check));
    assert!(stdout(&check).contains("5 statements"), "{}", stdout(&check));
}

#[test]
fn check_reports_defects_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pkb");
    std::fs::write(&bad, "isa(a, b).\n0.5::broken(.\n").unwrap();
    let out = run(&["check", "--kb", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("line 2"), "{text}");
}

#[test]
fn qa_beam_differs_between_strict_and_lenient() {
    let base = [
        "qa",
        "--kb",
        "kb/semparse_demo.pkb",
        "--rules",
        "rules/mapping.rules",
        "--corpus",
        "corpus/fig_walkthrough.json",
        "--explain",
    ];
    let strict: Vec<&str> = base.iter().copied().chain(["--strict"]).collect();
    let lenient: Vec<&str> = base.iter().copied().chain(["--lenient"]).collect();

    let strict_out = stdout(&run(&strict));
    let lenient_out = stdout(&run(&lenient));
    assert_eq!(strict_out.matches("score=0.63").count(), 2, "{strict_out}");
    assert!(!strict_out.contains("0.0595"), "{strict_out}");
    assert_eq!(lenient_out.matches("score=0.63").count(), 2, "{lenient_out}");
    assert!(lenient_out.contains("score=0.0595"), "{lenient_out}");
}

#[test]
fn qa_answers_a_question_with_sources() {
    let out = run(&[
        "qa",
        "--kb",
        "kb/semparse_demo.pkb",
        "--rules",
        "rules/mapping.rules",
        "--templates",
        "rules/questions.qt",
        "--corpus",
        "corpus/fig_walkthrough.json",
        "What causes the pressure to increase?",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("A: obstruction_ins1"), "{text}");
    assert!(text.contains("interp_1"), "{text}");

    let unmatched = run(&[
        "qa",
        "--kb",
        "kb/semparse_demo.pkb",
        "--rules",
        "rules/mapping.rules",
        "--templates",
        "rules/questions.qt",
        "--corpus",
        "corpus/fig_walkthrough.json",
        "Why is the sky blue?",
    ]);
    assert!(stdout(&unmatched).contains("A: unknown"), "{}", stdout(&unmatched));
}

#[test]
fn qa_structured_output_is_byte_stable() {
    let args = [
        "qa",
        "--kb",
        "kb/semparse_demo.pkb",
        "--rules",
        "rules/mapping.rules",
        "--templates",
        "rules/questions.qt",
        "--corpus",
        "corpus/fig_walkthrough.json",
        "--format",
        "structured",
        "What causes the pressure to increase?",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).lines().all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));
}

#[test]
fn ontology_summary_show_and_check() {
    let summary = run(&["ontology", "--ontology", "kb/seed.ont", "summary"]);
    assert_eq!(summary.status.code(), Some(0));
    assert!(stdout(&summary).contains("22 nodes"), "{}", stdout(&summary));

    let show = run(&["ontology", "--ontology", "kb/seed.ont", "show", "Animal"]);
    assert!(stdout(&show).contains("behavior/2"), "{}", stdout(&show));
    assert!(stdout(&show).contains("from Root"), "{}", stdout(&show));

    let missing = run(&["ontology", "--ontology", "kb/seed.ont", "show", "Unicorn"]);
    assert_eq!(missing.status.code(), Some(2));

    let clauses = run(&["ontology", "--ontology", "kb/seed.ont", "clauses"]);
    assert!(stdout(&clauses).contains(":-"), "{}", stdout(&clauses));
}

#[cfg(unix)]
#[test]
fn closed_pipe_ends_the_process_quietly() {
    // Enough answers to overflow the pipe buffer after the reader is gone.
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.pkb");
    let mut text = String::new();
    for i in 0..20_000 {
        text.push_str(&format!("p(a{i}).\n"));
    }
    std::fs::write(&big, text).unwrap();

    let mut child = pkb(&["query", "p(X)?", "--kb", big.to_str().unwrap()])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let out = child.wait_with_output().unwrap();
    // Killed by SIGPIPE, not exit code 3 with a panic report.
    assert_eq!(out.status.code(), None, "{}", stderr(&out));
    assert!(!stderr(&out).contains("panicked"), "{}", stderr(&out));
}

#[test]
fn ontology_cycle_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let looped = dir.path().join("loop.ont");
    std::fs::write(
        &looped,
        "node Root level=0\nnode A level=1 parents=B\nnode B level=1 parents=A\n",
    )
    .unwrap();
    let out = run(&["ontology", "--ontology", looped.to_str().unwrap(), "check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cycle"), "{}", stderr(&out));
    assert!(stderr(&out).contains("->"), "{}", stderr(&out));
}
