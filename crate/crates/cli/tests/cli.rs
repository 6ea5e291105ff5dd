use std::path::PathBuf;
use std::process::Command as Process;

use paction_cli::commands::Command;
use paction_cli::{parse_instance, run, serialize, Format, Options, EXIT_INPUT, EXIT_VALID, EXIT_VIOLATION};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn text() -> Options {
    Options::default()
}

#[test]
fn four_cycle_fixture_parses() {
    let doc = parse_instance(&read("four_cycle.paction")).unwrap();
    assert_eq!(doc.quivers[0].vertices, ["1", "2", "3", "4"]);
    assert_eq!(doc.quivers[0].arrows.len(), 4);
    assert_eq!(doc.globals[0].acts.len(), 8);
    assert_eq!(doc.restricts[0].vertices, ["1", "2", "3"]);
    assert_eq!(doc.truncate, Some(3));
    assert_eq!(parse_instance(&serialize(&doc)).unwrap(), doc);
}

#[test]
fn algebra_check_reports_strict_containment() {
    let out = run(Command::AlgebraCheck, &read("four_cycle.paction"), &text());
    assert_eq!(out.code, EXIT_VALID, "{}", out.output);
    assert!(out.output.contains("sum dim = 12, generated dim = 16, strict: yes"), "{}", out.output);
}

#[test]
fn truncate_flag_overrides_the_file() {
    let opts = Options { truncate: Some(2), ..text() };
    let out = run(Command::AlgebraCheck, &read("four_cycle.paction"), &opts);
    assert!(out.output.contains("window: paths of length <= 2"));
    assert!(out.output.contains("sum dim = 12, generated dim = 12, strict: no"), "{}", out.output);
}

#[test]
fn globalize_arrow_fixture() {
    let out = run(Command::Globalize, &read("arrow.paction"), &text());
    assert_eq!(out.code, EXIT_VALID);
    assert!(out.output.contains("# enveloping action: 3 vertices, 3 arrows"));
    for arrow in [
        "(e, f): (e, v1) -> (e, v2)",
        "(t, f): (t, v1) -> (e, v1)",
        "(t2, f): (e, v2) -> (t, v1)",
    ] {
        assert!(out.output.contains(arrow), "{arrow} missing from\n{}", out.output);
    }
    // the printed action is itself a valid instance
    let again = run(Command::Validate, &out.output, &text());
    assert_eq!(again.code, EXIT_VALID, "{}", again.output);
    assert!(again.output.contains("global action beta: valid"));
}

#[test]
fn arrow_fixture_domains_are_not_ideals() {
    let out = run(Command::AlgebraCheck, &read("arrow.paction"), &Options { truncate: Some(1), ..text() });
    assert!(out.output.contains("R_t = span{e_v1}: not an ideal, f · e_v1 = f"), "{}", out.output);
    assert!(out.output.contains("R_t2 = span{e_v2}: not an ideal, e_v2 · f = f"), "{}", out.output);
}

#[test]
fn restrict_output_round_trips() {
    let out = run(Command::Restrict, &read("four_cycle.paction"), &text());
    assert_eq!(out.code, EXIT_VALID);
    assert!(out.output.contains("domain t vertices {2, 3} arrows {b}"));
    assert!(out.output.contains("domain t2 vertices {1, 3} arrows {}"));
    assert!(out.output.contains("domain t3 vertices {1, 2} arrows {a}"));
    let again = run(Command::Validate, &out.output, &text());
    assert_eq!(again.code, EXIT_VALID, "{}", again.output);
}

#[test]
fn broken_intersection_axiom_exits_one() {
    let broken = read("arrow.paction").replace("domain t vertices {v1} arrows {}", "domain t vertices {v1, v2} arrows {}");
    let out = run(Command::Validate, &broken, &text());
    assert_eq!(out.code, EXIT_VIOLATION, "{}", out.output);
    assert!(out.output.contains("violation:"));
    assert!(out.output.contains("invalid"));
    let json = run(Command::Validate, &broken, &Options { format: Format::Structured, ..text() });
    let v: serde_json::Value = serde_json::from_str(&json.output).unwrap();
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn input_errors_exit_two() {
    let empty = run(Command::Validate, "", &text());
    assert_eq!(empty.code, EXIT_INPUT);
    assert!(empty.output.contains("no subject"));

    let bad = run(Command::Validate, "quiver Q\n  vertex 1\n  arrow a : 1 -> 9\nend\n", &text());
    assert_eq!(bad.code, EXIT_INPUT);
    assert!(bad.output.contains("line 3"), "{}", bad.output);

    let two = format!("{}restrict rotation to vertices {{1}} arrows {{}}\n", read("four_cycle.paction"));
    let ambiguous = run(Command::Globalize, &two, &text());
    assert_eq!(ambiguous.code, EXIT_INPUT);
    assert!(ambiguous.output.contains("ambiguous"));

    let missing = run(Command::Globalize, "quiver Q\n vertex 1\nend\n", &text());
    assert_eq!(missing.code, EXIT_INPUT);
}

#[test]
fn inconsistent_generators_are_a_violation() {
    // t acting as a transposition cannot have order 3
    let text_in = "group cyclic 3\nquiver Q\n vertex x\n vertex y\nend\nglobal g on Q\n act t vertex x -> y\n act t vertex y -> x\nend\n";
    let out = run(Command::Validate, text_in, &text());
    assert_eq!(out.code, EXIT_VIOLATION, "{}", out.output);
    let incomplete = "group cyclic 2\nquiver Q\n vertex x\n vertex y\nend\nglobal g on Q\n act t vertex x -> y\nend\n";
    assert_eq!(run(Command::Validate, incomplete, &text()).code, EXIT_INPUT);
}

#[test]
fn structured_reports_are_json() {
    let opts = Options { format: Format::Structured, ..text() };
    let out = run(Command::AlgebraCheck, &read("four_cycle.paction"), &opts);
    let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
    assert_eq!(v["sum_dimension"], 12);
    assert_eq!(v["generated_dimension"], 16);
    assert_eq!(v["strict"], true);
    let out = run(Command::Globalize, &read("arrow.paction"), &opts);
    let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(v["beta"]["t"]["vertices"]["(e, v2)"], "(e, v1)");
    assert_eq!(v["clauses"]["a"], true);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for command in [Command::Validate, Command::Globalize, Command::Restrict, Command::AlgebraCheck, Command::ExportDot] {
        for f in ["four_cycle.paction", "arrow.paction"] {
            let a = run(command, &read(f), &text());
            let b = run(command, &read(f), &text());
            assert_eq!(a, b);
        }
    }
}

#[test]
fn dot_highlights_the_restriction() {
    let out = run(Command::ExportDot, &read("four_cycle.paction"), &text());
    assert_eq!(out.output.matches("->").count(), 4);
    assert_eq!(out.output.matches("color=red").count(), 5);
    let env = run(Command::ExportDot, &read("arrow.paction"), &Options { envelope: true, ..text() });
    assert_eq!(env.output.matches("color=red").count(), 3);
}

#[test]
fn binary_writes_output_file_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let status = Process::new(env!("CARGO_BIN_EXE_paction"))
        .args(["algebra-check", "--input"])
        .arg(fixture("four_cycle.paction"))
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("strict: yes"));

    let empty = dir.path().join("empty.paction");
    std::fs::write(&empty, "").unwrap();
    let result = Process::new(env!("CARGO_BIN_EXE_paction")).arg("validate").arg("--input").arg(&empty).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("no subject"));
}
