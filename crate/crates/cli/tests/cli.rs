use std::io::Write;
use std::process::{Command, Output};

fn nbe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbe")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim_end().to_string()
}

#[test]
fn check_reports_the_formula() {
    let out = nbe(&["check", "-e", "fun a => a", "-t", "X -> X"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok : X -> X");
}

#[test]
fn context_can_be_a_file() {
    let mut file = tempfile();
    writeln!(file.1, "# hypotheses\nc : X \\/ Y.").unwrap();
    let out = nbe(&["normalize", "-c", file.0.to_str().unwrap(), "-e", "c", "-t", "X \\/ Y"]);
    assert_eq!(stdout(&out), "case c of inl a0 => inl a0 | inr a1 => inr a1");
    std::fs::remove_file(&file.0).unwrap();
}

fn tempfile() -> (std::path::PathBuf, std::fs::File) {
    let path = std::env::temp_dir().join(format!("nbe-cli-{}.mqc", std::process::id()));
    let file = std::fs::File::create(&path).unwrap();
    (path, file)
}

#[test]
fn parse_errors_exit_with_two() {
    let out = nbe(&["check", "-e", "fun a => a", "-t", "X -> (X"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 8"));
}

#[test]
fn type_errors_exit_with_one() {
    let out = nbe(&["check", "-e", "fun a => a", "-t", "X -> Y"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`X`") && err.contains("`Y`"), "{err}");
}

#[test]
fn normalize_examples() {
    let out = nbe(&["normalize", "-c", "c : X \\/ Y.", "-e", "c", "-t", "X \\/ Y"]);
    assert_eq!(stdout(&out), "case c of inl a0 => inl a0 | inr a1 => inr a1");
    let out = nbe(&["normalize", "-e", "fun a => a", "-t", "X -> X"]);
    assert_eq!(stdout(&out), "fun a0 => a0");
    let out = nbe(&["normalize", "-c", "b : X.", "-e", "b", "-t", "X", "--strategy", "cbv"]);
    assert_eq!(out.status.code(), Some(3));
    let out = nbe(&["normalize", "-e", "fun a => fun b => b", "-t", "X -> Y -> Y", "--strategy", "cbv"]);
    assert_eq!(stdout(&out), "fun a0 => fun a1 => a1");
}

#[test]
fn normal_forms_round_trip_through_check() {
    let ctx = "c : X \\/ Y. d : X.";
    let out = nbe(&["normalize", "-c", ctx, "-e", "(case c of inl a1 => fun b => b | inr a2 => fun b => b) d", "-t", "X"]);
    let nf = stdout(&out);
    assert_eq!(nf, "case c of inl a0 => d | inr a1 => d");
    let out = nbe(&["check", "-c", ctx, "-e", &nf, "-t", "X"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reduce_and_fuel() {
    let out = nbe(&["reduce", "-e", "(fun a => a) b", "-c", "b : X.", "-t", "X"]);
    assert_eq!(stdout(&out), "b");
    let out = nbe(&["reduce", "-e", "(fun a => a a) (fun a => a a)", "--fuel", "20"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn equal_exit_status() {
    let out = nbe(&["equal", "-c", "b : X.", "-e", "inl b", "-e", "inr b", "-t", "X \\/ X"]);
    assert_eq!(out.status.code(), Some(1));
    let out = nbe(&[
        "equal",
        "-c",
        "f : X -> Y. b : X.",
        "-e",
        "f b",
        "-e",
        "fst ((fun a => f a) b, fun c => c)",
        "-t",
        "Y",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "equal");
}

#[test]
fn generated_problems_pass_the_harness() {
    let out = nbe(&["harness", "--seed", "7", "--count", "40", "--size", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = nbe(&["gen", "--seed", "3", "--size", "12", "--redexes", "2"]);
    let text = stdout(&out);
    assert!(text.contains("# goal: ") && text.contains("# term: "));
}
