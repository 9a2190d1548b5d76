use std::io::Write;
use std::process::{Command, Output};

fn acpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acpm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn normalize_prints_the_normal_form() {
    for (term, expected) in [("a + a", "a"), ("[1] -> a", "delta"), ("a || b", "a . b + b . a + c")] {
        let o = acpm(&["normalize", term]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), format!("{expected}\n"));
    }
}

#[test]
fn normalize_inlines_definitions() {
    let o = acpm(&["normalize", "System"]);
    assert_eq!(stdout(&o), "comm(1) . d\n");
}

#[test]
fn equiv_exit_codes() {
    let o = acpm(&["equiv", "a+b", "b+a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("equivalent\n"));

    let o = acpm(&["equiv", "a.(b+c)", "a.b + a.c"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not equivalent\n"));

    let o = acpm(&["equiv", "[0]->a", "a"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn equiv_json() {
    let o = acpm(&["--json", "equiv", "a || b", "a . b + b . a + c"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equivalent"], true);
    assert_eq!(v["bisimilar"], true);
}

#[test]
fn lts_outputs() {
    let dot = stdout(&acpm(&["lts", "a", "--dot"]));
    assert_eq!(dot.matches("shape=doublecircle").count(), 1);
    assert_eq!(dot.matches(" -> s").count(), 2);

    let dot = stdout(&acpm(&["lts", "delta", "--dot"]));
    assert!(dot.contains("s0 [label=\"delta\"]"));
    assert_eq!(dot.matches(" -> s").count(), 1);

    let v: serde_json::Value = serde_json::from_str(&stdout(&acpm(&["--json", "lts", "a || b"]))).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    assert_eq!(v["transitions"].as_array().unwrap().len(), 5);
}

#[test]
fn diagnostics_carry_positions() {
    let o = acpm(&["normalize", "a +"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("<term>:1:4: "), "{}", stderr(&o));

    let o = acpm(&["normalize", "x . a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("undefined name `x`"));

    let mut file = tempfile::Builder::new().suffix(".acpm").tempfile().unwrap();
    write!(file, "act a, b;\ncomm a | b = z;\n").unwrap();
    let path = file.path().to_str().unwrap();
    let o = acpm(&["--spec", path, "normalize", "a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with(&format!("{path}:2:")), "{}", stderr(&o));
}

#[test]
fn spec_file_and_meadow_override() {
    let mut file = tempfile::Builder::new().suffix(".acpm").tempfile().unwrap();
    write!(file, "act send/1, recv/1, ack/1;\ncomm send | recv = ack;\nmeadow Q0;\n").unwrap();
    let path = file.path().to_str().unwrap();
    let o = acpm(&["--spec", path, "normalize", "send(1/2) | recv(2/4)"]);
    assert_eq!(stdout(&o), "ack(1/2)\n");
    // 1/2 and 2/4 are both 2 in F3.
    let o = acpm(&["--spec", path, "--meadow", "f3", "normalize", "send(1/2) | recv(2)"]);
    assert_eq!(stdout(&o), "ack(2)\n");
    let o = acpm(&["--spec", path, "--debug-guard-chain", "normalize", "send(3) | recv(4)"]);
    assert_eq!(stdout(&o), "delta\n");
}

#[test]
fn axioms_on_the_sample_spec() {
    let o = acpm(&["axioms", "--samples", "30", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("0 failing equation(s)\n"));
}

#[test]
fn axioms_json_is_deterministic() {
    let args = ["--json", "axioms", "--samples", "20", "--seed", "7"];
    let first = stdout(&acpm(&args));
    assert_eq!(first, stdout(&acpm(&args)));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["passed"], true);
    let suites: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert_eq!(suites.len(), 4);
}

#[test]
fn trivial_meadow_separation() {
    let o = acpm(&["axioms", "--meadow", "trivial"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("FAIL     separation"));
    let o = acpm(&["axioms", "--meadow", "trivial", "--strict-separation"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prime_field_meadow_axioms_pass_exhaustively() {
    let o = acpm(&["--json", "axioms", "--meadow", "f3", "--samples", "10"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let meadow = &v["reports"][0];
    assert_eq!(meadow["mode"], "exhaustive");
    assert!(meadow["axioms"].as_array().unwrap().iter().all(|a| a["status"] == "pass" && a["instances"] == 27));
}

#[test]
fn bad_arguments_exit_with_one() {
    assert_eq!(acpm(&["axioms", "--samples", "0"]).status.code(), Some(1));
    assert_eq!(acpm(&["--meadow", "f4", "normalize", "a"]).status.code(), Some(1));
}
