use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const ARRIVALS: &str = "0 2 1\n5 2 1\n5 1 2\n10 2 1\n15 2 1\n15 1 2\n20 2 1\n25 2 1\n25 1 2\n";
const SERVER: &str = "pserver 1 [0,3] [10,13] [20,23]\n";
const REGULATOR: &str = "interleaved {1: ps 5, 2: ps 10}\n";

fn pireg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pireg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dates(trace: &str) -> Vec<String> {
    trace.lines().map(|l| l.split(' ').next().unwrap().to_string()).collect()
}

#[test]
fn regulates_the_two_flow_example() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", ARRIVALS);
    let c = write(&dir, "c.txt", &format!("# server then regulator\n{SERVER}{REGULATOR}"));
    let out = dir.path().join("e.txt");
    let o = pireg(&["regulate", s(&a), s(&c), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let e = fs::read_to_string(&out).unwrap();
    assert_eq!(dates(&e), ["5", "10", "10", "15", "20", "20", "25", "30", "30"]);
}

#[test]
fn bank_output_keeps_input_numbering() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", ARRIVALS);
    let c = write(&dir, "c.txt", &format!("{SERVER}bank {{1: ps 5, 2: ps 10}}\n"));
    let out = dir.path().join("e.txt");
    assert_eq!(pireg(&["regulate", s(&a), s(&c), "-o", s(&out)]).status.code(), Some(0));
    let e = fs::read_to_string(&out).unwrap();
    assert_eq!(dates(&e), ["5", "10", "8", "15", "20", "18", "25", "30", "28"]);
    // Out-of-order output is still accepted by the delay report.
    let o = pireg(&["delays", s(&a), s(&out)]);
    assert_eq!(stdout(&o), "flow\tworst_case_delay\n1\t5\n2\t3\nall\t5\n");
}

#[test]
fn empty_trace_gives_empty_output() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "# nothing\n");
    let c = write(&dir, "c.txt", &format!("{SERVER}{REGULATOR}"));
    let out = dir.path().join("e.txt");
    assert_eq!(pireg(&["regulate", s(&a), s(&c), "-o", s(&out)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn identity_config_copies_the_input() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", ARRIVALS);
    let c = write(&dir, "c.txt", "identity\n");
    let out = dir.path().join("e.txt");
    assert_eq!(pireg(&["regulate", s(&a), s(&c), "-o", s(&out)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), ARRIVALS);
}

#[test]
fn configuration_errors_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", ARRIVALS);
    let out = dir.path().join("e.txt");
    let run = |config: &str| {
        let c = write(&dir, "c.txt", config);
        pireg(&["regulate", s(&a), s(&c), "-o", s(&out)]).status.code()
    };
    assert_eq!(run("wobble 1\n"), Some(2));
    assert_eq!(run(""), Some(2));
    assert_eq!(run("interleaved {1: ps 5}\n"), Some(3));
    assert_eq!(run("regulator ps 5\n"), Some(3));
    assert_eq!(run("bank {1: ps 5, 2: ps 5}\nidentity\n"), Some(3));
    assert_eq!(run("interleaved {1: lrq 0, 2: ps 5}\n"), Some(3));
    let bad = write(&dir, "bad.txt", "0 2 1\nx 1 1\n");
    let c = write(&dir, "c.txt", "identity\n");
    let o = pireg(&["regulate", s(&bad), s(&c), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn delay_tables() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", ARRIVALS);
    let d = write(&dir, "d.txt", "5 2 1\n7 2 1\n8 1 2\n15 2 1\n17 2 1\n18 1 2\n25 2 1\n27 2 1\n28 1 2\n");
    let e = write(&dir, "e.txt", "5 2 1\n10 2 1\n10 1 2\n15 2 1\n20 2 1\n20 1 2\n25 2 1\n30 2 1\n30 1 2\n");
    let o = pireg(&["delays", s(&a), s(&d)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "flow\tworst_case_delay\n1\t5\n2\t3\nall\t5\n");
    let o = pireg(&["delays", s(&a), s(&e)]);
    assert_eq!(stdout(&o), "flow\tworst_case_delay\n1\t5\n2\t5\nall\t5\n");
    let o = pireg(&["delays", s(&a), s(&a), "--per-packet"]);
    let text = stdout(&o);
    assert!(text.starts_with("flow\tworst_case_delay\n1\t0\n2\t0\nall\t0\n\npacket\tflow\tarrival\tdeparture\tdelay\n"));
    assert!(text.lines().skip(6).all(|l| l.ends_with("\t0")));
    assert_eq!(text.lines().count(), 6 + 9);
}

#[test]
fn mismatched_traces_are_rejected() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "0 2 1\n1 1 1\n");
    let short = write(&dir, "b.txt", "0 2 1\n");
    let early = write(&dir, "c.txt", "0 2 1\n1/2 1 1\n");
    assert_eq!(pireg(&["delays", s(&a), s(&short)]).status.code(), Some(3));
    assert_eq!(pireg(&["delays", s(&a), s(&early)]).status.code(), Some(3));
}

#[test]
fn checks_report_and_set_the_exit_code() {
    let dir = TempDir::new().unwrap();
    let flow1 = write(&dir, "flow1.txt", "0 2 1\n5 2 1\n10 2 1\n15 2 1\n20 2 1\n25 2 1\n");
    let o = pireg(&["check", "regularity", "--op", "ps 5", "--trace", s(&flow1)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "CHECK regularity PASS\n");

    let o = pireg(&["check", "regularity", "--op", "ps 6", "--trace", s(&flow1)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("CHECK regularity FAIL [witness: n=2"));

    let o = pireg(&["check", "dominance"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "CHECK dominance PASS\n".to_string()));

    for seed in ["0", "1", "2"] {
        let o = pireg(&["check", "theorem1", "--sigma", "affine 1 2", "--seed", seed]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("CHECK theorem1 PASS"));
    }
    for name in ["minimality", "shaping-for-free", "c-conditions"] {
        let o = pireg(&["check", name, "--op", "ps 5"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
    assert_eq!(pireg(&["check", "shaping-for-free", "--mode", "per-flow"]).status.code(), Some(0));
}

#[test]
fn minimality_rejects_an_early_candidate() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "d.txt", "5 2 1\n7 2 1\n8 1 2\n");
    let early = write(&dir, "early.txt", "5 2 1\n9 2 1\n9 1 2\n");
    let late = write(&dir, "late.txt", "5 2 1\n11 2 1\n11 1 2\n");
    let args = |c: &Path| {
        pireg(&["check", "minimality", "--ops", "{1: ps 5, 2: ps 10}", "--trace", s(&d), "--candidate", s(c)])
    };
    // Not regular, so it is no candidate at all.
    assert_eq!(args(&early).status.code(), Some(3));
    assert_eq!(args(&late).status.code(), Some(0));
}

#[test]
fn unknown_check_or_missing_argument_is_a_usage_error() {
    assert_eq!(pireg(&["check", "bogus"]).status.code(), Some(2));
    assert_eq!(pireg(&["check", "theorem1"]).status.code(), Some(2));
    assert_eq!(pireg(&["check", "c-conditions"]).status.code(), Some(2));
}

#[test]
fn example_matches_and_is_deterministic() {
    let first = pireg(&["example"]);
    assert_eq!(first.status.code(), Some(0));
    let text = stdout(&first);
    assert!(text.contains("E 5 10 10 15 20 20 25 30 30\n"));
    assert!(text.contains("E' 5 10 8 15 20 18 25 30 28\n"));
    assert!(text.ends_with("MATCH\n"));
    assert_eq!(pireg(&["example"]).stdout, first.stdout);
}

#[test]
fn example_reports_an_altered_golden_value() {
    let dir = TempDir::new().unwrap();
    let golden = stdout(&pireg(&["example"])).replace("MATCH\n", "");
    let ok = write(&dir, "ok.txt", &golden);
    assert_eq!(pireg(&["example", "--golden", s(&ok)]).status.code(), Some(0));
    let altered = write(&dir, "bad.txt", &golden.replace("E 5 10 10 15 20", "E 5 10 10 15 21"));
    let o = pireg(&["example", "--golden", s(&altered)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH E differs at n=5: expected 21, got 20"));
}

#[test]
fn split_pipeline_matches_single_run() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", ARRIVALS);
    let whole = write(&dir, "whole.txt", &format!("{SERVER}damper 1/2\n{REGULATOR}"));
    let first = write(&dir, "first.txt", SERVER);
    let second = write(&dir, "second.txt", &format!("damper 1/2\n{REGULATOR}"));
    let (out, mid, out2) = (dir.path().join("o1"), dir.path().join("mid"), dir.path().join("o2"));
    assert_eq!(pireg(&["regulate", s(&a), s(&whole), "-o", s(&out)]).status.code(), Some(0));
    assert_eq!(pireg(&["regulate", s(&a), s(&first), "-o", s(&mid)]).status.code(), Some(0));
    assert_eq!(pireg(&["regulate", s(&mid), s(&second), "-o", s(&out2)]).status.code(), Some(0));
    assert_eq!(fs::read(&out).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn canonical_traces_round_trip() {
    let dir = TempDir::new().unwrap();
    let canonical = "0 1 1\n1/3 2 2\n1/3 1 1\n7/2 4 3\n";
    let a = write(&dir, "a.txt", "# comment\n0 1 1\n\n2/6 2 2\n1/3 1 1  # same instant\n14/4 4 3\n");
    let c = write(&dir, "c.txt", "identity\n");
    let out = dir.path().join("o");
    assert_eq!(pireg(&["regulate", s(&a), s(&c), "-o", s(&out)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), canonical);
    let again = dir.path().join("o2");
    assert_eq!(pireg(&["regulate", s(&out), s(&c), "-o", s(&again)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&again).unwrap(), canonical);
}
