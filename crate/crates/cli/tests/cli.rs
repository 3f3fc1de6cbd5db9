use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ambigen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambigen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

#[test]
fn catalan_count() {
    let o = ambigen(&["cfg", "count", "-g", &data("catalan.cfg"), "-n", "4"]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "5");
}

#[test]
fn singleton_slice_sample() {
    let o = ambigen(&["dfa", "sample", "-a", &data("ab.dfa"), "-n", "2", "--seed", "7"]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "ab");
}

#[test]
fn permanent_of_ones() {
    let o = ambigen(&["pb", "perm", "-m", &data("ones3.mat"), "--method", "fraction"]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "6");
}

#[test]
fn statistics_line() {
    let o = ambigen(&["dfa", "sample", "-a", &data("ab.dfa"), "-n", "2", "--seed", "7"]);
    assert_eq!(stdout(&o), "ab\n# trials 1 bits 0 seed 7\n");
}

#[test]
fn json_lines_fields() {
    let o = ambigen(&[
        "dfa",
        "sample",
        "-a",
        &data("sigma3.dfa"),
        "-n",
        "4",
        "--seed",
        "3",
        "--delta",
        "1/1024",
        "--format",
        "json-lines",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    for key in ["value", "trials", "bits", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 3);
    assert_eq!(v["value"].as_str().unwrap().len(), 4);
}

#[test]
fn failure_exits_two() {
    let o = ambigen(&[
        "dfa",
        "sample",
        "-a",
        &data("sigma3.dfa"),
        "-n",
        "1",
        "--trials",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("FAIL (⊥)"));
    let o = ambigen(&[
        "dfa",
        "sample",
        "-a",
        &data("sigma3.dfa"),
        "-n",
        "1",
        "--trials",
        "0",
        "--seed",
        "1",
        "--format",
        "json-lines",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL (⊥)"));
    assert!(stdout(&o).contains("\"value\":null"));
}

#[test]
fn parse_error_has_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.dfa");
    std::fs::write(
        &p,
        "states 2\nalphabet a\nstart 0\nfinals 1\ntrans 0 a 1\ntrans 0 b 1\n",
    )
    .unwrap();
    let o = ambigen(&["dfa", "count", "-a", p.to_str().unwrap(), "-n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.dfa:6:"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ambigen(&["dfa", "frobnicate"]).status.code(), Some(1));
    assert_eq!(
        ambigen(&["pb", "count", "-m", &data("ones3.mat")]).status.code(),
        Some(1)
    );
    assert_eq!(
        ambigen(&["dfa", "sample", "-a", &data("ab.dfa"), "-n", "2", "--delta", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ambigen(&["dfa", "count", "-a", "/nonexistent/x.dfa", "-n", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ambigen(&["--help"]).status.code(), Some(0));
}

#[test]
fn repeat_is_ordered_and_matches_single_runs() {
    let f = data("sigma3.dfa");
    let o = ambigen(&["dfa", "sample", "-a", &f, "-n", "6", "--seed", "10", "--repeat", "8"]);
    assert!(o.status.success());
    let mut single = String::new();
    for s in 10..18 {
        let seed = s.to_string();
        single += &stdout(&ambigen(&["dfa", "sample", "-a", &f, "-n", "6", "--seed", &seed]));
    }
    assert_eq!(stdout(&o), single);
}

#[test]
fn oracles_agree() {
    let runs: &[&[&str]] = &[
        &["dfa", "count", "-a", &data("traces.dfa"), "-n", "7"],
        &["dfa", "rank", "-a", &data("traces.dfa"), "-w", "acabc"],
        &["dfa", "unrank", "-a", &data("sigma3.dfa"), "-k", "40"],
        &["nfa", "count", "-a", &data("two.nfa"), "-n", "4"],
        &["nfa", "rank", "-a", &data("two.nfa"), "-w", "abab"],
        &["nfa", "unrank", "-a", &data("two.nfa"), "-n", "4", "-k", "5"],
        &["cfg", "count", "-g", &data("catalan.cfg"), "-w", "aaaa"],
        &["cfg", "unrank", "-g", &data("catalan.cfg"), "-n", "5", "-k", "9"],
        &["cfg", "exact", "-g", &data("catalan.cfg"), "-n", "3", "--bound", "2"],
        &["pda", "grammar", "-p", &data("anbn.pda"), "-n", "4"],
        &["pda", "count", "-p", &data("anbn.pda"), "-w", "aaabbb"],
        &["trace", "count", "-a", &data("traces.dfa"), "-w", "acacabc"],
        &["trace", "count", "-a", &data("traces.dfa"), "-n", "6"],
        &["pb", "derand", "-f", &data("e3.sat"), "--kind", "sat"],
        &["pb", "derand", "-f", &data("pair.pb"), "--radius", "1"],
        &["pb", "search", "-f", &data("k3.cut"), "--kind", "cut"],
        &["pb", "perm", "-m", &data("ones3.mat"), "--method", "coefficient"],
    ];
    for args in runs {
        let mut v = args.to_vec();
        v.push("--oracle");
        let o = ambigen(&v);
        let out = stdout(&o);
        assert!(
            o.status.success(),
            "{args:?}: {out}{}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(out.contains("# oracle ok"), "{args:?}: {out}");
    }
}

#[test]
fn sampled_traces_are_members() {
    let o = ambigen(&[
        "trace",
        "sample",
        "-a",
        &data("traces.dfa"),
        "-n",
        "6",
        "--repeat",
        "6",
        "--oracle",
    ]);
    assert!(o.status.success() || o.status.code() == Some(2));
    assert!(!stdout(&o).contains("MISMATCH"));
}
