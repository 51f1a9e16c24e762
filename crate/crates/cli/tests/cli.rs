use std::path::PathBuf;
use std::process::{Command, Output};

fn qdense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdense")).args(args).output().expect("binary runs")
}

fn sample(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "operators", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdense-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn axes_operator_is_not_maximal() {
    let o = qdense(&["check", &sample("axes.json"), "-p", "maximal"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("maximal fail"));
    assert!(stdout(&o).contains("witness point ((1, 1), (2, 2))"), "{}", stdout(&o));
}

#[test]
fn identity_is_quasidense() {
    let o = qdense(&["check", &sample("identity.json"), "-p", "quasidense"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("quasidense pass"));
}

#[test]
fn half_lambda_fails_with_half_gap() {
    let o = qdense(&["check", &sample("lambda-half.json"), "-p", "quasidense", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let w = &v["checks"][0]["report"]["witnesses"][0];
    assert_eq!(w["kind"], "gap");
    assert_eq!(w["probe"]["x"][0], 0.0);
    assert_eq!(w["probe"]["xstar"][0], 1.0);
    assert!((w["gap"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
}

#[test]
fn corpus_names_run_their_expectations() {
    let o = qdense(&["check", "lambda-quadratic-0.25"]);
    assert_eq!(o.status.code(), Some(1), "monotone fails for positive lambda");
    let text = stdout(&o);
    assert!(text.contains("monotone fail"));
    assert!(text.contains("quasidense pass"));
}

#[test]
fn gap_landscape_of_the_identity() {
    let o = qdense(&["gap-landscape", &sample("identity.json"), "--grid", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,xstar1,gap,converged"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[2], "0.0000000000000000e0");
        assert_eq!(cols[3], "true");
        // 17 significant digits
        let mantissa = cols[0].trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{row}");
    }
}

#[test]
fn malformed_input_is_a_usage_error() {
    let bad = tmp_file("bad.json", "{\"space\":\n");
    let o = qdense(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("line 2 column"), "{}", stderr(&o));

    let o = qdense(&["check", "no-such-entry"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn invalid_spec_reports_the_path() {
    let bad = tmp_file(
        "dims.json",
        r#"{"space": {"dim": 2, "p": 2}, "operator": {"zero": {"dim": 3}}}"#,
    );
    let o = qdense(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64), "{}", stderr(&o));
}

#[test]
fn usage_errors() {
    assert_eq!(qdense(&["check", "identity", "-p", "bogus"]).status.code(), Some(64));
    assert_eq!(qdense(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(qdense(&[]).status.code(), Some(64));
    assert_eq!(qdense(&["check", &sample("identity.json"), "--radius", "-1"]).status.code(), Some(64));
    assert_eq!(qdense(&["--help"]).status.code(), Some(0));
    assert_eq!(qdense(&["--version"]).status.code(), Some(0));
}

#[test]
fn corpus_filter() {
    let o = qdense(&["run-corpus", "--filter", "lambda*", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 10);
    assert!(checks.iter().all(|c| c["source"].as_str().unwrap().starts_with("lambda-quadratic-")));

    let o = qdense(&["run-corpus", "--filter", "zzz"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn output_is_deterministic() {
    let args = ["check", &sample("reciprocal.json"), "--format", "json"];
    let a = qdense(&args);
    let b = qdense(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn file_and_corpus_entry_agree() {
    let file = qdense(&["check", &sample("axes.json"), "-p", "monotone,maximal,quasidense", "--format", "csv"]);
    let entry = qdense(&["check", "axes-operator", "-p", "monotone,maximal,quasidense", "--format", "csv"]);
    assert_eq!(file.status.code(), Some(1));
    assert_eq!(entry.status.code(), Some(1));
    let verdicts = |o: &Output| -> Vec<String> {
        let text = stdout(o);
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let at = header.iter().position(|h| *h == "verdict").unwrap();
        lines.map(|l| l.split(',').nth(at).unwrap().to_string()).collect()
    };
    assert_eq!(verdicts(&file), vec!["pass", "fail", "fail"]);
    assert_eq!(verdicts(&file), verdicts(&entry));
}
