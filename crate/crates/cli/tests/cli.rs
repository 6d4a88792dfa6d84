use std::path::PathBuf;
use std::process::Command;

use lipfree::example52::fixture_function;
use lipfree::io::{FunctionFile, MetricFile, PairsFile};
use lipfree::metric::build_example52;
use lipfree::Rational;
use lipfree_cli::report::{CmVerdictDto, Payload, Report, Verdict};
use serde_json::Value;

fn lipfree(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lipfree")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, contents: &str) -> String {
    let path = scratch(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_owned()
}

/// Runs with `--format json`, checks the exit code and parses the report.
fn json(args: &[&str], code: i32) -> (Report, String) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (got, out, err) = lipfree(&full);
    assert_eq!(got, code, "{args:?}: stdout {out} stderr {err}");
    (serde_json::from_str(&out).unwrap(), out)
}

/// Saves a JSON report and replays it with `verify`.
fn round_trip(name: &str, args: &[&str], code: i32) -> Report {
    let (report, text) = json(args, code);
    let back: Report = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back, report, "report does not round-trip");
    let path = write(name, &text);
    let (vcode, out, err) = lipfree(&["verify", &path]);
    assert_eq!(vcode, 0, "verify {name}: {out}{err}");
    report
}

fn fixture_file() -> String {
    let space = build_example52::<Rational>(1).unwrap();
    let f = FunctionFile::from_function(&space, &fixture_function(&space).unwrap());
    write("fixture.json", &serde_json::to_string(&f).unwrap())
}

#[test]
fn two_cycle_is_refuted_at_gamma_one() {
    let (code, out, _) = lipfree(&["check-cm", "--gamma", "1", "--pairs", "{(0,1),(1,0)}", "line:2"]);
    assert_eq!(code, 2);
    assert!(out.contains("violating cycle"), "{out}");
    let r = round_trip("two-cycle.json", &["check-cm", "--gamma", "1", "--pairs", "{(0,1),(1,0)}", "line:2"], 2);
    let Payload::CheckCm { verdict: CmVerdictDto::Violated(v) } = &r.payload else { panic!() };
    assert_eq!(v.cycle.len(), 2);
    assert_eq!(v.deficit, "-2");
}

#[test]
fn unit_atom_has_norm_one() {
    let (code, out, _) = lipfree(&["norm", "(x1,y1):1", "--metric", "example52:1"]);
    assert_eq!(code, 0);
    assert!(out.contains("norm: 1\n"), "{out}");
    let r = round_trip("norm.json", &["norm", "(x1,y1):1", "--metric", "example52:1"], 0);
    let Payload::Norm { norm, .. } = &r.payload else { panic!() };
    assert_eq!(norm, "1");
}

#[test]
fn example_table_has_the_sharp_row() {
    let (code, out, _) = lipfree(&["example52", "--levels", "1", "--part", "w-d2p"]);
    assert_eq!(code, 2);
    assert!(out.contains("(13/14)(5/2) = 65/28 > 2"), "{out}");
    assert!(out.contains("ABSENT"));
    round_trip("w-d2p.json", &["example52", "--levels", "1", "--part", "w-d2p"], 2);
}

#[test]
fn example_parts_and_exit_codes() {
    let r = round_trip("ex-all.json", &["example52", "--levels", "1", "--part", "all"], 0);
    assert_eq!(r.verdict, Verdict::Holds);
    let r = round_trip("ex-ld2p.json", &["example52", "--levels", "1", "--part", "ld2p", "--gamma", "1/2"], 0);
    let Payload::Example52(e) = &r.payload else { panic!() };
    assert_eq!(e.ld2p.as_ref().unwrap().len(), r.inputs.measures.len());
}

#[test]
fn every_command_replays() {
    round_trip("validate.json", &["validate", "example52:2"], 0);
    let w = round_trip("witness.json", &["witness", "--gamma", "1", "--pairs", "(2,0),(1,0)", "line:3"], 0);
    assert!(matches!(&w.payload, Payload::Witness { function: Some(_), .. }));
    round_trip("witness-no.json", &["witness", "--gamma", "1/2", "--pairs", "(0,1),(1,0)", "line:2"], 2);
    round_trip("optimal.json", &["optimal", "(2,0):1/2,(1,0):1/2", "--metric", "line:3"], 0);
    round_trip("not-optimal.json", &["optimal", "(0,1):1,(1,0):1", "--metric", "line:2"], 2);
    let p = round_trip("positivize.json", &["positivize", "(0,1):-1, (2,1):1/2", "--metric", "line:3"], 0);
    let Payload::Positivize { measure, total_variation } = &p.payload else { panic!() };
    assert!(measure.atoms.iter().all(|a| !a.weight.starts_with('-')));
    assert_eq!(total_variation, "3/2");
    let s = round_trip("slice.json", &["slice-diam", "--alpha", "3/2", "(x1,y1):1", "--metric", "example52:1"], 0);
    let Payload::SliceDiam(d) = &s.payload else { panic!() };
    assert_eq!(d.diameter, "2");
    round_trip("slice-norm.json", &["slice-diam", "--alpha", "1/2", "--normalize", "(1,0):3", "--metric", "line:3"], 0);
    round_trip("two-lip.json", &["two-lip-ltp", "--eps", "1/2", "--pairs", "(x1,y1)", "example52:2"], 0);
    round_trip("two-lip-no.json", &["two-lip-ltp", "--eps", "1/2", "--pairs", "(1,0)", "line:2"], 2);
    round_trip("ld2p.json", &["ld2p-cert", "--gamma", "1/2", "(x1,y1):1", "--metric", "example52:1"], 0);
    round_trip("ld2p-no.json", &["ld2p-cert", "--gamma", "1/2", "(1,0):1", "--metric", "line:2"], 2);
    round_trip(
        "sd2p.json",
        &["sd2p-cert", "--gamma", "1/2", "(x1,y1):1", "(x2,y2):1", "--metric", "example52:2"],
        0,
    );
    round_trip("sd2p-no.json", &["sd2p-cert", "--gamma", "1/2", "(1,0):1", "--metric", "line:2"], 2);
    let pr = round_trip(
        "prune.json",
        &["prune-cm", "--gamma", "3/4", "--bound", "2", "--pairs", "(2,0),(1,0)", "(2,0):1/2,(1,0):1/2", "--metric", "line:3"],
        0,
    );
    let Payload::PruneCm(dto) = &pr.payload else { panic!() };
    assert_eq!(dto.kept.pairs.len() + dto.dropped.pairs.len(), 2);
}

#[test]
fn lip_ltp_with_fixture_function() {
    let f = fixture_file();
    let subset = "x1,x2,x3,y1,y2,y3";
    let r = round_trip("ltp-absent.json", &["lip-ltp", "--eps", "1/14", "--subset", subset, "--function", &f, "example52:1"], 2);
    assert_eq!(r.verdict, Verdict::Absent);
    let r = round_trip("ltp-found.json", &["lip-ltp", "--eps", "1/2", "--subset", subset, "--function", &f, "example52:1"], 0);
    assert_eq!(r.verdict, Verdict::Holds);
}

#[test]
fn invalid_metric_is_refuted() {
    let bad = MetricFile {
        points: vec!["a".into(), "b".into(), "c".into()],
        base: "a".into(),
        distances: vec![
            vec!["0".into(), "1".into(), "3".into()],
            vec!["1".into(), "0".into(), "1".into()],
            vec!["3".into(), "1".into(), "0".into()],
        ],
    };
    let path = write("bad-metric.json", &serde_json::to_string(&bad).unwrap());
    let (code, out, _) = lipfree(&["validate", &path]);
    assert_eq!(code, 2);
    assert!(out.contains("violation"), "{out}");
    round_trip("bad-metric-report.json", &["validate", &path], 2);
}

#[test]
fn input_errors_exit_one() {
    let malformed = write("malformed.json", "{ not json");
    for args in [
        vec!["validate", malformed.as_str()],
        vec!["check-cm", "--gamma", "1", "--pairs", "(a,b)", "line:2"],
        vec!["check-cm", "--gamma", "2", "--pairs", "(0,1)", "line:2"],
        vec!["check-cm", "--gamma", "0", "--pairs", "(0,1)", "line:2"],
        vec!["check-cm", "--gamma", "one", "--pairs", "(0,1)", "line:2"],
        vec!["norm", "(x1,y1):1", "--metric", "nowhere:1"],
        vec!["slice-diam", "--alpha", "3", "(1,0):1", "--metric", "line:2"],
        vec!["ld2p-cert", "--gamma", "1/2", "(0,1):1,(1,0):1", "--metric", "line:2"],
        vec!["ld2p-cert", "--gamma", "1", "(1,0):1", "--metric", "line:2"],
        vec!["two-lip-ltp", "--eps", "0", "--pairs", "(1,0)", "line:2"],
        vec!["example52", "--levels", "1", "--part", "nope"],
        vec!["verify", "/nonexistent/report.json"],
        vec!["no-such-command"],
    ] {
        let (code, out, err) = lipfree(&args);
        assert_eq!(code, 1, "{args:?}: {out}{err}");
        assert!(!err.is_empty(), "{args:?}: no message");
    }
    assert_eq!(lipfree(&["--help"]).0, 0);
}

#[test]
fn tampered_reports_fail_verification() {
    let (_, text) = json(&["check-cm", "--gamma", "1", "--pairs", "(0,1),(1,0)", "line:2"], 2);
    let original: Value = serde_json::from_str(&text).unwrap();
    let edits: Vec<(&str, Box<dyn Fn(&mut Value)>)> = vec![
        ("deficit", Box::new(|v| v["payload"]["verdict"]["violated"]["deficit"] = "-1".into())),
        ("verdict", Box::new(|v| v["verdict"] = "holds".into())),
        ("inputs", Box::new(|v| v["inputs"]["gammas"][0] = "1/2".into())),
        ("hash", Box::new(|v| v["inputs_sha256"] = "00".into())),
        ("cycle", Box::new(|v| v["payload"]["verdict"]["violated"]["cycle"] = serde_json::json!([0]))),
    ];
    for (name, edit) in edits {
        let mut v = original.clone();
        edit(&mut v);
        let path = write(&format!("tampered-{name}.json"), &v.to_string());
        assert_eq!(lipfree(&["verify", &path]).0, 1, "tampered {name} accepted");
    }

    // a verify report itself has nothing to replay
    let path = write("plain.json", &text);
    let (_, vtext) = json(&["verify", &path], 0);
    let vpath = write("verify-report.json", &vtext);
    assert_eq!(lipfree(&["verify", &vpath]).0, 1);
}

#[test]
fn forged_exhaustion_fails_verification() {
    let (report, _) = json(&["ld2p-cert", "--gamma", "1/2", "(1,0):1", "--metric", "line:2"], 2);
    let mut v = serde_json::to_value(&report).unwrap();
    v["payload"]["tried"][0]["failures"].as_array_mut().unwrap().pop();
    let path = write("forged-ld2p.json", &v.to_string());
    assert_eq!(lipfree(&["verify", &path]).0, 1);
}

#[test]
fn reports_are_deterministic() {
    let args = ["example52", "--levels", "1", "--part", "all"];
    let (first, a) = json(&args, 0);
    let (_, b) = json(&args, 0);
    assert_eq!(a, b);
    // the echo records `--jobs`; everything else must match
    let mut serial = vec!["--jobs", "1"];
    serial.extend_from_slice(&args);
    let (mut c, _) = json(&serial, 0);
    let at = c.command.iter().position(|a| a == "--jobs").unwrap();
    assert_eq!(c.command.drain(at..at + 2).collect::<Vec<_>>(), ["--jobs", "1"]);
    assert_eq!(first, c);
}

#[test]
fn timing_stays_outside_the_certificate() {
    let (timed, text) = json(&["--timing", "norm", "(1,0):1", "--metric", "line:2"], 0);
    let (plain, _) = json(&["norm", "(1,0):1", "--metric", "line:2"], 0);
    assert!(timed.timing_ms.is_some());
    assert_eq!(timed.payload, plain.payload);
    assert_eq!(timed.inputs_sha256, plain.inputs_sha256);
    let path = write("timed.json", &text);
    assert_eq!(lipfree(&["verify", &path]).0, 0);
}

#[test]
fn files_and_inline_arguments_agree() {
    let space = lipfree::metric::line::<Rational>(3).unwrap();
    let metric = write("line3.json", &serde_json::to_string(&MetricFile::from_space(&space)).unwrap());
    let pairs = PairsFile {
        pairs: vec![["2".into(), "0".into()], ["1".into(), "0".into()]],
    };
    let pairs = write("pairs.json", &serde_json::to_string(&pairs).unwrap());
    let (a, _) = json(&["check-cm", "--gamma", "1", "--pairs", &pairs, &metric], 0);
    let (b, _) = json(&["check-cm", "--gamma", "1", "--pairs", "{(2,0),(1,0)}", "line:3"], 0);
    assert_eq!(a.inputs_sha256, b.inputs_sha256);
    assert_eq!(a.payload, b.payload);
}
