use std::path::Path;
use std::process::{Command, Output};

use r1_ramsey::space::tree_trunc;
use serde_json::Value;

fn r1ramsey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_r1ramsey")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("report is JSON")
}

fn verify(path: &Path) -> i32 {
    code(&r1ramsey(&["verify", "--certificate", path.to_str().unwrap()]))
}

fn edit(path: &Path, change: impl FnOnce(&mut Value)) {
    let mut value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    change(&mut value);
    std::fs::write(path, serde_json::to_string(&value).unwrap()).unwrap();
}

#[test]
fn listings() {
    let out = r1ramsey(&["enumerate", "--depth", "3", "--what", "approx:2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[..10].windows(2).all(|w| w[0] < w[1]));
    assert_eq!(lines[10], "count: 10");
    assert_eq!(stdout(&r1ramsey(&["enumerate", "--depth", "1", "--what", "blocks"])), "0:0\ncount: 1\n");
    assert!(stdout(&r1ramsey(&["enumerate", "--depth", "3", "--what", "subtrees:1"])).ends_with("count: 4\n"));
    assert_eq!(code(&r1ramsey(&["enumerate", "--depth", "3", "--what", "approx:x"])), 2);
}

#[test]
fn listings_within_a_member_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("member.json");
    let member: r1_ramsey::space::MemberTrunc = "0:0|2:0,2|4:1,2,3".parse().unwrap();
    std::fs::write(&path, serde_json::to_string(&member).unwrap()).unwrap();
    let out = r1ramsey(&["enumerate", "--depth", "3", "--what", "approx:2", "--within", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    // 0:0 then 1 + 3 choices, and 3 tails after each of 2:0 and 2:2
    assert!(stdout(&out).ends_with("count: 10\n"), "{}", stdout(&out));
}

#[test]
fn census() {
    for (n, expected) in [("1", "3"), ("2", "15"), ("3", "135"), ("4", "2295")] {
        let out = r1ramsey(&["count-canonical", "--n", n]);
        assert_eq!((code(&out), stdout(&out).trim().to_string()), (0, expected.to_string()));
    }
    let out = r1ramsey(&["count-canonical", "--n", "3", "--verify"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("135 of 135"));
    assert_eq!(code(&r1ramsey(&["count-canonical", "--n", "0"])), 2);
    assert_eq!(code(&r1ramsey(&["count-canonical", "--n", "11"])), 2);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&r1ramsey(&["canonize", "arn", "--bogus"])), 2);
    assert_eq!(code(&r1ramsey(&["canonize", "arn", "--n", "2", "--depth", "4"])), 2);
    assert_eq!(code(&r1ramsey(&["canonize", "arn", "--n", "2", "--depth", "4", "--feature", "wobble"])), 2);
    assert_eq!(code(&r1ramsey(&["canonize", "arn", "--n", "2", "--depth", "4", "--feature", "seeded_random"])), 2);
    assert_eq!(code(&r1ramsey(&["--help"])), 0);
    assert_eq!(code(&r1ramsey(&["verify", "--certificate", "/definitely/missing.json"])), 2);
}

#[test]
fn er_x0_equality() {
    let out = r1ramsey(&["canonize", "er", "--k", "2", "--n", "6", "--feature", "min_leaf(0)"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["outcome"], "ok");
    assert_eq!(r["envelope"]["certificate"]["I"], serde_json::json!([0]));
}

#[test]
fn every_kind_writes_a_certificate_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 6] = [
        ("er", &["canonize", "er", "--k", "2", "--n", "7", "--feature", "seeded_random(3)", "--min-size", "3"]),
        ("arn", &["canonize", "arn", "--n", "2", "--depth", "6", "--planted", "L{0};S"]),
        ("r1n", &["canonize", "r1n", "--n", "2", "--depth", "5", "--feature", "min_leaf(0)"]),
        ("front", &["canonize", "front", "--front", "schreier", "--depth", "4", "--feature", "last_block"]),
        ("rank", &["canonize", "front", "--front", "rank:2", "--depth", "4", "--feature", "stem_parity(1)", "--min-size", "3"]),
        ("homogenize", &["homogenize", "--depth", "12", "--k", "1", "--feature", "leaf_sum_parity(0)"]),
    ];
    for (name, args) in runs {
        let path = dir.path().join(format!("{name}.json"));
        let mut args = args.to_vec();
        args.extend(["--out", path.to_str().unwrap()]);
        let out = r1ramsey(&args);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["certificate"], path.to_str().unwrap());
        assert!(r["input_digest"].as_str().unwrap().len() == 64);
        assert_eq!(verify(&path), 0, "{name}");
    }
}

#[test]
fn seeded_random_arn_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.json"));
        let out = r1ramsey(&[
            "canonize", "arn", "--n", "2", "--depth", "5", "--feature", "seeded_random(42)", "--min-size", "4",
            "--out", path.to_str().unwrap(),
        ]);
        let c = code(&out);
        assert!(c == 0 || c == 3, "exit {c}");
        if c == 0 {
            assert_eq!(verify(&path), 0);
        }
        let r = report(&out);
        outputs.push((c, r["input_digest"].clone(), std::fs::read_to_string(&path).ok()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn tampered_certificates_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arn.json");
    let out = r1ramsey(&["canonize", "arn", "--n", "2", "--depth", "5", "--planted", "S;L{1}", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(verify(&path), 0);

    let flipped = dir.path().join("flipped.json");
    std::fs::copy(&path, &flipped).unwrap();
    edit(&flipped, |v| {
        let labels = v["relation"]["labels"].as_object_mut().unwrap();
        let last = labels.values().next_back().cloned().unwrap();
        *labels.values_mut().next().unwrap() = last;
    });
    assert_eq!(verify(&flipped), 1);

    let outside = dir.path().join("outside.json");
    std::fs::copy(&path, &outside).unwrap();
    edit(&outside, |v| v["certificate"]["D"] = serde_json::to_value(tree_trunc(6)).unwrap());
    let out = r1ramsey(&["verify", "--certificate", outside.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("structural"), "{}", stdout(&out));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"kind\": \"arn\"").unwrap();
    assert_eq!(verify(&garbage), 2);
}

#[test]
fn exhausted_searches_exit_3() {
    let out = r1ramsey(&["homogenize", "--depth", "3", "--k", "1", "--feature", "leaf_sum_parity(0)"]);
    assert_eq!(code(&out), 3);
    assert_eq!(report(&out)["outcome"], "exhausted");
    let out = r1ramsey(&["canonize", "er", "--k", "1", "--n", "2", "--feature", "const", "--min-size", "3"]);
    assert_eq!(code(&out), 3);
}
