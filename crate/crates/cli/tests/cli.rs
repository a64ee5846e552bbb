use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn motif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motif"))
        .args(args)
        .env_remove("MOTIF_CONFIG")
        .output()
        .expect("spawn motif")
}

fn ok(args: &[&str]) -> String {
    let out = motif(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json_lines(s: &str) -> Vec<Value> {
    s.lines().filter(|l| l.starts_with('{')).map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let out = motif(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(motif(&["--help"]).status.code(), Some(0));
    assert_eq!(motif(&["generate", "--bogus"]).status.code(), Some(2));
}

#[test]
fn generated_shaking_is_recognized() {
    let dir = tempfile::tempdir().unwrap();
    let ep = dir.path().join("shake.json");
    let line = ok(&["generate", "--kind", "vertical-shaking", "--frequency", "2", "--out", p(&ep)]);
    let meta = &json_lines(&line)[0];
    assert_eq!(meta["description"], "make vertical oscillations 2 times");

    let v = &json_lines(&ok(&["discriminate", "--episode", p(&ep), "--description", "move up and down 2 times"]))[0];
    assert_eq!(v["label"], 1, "{v}");
    let v = &json_lines(&ok(&["discriminate", "--episode", p(&ep), "--description", "make a circular motion clockwise"]))[0];
    assert_eq!(v["label"], 0, "{v}");
}

#[test]
fn failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = motif(&["discriminate", "--episode", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("motif: "));

    let out = motif(&["discriminate", "--episode", p(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));

    let ep = dir.path().join("line.json");
    ok(&["generate", "--kind", "line", "--out", p(&ep)]);
    let out = motif(&["discriminate", "--episode", p(&ep), "--description", "move sideways"]);
    assert_eq!(out.status.code(), Some(1));
}

fn build(dir: &Path, corpus: &Path, jobs: &str) -> (Vec<u8>, Value) {
    let out = dir.join("data.jsonl");
    let meta = ok(&[
        "build-dataset", "--jobs", jobs, "--corpus", p(corpus), "--out", p(&out), "--n-neg", "4",
    ]);
    (fs::read(&out).unwrap(), json_lines(&meta).remove(0))
}

#[test]
fn dataset_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    ok(&["generate", "--corpus", "12", "--seed", "5", "--canvas", "200", "--out", p(&corpus)]);

    let (a_dir, b_dir) = (dir.path().join("a"), dir.path().join("b"));
    fs::create_dir_all(&a_dir).unwrap();
    fs::create_dir_all(&b_dir).unwrap();
    let (a, _) = build(&a_dir, &corpus, "1");
    let (b, _) = build(&b_dir, &corpus, "4");
    let strip = |bytes: &[u8], d: &Path| String::from_utf8_lossy(bytes).replace(p(d), "");
    assert_eq!(strip(&a, &a_dir), strip(&b, &b_dir));
    assert_eq!(String::from_utf8_lossy(&a).lines().count(), 12 * 5);
    for name in fs::read_dir(a_dir.join("images")).unwrap() {
        let name = name.unwrap().file_name();
        assert_eq!(fs::read(a_dir.join("images").join(&name)).unwrap(), fs::read(b_dir.join("images").join(&name)).unwrap());
    }
}

#[test]
fn evaluate_reports_hand_checked_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    ok(&["generate", "--corpus", "6", "--seed", "2", "--canvas", "200", "--out", p(&corpus)]);
    let (data, _) = build(dir.path(), &corpus, "2");
    let samples = json_lines(&String::from_utf8(data).unwrap());
    assert_eq!(samples.len(), 6 * 5);

    // say yes to every sample: 6 true positives among 30
    let preds: String = samples
        .iter()
        .map(|s| {
            format!(
                "{}\n",
                serde_json::json!({"episode_id": s["episode_id"], "description": s["motion_description"], "label": 1})
            )
        })
        .collect();
    let pred_path = dir.path().join("preds.jsonl");
    fs::write(&pred_path, preds).unwrap();
    let out = ok(&["evaluate", "--dataset", p(&dir.path().join("data.jsonl")), "--predictions", p(&pred_path)]);
    let report = json_lines(&out).pop().unwrap();
    let overall = &report["overall"];
    assert!((overall["precision"].as_f64().unwrap() - 6.0 / 30.0).abs() < 1e-12, "{overall}");
    assert_eq!(overall["recall"].as_f64(), Some(1.0));

    // a prediction file missing one sample is rejected
    let short: String = fs::read_to_string(&pred_path).unwrap().lines().skip(1).map(|l| format!("{l}\n")).collect();
    fs::write(&pred_path, short).unwrap();
    let out = motif(&["evaluate", "--dataset", p(&dir.path().join("data.jsonl")), "--predictions", p(&pred_path)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn refine_reports_each_turn() {
    let out = ok(&["refine", "--task", "sprinkle", "--description", "move to the left while making vertical oscillations"]);
    let lines = json_lines(&out);
    let summary = lines.last().unwrap();
    assert_eq!(summary["reason"], "accepted");
    assert_eq!(summary["turns"].as_u64().unwrap() as usize, lines.len() - 1);
    assert_eq!(lines[0]["candidate"]["generator_name"], "horizontal-shaking");
}

#[test]
fn config_overrides_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("motif.conf");
    fs::write(&cfg, "no_such_key = 3\n").unwrap();
    let out = motif(&["--config", p(&cfg), "refine", "--task", "t", "--description", "move upward"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
}
