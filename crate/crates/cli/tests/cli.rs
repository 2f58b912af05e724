mod support;

use std::fs;

use absagen::{Dataset, MetricsReport};
use support::{code, fixture, read_pairs, replay, run, s, stderr, stdout};

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["score", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    let gold = fixture(Dataset::Restaurants16);
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["frobnicate"],
        vec!["score", "--bogus"],
        vec!["prepare", "--gold", s(&gold), "--out", "x.jsonl", "--task", "AD"],
        vec![
            "prepare",
            "--dataset",
            "se17",
            "--gold",
            s(&gold),
            "--out",
            "x.jsonl",
            "--task",
            "AD",
        ],
        vec![
            "prepare",
            "--dataset",
            "se16",
            "--gold",
            s(&gold),
            "--out",
            "x.jsonl",
            "--task",
            "ABC",
        ],
        vec!["prepare", "--dataset", "se16", "--gold", s(&gold), "--out", "x.jsonl"],
        vec![
            "prepare",
            "--dataset",
            "se16",
            "--gold",
            s(&gold),
            "--out",
            "x.jsonl",
            "--task",
            "AD",
            "--format",
            "prose",
        ],
        vec![
            "prepare",
            "--dataset",
            "se14",
            "--gold",
            s(&gold),
            "--out",
            "x.jsonl",
            "--task",
            "TASD",
        ],
        vec![
            "prepare",
            "--dataset",
            "se16",
            "--gold",
            s(&gold),
            "--out",
            "x.jsonl",
            "--mode",
            "joint",
            "--task",
            "AD",
        ],
        vec![
            "score",
            "--dataset",
            "se16",
            "--task",
            "AD",
            "--gold",
            s(&gold),
            "--pred",
            "p",
            "--policy",
            "eager",
        ],
        vec!["prepare", "--config", "/nonexistent/run.toml"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(code(&out), 1, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture(Dataset::Restaurants16);
    let missing = dir.path().join("missing.xml");
    let out = run(&[
        "prepare",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&missing),
        "--out",
        "x.jsonl",
    ]);
    assert_eq!(code(&out), 2);

    let broken = dir.path().join("broken.xml");
    fs::write(&broken, "<Reviews><Review>").unwrap();
    let out = run(&["validate", "--dataset", "se16", "--gold", s(&broken)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("parse error at 1:"), "{}", stderr(&out));

    let bad_pred = dir.path().join("bad.jsonl");
    fs::write(&bad_pred, "{\"id\": \"1004293:0\"}\n").unwrap();
    let out = run(&[
        "score",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--pred",
        s(&bad_pred),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains(":1:"), "{}", stderr(&out));

    let unknown = dir.path().join("unknown.jsonl");
    fs::write(&unknown, "{\"id\": \"nope\", \"output\": \"NONE\"}\n").unwrap();
    let out = run(&[
        "score",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--pred",
        s(&unknown),
    ]);
    assert_eq!(code(&out), 2);

    let dup = dir.path().join("dup.jsonl");
    fs::write(
        &dup,
        "{\"id\":\"1004293:0\",\"output\":\"NONE\"}\n{\"id\":\"1004293:0\",\"output\":\"NONE\"}\n",
    )
    .unwrap();
    let out = run(&[
        "score",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--pred",
        s(&dup),
    ]);
    assert_eq!(code(&out), 2);

    let out = run(&[
        "inspect",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--id",
        "no-such-id",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn prepare_writes_one_file_per_split_and_task() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "prepare",
        "--dataset",
        "restaurants-15",
        "--task",
        "AD,TASD",
        "--format",
        "sentence",
        "--gold",
        s(&fixture(Dataset::Restaurants15)),
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let ad = read_pairs(&out_dir.join("test.ad.jsonl"));
    let tasd = read_pairs(&out_dir.join("test.tasd.jsonl"));
    assert_eq!(ad.len(), 22);
    assert_eq!(tasd.len(), 22);
    assert!(ad[0].input.starts_with("ad: "));
    assert!(tasd
        .iter()
        .all(|p| p.target == "NONE" || p.target.starts_with("The review expressed [")));
}

#[test]
fn prepare_rejects_colliding_split_names() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture(Dataset::Restaurants16);
    let out = run(&[
        "prepare",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--gold",
        s(&gold),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn config_file_supplies_settings_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let target = dir.path().join("pairs.jsonl");
    fs::write(
        &cfg,
        format!(
            "dataset = \"sentihood\"\ntask = \"ASD\"\nprefix = \"\"\ngold = [{:?}]\nout = {:?}\n",
            s(&fixture(Dataset::Sentihood)),
            s(&target)
        ),
    )
    .unwrap();
    let out = run(&["prepare", "--config", s(&cfg)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let pairs = read_pairs(&target);
    assert_eq!(pairs.len(), 10);
    assert!(pairs.iter().any(|p| p.target.contains(" ~ ")));
    assert_eq!(pairs[0].input, " LOCATION2 is Central London so extremely expensive, LOCATION1 is often considered the coolest area of London.");

    let out = run(&["prepare", "--config", s(&cfg), "--task", "AD", "--prefix", "x: "]);
    assert_eq!(code(&out), 0);
    let pairs = read_pairs(&target);
    assert!(pairs
        .iter()
        .all(|p| !p.target.contains(" ~ ") && p.input.starts_with("x: ")));

    fs::write(&cfg, "dataset = \"sentihood\"\nbogus = 1\n").unwrap();
    assert_eq!(code(&run(&["prepare", "--config", s(&cfg)])), 1);
}

#[test]
fn half_missing_predictions_halve_recall() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture(Dataset::Restaurants16);
    let train = dir.path().join("train.jsonl");
    let out = run(&[
        "prepare",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--out",
        s(&train),
    ]);
    assert_eq!(code(&out), 0);
    let pairs = read_pairs(&train);
    let pred = dir.path().join("pred.jsonl");
    replay(&pairs, &pred, |i| i % 2 == 0);
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "score",
        "--dataset",
        "se16",
        "--task",
        "AD",
        "--gold",
        s(&gold),
        "--pred",
        s(&pred),
        "--report",
        s(&report_path),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(
        stderr(&out).contains("12 of 24 gold sentences have no prediction"),
        "{}",
        stderr(&out)
    );
    let report = MetricsReport::from_json(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.counts.missing_predictions, 12);
    assert_eq!(report.micro.precision, 1.0);
    assert!(report.micro.recall < 1.0);
    assert_eq!(
        report.micro.recall,
        report.counts.matched_tuples as f64 / report.counts.gold_tuples as f64
    );
    assert!(stdout(&out).contains("micro-F1"));
}

#[test]
fn lenient_policy_repairs_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture(Dataset::Restaurants16);
    let pred = dir.path().join("pred.jsonl");
    fs::write(&pred, "{\"id\":\"1004293:3\",\"output\":\"food ~ FOOD#QUALTY ~ negative ~~ portions ~ FOOD#STYLE_OPTIONS ~ negative\"}\n").unwrap();
    let strict = run(&[
        "score",
        "--dataset",
        "se16",
        "--task",
        "TASD",
        "--gold",
        s(&gold),
        "--pred",
        s(&pred),
    ]);
    assert!(
        stdout(&strict).contains("dropped / repaired            1 / 0"),
        "{}",
        stdout(&strict)
    );
    let lenient = run(&[
        "score",
        "--dataset",
        "se16",
        "--task",
        "TASD",
        "--gold",
        s(&gold),
        "--pred",
        s(&pred),
        "--policy",
        "lenient",
    ]);
    assert!(stdout(&lenient).contains("0 / 1"), "{}", stdout(&lenient));
}

#[test]
fn validate_flags_targets_that_cannot_be_serialized() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("tilde.xml");
    fs::write(
        &gold,
        r#"<Reviews><Review rid="1"><sentences><sentence id="1:0"><text>The a~b was fine.</text>
<Opinions><Opinion target="a~b" category="FOOD#QUALITY" polarity="positive" from="4" to="7"/></Opinions>
</sentence></sentences></Review></Reviews>"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--dataset",
        "se16",
        "--gold",
        s(&gold),
        "--format",
        "phrase",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL 1:0"), "{}", stdout(&out));
    // tasks without a target slot are unaffected
    let out = run(&["validate", "--dataset", "se16", "--gold", s(&gold), "--task", "ASD"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn validate_and_inspect_fixtures() {
    for dataset in Dataset::ALL {
        let out = run(&["validate", "--dataset", dataset.name(), "--gold", s(&fixture(dataset))]);
        assert_eq!(code(&out), 0, "{dataset}: {}", stdout(&out));
        assert!(stdout(&out).contains("0 round-trip failures"));
    }
    let out = run(&[
        "inspect",
        "--dataset",
        "se15",
        "--mode",
        "joint",
        "--format",
        "sentence",
        "--gold",
        s(&fixture(Dataset::Restaurants15)),
        "--id",
        "1632445:0",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("for [service]"), "{}", stdout(&out));
}
