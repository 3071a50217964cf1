use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use wordset::rational::format_decimal;
use wordset::ProbabilityTable;

fn wordset(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordset"))
        .current_dir(dir)
        .env_remove("WORDSET_STOPWORDS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = wordset(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fail(dir: &Path, args: &[&str]) -> String {
    let out = wordset(dir, args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

/// Synthetic corpus plus a model trained on it.
fn trained() -> TempDir {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["synth", "--out", "corpus"]);
    ok(
        dir.path(),
        &[
            "train",
            "--corpus",
            "corpus",
            "--out",
            "model.json",
            "--support-count",
            "2",
        ],
    );
    dir
}

#[test]
fn train_writes_a_model_with_sets_for_every_class() {
    let dir = trained();
    let table = ProbabilityTable::load(&dir.path().join("model.json")).unwrap();
    assert_eq!(table.classes().len(), 5);
    for c in 0..5 {
        assert!(table.stats().set_count(c) >= 1, "class {c} owns no sets");
    }
}

#[test]
fn train_on_empty_directory_reports_no_documents() {
    let dir = TempDir::new().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let err = fail(
        dir.path(),
        &["train", "--corpus", "empty", "--out", "m.json"],
    );
    assert!(err.contains("no documents found"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn usage_errors() {
    let dir = TempDir::new().unwrap();
    let err = fail(
        dir.path(),
        &["train", "--corpus", "x", "--out", "m.json", "--bogus"],
    );
    assert!(err.contains("--bogus") && err.contains("Usage"), "{err}");
    let err = fail(
        dir.path(),
        &[
            "train",
            "--corpus",
            "x",
            "--out",
            "m",
            "--support-count",
            "2",
            "--support-fraction",
            "0.1",
        ],
    );
    assert!(err.contains("cannot be used with"), "{err}");
    let err = fail(
        dir.path(),
        &[
            "train",
            "--corpus",
            "x",
            "--out",
            "m",
            "--smoothing",
            "laplace",
        ],
    );
    assert!(err.contains("unknown smoothing mode"), "{err}");
    let err = fail(dir.path(), &["frobnicate"]);
    assert!(err.contains("frobnicate"), "{err}");
}

#[test]
fn runtime_errors_are_one_line() {
    let dir = trained();
    for args in [
        &["classify", "--model", "model.json", "--in", "missing.txt"][..],
        &["inspect", "--model", "nope.json"],
        &[
            "train",
            "--corpus",
            "corpus",
            "--out",
            "m.json",
            "--confidence",
            "2",
        ],
        &[
            "train",
            "--corpus",
            "corpus",
            "--out",
            "m.json",
            "--min-doc-freq",
            "0",
        ],
        &["curve", "--corpus", "corpus", "--fractions", "0.5,0.2"],
    ] {
        let err = fail(dir.path(), args);
        assert_eq!(err.trim().lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("wordset: error: "), "{err}");
    }
}

#[test]
fn corrupt_model_is_rejected() {
    let dir = trained();
    let text = fs::read_to_string(dir.path().join("model.json")).unwrap();
    fs::write(dir.path().join("cut.json"), &text[..text.len() / 2]).unwrap();
    let err = fail(dir.path(), &["inspect", "--model", "cut.json"]);
    assert!(err.contains("byte"), "{err}");
    fs::write(
        dir.path().join("v9.json"),
        text.replacen("\"version\": 1", "\"version\": 9", 1),
    )
    .unwrap();
    let err = fail(dir.path(), &["inspect", "--model", "v9.json"]);
    assert!(err.contains('9'), "{err}");
}

#[test]
fn classify_prints_winner_and_breakdown() {
    let dir = trained();
    let out = ok(
        dir.path(),
        &[
            "classify",
            "--model",
            "model.json",
            "--in",
            "corpus/class2/doc001.txt",
            "--explain",
        ],
    );
    let mut lines = out.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("corpus/class2/doc001.txt: class2 (total "));
    assert!(lines.next().unwrap().starts_with("keywords: "));
    assert!(lines.next().unwrap().starts_with("matched sets: "));
    assert_eq!(
        lines.next().unwrap(),
        "class,pval,nval,p,n,positive_pct,negative_pct,prior,total"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    let table = ProbabilityTable::load(&dir.path().join("model.json")).unwrap();
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let (pval, nval): (u64, u64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        assert_eq!(pval + nval, table.total_sets());
    }
}

#[test]
fn classify_json_and_empty_documents() {
    let dir = trained();
    fs::write(dir.path().join("blank.txt"), "the of and").unwrap();
    let out = ok(
        dir.path(),
        &[
            "classify",
            "--model",
            "model.json",
            "--in",
            "blank.txt",
            "corpus/class4/doc010.txt",
            "--format",
            "json",
            "--explain",
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["low_evidence"], true);
    assert_eq!(v[0]["keywords"].as_array().unwrap().len(), 0);
    assert_eq!(v[1]["winner"], "class4");
    assert_eq!(v[1]["breakdown"].as_array().unwrap().len(), 5);
    let plain = ok(
        dir.path(),
        &["classify", "--model", "model.json", "--in", "blank.txt"],
    );
    assert!(plain.contains("[no keywords]"), "{plain}");
}

#[test]
fn evaluate_reports_accuracy_and_confusion() {
    let dir = trained();
    let csv = ok(
        dir.path(),
        &["evaluate", "--model", "model.json", "--corpus", "corpus"],
    );
    assert!(csv.starts_with("metric,value\nn_test,100\n"), "{csv}");
    assert!(csv.contains("accuracy,1.000000"), "{csv}");
    fs::write(dir.path().join("ids.txt"), "class1/doc001\nclass9/none\n").unwrap();
    let out = wordset(
        dir.path(),
        &[
            "evaluate",
            "--model",
            "model.json",
            "--corpus",
            "corpus",
            "--train-ids",
            "ids.txt",
            "--format",
            "json",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 test documents"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["leaked_ids"], serde_json::json!(["class1/doc001"]));
    assert_eq!(v["confusion"].as_array().unwrap().len(), 5);
}

#[test]
fn inspect_prints_the_recomputed_probabilities() {
    let dir = trained();
    let out = ok(dir.path(), &["inspect", "--model", "model.json"]);
    let table = ProbabilityTable::load(&dir.path().join("model.json")).unwrap();
    for entry in table.entries() {
        let label = entry.itemset.label();
        let printed: Vec<&str> = out
            .lines()
            .filter(|l| l.starts_with(&label) && l[label.len()..].starts_with(' '))
            .collect();
        assert_eq!(printed.len(), 2, "{label}: counts row and probability row");
        let probs: Vec<&str> = printed[1][label.len()..].split_whitespace().collect();
        let expected: Vec<String> = entry.probs.iter().map(|p| format_decimal(*p, 6)).collect();
        assert_eq!(probs, expected, "{label}");
    }
    assert!(out.contains("mode: paper-table"));
    let json = ok(
        dir.path(),
        &["inspect", "--model", "model.json", "--format", "json"],
    );
    assert_eq!(
        json,
        fs::read_to_string(dir.path().join("model.json")).unwrap()
    );
}

#[test]
fn identical_runs_give_identical_bytes() {
    let a = trained();
    let b = trained();
    let read = |d: &TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "model.json"), read(&b, "model.json"));
    for dir in [&a, &b] {
        let args = [
            "curve",
            "--corpus",
            "corpus",
            "--fractions",
            "0.2,0.4",
            "--seeds",
            "3,4",
            "--out",
            "curve.csv",
        ];
        ok(dir.path(), &args);
        ok(
            dir.path(),
            &[
                "evaluate",
                "--model",
                "model.json",
                "--corpus",
                "corpus",
                "--out",
                "eval.csv",
            ],
        );
        ok(
            dir.path(),
            &[
                "classify",
                "--model",
                "model.json",
                "--in",
                "corpus/class1/doc002.txt",
                "--explain",
                "--out",
                "c.txt",
            ],
        );
    }
    for f in ["curve.csv", "eval.csv", "c.txt"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
}

#[test]
fn curve_single_point_matches_direct_evaluation() {
    let dir = trained();
    let csv = ok(
        dir.path(),
        &[
            "curve",
            "--corpus",
            "corpus",
            "--fractions",
            "0.3",
            "--seed",
            "5",
        ],
    );
    let point: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&point[..2], ["0.3", "5"]);
    assert_eq!(point[3..5], ["30", "70"]);
    let json = ok(
        dir.path(),
        &[
            "curve",
            "--corpus",
            "corpus",
            "--fractions",
            "0.3",
            "--seed",
            "5",
            "--format",
            "json",
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    assert_eq!(
        format!("{:.6}", v["points"][0]["accuracy"].as_f64().unwrap()),
        point[2]
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = trained();
    fs::write(
        dir.path().join("run.toml"),
        "support-count = 3\nsmoothing = \"per-class\"\nfractions = [0.2, 0.6]\nseeds = [1, 2]\nformat = \"json\"\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "--config",
            "run.toml",
            "train",
            "--corpus",
            "corpus",
            "--out",
            "file.json",
        ],
    );
    let from_file = ProbabilityTable::load(&dir.path().join("file.json")).unwrap();
    assert_eq!(from_file.mode().as_str(), "per-class");
    ok(
        dir.path(),
        &[
            "--config",
            "run.toml",
            "train",
            "--corpus",
            "corpus",
            "--out",
            "flag.json",
            "--support-count",
            "2",
            "--smoothing",
            "paper-table",
        ],
    );
    let from_flags = ProbabilityTable::load(&dir.path().join("flag.json")).unwrap();
    let default = ProbabilityTable::load(&dir.path().join("model.json")).unwrap();
    assert_eq!(from_flags, default);
    assert!(from_file.total_sets() != default.total_sets() || from_file.mode() != default.mode());

    let json = ok(
        dir.path(),
        &["--config", "run.toml", "curve", "--corpus", "corpus"],
    );
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    let csv = ok(
        dir.path(),
        &[
            "--config", "run.toml", "curve", "--corpus", "corpus", "--seed", "9", "--format", "csv",
        ],
    );
    assert_eq!(
        csv.lines()
            .filter(|l| l.ends_with(",9") || l.contains(",9,"))
            .count(),
        2
    );

    fs::write(dir.path().join("bad.toml"), "colour = 1\n").unwrap();
    let err = fail(
        dir.path(),
        &["--config", "bad.toml", "inspect", "--model", "model.json"],
    );
    assert!(err.contains("invalid config"), "{err}");
}

#[test]
fn stopword_path_comes_from_flag_or_environment() {
    let dir = trained();
    fs::write(
        dir.path().join("stop.txt"),
        "the of and with is to from are\nk1p1a\n",
    )
    .unwrap();
    let with_flag = ok(
        dir.path(),
        &[
            "train",
            "--corpus",
            "corpus",
            "--out",
            "s.json",
            "--stopwords",
            "stop.txt",
        ],
    );
    assert!(with_flag.starts_with("wrote "));
    let table = ProbabilityTable::load(&dir.path().join("s.json")).unwrap();
    assert!(table.entries().iter().all(|e| e
        .itemset
        .items()
        .iter()
        .all(|k| k.as_str() != "k1p1a")));

    let out = Command::new(env!("CARGO_BIN_EXE_wordset"))
        .current_dir(dir.path())
        .env("WORDSET_STOPWORDS", "stop.txt")
        .args(["train", "--corpus", "corpus", "--out", "e.json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read(dir.path().join("e.json")).unwrap(),
        fs::read(dir.path().join("s.json")).unwrap()
    );

    let out = Command::new(env!("CARGO_BIN_EXE_wordset"))
        .current_dir(dir.path())
        .env("WORDSET_STOPWORDS", "missing.txt")
        .args(["train", "--corpus", "corpus", "--out", "x.json"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn delimited_corpus_trains_and_evaluates() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("id,label,text\n");
    for i in 0..6 {
        csv.push_str(&format!(
            "a{i},astro,\"galaxy galaxy cluster cluster redshift redshift\"\n"
        ));
        csv.push_str(&format!(
            "b{i},bio,\"protein protein enzyme enzyme membrane membrane\"\n"
        ));
    }
    fs::write(dir.path().join("docs.csv"), csv).unwrap();
    ok(
        dir.path(),
        &["train", "--corpus", "docs.csv", "--out", "m.json"],
    );
    let report = ok(
        dir.path(),
        &["evaluate", "--model", "m.json", "--corpus", "docs.csv"],
    );
    assert!(report.contains("accuracy,1.000000"), "{report}");
}
