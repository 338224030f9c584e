mod common;

use std::fs;
use std::path::Path;

use common::{hslab, stderr, write_series};
use serde_json::Value;

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn parse_outcomes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(hslab(&["--help"], d).status.code(), Some(0));
    assert_eq!(hslab(&["--version"], d).status.code(), Some(0));
    assert_eq!(hslab(&[], d).status.code(), Some(2));
    assert_eq!(hslab(&["rds", "--data"], d).status.code(), Some(2));
    assert_eq!(
        hslab(&["rds", "--data", "x", "--bogus"], d).status.code(),
        Some(2)
    );
    // Exactly one of --neurons / --group.
    assert_eq!(
        hslab(&["intervene", "--model", "m", "--data", "x"], d)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hslab(
            &[
                "intervene",
                "--model",
                "m",
                "--data",
                "x",
                "--neurons",
                "3-1"
            ],
            d
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn data_errors_exit_three_with_their_name() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = hslab(&["rds", "--data", "missing.hsds"], d);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        stderr(&out).starts_with("hslab: IoFailure:"),
        "{}",
        stderr(&out)
    );

    fs::write(d.join("bad.hsds"), b"NOPE\x01\0\0\0").unwrap();
    let out = hslab(&["rds", "--data", "bad.hsds"], d);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("MagicMismatch"), "{}", stderr(&out));
}

#[test]
fn thread_count_must_be_a_positive_integer() {
    let dir = tempfile::tempdir().unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_hslab"))
        .args([
            "gic",
            "--baseline",
            "a",
            "--individual",
            "b",
            "--union",
            "c",
        ])
        .current_dir(dir.path())
        .env("HSLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("HSLAB_THREADS"));
}

#[test]
fn gic_reads_accuracies_from_numbers_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("base.json"),
        r#"{"schema":"hslab/1","result":{"accuracy":1.0}}"#,
    )
    .unwrap();
    fs::write(d.join("a.json"), "0.981").unwrap();
    fs::write(
        d.join("b.json"),
        r#"{"intervention":{"report":{"accuracy":0.969}}}"#,
    )
    .unwrap();
    fs::write(d.join("u.json"), "0.620\n").unwrap();
    let out = hslab(
        &[
            "gic",
            "--baseline",
            "base.json",
            "--individual",
            "a.json",
            "b.json",
            "--union",
            "u.json",
            "--out",
            "g.json",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let g = json(&d.join("g.json"))["result"]["gic"].as_f64().unwrap();
    assert!((g - 0.620 / 0.975).abs() < 1e-12, "{g}");

    fs::write(d.join("n.json"), r#"{"loss": 3}"#).unwrap();
    let out = hslab(
        &[
            "gic",
            "--baseline",
            "n.json",
            "--individual",
            "a.json",
            "--union",
            "u.json",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("InvalidReport"));
}

#[test]
fn replicate_finds_the_planted_layer_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_series(d, 2000);
    let truth = json(&d.join("fx/truth.json"));
    let run = |tag: &str, threads: Option<&str>| {
        let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_hslab"));
        cmd.args([
            "replicate",
            "--config",
            "fx/run.json",
            "--seed",
            "9",
            "--no-timestamp",
        ])
        .args([
            "--out",
            &format!("{tag}.json"),
            "--csv",
            &format!("{tag}.csv"),
        ])
        .current_dir(d);
        if let Some(t) = threads {
            cmd.env("HSLAB_THREADS", t);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        (
            fs::read(d.join(format!("{tag}.json"))).unwrap(),
            fs::read(d.join(format!("{tag}.csv"))).unwrap(),
        )
    };
    let first = run("a", None);
    assert_eq!(first, run("b", None));
    assert_eq!(first, run("c", Some("1")));

    let report = json(&d.join("a.json"))["result"].clone();
    assert_eq!(report["selected_layer"], truth["truth"]["planted_layer"]);
    assert!(report["probe"]["baseline"]["accuracy"].as_f64().unwrap() >= 0.99);
    let custom = &report["custom_groups"];
    let (union, gic) = (&custom["pairs"][0][0], &custom["pairs"][0][1]);
    assert_eq!(union["group_name"], "A+B");
    assert!(union["report"]["accuracy"].as_f64().unwrap() <= 0.60);
    assert!(gic["gic"].as_f64().unwrap() < 0.9);
    for single in custom["singles"].as_array().unwrap() {
        assert!(single["report"]["accuracy"].as_f64().unwrap() >= 0.95);
    }
    assert!(
        custom["random_controls"][0]["report"]["accuracy"]
            .as_f64()
            .unwrap()
            >= 0.95
    );

    let out = hslab(
        &[
            "replicate",
            "--config",
            "fx/run.json",
            "--seed",
            "10",
            "--no-timestamp",
            "--out",
            "s.json",
        ],
        d,
    );
    assert!(out.status.success());
    assert_ne!(fs::read(d.join("s.json")).unwrap(), first.0);
}

#[test]
fn replicate_accepts_a_single_layer() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_series(d, 400);
    fs::write(
        d.join("one.json"),
        r#"{"layers": ["fx/layer_03.hsds"], "tau": 0.5, "tau_grid": [0.5, 1.0]}"#,
    )
    .unwrap();
    let out = hslab(
        &[
            "replicate",
            "--config",
            "one.json",
            "--out",
            "r.json",
            "--csv",
            "r.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&d.join("r.json"));
    assert!(r["generated_at_unix"].is_u64());
    assert_eq!(r["result"]["selected_layer"], 3);
    let csv = fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(csv.starts_with("tau,group,count,accuracy,"));
    // Nine rows at the configured τ plus nine per grid point.
    assert_eq!(csv.lines().count(), 1 + 9 + 18);
}

#[test]
fn replicate_config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("a.json"), r#"{"layers": ["x.hsds"]}"#).unwrap();
    let out = hslab(&["replicate", "--config", "a.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("ConfigError") && stderr(&out).contains("`tau`"),
        "{}",
        stderr(&out)
    );

    fs::write(
        d.join("b.json"),
        r#"{"layers": ["x.hsds"], "tau": 1, "probe": {"seed": 3}}"#,
    )
    .unwrap();
    let out = hslab(&["replicate", "--config", "b.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`seed`"), "{}", stderr(&out));

    fs::write(d.join("c.json"), r#"{"layers": [], "tau": 1}"#).unwrap();
    assert_eq!(
        hslab(&["replicate", "--config", "c.json"], d).status.code(),
        Some(2)
    );
    assert_eq!(hslab(&["replicate"], d).status.code(), Some(2));
}

#[test]
fn saved_probe_reproduces_its_held_out_score() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_series(d, 400);
    let out = hslab(
        &[
            "probe-train",
            "--data",
            "fx/layer_02.hsds",
            "--model",
            "p.hspm",
            "--test-out",
            "t.hsds",
            "--out",
            "train.json",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = hslab(
        &[
            "probe-eval",
            "--model",
            "p.hspm",
            "--data",
            "t.hsds",
            "--out",
            "eval.json",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        json(&d.join("train.json"))["result"]["test"],
        json(&d.join("eval.json"))["result"]
    );

    let out = hslab(
        &[
            "intervene",
            "--model",
            "p.hspm",
            "--data",
            "t.hsds",
            "--neurons",
            "0-15",
            "--out",
            "iv.json",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        json(&d.join("iv.json"))["result"]["intervention"]["report"]["accuracy"]
            .as_f64()
            .unwrap()
            <= 0.60
    );

    let out = hslab(
        &[
            "tau-sweep",
            "--model",
            "p.hspm",
            "--data",
            "t.hsds",
            "--tau",
            "0.5,1",
            "--heatmap",
            "h.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(d.join("h.csv")).unwrap().lines().count(),
        1 + 18
    );

    let out = hslab(
        &[
            "random-removal",
            "--model",
            "p.hspm",
            "--data",
            "t.hsds",
            "--model",
            "p.hspm",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mi_table_covers_every_pair() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_series(d, 400);
    let out = hslab(
        &[
            "mi",
            "--data",
            "fx/layer_00.hsds",
            "--group",
            "A=0-7",
            "--group",
            "B=8-15",
            "--group",
            "N=16-63",
            "--csv",
            "mi.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["pairs"].as_array().unwrap().len(), 3);
    assert_eq!(
        fs::read_to_string(d.join("mi.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );
    assert_eq!(
        hslab(&["mi", "--data", "fx/layer_00.hsds", "--group", "A=0"], d)
            .status
            .code(),
        Some(2)
    );
}
