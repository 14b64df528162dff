use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbench")).args(args).arg("--log").arg("warn").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = hbench(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("tiny.toml");
    fs::write(
        &path,
        r#"
name = "tiny"
repeats = 2
metrics = ["edge_homophily", "class_homophily", "label_informativeness"]
models = ["gcn", "mlp1"]

[generator]
kind = "regular"
levels = [0.1, 0.5, 0.9]

[generator.spec]
nodes_per_class = 30
intra_edges_per_class = 60

[grid]
preset = "reduced"
weight_decays = [0.0]
dropouts = [0.0]
max_epochs = 40
patience = 10
"#,
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sweep_then_report_and_frechet() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let out = tmp.path().join("run");
    let out_s = out.to_str().unwrap();
    ok(&["sweep", "--config", &cfg, "--out", out_s, "--jobs", "1"]);
    for f in ["records.csv", "runs.csv", "sweep.csv", "timings.csv", "report/curves.csv", "report/report.md", "report/tiny.svg"] {
        assert!(out.join(f).is_file(), "{f}");
    }

    let frechet = tmp.path().join("frechet.csv");
    let ranking = tmp.path().join("ranking.csv");
    ok(&[
        "frechet",
        "--curves",
        out.join("report/curves.csv").to_str().unwrap(),
        "--out",
        frechet.to_str().unwrap(),
        "--ranking",
        ranking.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&frechet).unwrap(), fs::read(out.join("report/frechet.csv")).unwrap());
    assert_eq!(fs::read(&ranking).unwrap(), fs::read(out.join("report/ranking.csv")).unwrap());

    let again = tmp.path().join("again");
    ok(&["report", "--sweep", out_s, "--out", again.to_str().unwrap()]);
    for f in ["curves.csv", "frechet.csv", "ranking.csv", "report.md", "tiny.svg"] {
        assert_eq!(fs::read(again.join(f)).unwrap(), fs::read(out.join("report").join(f)).unwrap(), "{f}");
    }

    let refused = hbench(&["sweep", "--config", &cfg, "--out", out_s, "--seed", "5"]);
    assert!(!refused.status.success());
    assert!(String::from_utf8_lossy(&refused.stderr).contains("error:"));
}

#[test]
fn single_graph_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path());
    let graph = tmp.path().join("g");
    let graph_s = graph.to_str().unwrap();
    ok(&["generate", "--config", &cfg, "--level", "0.7", "--seed", "3", "--out", graph_s]);
    assert!(graph.join("meta.json").is_file());

    let metrics = tmp.path().join("metrics.json");
    ok(&["metrics", "--graph", graph_s, "--out", metrics.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&metrics).unwrap()).unwrap();
    let h = report["edge_homophily"].as_f64().unwrap();
    assert!((h - 0.7).abs() <= 0.02, "{h}");

    let trained = tmp.path().join("gcn.json");
    ok(&["train", "--config", &cfg, "--graph", graph_s, "--model", "gcn", "--out", trained.to_str().unwrap()]);
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trained).unwrap()).unwrap();
    let acc = record["outcome"]["test_accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert_eq!(record["runs"].as_array().unwrap().len(), 1);
}

#[test]
fn bad_input_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "repeats = 0\n").unwrap();
    let out = hbench(&["sweep", "--config", bad.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert!(!out.status.success());
    let out = hbench(&["train", "--graph", tmp.path().to_str().unwrap(), "--model", "transformer", "--out", "x.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown model"));
}
