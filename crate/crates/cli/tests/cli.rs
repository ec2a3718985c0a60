use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use satgraph::metrics::MetricsReport;
use satgraph_cli::report::{EvalReport, SweepReport, TrainReport};

const BIN: &str = env!("CARGO_BIN_EXE_satgraph");

const SMALL: &str = r#"
seed = 7

[train]
epochs = 4
learning_rate = 0.005

[synth]
n_graphs = 240
"#;

fn satgraph(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn small_config(dir: &Path) -> PathBuf {
    let p = dir.join("small.toml");
    fs::write(&p, SMALL).unwrap();
    p
}

fn only_file(dir: &Path, prefix: &str) -> PathBuf {
    let hits: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .collect();
    assert_eq!(hits.len(), 1, "{prefix} in {}: {hits:?}", dir.display());
    hits[0].clone()
}

fn parse<R: serde::de::DeserializeOwned>(path: &Path) -> R {
    toml::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn train_writes_artifacts_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = satgraph(tmp.path(), &["train", "--config", cfg.to_str().unwrap(), "--out", "run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = tmp.path().join("run");
    let report = only_file(&run, "report.");
    only_file(&run, "history.");
    only_file(&run, "checkpoint.");
    let history = fs::read_to_string(only_file(&run, "history.")).unwrap();
    assert_eq!(history.lines().count(), 5);

    let saved = tmp.path().join("saved.txt");
    fs::copy(&report, &saved).unwrap();
    let again = satgraph(tmp.path(), &["train", "--config", "saved.txt"]);
    assert!(again.status.success());
    assert_eq!(fs::read(&report).unwrap(), fs::read(&saved).unwrap());

    let parsed: TrainReport = parse(&report);
    assert_eq!(parsed.config.seed, 7);
    assert_eq!(parsed.config.train.seed, 7);
    assert_eq!(parsed.data.n_records, 240);
}

#[test]
fn eval_reproduces_train_time_test_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    assert!(satgraph(tmp.path(), &["train", "--config", cfg.to_str().unwrap(), "--out", "run"]).status.success());
    let run = tmp.path().join("run");
    let train: TrainReport = parse(&only_file(&run, "report."));
    let out = satgraph(
        tmp.path(),
        &[
            "eval",
            "--checkpoint",
            only_file(&run, "checkpoint.").to_str().unwrap(),
            "--dataset",
            only_file(&run, "test.").to_str().unwrap(),
            "--schema",
            only_file(&run, "schema.").to_str().unwrap(),
            "--out",
            "ev",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eval: EvalReport = parse(&only_file(&tmp.path().join("ev"), "eval."));
    assert_eq!(eval.metrics, train.test);
}

#[test]
fn eval_on_single_class_data_marks_auc_undefined() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    assert!(satgraph(tmp.path(), &["train", "--config", cfg.to_str().unwrap(), "--out", "run"]).status.success());
    let run = tmp.path().join("run");
    let test_csv = only_file(&run, "test.");
    let text = fs::read_to_string(&test_csv).unwrap();
    let mut lines = text.lines();
    let mut kept = vec![lines.next().unwrap().to_string()];
    kept.extend(lines.filter(|l| l.ends_with(",1")).map(str::to_string));
    let positives = tmp.path().join("positives.csv");
    fs::write(&positives, kept.join("\n") + "\n").unwrap();
    let out = satgraph(
        tmp.path(),
        &[
            "eval",
            "--checkpoint",
            only_file(&run, "checkpoint.").to_str().unwrap(),
            "--dataset",
            positives.to_str().unwrap(),
            "--schema",
            only_file(&run, "schema.").to_str().unwrap(),
            "--out",
            "ev",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eval: EvalReport = parse(&only_file(&tmp.path().join("ev"), "eval."));
    assert_eq!(eval.metrics.auc, None);
    assert!(String::from_utf8_lossy(&out.stdout).contains("auc undefined"));
}

#[test]
fn eval_rejects_mismatched_schema_naming_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    assert!(satgraph(tmp.path(), &["train", "--config", cfg.to_str().unwrap(), "--out", "run"]).status.success());
    let run = tmp.path().join("run");
    let schema = fs::read_to_string(only_file(&run, "schema.")).unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, schema.replacen("name = \"slot_3\"\nkind = \"categorical\"", "name = \"slot_3\"\nkind = \"numeric\"", 1)).unwrap();
    let out = satgraph(
        tmp.path(),
        &[
            "eval",
            "--checkpoint",
            only_file(&run, "checkpoint.").to_str().unwrap(),
            "--dataset",
            only_file(&run, "test.").to_str().unwrap(),
            "--schema",
            bad.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slot_3"));
}

#[test]
fn ablation_flag_is_echoed_in_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = satgraph(
        tmp.path(),
        &["train", "--config", cfg.to_str().unwrap(), "--ablation", "no-attention", "--out", "run"],
    );
    assert!(out.status.success());
    let report = fs::read_to_string(only_file(&tmp.path().join("run"), "report.")).unwrap();
    assert!(report.contains("attention_enabled = false"));
    assert!(report.contains("ablation = \"no-attention\""));
}

#[test]
fn missing_dataset_is_a_data_error_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "dataset = \"nowhere/records.csv\"\nschema = \"nowhere/schema.toml\"\n").unwrap();
    let out = satgraph(tmp.path(), &["train", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nowhere/records.csv"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn bad_config_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "[train]\nlearning_rate = -1.0\n").unwrap();
    let out = satgraph(tmp.path(), &["train", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(tmp.path().join("d.toml"), "[model]\nwidth = 3\n").unwrap();
    let out = satgraph(tmp.path(), &["train", "--config", "d.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim_end().lines().count(), 1);
}

#[test]
fn csv_training_path_works() {
    let tmp = tempfile::tempdir().unwrap();
    let out = satgraph(
        tmp.path(),
        &["synth", "--task", "distinguished-neighbor", "--n-graphs", "200", "--seed", "3", "--out", "data"],
    );
    assert!(out.status.success());
    let cfg = tmp.path().join("c.toml");
    fs::write(
        &cfg,
        "dataset = \"data/synth.distinguished-neighbor.s3.csv\"\nschema = \"data/synth.distinguished-neighbor.s3.schema.toml\"\n[train]\nepochs = 2\n",
    )
    .unwrap();
    let out = satgraph(tmp.path(), &["train", "--config", "c.toml", "--out", "run"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: TrainReport = parse(&only_file(&tmp.path().join("run"), "report."));
    assert_eq!(report.data.n_records, 200);
    assert!(report.data.imputed_cells > 0);
}

#[test]
fn synth_is_byte_identical_and_records_task() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["synth", "--task", "distinguished-neighbor", "--n-graphs", "2000", "--seed", "42"];
    let a = satgraph(tmp.path(), &[&args[..], &["--out", "a"]].concat());
    let b = satgraph(tmp.path(), &[&args[..], &["--out", "b"]].concat());
    assert!(a.status.success() && b.status.success());
    for name in [
        "synth.distinguished-neighbor.s42.csv",
        "synth.distinguished-neighbor.s42.schema.toml",
    ] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(name)).unwrap(),
            fs::read(tmp.path().join("b").join(name)).unwrap()
        );
    }
    let schema = fs::read_to_string(tmp.path().join("a/synth.distinguished-neighbor.s42.schema.toml")).unwrap();
    assert!(schema.starts_with('#'));
    assert!(schema.contains("# task = distinguished-neighbor"));
}

#[test]
fn degenerate_sweep_matches_plain_training() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    assert!(satgraph(tmp.path(), &["train", "--config", cfg, "--out", "t"]).status.success());
    let out = satgraph(tmp.path(), &["noise-sweep", "--config", cfg, "--rates", "0", "--seeds", "9", "--out", "s"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let train: TrainReport = parse(&only_file(&tmp.path().join("t"), "report."));
    let rows = fs::read_to_string(only_file(&tmp.path().join("s"), "sweep.")).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines[0], "noise_rate,seed,accuracy,precision,f1,auc");
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1], format!("0,9,{}", MetricsReport::csv_fields(&train.test)));
    let sweep: SweepReport = parse(&only_file(&tmp.path().join("s"), "report."));
    assert_eq!(sweep.points.len(), 1);
    assert_eq!(sweep.spearman_rate_f1, None);
}

#[test]
fn sweep_grid_has_one_row_per_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "[train]\nepochs = 1\n[synth]\nn_graphs = 100\n").unwrap();
    let out = satgraph(tmp.path(), &["noise-sweep", "--config", "c.toml", "--out", "s"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(only_file(&tmp.path().join("s"), "sweep.")).unwrap();
    assert_eq!(rows.lines().count(), 26);
}

#[test]
fn ablate_and_gradcheck_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = satgraph(tmp.path(), &["ablate", "--config", cfg.to_str().unwrap(), "--seeds", "1,2", "--out", "a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(only_file(&tmp.path().join("a"), "ablate.")).unwrap();
    assert_eq!(rows.lines().count(), 7);
    assert!(rows.contains("\ngcn-only,2,"));
    let out = satgraph(tmp.path(), &["gradcheck", "--trials", "10", "--readout", "attention"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok: worst relative error"));
}
