use std::path::{Path, PathBuf};

use rayon::prelude::*;

use satgraph::checkpoint::Checkpoint;
use satgraph::data::{
    generate_records, inject_label_noise, load_csv, prepare, save_csv, Prepared, RecordTable, Schema, Source,
    SynthConfig,
};
use satgraph::metrics::{spearman, MetricsReport};
use satgraph::training::{evaluate, grad_check, train, GradCheckReport, TrainOutcome};

use crate::config::{short_hash, RunConfig};
use crate::error::{write_file, CliError};
use crate::report::{
    history_csv, mean_and_std_error, rows_csv, write_report, AblationReport, AblationRow, DataSummary, EvalReport,
    RatePoint, SweepReport, SweepRow, TrainReport, VariantPoint,
};

/// Input records with their schema and origin.
pub struct LoadedData {
    pub schema: Schema,
    pub table: RecordTable,
    pub source: Source,
}

pub fn load_data(cfg: &RunConfig) -> Result<LoadedData, CliError> {
    match (&cfg.dataset, &cfg.schema) {
        (Some(dataset), Some(schema)) => {
            if !dataset.is_file() {
                return Err(CliError::Data(format!("dataset {} not found", dataset.display())));
            }
            let schema = Schema::load(schema)?;
            let table = load_csv(dataset, &schema)?;
            Ok(LoadedData {
                schema,
                table,
                source: Source::Csv,
            })
        }
        (Some(_), None) => Err(CliError::Config("`dataset` requires `schema`".into())),
        _ => {
            let (schema, table) = generate_records(&cfg.synth)?;
            Ok(LoadedData {
                schema,
                table,
                source: Source::Synthetic,
            })
        }
    }
}

fn summarize(data: &LoadedData, p: &Prepared<f64>) -> DataSummary {
    DataSummary {
        source: data.source,
        n_records: data.table.len(),
        imputed_cells: data.table.imputed,
        dropped_rows: data.table.dropped,
        n_train: p.train.len(),
        n_val: p.val.len(),
        n_test: p.test.len(),
    }
}

fn prepare_data(cfg: &RunConfig, data: &LoadedData) -> Result<Prepared<f64>, CliError> {
    Ok(prepare(&data.schema, &data.table, &cfg.split, data.source)?)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

/// Result of one training run, before anything is written.
pub struct TrainRun {
    pub config: RunConfig,
    pub run_id: String,
    pub data: LoadedData,
    pub prepared: Prepared<f64>,
    pub outcome: TrainOutcome<f64>,
    pub report: TrainReport,
}

/// Trains on the configured data and evaluates on its test split.
/// `cfg` must already be resolved.
pub fn run_train(cfg: &RunConfig) -> Result<TrainRun, CliError> {
    let data = load_data(cfg)?;
    let prepared = prepare_data(cfg, &data)?;
    let outcome = train(&prepared.train, Some(&prepared.val), &cfg.model, &cfg.train)?;
    let test = evaluate(&prepared.test, &outcome.params, &cfg.model)?.report;
    let run_id = cfg.run_id()?;
    let report = TrainReport {
        command: "train".into(),
        run_id: run_id.clone(),
        final_train_loss: outcome.history.last().map_or(f64::NAN, |r| r.train_loss),
        data: summarize(&data, &prepared),
        test,
        config: cfg.clone(),
    };
    Ok(TrainRun {
        config: cfg.clone(),
        run_id,
        data,
        prepared,
        outcome,
        report,
    })
}

/// Paths written by `train`.
#[derive(Clone, Debug)]
pub struct TrainFiles {
    pub report: PathBuf,
    pub history: PathBuf,
    pub checkpoint: PathBuf,
    pub test_csv: PathBuf,
    pub test_schema: PathBuf,
}

/// Trains, then writes the report, history, checkpoint and the test split
/// (as CSV plus schema, so `eval` can reproduce the test metrics).
pub fn cmd_train(cfg: &RunConfig) -> Result<(TrainRun, TrainFiles), CliError> {
    let run = run_train(cfg)?;
    let dir = &cfg.out_dir;
    ensure_dir(dir)?;
    let id = &run.run_id;
    let files = TrainFiles {
        report: dir.join(format!("report.{id}.txt")),
        history: dir.join(format!("history.{id}.csv")),
        checkpoint: dir.join(format!("checkpoint.{id}")),
        test_csv: dir.join(format!("test.{id}.csv")),
        test_schema: dir.join(format!("schema.{id}.toml")),
    };
    write_report(&files.report, "train", &run.report)?;
    write_file(&files.history, history_csv(&run.outcome.history))?;
    Checkpoint::new(&cfg.model, &run.prepared.encoder, &run.outcome.params, cfg.seed).save(&files.checkpoint)?;

    let test_table = RecordTable {
        records: run.prepared.indices.test.iter().map(|&i| run.data.table.records[i].clone()).collect(),
        imputed: 0,
        dropped: 0,
    };
    let mut schema = run.data.schema.clone();
    schema.provenance.push(format!("test split of run {id}"));
    save_csv(&files.test_csv, &schema, &test_table)?;
    schema.save(&files.test_schema)?;
    Ok((run, files))
}

/// Scores a checkpoint on a CSV dataset without touching its parameters.
pub fn cmd_eval(checkpoint: &Path, dataset: &Path, schema: &Path, out_dir: &Path) -> Result<(EvalReport, PathBuf), CliError> {
    let ck_text = std::fs::read_to_string(checkpoint)
        .map_err(|e| CliError::Data(format!("{}: {e}", checkpoint.display())))?;
    let ck = Checkpoint::from_json(&ck_text)?;
    let schema_file = Schema::load(schema)?;
    ck.encoder.check_schema(&schema_file)?;
    let table = load_csv(dataset, &schema_file)?;
    let data = ck.encoder.encode_all::<f64>(&table.records, Source::Csv)?;
    if data.is_empty() {
        return Err(CliError::Data(format!("{} contains no records", dataset.display())));
    }
    let params = ck.params::<f64>()?;
    let metrics = evaluate(&data, &params, &ck.model)?.report;
    let report = EvalReport {
        command: "eval".into(),
        checkpoint: checkpoint.display().to_string(),
        dataset: dataset.display().to_string(),
        n_records: table.len(),
        imputed_cells: table.imputed,
        dropped_rows: table.dropped,
        metrics,
    };
    ensure_dir(out_dir)?;
    let mut key = ck_text.into_bytes();
    key.extend_from_slice(report.dataset.as_bytes());
    let path = out_dir.join(format!("eval.{}.txt", short_hash(&key)));
    write_report(&path, "eval", &report)?;
    Ok((report, path))
}

/// Rows in (rate, seed) order plus the per-rate summary.
pub struct SweepRun {
    pub rows: Vec<SweepRow>,
    pub report: SweepReport,
}

/// Trains one fresh model per (rate, seed) with noisy training labels and
/// clean evaluation labels. All points share the run's training seed; the row
/// seed drives only the label flips. Points run in parallel.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepRun, CliError> {
    let data = load_data(cfg)?;
    let prepared = prepare_data(cfg, &data)?;
    let grid: Vec<(f64, u64)> = cfg
        .sweep
        .rates
        .iter()
        .flat_map(|&r| cfg.sweep.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(rate, seed)| -> Result<SweepRow, CliError> {
            let noisy = inject_label_noise(&prepared.train, rate, seed)?;
            let out = train(&noisy, Some(&prepared.val), &cfg.model, &cfg.train)?;
            let metrics = evaluate(&prepared.test, &out.params, &cfg.model)?.report;
            log::info!("sweep rate {rate} seed {seed}: f1 {:.4}", metrics.f1);
            Ok(SweepRow {
                noise_rate: rate,
                seed,
                flipped: noisy.flipped_ids.len(),
                metrics,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let points: Vec<RatePoint> = cfg
        .sweep
        .rates
        .iter()
        .map(|&rate| {
            let at: Vec<&SweepRow> = rows.iter().filter(|r| r.noise_rate == rate).collect();
            let f1: Vec<f64> = at.iter().map(|r| r.metrics.f1).collect();
            let acc: Vec<f64> = at.iter().map(|r| r.metrics.accuracy).collect();
            let (mean_f1, std_error_f1) = mean_and_std_error(&f1);
            RatePoint {
                noise_rate: rate,
                runs: at.len(),
                mean_f1,
                std_error_f1,
                mean_accuracy: mean_and_std_error(&acc).0,
            }
        })
        .collect();
    let rates: Vec<f64> = points.iter().map(|p| p.noise_rate).collect();
    let means: Vec<f64> = points.iter().map(|p| p.mean_f1).collect();
    let report = SweepReport {
        command: "noise-sweep".into(),
        run_id: cfg.run_id()?,
        spearman_rate_f1: spearman(&rates, &means),
        data: summarize(&data, &prepared),
        points,
        config: cfg.clone(),
    };
    Ok(SweepRun { rows, report })
}

pub fn cmd_noise_sweep(cfg: &RunConfig) -> Result<(SweepRun, PathBuf, PathBuf), CliError> {
    let run = run_sweep(cfg)?;
    ensure_dir(&cfg.out_dir)?;
    let id = &run.report.run_id;
    let report = cfg.out_dir.join(format!("report.{id}.txt"));
    let csv = cfg.out_dir.join(format!("sweep.{id}.csv"));
    write_file(&csv, rows_csv(SweepRow::CSV_HEADER, run.rows.iter().map(SweepRow::csv_line)))?;
    write_report(&report, "noise-sweep", &run.report)?;
    Ok((run, report, csv))
}

pub struct AblationRun {
    pub rows: Vec<AblationRow>,
    pub report: AblationReport,
}

/// Trains every configured variant once per seed on one shared split.
pub fn run_ablation(cfg: &RunConfig) -> Result<AblationRun, CliError> {
    let data = load_data(cfg)?;
    let prepared = prepare_data(cfg, &data)?;
    let grid: Vec<RunConfig> = cfg
        .ablate
        .variants
        .iter()
        .flat_map(|&v| {
            cfg.ablate.seeds.iter().map(move |&s| RunConfig {
                ablation: v,
                seed: s,
                ..cfg.clone()
            })
        })
        .map(RunConfig::resolve)
        .collect::<Result<_, _>>()?;
    let rows = grid
        .par_iter()
        .map(|c| -> Result<AblationRow, CliError> {
            let out = train(&prepared.train, Some(&prepared.val), &c.model, &c.train)?;
            let metrics = evaluate(&prepared.test, &out.params, &c.model)?.report;
            log::info!("ablation {} seed {}: f1 {:.4}", c.ablation.name(), c.seed, metrics.f1);
            Ok(AblationRow {
                ablation: c.ablation,
                seed: c.seed,
                metrics,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let variants = cfg
        .ablate
        .variants
        .iter()
        .map(|&v| {
            let f1: Vec<f64> = rows.iter().filter(|r| r.ablation == v).map(|r| r.metrics.f1).collect();
            let acc: Vec<f64> = rows.iter().filter(|r| r.ablation == v).map(|r| r.metrics.accuracy).collect();
            let (mean_f1, std_error_f1) = mean_and_std_error(&f1);
            VariantPoint {
                ablation: v,
                runs: f1.len(),
                mean_f1,
                std_error_f1,
                mean_accuracy: mean_and_std_error(&acc).0,
            }
        })
        .collect();
    let report = AblationReport {
        command: "ablate".into(),
        run_id: cfg.run_id()?,
        data: summarize(&data, &prepared),
        variants,
        config: cfg.clone(),
    };
    Ok(AblationRun { rows, report })
}

pub fn cmd_ablate(cfg: &RunConfig) -> Result<(AblationRun, PathBuf, PathBuf), CliError> {
    let run = run_ablation(cfg)?;
    ensure_dir(&cfg.out_dir)?;
    let id = &run.report.run_id;
    let report = cfg.out_dir.join(format!("report.{id}.txt"));
    let csv = cfg.out_dir.join(format!("ablate.{id}.csv"));
    write_file(&csv, rows_csv(AblationRow::CSV_HEADER, run.rows.iter().map(AblationRow::csv_line)))?;
    write_report(&report, "ablate", &run.report)?;
    Ok((run, report, csv))
}

/// Writes `synth.<task>.s<seed>.csv` and the matching `.schema.toml`.
pub fn cmd_synth(cfg: &SynthConfig, out_dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let (schema, table) = generate_records(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    ensure_dir(out_dir)?;
    let stem = format!("synth.{}.s{}", cfg.task.name(), cfg.seed);
    let csv = out_dir.join(format!("{stem}.csv"));
    let schema_path = out_dir.join(format!("{stem}.schema.toml"));
    save_csv(&csv, &schema, &table).map_err(|e| CliError::Runtime(e.to_string()))?;
    schema.save(&schema_path).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok((csv, schema_path))
}

pub fn cmd_gradcheck(cfg: &RunConfig, trials: usize) -> Result<GradCheckReport, CliError> {
    Ok(grad_check(&cfg.model, &cfg.train, trials)?)
}

/// One-line metrics summary for the terminal.
pub fn describe(m: &MetricsReport) -> String {
    let auc = m.auc.map_or_else(|| "undefined".to_string(), |a| format!("{a:.4}"));
    format!(
        "accuracy {:.4}  precision {:.4}  f1 {:.4}  auc {auc}  (n = {})",
        m.accuracy, m.precision, m.f1, m.n_items
    )
}
