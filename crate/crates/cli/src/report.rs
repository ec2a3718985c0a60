use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use satgraph::data::Source;
use satgraph::metrics::MetricsReport;
use satgraph::training::EpochRecord;

use crate::config::{Ablation, RunConfig};
use crate::error::{write_file, CliError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub source: Source,
    pub n_records: usize,
    pub imputed_cells: usize,
    pub dropped_rows: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub command: String,
    pub run_id: String,
    pub final_train_loss: f64,
    pub data: DataSummary,
    /// Metrics on the held-out test split.
    pub test: MetricsReport,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub command: String,
    pub checkpoint: String,
    pub dataset: String,
    pub n_records: usize,
    pub imputed_cells: usize,
    pub dropped_rows: usize,
    pub metrics: MetricsReport,
}

/// One (rate, seed) cell of a noise sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub noise_rate: f64,
    pub seed: u64,
    pub flipped: usize,
    pub metrics: MetricsReport,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "noise_rate,seed,accuracy,precision,f1,auc";

    pub fn csv_line(&self) -> String {
        format!("{},{},{}", self.noise_rate, self.seed, self.metrics.csv_fields())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub noise_rate: f64,
    pub runs: usize,
    pub mean_f1: f64,
    pub std_error_f1: f64,
    pub mean_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub command: String,
    pub run_id: String,
    /// Rank correlation between noise rate and mean F1; absent when either is constant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman_rate_f1: Option<f64>,
    pub data: DataSummary,
    pub points: Vec<RatePoint>,
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub ablation: Ablation,
    pub seed: u64,
    pub metrics: MetricsReport,
}

impl AblationRow {
    pub const CSV_HEADER: &'static str = "ablation,seed,accuracy,precision,f1,auc";

    pub fn csv_line(&self) -> String {
        format!("{},{},{}", self.ablation.name(), self.seed, self.metrics.csv_fields())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantPoint {
    pub ablation: Ablation,
    pub runs: usize,
    pub mean_f1: f64,
    pub std_error_f1: f64,
    pub mean_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub command: String,
    pub run_id: String,
    pub data: DataSummary,
    pub variants: Vec<VariantPoint>,
    pub config: RunConfig,
}

/// Mean and standard error of the mean (zero for a single value).
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn to_report_text<R: Serialize>(title: &str, report: &R) -> Result<String, CliError> {
    let body = toml::to_string(report).map_err(|e| CliError::Runtime(format!("cannot serialize report: {e}")))?;
    Ok(format!("# satgraph {title} report\n{body}"))
}

pub fn write_report<R: Serialize>(path: &Path, title: &str, report: &R) -> Result<(), CliError> {
    write_file(path, to_report_text(title, report)?)
}

pub fn read_report<R: DeserializeOwned>(path: &Path) -> Result<R, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read report {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,train_loss,val_accuracy,val_precision,val_f1,val_auc\n");
    for r in history {
        let val = r
            .val
            .as_ref()
            .map_or_else(|| ",,,".to_string(), MetricsReport::csv_fields);
        out.push_str(&format!("{},{},{}\n", r.epoch, r.train_loss, val));
    }
    out
}

pub fn rows_csv<'a>(header: &str, lines: impl Iterator<Item = String> + 'a) -> String {
    let mut out = format!("{header}\n");
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_error_cases() {
        assert_eq!(mean_and_std_error(&[0.5]), (0.5, 0.0));
        let (m, se) = mean_and_std_error(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
