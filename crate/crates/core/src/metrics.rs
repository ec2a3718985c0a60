//! Accuracy, precision, F1 and ROC-AUC for binary predictions (positive class 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn check_binary(op: &'static str, labels: &[u8]) -> Result<()> {
    match labels.iter().find(|&&l| l > 1) {
        Some(l) => Err(Error::invalid(op, format!("non-binary label {l}"))),
        None => Ok(()),
    }
}

pub fn confusion(preds: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if preds.len() != labels.len() {
        return Err(Error::invalid(
            "confusion",
            format!("{} predictions for {} labels", preds.len(), labels.len()),
        ));
    }
    if preds.is_empty() {
        return Err(Error::invalid("confusion", "no items"));
    }
    check_binary("confusion", preds)?;
    check_binary("confusion", labels)?;
    let mut cm = ConfusionMatrix::default();
    for (&p, &l) in preds.iter().zip(labels) {
        match (p, l) {
            (1, 1) => cm.tp += 1,
            (1, 0) => cm.fp += 1,
            (0, 1) => cm.fn_ += 1,
            _ => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Threshold metrics. Ratios with a zero denominator are reported as 0 and flagged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> Result<ClassificationMetrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::invalid("classification_metrics", "empty confusion matrix"));
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1_undefined = precision + recall == 0.0;
    let f1 = if f1_undefined {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(ClassificationMetrics {
        accuracy: (cm.tp + cm.tn) as f64 / total as f64,
        precision,
        recall,
        f1,
        precision_undefined: cm.tp + cm.fp == 0,
        recall_undefined: cm.tp + cm.fn_ == 0,
        f1_undefined,
    })
}

/// Ranks (1-based) with ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Area under the ROC curve via the Mann–Whitney rank sum: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties counting 0.5.
pub fn roc_auc<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(
            "roc_auc",
            format!("{} scores for {} labels", scores.len(), labels.len()),
        ));
    }
    check_binary("roc_auc", labels)?;
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid("roc_auc", "both classes must be present"));
    }
    let values: Vec<f64> = scores.iter().map(|s| s.as_f64()).collect();
    let ranks = average_ranks(&values);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// Returns `None` when either sequence is constant or shorter than two.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Everything reported for one evaluated item set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_items: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// `None` when the labels contain a single class.
    pub auc: Option<f64>,
    pub confusion: ConfusionMatrix,
    pub precision_undefined: bool,
    pub f1_undefined: bool,
}

impl MetricsReport {
    /// Predicted class is 1 when `score ≥ 0.5` (the argmax of a two-class softmax).
    pub fn from_scores<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<Self> {
        let half = T::of(0.5);
        let preds: Vec<u8> = scores.iter().map(|&s| u8::from(s >= half)).collect();
        let cm = confusion(&preds, labels)?;
        let m = classification_metrics(&cm)?;
        let both = labels.contains(&0) && labels.contains(&1);
        let auc = if both { Some(roc_auc(scores, labels)?) } else { None };
        Ok(Self {
            n_items: labels.len(),
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            auc,
            confusion: cm,
            precision_undefined: m.precision_undefined,
            f1_undefined: m.f1_undefined,
        })
    }

    pub const CSV_HEADER: &'static str = "accuracy,precision,f1,auc";

    /// `accuracy,precision,f1,auc` with `undefined` for a missing AUC.
    pub fn csv_fields(&self) -> String {
        let auc = self.auc.map_or_else(|| "undefined".to_string(), |a| a.to_string());
        format!("{},{},{},{}", self.accuracy, self.precision, self.f1, auc)
    }
}
