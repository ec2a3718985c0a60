//! Loss, gradients, optimizer and the training loop.

mod backward;
mod gradcheck;
mod optimizer;

use serde::{Deserialize, Serialize};

pub use backward::{cross_entropy, logit_gradient, model_backward};
pub use gradcheck::{grad_check, GradCheckReport, TensorCheck};
pub use optimizer::{adam_step, AdamState};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::layers::{model_forward, predict, ModelConfig, ModelParams};
use crate::metrics::MetricsReport;
use crate::rng::{Rng, Stream};
use crate::scalar::Scalar;

/// Optimizer and loop settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub batch_size: usize,
    /// Lower clamp on the true-class probability inside the loss.
    pub prob_floor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            batch_size: 32,
            prob_floor: 1e-12,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::invalid("TrainConfig", msg));
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("beta1 and beta2 must lie in [0, 1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.prob_floor > 0.0 && self.prob_floor <= 1e-3) {
            return bad("prob_floor must lie in (0, 1e-3]");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        Ok(())
    }
}

/// Summary of one epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean cross-entropy over the training graphs seen this epoch.
    pub train_loss: f64,
    pub val: Option<MetricsReport>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub params: ModelParams<T>,
    pub history: Vec<EpochRecord>,
}

fn accumulate<T: Scalar>(total: &mut ModelParams<T>, part: &ModelParams<T>) -> Result<()> {
    for (dst, (_, src)) in total.tensors_mut().into_iter().zip(part.tensors()) {
        dst.add_assign(src)?;
    }
    Ok(())
}

/// Forward and backward pass for one labeled graph: `(loss, gradients)`.
pub fn loss_and_gradients<T: Scalar>(
    g: &crate::graph::Graph<T>,
    label: u8,
    params: &ModelParams<T>,
    cfg: &ModelConfig,
    prob_floor: T,
) -> Result<(T, ModelParams<T>)> {
    let (probs, cache) = model_forward(g, params, cfg)?;
    let y = usize::from(label);
    let loss = cross_entropy(&probs, y, prob_floor)?;
    let grads = model_backward(g, params, cfg, &cache, y, prob_floor)?;
    Ok((loss, grads))
}

/// Trains from a seeded Glorot initialization.
///
/// Graphs are visited in an order reshuffled every epoch; per-graph gradients
/// are averaged over each batch before one optimizer step. Initialization and
/// shuffling draw from separate substreams of `tcfg.seed`.
pub fn train<T: Scalar>(
    data: &LabeledDataset<T>,
    val: Option<&LabeledDataset<T>>,
    mcfg: &ModelConfig,
    tcfg: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    mcfg.validate()?;
    tcfg.validate()?;
    let input_dim = data
        .feature_dim()
        .ok_or_else(|| Error::invalid("train", "empty training set"))?;
    let [neg, pos] = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::invalid(
            "train",
            format!("training split must contain both classes (negatives {neg}, positives {pos})"),
        ));
    }
    let mut params = ModelParams::init(mcfg, input_dim, &mut Rng::stream(tcfg.seed, Stream::Init))?;
    let mut shuffle = Rng::stream(tcfg.seed, Stream::Shuffle);
    let mut state = AdamState::new(&params);
    let floor = T::of(tcfg.prob_floor);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(tcfg.epochs);

    for epoch in 0..tcfg.epochs {
        shuffle.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(tcfg.batch_size) {
            let mut total = params.zeros_like();
            for &i in batch {
                let item = &data.items[i];
                let (loss, grads) = loss_and_gradients(&item.graph, item.label, &params, mcfg, floor)?;
                epoch_loss += loss.as_f64();
                accumulate(&mut total, &grads)?;
            }
            let inv = T::one() / T::of(batch.len() as f64);
            for t in total.tensors_mut() {
                t.scale(inv);
            }
            adam_step(&mut params, &total, &mut state, tcfg)?;
        }
        let train_loss = epoch_loss / data.len() as f64;
        let val = match val {
            Some(v) if !v.is_empty() => Some(evaluate(v, &params, mcfg)?.report),
            _ => None,
        };
        log::info!(
            "epoch {:>3}  loss {:.5}{}",
            epoch + 1,
            train_loss,
            val.as_ref().map_or(String::new(), |m| format!("  val acc {:.4} f1 {:.4}", m.accuracy, m.f1)),
        );
        history.push(EpochRecord {
            epoch: epoch + 1,
            train_loss,
            val,
        });
    }
    Ok(TrainOutcome { params, history })
}

/// Scores and metrics of a parameter set on a dataset.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Probability of class 1 per item.
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
    pub report: MetricsReport,
}

pub fn evaluate<T: Scalar>(data: &LabeledDataset<T>, params: &ModelParams<T>, cfg: &ModelConfig) -> Result<Evaluation> {
    let scores = data
        .items
        .iter()
        .map(|s| predict(&s.graph, params, cfg).map(|p| p[1].as_f64()))
        .collect::<Result<Vec<_>>>()?;
    let labels = data.labels();
    let report = MetricsReport::from_scores(&scores, &labels)?;
    Ok(Evaluation {
        scores,
        labels,
        report,
    })
}
