//! Central finite-difference verification of [`model_backward`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layers::{predict, ModelConfig, ModelParams};
use crate::linalg::Matrix;
use crate::rng::{Rng, Stream};

use super::{cross_entropy, loss_and_gradients, TrainConfig};

/// Finite-difference step.
pub const STEP: f64 = 1e-6;

/// Denominator floor of the per-entry relative error, so entries whose true
/// gradient is below the finite-difference noise level are compared absolutely.
pub const REL_FLOOR: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorCheck {
    pub name: String,
    /// Worst `|analytic − numeric| / max(|analytic|, |numeric|, REL_FLOOR)`.
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub entries_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub trials: usize,
    pub step: f64,
    pub tensors: Vec<TensorCheck>,
}

impl GradCheckReport {
    pub fn worst(&self) -> f64 {
        self.tensors.iter().map(|t| t.max_rel_error).fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        !self.tensors.is_empty() && self.worst() < tolerance
    }
}

fn random_graph(rng: &mut Rng, input_dim: usize) -> Result<Graph<f64>> {
    let n = rng.range_inclusive(3, 8);
    let features = Matrix::from_fn(n, input_dim, |_, _| rng.uniform(-1.0, 1.0));
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.bernoulli(0.4) {
                edges.push((s, t));
            }
        }
    }
    Graph::build(features, edges).map(|(g, _)| g)
}

/// Compares analytic gradients with central differences on `trials` random
/// 3–8 node graphs with freshly initialized parameters.
pub fn grad_check(mcfg: &ModelConfig, tcfg: &TrainConfig, trials: usize) -> Result<GradCheckReport> {
    if trials == 0 {
        return Err(Error::invalid("grad_check", "trials must be at least 1"));
    }
    mcfg.validate()?;
    tcfg.validate()?;
    const INPUT_DIM: usize = 6;
    let mut rng = Rng::stream(tcfg.seed, Stream::GradCheck);
    let floor = tcfg.prob_floor;
    let mut checks: Vec<TensorCheck> = Vec::new();

    for _ in 0..trials {
        let g = random_graph(&mut rng, INPUT_DIM)?;
        let mut params = ModelParams::<f64>::init(mcfg, INPUT_DIM, &mut rng)?;
        let label = u8::from(rng.bernoulli(0.5));
        let (_, analytic) = loss_and_gradients(&g, label, &params, mcfg, floor)?;
        let loss_at = |p: &ModelParams<f64>| -> Result<f64> {
            cross_entropy(&predict(&g, p, mcfg)?, usize::from(label), floor)
        };

        let names: Vec<String> = analytic.tensors().into_iter().map(|(n, _)| n).collect();
        for (t, name) in names.iter().enumerate() {
            let grad = analytic.tensors()[t].1.as_slice().to_vec();
            let mut worst_rel = 0.0f64;
            let mut worst_abs = 0.0f64;
            for (k, &a) in grad.iter().enumerate() {
                let original = params.tensors_mut()[t].as_slice()[k];
                params.tensors_mut()[t].as_mut_slice()[k] = original + STEP;
                let plus = loss_at(&params)?;
                params.tensors_mut()[t].as_mut_slice()[k] = original - STEP;
                let minus = loss_at(&params)?;
                params.tensors_mut()[t].as_mut_slice()[k] = original;
                let numeric = (plus - minus) / (2.0 * STEP);
                let abs = (a - numeric).abs();
                worst_abs = worst_abs.max(abs);
                worst_rel = worst_rel.max(abs / a.abs().max(numeric.abs()).max(REL_FLOOR));
            }
            match checks.iter_mut().find(|c| &c.name == name) {
                Some(c) => {
                    c.max_rel_error = c.max_rel_error.max(worst_rel);
                    c.max_abs_error = c.max_abs_error.max(worst_abs);
                    c.entries_checked += grad.len();
                }
                None => checks.push(TensorCheck {
                    name: name.clone(),
                    max_rel_error: worst_rel,
                    max_abs_error: worst_abs,
                    entries_checked: grad.len(),
                }),
            }
        }
    }
    Ok(GradCheckReport {
        trials,
        step: STEP,
        tensors: checks,
    })
}
