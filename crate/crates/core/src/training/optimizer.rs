use crate::error::{Error, Result};
use crate::layers::{Gradients, ModelParams};
use crate::scalar::Scalar;

use super::TrainConfig;

/// First and second moment accumulators of the adaptive-moment optimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub first: ModelParams<T>,
    pub second: ModelParams<T>,
    pub step: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(params: &ModelParams<T>) -> Self {
        Self {
            first: params.zeros_like(),
            second: params.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step<T: Scalar>(
    params: &mut ModelParams<T>,
    grads: &Gradients<T>,
    state: &mut AdamState<T>,
    cfg: &TrainConfig,
) -> Result<()> {
    if !params.same_layout(grads) || !params.same_layout(&state.first) {
        return Err(Error::invalid("adam_step", "parameter, gradient and moment layouts differ"));
    }
    state.step += 1;
    let t = i32::try_from(state.step).unwrap_or(i32::MAX);
    let (b1, b2) = (T::of(cfg.beta1), T::of(cfg.beta2));
    let lr = T::of(cfg.learning_rate);
    let eps = T::of(cfg.epsilon);
    let one = T::one();
    let c1 = one - b1.powi(t);
    let c2 = one - b2.powi(t);

    let grads = grads.tensors();
    let first = state.first.tensors_mut();
    let second = state.second.tensors_mut();
    for (((p, (_, g)), m), v) in params.tensors_mut().into_iter().zip(grads).zip(first).zip(second) {
        let iter = p
            .as_mut_slice()
            .iter_mut()
            .zip(g.as_slice())
            .zip(m.as_mut_slice().iter_mut().zip(v.as_mut_slice()));
        for ((p, &g), (m, v)) in iter {
            *m = b1 * *m + (one - b1) * g;
            *v = b2 * *v + (one - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
