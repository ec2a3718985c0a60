//! Reverse-mode gradients of the cross-entropy loss through every layer.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyIndex, Graph};
use crate::layers::{fingerprint, ForwardCache, Gradients, ModelConfig, ModelParams, ReadoutCache, N_CLASSES};
use crate::linalg::{axpy, dot, leaky_relu_grad, Matrix};
use crate::scalar::Scalar;

/// `L = -ln(max(ŷ_y, floor))`.
pub fn cross_entropy<T: Scalar>(yhat: &[T], y: usize, prob_floor: T) -> Result<T> {
    if y >= yhat.len() {
        return Err(Error::invalid(
            "cross_entropy",
            format!("class {y} outside [0, {})", yhat.len()),
        ));
    }
    Ok(-yhat[y].max(prob_floor).ln())
}

/// `∂L/∂logits = ŷ − onehot(y)`, zero when the floor clamps the loss.
pub fn logit_gradient<T: Scalar>(yhat: &[T], y: usize, prob_floor: T) -> Vec<T> {
    if yhat[y] < prob_floor {
        return vec![T::zero(); yhat.len()];
    }
    yhat.iter()
        .enumerate()
        .map(|(c, &p)| if c == y { p - T::one() } else { p })
        .collect()
}

/// Rows `i` receive `Σ_j coeff_ij · rows_j` in the forward direction; this
/// scatters the upstream gradient back: `d_rows_j += coeff_ij · d_out_i`.
fn scatter_back<T: Scalar>(adj: &AdjacencyIndex<T>, coeff: impl Fn(usize, usize) -> T, d_out: &Matrix<T>) -> Matrix<T> {
    let mut d_in = Matrix::zeros(d_out.rows(), d_out.cols());
    for i in 0..adj.n_nodes() {
        let upstream = d_out.row(i).to_vec();
        for (k, &j) in adj.neighbors(i).iter().enumerate() {
            axpy(coeff(i, k), &upstream, d_in.row_mut(j));
        }
    }
    d_in
}

fn activation_back<T: Scalar>(cfg: &ModelConfig, d_out: &Matrix<T>, pre: &Matrix<T>) -> Matrix<T> {
    let act = cfg.activation::<T>();
    let mut d = d_out.clone();
    for (g, &z) in d.as_mut_slice().iter_mut().zip(pre.as_slice()) {
        *g *= act.grad(z);
    }
    d
}

/// Exact gradient of `cross_entropy ∘ model_forward` for every parameter.
///
/// `cache` must come from `model_forward(g, params, cfg)` with the same inputs.
pub fn model_backward<T: Scalar>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    cfg: &ModelConfig,
    cache: &ForwardCache<T>,
    y: usize,
    prob_floor: T,
) -> Result<Gradients<T>> {
    if y >= N_CLASSES {
        return Err(Error::invalid("model_backward", format!("class {y} outside [0, {N_CLASSES})")));
    }
    if cache.fingerprint != fingerprint(g, params) {
        return Err(Error::invalid(
            "model_backward",
            "forward cache does not belong to this graph and parameter set",
        ));
    }
    let mut grads = params.zeros_like();
    let adj = &cache.adjacency;

    // classifier head
    let d_logits = logit_gradient(&cache.probs, y, prob_floor);
    let z = &cache.graph_embedding;
    for (c, &dl) in d_logits.iter().enumerate() {
        axpy(dl, z, grads.out_weight.row_mut(c));
        grads.out_bias[(c, 0)] = dl;
    }
    let mut d_z = vec![T::zero(); z.len()];
    for (c, &dl) in d_logits.iter().enumerate() {
        axpy(dl, params.out_weight.row(c), &mut d_z);
    }

    // readout
    let h_final = &cache.final_nodes;
    let n = h_final.rows();
    let mut d_h = Matrix::zeros(n, h_final.cols());
    match &cache.readout {
        ReadoutCache::Mean => {
            let inv = T::one() / T::of(n as f64);
            for i in 0..n {
                axpy(inv, &d_z, d_h.row_mut(i));
            }
        }
        ReadoutCache::Max(arg) => {
            for (c, &i) in arg.iter().enumerate() {
                d_h[(i, c)] += d_z[c];
            }
        }
        ReadoutCache::Attention { gate, weights } => {
            let (w_g, q) = match (&params.gate_weight, &params.gate_vector) {
                (Some(w), Some(q)) => (w, q),
                _ => return Err(Error::invalid("model_backward", "missing readout gate parameters")),
            };
            // z = Σ s_i h_i with s = softmax(u), u_i = q · tanh(h_i W_g)
            let d_s: Vec<T> = (0..n).map(|i| dot(&d_z, h_final.row(i))).collect();
            let mean_ds = dot(weights, &d_s);
            let d_u: Vec<T> = weights
                .iter()
                .zip(&d_s)
                .map(|(&s, &ds)| s * (ds - mean_ds))
                .collect();
            let gq = grads.gate_vector.as_mut().expect("layout mirrors params");
            let mut d_pre = Matrix::zeros(n, gate.cols());
            for i in 0..n {
                axpy(weights[i], &d_z, d_h.row_mut(i));
                axpy(d_u[i], gate.row(i), gq.as_mut_slice());
                for (k, dp) in d_pre.row_mut(i).iter_mut().enumerate() {
                    let t = gate[(i, k)];
                    *dp = d_u[i] * q[(k, 0)] * (T::one() - t * t);
                }
            }
            *grads.gate_weight.as_mut().expect("layout mirrors params") = h_final.t_matmul(&d_pre)?;
            d_h.add_assign(&d_pre.matmul_t(w_g)?)?;
        }
    }

    // attention layer
    if let Some(att) = &cache.attention {
        let w = params
            .attn_weight
            .as_ref()
            .ok_or_else(|| Error::invalid("model_backward", "missing attention weight"))?;
        let d_pre = activation_back(cfg, &d_h, &att.pre);
        let mut d_m = scatter_back(adj, |i, k| att.alpha[i][k], &d_pre);
        if let Some(a) = &params.attn_vector {
            let width = att.transformed.cols();
            let (a_self, a_nbr) = a.as_slice().split_at(width);
            let slope = T::of(cfg.leaky_slope);
            let mut d_a = vec![T::zero(); 2 * width];
            for i in 0..n {
                let nbrs = adj.neighbors(i);
                let alpha = &att.alpha[i];
                let d_alpha: Vec<T> = nbrs
                    .iter()
                    .map(|&j| dot(d_pre.row(i), att.transformed.row(j)))
                    .collect();
                let mean = dot(alpha, &d_alpha);
                for (k, &j) in nbrs.iter().enumerate() {
                    let d_score = alpha[k] * (d_alpha[k] - mean) * leaky_relu_grad(att.scores[i][k], slope);
                    let (da_self, da_nbr) = d_a.split_at_mut(width);
                    axpy(d_score, att.transformed.row(i), da_self);
                    axpy(d_score, att.transformed.row(j), da_nbr);
                    axpy(d_score, a_self, d_m.row_mut(i));
                    axpy(d_score, a_nbr, d_m.row_mut(j));
                }
            }
            *grads.attn_vector.as_mut().expect("layout mirrors params") = Matrix::column(d_a);
        }
        *grads.attn_weight.as_mut().expect("layout mirrors params") = att.input.t_matmul(&d_m)?;
        d_h = d_m.matmul_t(w)?;
    }

    // convolution layers, last to first
    for (l, layer) in cache.gcn.iter().enumerate().rev() {
        let d_pre = activation_back(cfg, &d_h, &layer.pre);
        let d_m = scatter_back(adj, |i, k| T::one() / adj.norm(i)[k], &d_pre);
        grads.gcn_weights[l] = layer.input.t_matmul(&d_m)?;
        d_h = d_m.matmul_t(&params.gcn_weights[l])?;
    }

    // input embedding: H0 = X E
    grads.embeddings = g.features().t_matmul(&d_h)?;
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_entropy_cases() {
        assert_eq!(cross_entropy(&[1.0, 0.0], 0, 1e-12).unwrap(), 0.0);
        let l = cross_entropy(&[0.5, 0.5], 1, 1e-12).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        let l: f64 = cross_entropy(&[0.0, 1.0], 0, 1e-12).unwrap();
        assert!((l - 27.631_021_115_928_547).abs() < 1e-9, "{l}");
        assert!(cross_entropy(&[0.5, 0.5], 2, 1e-12).is_err());
    }

    #[test]
    fn logit_gradient_is_softmax_minus_onehot() {
        assert_eq!(logit_gradient(&[0.25, 0.75], 1, 1e-12), vec![0.25, -0.25]);
        assert_eq!(logit_gradient(&[0.0, 1.0], 0, 1e-12), vec![0.0, 0.0]);
    }
}
