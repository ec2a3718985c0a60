//! Forward passes: input embedding, graph convolution, edge attention, global
//! readout and the softmax classifier head, composed into the full model.
//!
//! Node representations are rows, so the per-node transform `W h_j` of a column
//! vector is written `H W` here with `W` of shape `d_in × d_out`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyIndex, Graph, NormScheme};
use crate::linalg::{axpy, dot, glorot_uniform, leaky_relu_grad, leaky_relu_scalar, softmax_row, Matrix};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Number of output classes (satisfied / not satisfied).
pub const N_CLASSES: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationKind {
    #[default]
    Relu,
    LeakyRelu,
}

/// Nonlinearity applied after aggregation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation<T> {
    Identity,
    Relu,
    LeakyRelu(T),
}

impl<T: Scalar> Activation<T> {
    #[inline]
    pub fn apply(self, x: T) -> T {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(T::zero()),
            Activation::LeakyRelu(s) => leaky_relu_scalar(x, s),
        }
    }

    /// Derivative at the pre-activation value `x`.
    #[inline]
    pub fn grad(self, x: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::Relu => {
                if x > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::LeakyRelu(s) => leaky_relu_grad(x, s),
        }
    }

    fn apply_matrix(self, z: &Matrix<T>) -> Matrix<T> {
        z.map(|v| self.apply(v))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutMode {
    #[default]
    Mean,
    Max,
    Attention,
}

/// Architecture hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Width of the input embedding (categorical rows and numeric directions).
    pub embed_dim: usize,
    /// Output width of each graph convolution layer.
    pub hidden_dims: Vec<usize>,
    pub activation: ActivationKind,
    pub leaky_slope: f64,
    pub readout: ReadoutMode,
    /// Whether the attention message-passing layer is present at all.
    pub attention_layer: bool,
    /// Learned coefficients when true; uniform `1/|N(i)|` weights when false.
    pub attention_enabled: bool,
    pub attention_dim: usize,
    /// Hidden width of the attention-pooling gate.
    pub gate_dim: usize,
    pub norm: NormScheme,
    pub self_loops: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            embed_dim: 16,
            hidden_dims: vec![32, 32],
            activation: ActivationKind::Relu,
            leaky_slope: 0.2,
            readout: ReadoutMode::Mean,
            attention_layer: true,
            attention_enabled: true,
            attention_dim: 32,
            gate_dim: 16,
            norm: NormScheme::Symmetric,
            self_loops: true,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::invalid("ModelConfig", msg));
        if self.hidden_dims.is_empty() && !self.attention_layer {
            return bad("hidden_dims may be empty only when the attention layer is present");
        }
        if self.attention_enabled && !self.attention_layer {
            return bad("attention_enabled requires attention_layer");
        }
        if !(0.0..1.0).contains(&self.leaky_slope) {
            return bad("leaky_slope must lie in [0, 1)");
        }
        let widths = [self.embed_dim, self.attention_dim, self.gate_dim];
        if widths.contains(&0) || self.hidden_dims.contains(&0) {
            return bad("layer widths must be positive");
        }
        Ok(())
    }

    pub fn activation<T: Scalar>(&self) -> Activation<T> {
        match self.activation {
            ActivationKind::Relu => Activation::Relu,
            ActivationKind::LeakyRelu => Activation::LeakyRelu(T::of(self.leaky_slope)),
        }
    }

    /// Width of the node representations entering the readout.
    pub fn final_dim(&self) -> usize {
        if self.attention_layer {
            self.attention_dim
        } else {
            *self.hidden_dims.last().unwrap_or(&self.embed_dim)
        }
    }
}

/// Every trainable tensor of the model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    /// Stacked input embedding: categorical rows and per-field numeric
    /// directions (`input_dim × embed_dim`).
    pub embeddings: Matrix<T>,
    pub gcn_weights: Vec<Matrix<T>>,
    /// `W` of the attention layer (`d_in × attention_dim`).
    pub attn_weight: Option<Matrix<T>>,
    /// `a` of the attention layer (`2·attention_dim × 1`).
    pub attn_vector: Option<Matrix<T>>,
    /// `W_g` of the attention-pooling readout (`h × gate_dim`).
    pub gate_weight: Option<Matrix<T>>,
    /// `q` of the attention-pooling readout (`gate_dim × 1`).
    pub gate_vector: Option<Matrix<T>>,
    /// `W_o` (`C × h`).
    pub out_weight: Matrix<T>,
    /// `b_o` (`C × 1`).
    pub out_bias: Matrix<T>,
}

/// Gradients share the parameter layout exactly.
pub type Gradients<T> = ModelParams<T>;

impl<T: Scalar> ModelParams<T> {
    /// Glorot-uniform weights, zero output bias.
    pub fn init(cfg: &ModelConfig, input_dim: usize, rng: &mut Rng) -> Result<Self> {
        cfg.validate()?;
        if input_dim == 0 {
            return Err(Error::invalid("ModelParams::init", "input_dim must be positive"));
        }
        let embeddings = glorot_uniform(input_dim, cfg.embed_dim, rng);
        let mut gcn_weights = Vec::with_capacity(cfg.hidden_dims.len());
        let mut width = cfg.embed_dim;
        for &h in &cfg.hidden_dims {
            gcn_weights.push(glorot_uniform(width, h, rng));
            width = h;
        }
        let (attn_weight, attn_vector) = if cfg.attention_layer {
            let w = glorot_uniform(width, cfg.attention_dim, rng);
            let a = cfg
                .attention_enabled
                .then(|| glorot_uniform(2 * cfg.attention_dim, 1, rng));
            width = cfg.attention_dim;
            (Some(w), a)
        } else {
            (None, None)
        };
        let (gate_weight, gate_vector) = if cfg.readout == ReadoutMode::Attention {
            (
                Some(glorot_uniform(width, cfg.gate_dim, rng)),
                Some(glorot_uniform(cfg.gate_dim, 1, rng)),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            embeddings,
            gcn_weights,
            attn_weight,
            attn_vector,
            gate_weight,
            gate_vector,
            out_weight: glorot_uniform(N_CLASSES, width, rng),
            out_bias: Matrix::zeros(N_CLASSES, 1),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.embeddings.rows()
    }

    /// Same layout, all entries zero.
    pub fn zeros_like(&self) -> Self {
        let z = |m: &Matrix<T>| Matrix::zeros(m.rows(), m.cols());
        Self {
            embeddings: z(&self.embeddings),
            gcn_weights: self.gcn_weights.iter().map(z).collect(),
            attn_weight: self.attn_weight.as_ref().map(z),
            attn_vector: self.attn_vector.as_ref().map(z),
            gate_weight: self.gate_weight.as_ref().map(z),
            gate_vector: self.gate_vector.as_ref().map(z),
            out_weight: z(&self.out_weight),
            out_bias: z(&self.out_bias),
        }
    }

    /// Named tensors in a fixed order.
    pub fn tensors(&self) -> Vec<(String, &Matrix<T>)> {
        let mut out = vec![("embeddings".to_string(), &self.embeddings)];
        for (l, w) in self.gcn_weights.iter().enumerate() {
            out.push((format!("gcn.{l}"), w));
        }
        let optional = [
            ("attn_weight", &self.attn_weight),
            ("attn_vector", &self.attn_vector),
            ("gate_weight", &self.gate_weight),
            ("gate_vector", &self.gate_vector),
        ];
        for (name, t) in optional {
            if let Some(t) = t {
                out.push((name.to_string(), t));
            }
        }
        out.push(("out_weight".to_string(), &self.out_weight));
        out.push(("out_bias".to_string(), &self.out_bias));
        out
    }

    /// Mutable view in the same order as [`tensors`](Self::tensors).
    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix<T>> {
        let mut out = vec![&mut self.embeddings];
        out.extend(self.gcn_weights.iter_mut());
        for t in [
            &mut self.attn_weight,
            &mut self.attn_vector,
            &mut self.gate_weight,
            &mut self.gate_vector,
        ] {
            if let Some(t) = t.as_mut() {
                out.push(t);
            }
        }
        out.push(&mut self.out_weight);
        out.push(&mut self.out_bias);
        out
    }

    /// Shapes in tensor order.
    pub fn layout(&self) -> Vec<(String, (usize, usize))> {
        self.tensors()
            .into_iter()
            .map(|(n, t)| (n, t.shape()))
            .collect()
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.layout() == other.layout()
    }

    /// Checks the tensor shapes against a config and input width.
    pub fn check_shapes(&self, cfg: &ModelConfig) -> Result<()> {
        let expect = Self::init(cfg, self.input_dim().max(1), &mut Rng::new(0))?;
        if !self.same_layout(&expect) {
            return Err(Error::invalid(
                "ModelParams",
                format!("layout {:?} does not match config {:?}", self.layout(), expect.layout()),
            ));
        }
        Ok(())
    }

    pub fn n_scalars(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.as_slice().len()).sum()
    }
}

/// Intermediate values of one convolution layer.
#[derive(Clone, Debug)]
pub struct ConvCache<T> {
    pub input: Matrix<T>,
    /// `H W`
    pub transformed: Matrix<T>,
    /// Aggregate before the nonlinearity.
    pub pre: Matrix<T>,
}

#[derive(Clone, Debug)]
pub struct AttentionCache<T> {
    pub input: Matrix<T>,
    pub transformed: Matrix<T>,
    /// `aᵀ[Wh_i ‖ Wh_j]` per indexed pair, before LeakyReLU. Empty for uniform weights.
    pub scores: Vec<Vec<T>>,
    pub alpha: Vec<Vec<T>>,
    pub pre: Matrix<T>,
}

#[derive(Clone, Debug)]
pub enum ReadoutCache<T> {
    Mean,
    /// Row index of the maximum per column.
    Max(Vec<usize>),
    /// `tanh(H W_g)` and the node weights `s`.
    Attention { gate: Matrix<T>, weights: Vec<T> },
}

/// Cheap order-sensitive digest of a graph and parameter set, used to tie a
/// forward cache to its inputs.
pub(crate) fn fingerprint<T: Scalar>(g: &Graph<T>, params: &ModelParams<T>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |x: u64| {
        h ^= x;
        h = h.wrapping_mul(0x0000_0100_0000_01b3).rotate_left(17);
    };
    mix(g.n_nodes() as u64);
    for &(s, t) in g.edges() {
        mix(((s as u64) << 32) | t as u64);
    }
    for v in g.features().as_slice() {
        mix(v.as_f64().to_bits());
    }
    for (_, t) in params.tensors() {
        mix(t.as_slice().len() as u64);
        for v in t.as_slice() {
            mix(v.as_f64().to_bits());
        }
    }
    h
}

/// Activations retained by [`model_forward`] for the backward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    /// Digest of the graph and parameters the cache was computed from.
    pub fingerprint: u64,
    pub adjacency: AdjacencyIndex<T>,
    pub node_input: Matrix<T>,
    pub gcn: Vec<ConvCache<T>>,
    pub attention: Option<AttentionCache<T>>,
    /// Node representations entering the readout.
    pub final_nodes: Matrix<T>,
    pub readout: ReadoutCache<T>,
    pub graph_embedding: Vec<T>,
    pub probs: Vec<T>,
}

fn check_adjacency<T: Scalar>(op: &'static str, h: &Matrix<T>, adj: &AdjacencyIndex<T>) -> Result<()> {
    if adj.n_nodes() != h.rows() {
        return Err(Error::Shape {
            op,
            left: h.shape(),
            right: (adj.n_nodes(), adj.n_nodes()),
        });
    }
    Ok(())
}

/// `(H W, Σ_{j∈N(i)} (1/c_ij) (H W)_j)` for every node.
fn gcn_aggregate<T: Scalar>(h: &Matrix<T>, adj: &AdjacencyIndex<T>, w: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    check_adjacency("gcn_forward", h, adj)?;
    let m = h.matmul(w)?;
    let mut z = Matrix::zeros(h.rows(), w.cols());
    for i in 0..h.rows() {
        let out = z.row_mut(i);
        for (&j, &c) in adj.neighbors(i).iter().zip(adj.norm(i)) {
            axpy(T::one() / c, m.row(j), out);
        }
    }
    Ok((m, z))
}

/// Graph convolution: `h_i' = σ(Σ_{j∈N(i)} (1/c_ij) W h_j)`.
pub fn gcn_forward<T: Scalar>(
    h: &Matrix<T>,
    adj: &AdjacencyIndex<T>,
    w: &Matrix<T>,
    act: Activation<T>,
) -> Result<Matrix<T>> {
    let (_, z) = gcn_aggregate(h, adj, w)?;
    Ok(act.apply_matrix(&z))
}

fn check_attention_shapes<T: Scalar>(h: &Matrix<T>, w: &Matrix<T>, a: &Matrix<T>) -> Result<()> {
    if h.cols() != w.rows() {
        return Err(Error::Shape {
            op: "attention",
            left: h.shape(),
            right: w.shape(),
        });
    }
    if a.shape() != (2 * w.cols(), 1) {
        return Err(Error::Shape {
            op: "attention vector",
            left: a.shape(),
            right: (2 * w.cols(), 1),
        });
    }
    Ok(())
}

/// Raw scores `aᵀ[Wh_i ‖ Wh_j]` for `j ∈ N(i)` given `M = H W`.
fn attention_scores<T: Scalar>(m: &Matrix<T>, adj: &AdjacencyIndex<T>, a: &Matrix<T>) -> Vec<Vec<T>> {
    let k = m.cols();
    let (a_self, a_nbr) = a.as_slice().split_at(k);
    (0..m.rows())
        .map(|i| {
            let own = dot(a_self, m.row(i));
            adj.neighbors(i)
                .iter()
                .map(|&j| own + dot(a_nbr, m.row(j)))
                .collect()
        })
        .collect()
}

fn normalize_scores<T: Scalar>(scores: &[Vec<T>], slope: T) -> Result<Vec<Vec<T>>> {
    scores
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.is_empty() {
                return Err(Error::EmptyNeighborhood(i));
            }
            let activated: Vec<T> = row.iter().map(|&e| leaky_relu_scalar(e, slope)).collect();
            softmax_row(&activated)
        })
        .collect()
}

/// Attention coefficients `α_ij`, aligned with `adj.neighbors(i)`:
/// softmax over `k ∈ N(i)` of `LeakyReLU(aᵀ[W h_i ‖ W h_k])`.
pub fn attention_coefficients<T: Scalar>(
    h: &Matrix<T>,
    adj: &AdjacencyIndex<T>,
    w: &Matrix<T>,
    a: &Matrix<T>,
    slope: T,
) -> Result<Vec<Vec<T>>> {
    check_adjacency("attention_coefficients", h, adj)?;
    check_attention_shapes(h, w, a)?;
    let m = h.matmul(w)?;
    normalize_scores(&attention_scores(&m, adj, a), slope)
}

/// `1/|N(i)|` for every indexed pair.
pub fn uniform_coefficients<T: Scalar>(adj: &AdjacencyIndex<T>) -> Result<Vec<Vec<T>>> {
    (0..adj.n_nodes())
        .map(|i| {
            let k = adj.neighbors(i).len();
            if k == 0 {
                return Err(Error::EmptyNeighborhood(i));
            }
            Ok(vec![T::one() / T::of(k as f64); k])
        })
        .collect()
}

fn weighted_aggregate<T: Scalar>(m: &Matrix<T>, adj: &AdjacencyIndex<T>, alpha: &[Vec<T>]) -> Result<Matrix<T>> {
    if alpha.len() != adj.n_nodes() {
        return Err(Error::invalid("attention_aggregate", "coefficients do not match the index"));
    }
    let mut z = Matrix::zeros(m.rows(), m.cols());
    for (i, weights) in alpha.iter().enumerate() {
        if weights.len() != adj.neighbors(i).len() {
            return Err(Error::invalid(
                "attention_aggregate",
                format!("node {i}: {} coefficients for {} neighbors", weights.len(), adj.neighbors(i).len()),
            ));
        }
        let out = z.row_mut(i);
        for (&j, &w) in adj.neighbors(i).iter().zip(weights) {
            axpy(w, m.row(j), out);
        }
    }
    Ok(z)
}

/// `h_i' = σ(Σ_{j∈N(i)} α_ij W h_j)`.
pub fn attention_aggregate<T: Scalar>(
    h: &Matrix<T>,
    adj: &AdjacencyIndex<T>,
    alpha: &[Vec<T>],
    w: &Matrix<T>,
    act: Activation<T>,
) -> Result<Matrix<T>> {
    check_adjacency("attention_aggregate", h, adj)?;
    let m = h.matmul(w)?;
    Ok(act.apply_matrix(&weighted_aggregate(&m, adj, alpha)?))
}

/// Parameters of the attention-pooling readout.
#[derive(Clone, Copy, Debug)]
pub struct GateParams<'a, T> {
    pub weight: &'a Matrix<T>,
    pub vector: &'a Matrix<T>,
}

fn readout_with_cache<T: Scalar>(
    h: &Matrix<T>,
    mode: ReadoutMode,
    gate: Option<GateParams<'_, T>>,
) -> Result<(Vec<T>, ReadoutCache<T>)> {
    let (n, k) = h.shape();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    match mode {
        ReadoutMode::Mean => {
            let mut z = vec![T::zero(); k];
            for i in 0..n {
                axpy(T::one(), h.row(i), &mut z);
            }
            let inv = T::one() / T::of(n as f64);
            z.iter_mut().for_each(|v| *v *= inv);
            Ok((z, ReadoutCache::Mean))
        }
        ReadoutMode::Max => {
            let mut arg = vec![0; k];
            for i in 1..n {
                for (c, a) in arg.iter_mut().enumerate() {
                    if h[(i, c)] > h[(*a, c)] {
                        *a = i;
                    }
                }
            }
            let z = arg.iter().enumerate().map(|(c, &i)| h[(i, c)]).collect();
            Ok((z, ReadoutCache::Max(arg)))
        }
        ReadoutMode::Attention => {
            let gate = gate.ok_or_else(|| Error::invalid("readout", "attention pooling needs gate parameters"))?;
            if gate.weight.rows() != k || gate.vector.shape() != (gate.weight.cols(), 1) {
                return Err(Error::Shape {
                    op: "readout gate",
                    left: gate.weight.shape(),
                    right: gate.vector.shape(),
                });
            }
            let t = h.matmul(gate.weight)?.map(T::tanh);
            let scores: Vec<T> = (0..n).map(|i| dot(t.row(i), gate.vector.as_slice())).collect();
            let s = softmax_row(&scores)?;
            let mut z = vec![T::zero(); k];
            for (i, &si) in s.iter().enumerate() {
                axpy(si, h.row(i), &mut z);
            }
            Ok((z, ReadoutCache::Attention { gate: t, weights: s }))
        }
    }
}

/// Global graph embedding from all node rows.
pub fn readout<T: Scalar>(h: &Matrix<T>, mode: ReadoutMode, gate: Option<GateParams<'_, T>>) -> Result<Vec<T>> {
    readout_with_cache(h, mode, gate).map(|(z, _)| z)
}

/// `W_o z + b_o`.
pub fn logits<T: Scalar>(z: &[T], w_o: &Matrix<T>, b_o: &Matrix<T>) -> Result<Vec<T>> {
    if w_o.cols() != z.len() || b_o.shape() != (w_o.rows(), 1) {
        return Err(Error::Shape {
            op: "classify",
            left: w_o.shape(),
            right: (z.len(), b_o.rows()),
        });
    }
    Ok((0..w_o.rows())
        .map(|c| dot(w_o.row(c), z) + b_o[(c, 0)])
        .collect())
}

/// `softmax(W_o z + b_o)`.
pub fn classify<T: Scalar>(z: &[T], w_o: &Matrix<T>, b_o: &Matrix<T>) -> Result<Vec<T>> {
    softmax_row(&logits(z, w_o, b_o)?)
}

/// Full model: input embedding → convolution layers → attention layer →
/// readout → classifier. Returns class probabilities and the cached activations.
pub fn model_forward<T: Scalar>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    cfg: &ModelConfig,
) -> Result<(Vec<T>, ForwardCache<T>)> {
    if g.feature_dim() != params.input_dim() {
        return Err(Error::Shape {
            op: "model_forward input",
            left: g.features().shape(),
            right: params.embeddings.shape(),
        });
    }
    if params.gcn_weights.len() != cfg.hidden_dims.len() {
        return Err(Error::invalid("model_forward", "parameter depth does not match config"));
    }
    let act = cfg.activation::<T>();
    let adjacency = AdjacencyIndex::new(g, cfg.norm, cfg.self_loops);
    let node_input = g.features().matmul(&params.embeddings)?;

    let mut h = node_input.clone();
    let mut gcn = Vec::with_capacity(params.gcn_weights.len());
    for w in &params.gcn_weights {
        let (transformed, pre) = gcn_aggregate(&h, &adjacency, w)?;
        let next = act.apply_matrix(&pre);
        gcn.push(ConvCache {
            input: std::mem::replace(&mut h, next),
            transformed,
            pre,
        });
    }

    let attention = if cfg.attention_layer {
        let w = params
            .attn_weight
            .as_ref()
            .ok_or_else(|| Error::invalid("model_forward", "missing attention weight"))?;
        if h.cols() != w.rows() {
            return Err(Error::Shape {
                op: "attention",
                left: h.shape(),
                right: w.shape(),
            });
        }
        let transformed = h.matmul(w)?;
        let (scores, alpha) = if cfg.attention_enabled {
            let a = params
                .attn_vector
                .as_ref()
                .ok_or_else(|| Error::invalid("model_forward", "missing attention vector"))?;
            check_attention_shapes(&h, w, a)?;
            let scores = attention_scores(&transformed, &adjacency, a);
            let alpha = normalize_scores(&scores, T::of(cfg.leaky_slope))?;
            (scores, alpha)
        } else {
            (Vec::new(), uniform_coefficients(&adjacency)?)
        };
        let pre = weighted_aggregate(&transformed, &adjacency, &alpha)?;
        let next = act.apply_matrix(&pre);
        Some(AttentionCache {
            input: std::mem::replace(&mut h, next),
            transformed,
            scores,
            alpha,
            pre,
        })
    } else {
        None
    };

    let gate = match (&params.gate_weight, &params.gate_vector) {
        (Some(weight), Some(vector)) => Some(GateParams { weight, vector }),
        _ => None,
    };
    let (graph_embedding, readout_cache) = readout_with_cache(&h, cfg.readout, gate)?;
    let probs = classify(&graph_embedding, &params.out_weight, &params.out_bias)?;
    debug_assert!(probs.iter().all(|p| p.is_finite()));
    Ok((
        probs.clone(),
        ForwardCache {
            fingerprint: fingerprint(g, params),
            adjacency,
            node_input,
            gcn,
            attention,
            final_nodes: h,
            readout: readout_cache,
            graph_embedding,
            probs,
        },
    ))
}

/// Class probabilities only.
pub fn predict<T: Scalar>(g: &Graph<T>, params: &ModelParams<T>, cfg: &ModelConfig) -> Result<Vec<T>> {
    model_forward(g, params, cfg).map(|(p, _)| p)
}
