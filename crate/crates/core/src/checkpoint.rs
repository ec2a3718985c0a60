//! JSON checkpoints: model config, fitted encoder and every parameter tensor.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Encoder;
use crate::error::{Error, Result};
use crate::layers::{ModelConfig, ModelParams};
use crate::linalg::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub seed: u64,
    pub model: ModelConfig,
    pub encoder: Encoder,
    pub tensors: Vec<NamedTensor>,
}

impl Checkpoint {
    pub fn new<T: Scalar>(model: &ModelConfig, encoder: &Encoder, params: &ModelParams<T>, seed: u64) -> Self {
        let tensors = params
            .tensors()
            .into_iter()
            .map(|(name, m)| NamedTensor {
                name,
                rows: m.rows(),
                cols: m.cols(),
                data: m.as_slice().iter().map(|v| v.as_f64()).collect(),
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            seed,
            model: model.clone(),
            encoder: encoder.clone(),
            tensors,
        }
    }

    /// Rebuilds the parameters, checking every tensor name and shape.
    pub fn params<T: Scalar>(&self) -> Result<ModelParams<T>> {
        self.model.validate()?;
        let mut params = ModelParams::<T>::init(&self.model, self.encoder.input_dim, &mut Rng::new(0))?;
        let layout = params.layout();
        if layout.len() != self.tensors.len() {
            return Err(Error::Checkpoint(format!(
                "expected {} tensors, found {}",
                layout.len(),
                self.tensors.len()
            )));
        }
        for ((slot, (name, shape)), saved) in params.tensors_mut().into_iter().zip(layout).zip(&self.tensors) {
            if saved.name != name || (saved.rows, saved.cols) != shape || saved.data.len() != shape.0 * shape.1 {
                return Err(Error::Checkpoint(format!(
                    "tensor `{}` {}x{} does not match expected `{name}` {}x{}",
                    saved.name, saved.rows, saved.cols, shape.0, shape.1
                )));
            }
            *slot = Matrix::from_vec(saved.rows, saved.cols, saved.data.iter().map(|&v| T::of(v)).collect())?;
        }
        Ok(params)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Self = serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ck.format_version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported format version {}", ck.format_version)));
        }
        Ok(ck)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_records, SynthConfig};

    #[test]
    fn round_trip_is_exact() {
        let cfg = SynthConfig {
            n_graphs: 10,
            ..SynthConfig::default()
        };
        let (schema, table) = generate_records(&cfg).unwrap();
        let enc = Encoder::fit(&schema, &table.records).unwrap();
        let model = ModelConfig::default();
        let params = ModelParams::<f64>::init(&model, enc.input_dim, &mut Rng::new(9)).unwrap();
        let ck = Checkpoint::new(&model, &enc, &params, 9);
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.params::<f64>().unwrap(), params);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let cfg = SynthConfig {
            n_graphs: 10,
            ..SynthConfig::default()
        };
        let (schema, table) = generate_records(&cfg).unwrap();
        let enc = Encoder::fit(&schema, &table.records).unwrap();
        let model = ModelConfig::default();
        let params = ModelParams::<f64>::init(&model, enc.input_dim, &mut Rng::new(9)).unwrap();
        let mut ck = Checkpoint::new(&model, &enc, &params, 9);
        ck.tensors[1].rows += 1;
        assert!(matches!(ck.params::<f64>(), Err(Error::Checkpoint(_))));
    }
}
