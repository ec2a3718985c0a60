use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Csv,
    Synthetic,
}

/// One graph with its binary label and its index in the originating table.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub id: usize,
    pub graph: Graph<T>,
    pub label: u8,
}

/// Labeled graphs plus label-noise bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    pub items: Vec<Sample<T>>,
    pub source: Source,
    pub noise_rate: f64,
    /// Positions in `items` whose label was flipped.
    pub flipped_ids: Vec<usize>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(items: Vec<Sample<T>>, source: Source) -> Result<Self> {
        if let Some(s) = items.iter().find(|s| s.label > 1) {
            return Err(Error::invalid(
                "LabeledDataset",
                format!("item {} has non-binary label {}", s.id, s.label),
            ));
        }
        if let Some(first) = items.first() {
            let d = first.graph.feature_dim();
            if let Some(s) = items.iter().find(|s| s.graph.feature_dim() != d) {
                return Err(Error::invalid(
                    "LabeledDataset",
                    format!("item {} has feature width {} (expected {d})", s.id, s.graph.feature_dim()),
                ));
            }
        }
        Ok(Self {
            items,
            source,
            noise_rate: 0.0,
            flipped_ids: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.items.iter().map(|s| s.label).collect()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.items.iter().map(|s| s.id).collect()
    }

    /// Feature width shared by every graph, if any.
    pub fn feature_dim(&self) -> Option<usize> {
        self.items.first().map(|s| s.graph.feature_dim())
    }

    /// Count of items per class `[negatives, positives]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.items.iter().filter(|s| s.label == 1).count();
        [self.items.len() - pos, pos]
    }

    /// Subset by positions, keeping source and dropping noise bookkeeping.
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            items: positions.iter().map(|&p| self.items[p].clone()).collect(),
            source: self.source,
            noise_rate: 0.0,
            flipped_ids: Vec::new(),
        }
    }
}
