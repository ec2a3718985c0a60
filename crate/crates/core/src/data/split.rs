use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Rng, Stream};
use crate::scalar::Scalar;

use super::dataset::LabeledDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.8,
            val: 0.1,
            test: 0.1,
            stratified: true,
            seed: 42,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::invalid("SplitSpec", "fractions must lie in (0, 1)"));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("SplitSpec", "fractions must sum to 1"));
        }
        Ok(())
    }
}

/// Positions of the train, validation and test parts, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Partitions `0..labels.len()`. A stratified split rounds each class to the
/// requested fractions separately, so every part keeps the class mix within
/// one item per class.
pub fn split_indices(labels: &[u8], spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let mut rng = Rng::stream(spec.seed, Stream::Split);
    let groups: Vec<Vec<usize>> = if spec.stratified {
        (0..=1u8)
            .map(|c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };
    let mut out = SplitIndices {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for mut group in groups {
        rng.shuffle(&mut group);
        let n = group.len();
        let n_train = ((spec.train * n as f64).round() as usize).min(n);
        let n_val = ((spec.val * n as f64).round() as usize).min(n - n_train);
        out.train.extend_from_slice(&group[..n_train]);
        out.val.extend_from_slice(&group[n_train..n_train + n_val]);
        out.test.extend_from_slice(&group[n_train + n_val..]);
    }
    if out.train.is_empty() || out.val.is_empty() || out.test.is_empty() {
        return Err(Error::invalid(
            "split",
            format!(
                "empty part: train {}, val {}, test {} of {} items",
                out.train.len(),
                out.val.len(),
                out.test.len(),
                labels.len()
            ),
        ));
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

pub fn split<T: Scalar>(
    data: &LabeledDataset<T>,
    spec: &SplitSpec,
) -> Result<(LabeledDataset<T>, LabeledDataset<T>, LabeledDataset<T>)> {
    let idx = split_indices(&data.labels(), spec)?;
    Ok((data.select(&idx.train), data.select(&idx.val), data.select(&idx.test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_sizes() {
        let spec = SplitSpec {
            stratified: false,
            ..SplitSpec::default()
        };
        let idx = split_indices(&[0; 100], &spec).unwrap();
        assert_eq!((idx.train.len(), idx.val.len(), idx.test.len()), (80, 10, 10));
        let mut all: Vec<usize> = idx.train.iter().chain(&idx.val).chain(&idx.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn stratified_keeps_class_mix() {
        let labels: Vec<u8> = (0..100).map(|i| u8::from(i < 40)).collect();
        let idx = split_indices(&labels, &SplitSpec::default()).unwrap();
        for (part, size) in [(&idx.train, 80.0), (&idx.val, 10.0), (&idx.test, 10.0)] {
            let pos = part.iter().filter(|&&i| labels[i] == 1).count() as f64;
            assert!((pos - 0.4 * size).abs() <= 1.0, "{pos} of {size}");
        }
    }

    #[test]
    fn empty_part_rejected() {
        assert!(split_indices(&[0, 1, 0], &SplitSpec::default()).is_err());
        let bad = SplitSpec {
            train: 0.5,
            ..SplitSpec::default()
        };
        assert!(split_indices(&[0; 10], &bad).is_err());
    }
}
