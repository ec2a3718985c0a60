use crate::error::{Error, Result};
use crate::rng::{Rng, Stream};
use crate::scalar::Scalar;

use super::dataset::LabeledDataset;

/// Flips each label independently with probability `rate`.
///
/// One draw is consumed per item in order, so the flipped set depends only on
/// `(rate, seed, len)`. The input is left untouched.
pub fn inject_label_noise<T: Scalar>(data: &LabeledDataset<T>, rate: f64, seed: u64) -> Result<LabeledDataset<T>> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid("inject_label_noise", format!("rate {rate} outside [0, 1]")));
    }
    let mut rng = Rng::stream(seed, Stream::Noise);
    let mut out = data.clone();
    out.flipped_ids.clear();
    for (pos, item) in out.items.iter_mut().enumerate() {
        if rng.bernoulli(rate) {
            item.label = 1 - item.label;
            out.flipped_ids.push(pos);
        }
    }
    out.noise_rate = rate;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::dataset::{Sample, Source};
    use crate::graph::Graph;
    use crate::linalg::Matrix;

    fn dataset(n: usize) -> LabeledDataset<f64> {
        let items = (0..n)
            .map(|id| Sample {
                id,
                graph: Graph::build(Matrix::zeros(1, 1), []).unwrap().0,
                label: (id % 2) as u8,
            })
            .collect();
        LabeledDataset::new(items, Source::Synthetic).unwrap()
    }

    #[test]
    fn extremes() {
        let d = dataset(50);
        let none = inject_label_noise(&d, 0.0, 3).unwrap();
        assert_eq!(none.labels(), d.labels());
        assert!(none.flipped_ids.is_empty());
        let all = inject_label_noise(&d, 1.0, 3).unwrap();
        assert!(all.labels().iter().zip(d.labels()).all(|(a, b)| *a != b));
        assert_eq!(all.flipped_ids.len(), 50);
    }

    #[test]
    fn binomial_count_and_bookkeeping() {
        let d = dataset(1000);
        let noisy = inject_label_noise(&d, 0.3, 11).unwrap();
        let flips = noisy.flipped_ids.len();
        assert!((230..=370).contains(&flips), "{flips}");
        let differing = noisy.labels().iter().zip(d.labels()).filter(|(a, b)| **a != *b).count();
        assert_eq!(differing, flips);
        assert_eq!(inject_label_noise(&d, 0.3, 11).unwrap().flipped_ids, noisy.flipped_ids);
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(inject_label_noise(&dataset(3), 1.5, 0).is_err());
        assert!(inject_label_noise(&dataset(3), -0.1, 0).is_err());
    }
}
