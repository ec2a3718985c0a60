//! Record ingestion, graph encoding, synthetic data, label noise and splits.

mod dataset;
mod encoder;
mod noise;
mod schema;
mod split;
mod synth;
mod table;

pub use dataset::{LabeledDataset, Sample, Source};
pub use encoder::{Encoder, FieldEncoding, MISSING_ROW, UNKNOWN_ROW};
pub use noise::inject_label_noise;
pub use schema::{Column, ColumnKind, MissingNumeric, Schema};
pub use split::{split, split_indices, SplitIndices, SplitSpec};
pub use synth::{generate_records, generate_synthetic, has_motif, SynthConfig, Task, LABEL_COLUMN, MOTIF_TOKENS};
pub use table::{load_csv, read_csv, save_csv, write_csv, Cell, Record, RecordTable};

use crate::error::Result;
use crate::scalar::Scalar;

/// A split table encoded with an encoder fitted on its training part.
#[derive(Clone, Debug)]
pub struct Prepared<T> {
    pub encoder: Encoder,
    pub indices: SplitIndices,
    pub train: LabeledDataset<T>,
    pub val: LabeledDataset<T>,
    pub test: LabeledDataset<T>,
}

/// Splits `table`, fits the encoder on the training rows only, and encodes
/// all three parts. Sample ids are positions in `table`.
pub fn prepare<T: Scalar>(schema: &Schema, table: &RecordTable, spec: &SplitSpec, source: Source) -> Result<Prepared<T>> {
    let indices = split_indices(&table.labels(), spec)?;
    let encoder = Encoder::fit(schema, indices.train.iter().map(|&i| &table.records[i]))?;
    let all = encoder.encode_all(&table.records, source)?;
    Ok(Prepared {
        train: all.select(&indices.train),
        val: all.select(&indices.val),
        test: all.select(&indices.test),
        encoder,
        indices,
    })
}
