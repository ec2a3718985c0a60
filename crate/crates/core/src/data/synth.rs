//! Planted-pattern synthetic datasets.
//!
//! Generators emit a schema plus a record table, so synthetic data takes the
//! same encode path as CSV input. A graph of `n` nodes has `n − 1` populated
//! feature slots; the schema always carries enough slots for the largest size
//! and unused slots are left empty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Rng, Stream};
use crate::scalar::Scalar;

use super::dataset::{LabeledDataset, Source};
use super::encoder::Encoder;
use super::schema::{Column, ColumnKind, MissingNumeric, Schema};
use super::table::{Cell, Record, RecordTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// Positive iff some chain slot holds `b` with `a` on both sides.
    Motif,
    /// Positive iff the value paired with the highest score is `hi`.
    DistinguishedNeighbor,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Motif => "motif",
            Task::DistinguishedNeighbor => "distinguished-neighbor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub task: Task,
    pub n_graphs: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            task: Task::Motif,
            n_graphs: 2000,
            min_nodes: 8,
            max_nodes: 16,
            seed: 42,
        }
    }
}

pub const MOTIF_TOKENS: [&str; 5] = ["a", "b", "c", "d", "e"];
pub const LABEL_COLUMN: &str = "label";

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_graphs < 2 {
            return Err(Error::invalid("generate_synthetic", "n_graphs must be at least 2"));
        }
        if self.min_nodes < 4 || self.max_nodes > 64 || self.min_nodes > self.max_nodes {
            return Err(Error::invalid(
                "generate_synthetic",
                format!("node range {}..={} must lie within 4..=64", self.min_nodes, self.max_nodes),
            ));
        }
        if self.task == Task::DistinguishedNeighbor && self.max_nodes < 5 {
            return Err(Error::invalid("generate_synthetic", "distinguished-neighbor needs max_nodes ≥ 5"));
        }
        Ok(())
    }

    fn field_names(&self) -> Vec<(String, ColumnKind)> {
        match self.task {
            Task::Motif => (0..self.max_nodes - 1)
                .map(|i| (format!("slot_{i}"), ColumnKind::Categorical))
                .collect(),
            Task::DistinguishedNeighbor => (0..(self.max_nodes - 1) / 2)
                .flat_map(|i| {
                    [
                        (format!("score_{i}"), ColumnKind::Numeric),
                        (format!("value_{i}"), ColumnKind::Categorical),
                    ]
                })
                .collect(),
        }
    }

    pub fn schema(&self) -> Schema {
        let fields = self.field_names();
        let field_edges = match self.task {
            Task::Motif => fields.windows(2).map(|w| (w[0].0.clone(), w[1].0.clone())).collect(),
            Task::DistinguishedNeighbor => fields.chunks(2).map(|p| (p[0].0.clone(), p[1].0.clone())).collect(),
        };
        let mut columns = vec![Column {
            name: "record_id".into(),
            kind: ColumnKind::Ignore,
        }];
        columns.extend(fields.into_iter().map(|(name, kind)| Column { name, kind }));
        columns.push(Column {
            name: LABEL_COLUMN.into(),
            kind: ColumnKind::Label,
        });
        Schema {
            label_positive: "1".into(),
            missing_numeric: MissingNumeric::ImputeMean,
            field_edges,
            columns,
            provenance: vec![
                "synthetic dataset".into(),
                format!("task = {}", self.task.name()),
                format!("seed = {}", self.seed),
                format!("n_graphs = {}", self.n_graphs),
                format!("nodes = {}..={}", self.min_nodes, self.max_nodes),
            ],
        }
    }
}

/// Reference rule for the motif task over a slot chain.
pub fn has_motif(slots: &[Option<&str>]) -> bool {
    slots
        .windows(3)
        .any(|w| w == [Some("a"), Some("b"), Some("a")])
}

fn motif_slots(rng: &mut Rng, populated: usize, label: u8) -> Vec<Option<&'static str>> {
    let mut slots: Vec<Option<&'static str>> = (0..populated)
        .map(|_| Some(MOTIF_TOKENS[rng.below(MOTIF_TOKENS.len())]))
        .collect();
    // clear accidental occurrences; `c` cannot start a new one
    for i in 1..populated.saturating_sub(1) {
        if has_motif(&slots[i - 1..=i + 1]) {
            slots[i] = Some("c");
        }
    }
    if label == 1 {
        let center = rng.range_inclusive(1, populated - 2);
        slots[center - 1] = Some("a");
        slots[center] = Some("b");
        slots[center + 1] = Some("a");
    }
    slots
}

fn motif_record(rng: &mut Rng, cfg: &SynthConfig, label: u8) -> Record {
    let populated = rng.range_inclusive(cfg.min_nodes, cfg.max_nodes) - 1;
    let mut cells: Vec<Cell> = motif_slots(rng, populated, label)
        .into_iter()
        .map(|t| Cell::Categorical(t.map(str::to_string)))
        .collect();
    cells.resize(cfg.max_nodes - 1, Cell::Categorical(None));
    Record { cells, label }
}

fn neighbor_record(rng: &mut Rng, cfg: &SynthConfig, label: u8) -> Record {
    let pairs = (cfg.max_nodes - 1) / 2;
    let min_pairs = (cfg.min_nodes.saturating_sub(1)).div_ceil(2).clamp(1, pairs);
    let populated = rng.range_inclusive(min_pairs, pairs);
    let scores: Vec<f64> = (0..populated).map(|_| rng.next_f64()).collect();
    let top = (0..populated)
        .max_by(|&a, &b| scores[a].total_cmp(&scores[b]))
        .expect("at least one pair");
    let mut cells = Vec::with_capacity(2 * pairs);
    for (i, &s) in scores.iter().enumerate() {
        let hi = if i == top { label == 1 } else { rng.bernoulli(0.5) };
        cells.push(Cell::Numeric(Some(s)));
        cells.push(Cell::Categorical(Some(if hi { "hi" } else { "lo" }.to_string())));
    }
    for _ in populated..pairs {
        cells.push(Cell::Numeric(None));
        cells.push(Cell::Categorical(None));
    }
    Record { cells, label }
}

/// Schema and records for `cfg`; labels are fair coin flips.
pub fn generate_records(cfg: &SynthConfig) -> Result<(Schema, RecordTable)> {
    cfg.validate()?;
    let mut rng = Rng::stream(cfg.seed, Stream::Data);
    let records: Vec<Record> = (0..cfg.n_graphs)
        .map(|_| {
            let label = u8::from(rng.bernoulli(0.5));
            match cfg.task {
                Task::Motif => motif_record(&mut rng, cfg, label),
                Task::DistinguishedNeighbor => neighbor_record(&mut rng, cfg, label),
            }
        })
        .collect();
    let imputed = records
        .iter()
        .flat_map(|r: &Record| &r.cells)
        .filter(|c| matches!(c, Cell::Numeric(None)))
        .count();
    Ok((
        cfg.schema(),
        RecordTable {
            records,
            imputed,
            dropped: 0,
        },
    ))
}

/// Generated dataset encoded with an encoder fitted on all of it.
pub fn generate_synthetic<T: Scalar>(cfg: &SynthConfig) -> Result<LabeledDataset<T>> {
    let (schema, table) = generate_records(cfg)?;
    let enc = Encoder::fit(&schema, &table.records)?;
    enc.encode_all(&table.records, Source::Synthetic)
}
