use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::dataset::{LabeledDataset, Sample, Source};
use super::schema::{ColumnKind, Schema};
use super::table::{Cell, Record};

/// Input rows reserved ahead of each categorical vocabulary.
pub const MISSING_ROW: usize = 0;
pub const UNKNOWN_ROW: usize = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldEncoding {
    /// Occupies `vocab.len() + 2` input columns starting at `offset`.
    Categorical {
        name: String,
        offset: usize,
        vocab: Vec<String>,
    },
    /// Occupies the single input column `offset`.
    Numeric {
        name: String,
        offset: usize,
        mean: f64,
        std: f64,
    },
}

impl FieldEncoding {
    pub fn name(&self) -> &str {
        match self {
            FieldEncoding::Categorical { name, .. } | FieldEncoding::Numeric { name, .. } => name,
        }
    }

    fn width(&self) -> usize {
        match self {
            FieldEncoding::Categorical { vocab, .. } => vocab.len() + 2,
            FieldEncoding::Numeric { .. } => 1,
        }
    }
}

/// Fitted record-to-graph encoder.
///
/// Node 0 is a hub with an all-zero input row; node `f + 1` holds feature field
/// `f`. A categorical node's input row is one-hot over its field's block, a
/// numeric node's row carries its z-score in the field's column. Multiplying
/// by the learned embedding matrix therefore selects an embedding row or
/// scales a per-field direction vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    pub fields: Vec<FieldEncoding>,
    pub field_edges: Vec<(usize, usize)>,
    pub input_dim: usize,
}

impl Encoder {
    /// Fits vocabularies and z-score parameters on `records` only.
    ///
    /// Vocabularies are sorted; a numeric field with no values or zero spread
    /// gets mean 0 or std 1 respectively.
    pub fn fit<'a>(schema: &Schema, records: impl IntoIterator<Item = &'a Record>) -> Result<Self> {
        schema.validate()?;
        let records: Vec<&Record> = records.into_iter().collect();
        for rec in &records {
            check_arity(rec, schema.n_features())?;
        }
        let mut offset = 0;
        let mut fields = Vec::with_capacity(schema.n_features());
        for (f, col) in schema.feature_columns().enumerate() {
            let enc = if col.kind == ColumnKind::Categorical {
                let vocab: BTreeSet<&String> = records
                    .iter()
                    .filter_map(|r| match &r.cells[f] {
                        Cell::Categorical(Some(v)) => Some(v),
                        _ => None,
                    })
                    .collect();
                FieldEncoding::Categorical {
                    name: col.name.clone(),
                    offset,
                    vocab: vocab.into_iter().cloned().collect(),
                }
            } else {
                let xs: Vec<f64> = records
                    .iter()
                    .filter_map(|r| match r.cells[f] {
                        Cell::Numeric(v) => v,
                        _ => None,
                    })
                    .collect();
                let n = xs.len() as f64;
                let mean = if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / n };
                let var = if xs.is_empty() {
                    0.0
                } else {
                    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
                };
                FieldEncoding::Numeric {
                    name: col.name.clone(),
                    offset,
                    mean,
                    std: if var > 0.0 { var.sqrt() } else { 1.0 },
                }
            };
            offset += enc.width();
            fields.push(enc);
        }
        Ok(Self {
            fields,
            field_edges: schema.field_edge_indices()?,
            input_dim: offset,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.fields.len() + 1
    }

    /// Rejects a schema whose feature fields differ from the fitted ones.
    pub fn check_schema(&self, schema: &Schema) -> Result<()> {
        let cols: Vec<_> = schema.feature_columns().collect();
        for (k, enc) in self.fields.iter().enumerate() {
            let col = cols.get(k).ok_or_else(|| Error::FieldMismatch(enc.name().to_string()))?;
            let same_kind = matches!(
                (enc, col.kind),
                (FieldEncoding::Categorical { .. }, ColumnKind::Categorical) | (FieldEncoding::Numeric { .. }, ColumnKind::Numeric)
            );
            if col.name != enc.name() || !same_kind {
                return Err(Error::FieldMismatch(col.name.clone()));
            }
        }
        if let Some(extra) = cols.get(self.fields.len()) {
            return Err(Error::FieldMismatch(extra.name.clone()));
        }
        if schema.field_edge_indices()? != self.field_edges {
            return Err(Error::FieldMismatch("field_edges".into()));
        }
        Ok(())
    }

    /// Directed edge list: hub ↔ every field, plus each field edge both ways.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(2 * (self.fields.len() + self.field_edges.len()));
        for f in 1..=self.fields.len() {
            edges.push((0, f));
            edges.push((f, 0));
        }
        for &(a, b) in &self.field_edges {
            edges.push((a + 1, b + 1));
            edges.push((b + 1, a + 1));
        }
        edges
    }

    /// Encodes one record. Unknown categorical values use the reserved row.
    pub fn encode<T: Scalar>(&self, rec: &Record) -> Result<Graph<T>> {
        check_arity(rec, self.fields.len())?;
        let mut x = Matrix::zeros(self.n_nodes(), self.input_dim);
        for (f, (enc, cell)) in self.fields.iter().zip(&rec.cells).enumerate() {
            let row = f + 1;
            match (enc, cell) {
                (FieldEncoding::Categorical { offset, vocab, .. }, Cell::Categorical(v)) => {
                    let k = match v {
                        None => MISSING_ROW,
                        Some(v) => vocab.binary_search(v).map_or(UNKNOWN_ROW, |i| i + 2),
                    };
                    x[(row, offset + k)] = T::one();
                }
                (FieldEncoding::Numeric { offset, mean, std, .. }, Cell::Numeric(v)) => {
                    x[(row, *offset)] = T::of(v.map_or(0.0, |v| (v - mean) / std));
                }
                _ => return Err(Error::FieldMismatch(enc.name().to_string())),
            }
        }
        Graph::build(x, self.edges()).map(|(g, _)| g)
    }

    /// Encodes every record; sample ids are table positions.
    pub fn encode_all<T: Scalar>(&self, records: &[Record], source: Source) -> Result<LabeledDataset<T>> {
        let items = records
            .iter()
            .enumerate()
            .map(|(id, rec)| {
                Ok(Sample {
                    id,
                    graph: self.encode(rec)?,
                    label: rec.label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(items, source)
    }
}

fn check_arity(rec: &Record, n: usize) -> Result<()> {
    if rec.cells.len() != n {
        return Err(Error::Schema(format!(
            "record has {} feature cells, schema declares {n}",
            rec.cells.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::table::read_csv;

    fn schema() -> Schema {
        Schema::from_toml_str(
            r#"label_positive = "1"
field_edges = [["a", "b"]]
[[columns]]
name = "a"
kind = "categorical"
[[columns]]
name = "b"
kind = "numeric"
[[columns]]
name = "c"
kind = "categorical"
[[columns]]
name = "d"
kind = "numeric"
[[columns]]
name = "e"
kind = "categorical"
[[columns]]
name = "y"
kind = "label"
"#,
        )
        .unwrap()
    }

    const ROWS: &str = "a,b,c,d,e,y\nx,1,p,10,u,1\ny,3,q,20,,0\nx,2,p,30,v,1\n";

    #[test]
    fn five_fields_give_six_nodes() {
        let s = schema();
        let t = read_csv(ROWS.as_bytes(), &s).unwrap();
        let enc = Encoder::fit(&s, &t.records).unwrap();
        let g: Graph<f64> = enc.encode(&t.records[0]).unwrap();
        assert_eq!(g.n_nodes(), 6);
        assert_eq!(g.edges().len(), 12);
        assert!(g.features().row(0).iter().all(|&v| v == 0.0));
        // widths: a 2+2, b 1, c 2+2, d 1, e 2+2
        assert_eq!(enc.input_dim, 14);
    }

    #[test]
    fn standardization_and_reserved_rows() {
        let s = schema();
        let t = read_csv(ROWS.as_bytes(), &s).unwrap();
        let enc = Encoder::fit(&s, &t.records).unwrap();
        // b has mean 2: the third record's b node is exactly zero
        let g: Graph<f64> = enc.encode(&t.records[2]).unwrap();
        assert_eq!(g.features()[(2, 4)], 0.0);
        let FieldEncoding::Numeric { std, .. } = &enc.fields[3] else { panic!() };
        assert!((std - (200.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // e missing in record 1 hits the missing row
        let g: Graph<f64> = enc.encode(&t.records[1]).unwrap();
        let FieldEncoding::Categorical { offset, .. } = &enc.fields[4] else { panic!() };
        assert_eq!(g.features()[(5, offset + MISSING_ROW)], 1.0);
        // unseen value hits the unknown row
        let mut rec = t.records[0].clone();
        rec.cells[0] = Cell::Categorical(Some("never seen".into()));
        let g: Graph<f64> = enc.encode(&rec).unwrap();
        assert_eq!(g.features()[(1, UNKNOWN_ROW)], 1.0);
    }

    #[test]
    fn identical_records_identical_graphs() {
        let s = schema();
        let t = read_csv(ROWS.as_bytes(), &s).unwrap();
        let enc = Encoder::fit(&s, &t.records).unwrap();
        let a: Graph<f64> = enc.encode(&t.records[1]).unwrap();
        let b: Graph<f64> = enc.encode(&t.records[1].clone()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schema_mismatch_names_field() {
        let s = schema();
        let t = read_csv(ROWS.as_bytes(), &s).unwrap();
        let enc = Encoder::fit(&s, &t.records).unwrap();
        enc.check_schema(&s).unwrap();
        let mut other = s.clone();
        other.columns[2].kind = ColumnKind::Numeric;
        assert!(matches!(enc.check_schema(&other), Err(Error::FieldMismatch(f)) if f == "c"));
    }
}
