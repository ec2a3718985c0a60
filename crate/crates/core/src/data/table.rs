use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::schema::{ColumnKind, MissingNumeric, Schema};

/// One feature value; `None` marks an empty cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Categorical(Option<String>),
    Numeric(Option<f64>),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Categorical(v) => v.clone().unwrap_or_default(),
            Cell::Numeric(v) => v.map(|x| x.to_string()).unwrap_or_default(),
        }
    }
}

/// A typed row: one cell per feature column, in schema order.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub cells: Vec<Cell>,
    pub label: u8,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RecordTable {
    pub records: Vec<Record>,
    /// Empty numeric cells kept for mean imputation.
    pub imputed: usize,
    /// Rows skipped under the drop-row policy.
    pub dropped: usize,
}

impl RecordTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.label).collect()
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<RecordTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Parses comma-separated text with a header row. Row numbers in errors are
/// 1-based data rows (the header is row 0).
pub fn read_csv(reader: impl Read, schema: &Schema) -> Result<RecordTable> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let position = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    for extra in header.iter().filter(|h| !schema.columns.iter().any(|c| &c.name == *h)) {
        log::warn!("CSV column `{extra}` is not in the schema and is ignored");
    }
    let features: Vec<(usize, ColumnKind)> = schema
        .feature_columns()
        .map(|c| position(&c.name).map(|p| (p, c.kind)))
        .collect::<Result<_>>()?;
    let label_col = schema.label_column().expect("validated schema has a label");
    let label_pos = position(&label_col.name)?;
    for c in schema.columns.iter().filter(|c| c.kind == ColumnKind::Ignore) {
        position(&c.name)?;
    }

    let mut table = RecordTable::default();
    for (idx, row) in rdr.records().enumerate() {
        let row_no = idx + 1;
        let row = row?;
        let field = |p: usize| row.get(p).map(str::trim).unwrap_or("");
        let raw_label = field(label_pos);
        if raw_label.is_empty() {
            return Err(Error::Row {
                row: row_no,
                msg: format!("empty label in column `{}`", label_col.name),
            });
        }
        let mut cells = Vec::with_capacity(features.len());
        let mut empties = 0;
        for &(p, kind) in &features {
            let text = field(p);
            let cell = match kind {
                ColumnKind::Categorical => Cell::Categorical((!text.is_empty()).then(|| text.to_string())),
                _ if text.is_empty() => {
                    empties += 1;
                    Cell::Numeric(None)
                }
                _ => {
                    let x: f64 = text.parse().map_err(|_| Error::Row {
                        row: row_no,
                        msg: format!("cannot parse `{text}` in column `{}` as a number", header[p]),
                    })?;
                    if !x.is_finite() {
                        return Err(Error::Row {
                            row: row_no,
                            msg: format!("non-finite value in column `{}`", header[p]),
                        });
                    }
                    Cell::Numeric(Some(x))
                }
            };
            cells.push(cell);
        }
        if empties > 0 && schema.missing_numeric == MissingNumeric::DropRow {
            table.dropped += 1;
            continue;
        }
        table.imputed += empties;
        table.records.push(Record {
            cells,
            label: u8::from(raw_label == schema.label_positive),
        });
    }
    log::debug!(
        "read {} records ({} imputed cells, {} dropped rows)",
        table.records.len(),
        table.imputed,
        table.dropped
    );
    Ok(table)
}

/// Writes records back out under `schema`. Label 1 is written as
/// `label_positive`, label 0 as `"0"` (or `"1"` if the positive value is `"0"`);
/// ignored columns are filled with the record index.
pub fn write_csv(writer: impl Write, schema: &Schema, table: &RecordTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(schema.columns.iter().map(|c| c.name.as_str()))?;
    let negative = if schema.label_positive == "0" { "1" } else { "0" };
    for (i, rec) in table.records.iter().enumerate() {
        let mut feature = rec.cells.iter();
        let row: Vec<String> = schema
            .columns
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Label if rec.label == 1 => schema.label_positive.clone(),
                ColumnKind::Label => negative.to_string(),
                ColumnKind::Ignore => i.to_string(),
                _ => feature.next().map(Cell::render).unwrap_or_default(),
            })
            .collect();
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))
}

pub fn save_csv(path: impl AsRef<Path>, schema: &Schema, table: &RecordTable) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), schema, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema(policy: &str) -> Schema {
        Schema::from_toml_str(&format!(
            r#"label_positive = "yes"
missing_numeric = "{policy}"
[[columns]]
name = "plan"
kind = "categorical"
[[columns]]
name = "usage"
kind = "numeric"
[[columns]]
name = "satisfied"
kind = "label"
"#
        ))
        .unwrap()
    }

    const FIXTURE: &str = "plan,usage,satisfied\nbasic,1.5,yes\n\"pro, annual\",3,no\n,2.5,yes\nbasic,,no\n";

    #[test]
    fn header_only_is_empty() {
        let t = read_csv("plan,usage,satisfied\n".as_bytes(), &schema("impute-mean")).unwrap();
        assert_eq!(t.len(), 0);
    }

    #[test]
    fn missing_column_is_named() {
        let err = read_csv("plan,satisfied\nx,yes\n".as_bytes(), &schema("impute-mean")).unwrap_err();
        assert!(matches!(&err, Error::MissingColumn(c) if c == "usage"), "{err}");
    }

    #[test]
    fn impute_mean_keeps_row_and_counts() {
        let t = read_csv(FIXTURE.as_bytes(), &schema("impute-mean")).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.imputed, 1);
        assert_eq!(t.labels(), vec![1, 0, 1, 0]);
        assert_eq!(t.records[1].cells[0], Cell::Categorical(Some("pro, annual".into())));
        assert_eq!(t.records[2].cells[0], Cell::Categorical(None));
        assert_eq!(t.records[3].cells[1], Cell::Numeric(None));
    }

    #[test]
    fn drop_row_policy() {
        let t = read_csv(FIXTURE.as_bytes(), &schema("drop-row")).unwrap();
        assert_eq!((t.len(), t.dropped, t.imputed), (3, 1, 0));
    }

    #[test]
    fn unparseable_numeric_reports_row() {
        let text = "plan,usage,satisfied\nbasic,1,yes\nbasic,lots,no\n";
        let err = read_csv(text.as_bytes(), &schema("impute-mean")).unwrap_err();
        assert!(matches!(err, Error::Row { row: 2, .. }), "{err}");
    }

    #[test]
    fn write_then_read_is_identity() {
        let s = schema("impute-mean");
        let t = read_csv(FIXTURE.as_bytes(), &s).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &s, &t).unwrap();
        let back = read_csv(buf.as_slice(), &s).unwrap();
        assert_eq!(back, t);
    }
}
