use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Label,
    Ignore,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

/// Handling of empty numeric cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingNumeric {
    /// Keep the row; the cell encodes as the training mean.
    #[default]
    ImputeMean,
    DropRow,
}

/// Column layout of a record table.
///
/// Serialized as TOML. Leading `#` lines are kept as free-form provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schema {
    /// Raw label value mapped to class 1; every other value is class 0.
    pub label_positive: String,
    #[serde(default)]
    pub missing_numeric: MissingNumeric,
    /// Extra undirected links between feature fields, beyond the hub spokes.
    #[serde(default)]
    pub field_edges: Vec<(String, String)>,
    pub columns: Vec<Column>,
    #[serde(skip)]
    pub provenance: Vec<String>,
}

impl Schema {
    pub fn validate(&self) -> Result<()> {
        let labels = self.columns.iter().filter(|c| c.kind == ColumnKind::Label).count();
        if labels != 1 {
            return Err(Error::Schema(format!("expected exactly one label column, found {labels}")));
        }
        if self.feature_columns().next().is_none() {
            return Err(Error::Schema("at least one categorical or numeric column is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.columns {
            if c.name.is_empty() {
                return Err(Error::Schema("column with empty name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name)));
            }
        }
        for (a, b) in &self.field_edges {
            for f in [a, b] {
                if self.feature_index(f).is_none() {
                    return Err(Error::Schema(format!("field edge endpoint `{f}` is not a feature column")));
                }
            }
        }
        Ok(())
    }

    /// Categorical and numeric columns, in declaration order.
    pub fn feature_columns(&self) -> impl Iterator<Item = &Column> {
        self.columns
            .iter()
            .filter(|c| matches!(c.kind, ColumnKind::Categorical | ColumnKind::Numeric))
    }

    pub fn n_features(&self) -> usize {
        self.feature_columns().count()
    }

    /// Position of a field among the feature columns.
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_columns().position(|c| c.name == name)
    }

    pub fn label_column(&self) -> Option<&Column> {
        self.columns.iter().find(|c| c.kind == ColumnKind::Label)
    }

    /// Field edges as feature-index pairs.
    pub fn field_edge_indices(&self) -> Result<Vec<(usize, usize)>> {
        self.field_edges
            .iter()
            .map(|(a, b)| match (self.feature_index(a), self.feature_index(b)) {
                (Some(i), Some(j)) => Ok((i, j)),
                _ => Err(Error::Schema(format!("field edge ({a}, {b}) names a non-feature column"))),
            })
            .collect()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut schema: Schema = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        schema.provenance = text
            .lines()
            .map_while(|l| l.strip_prefix('#'))
            .map(|l| l.trim().to_string())
            .collect();
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let body = toml::to_string(self).map_err(|e| Error::Schema(e.to_string()))?;
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&body);
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()?).map_err(|e| Error::io(path, e))
    }
}
