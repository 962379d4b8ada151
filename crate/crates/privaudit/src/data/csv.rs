//! CSV and schema-sidecar I/O.
//!
//! Datasets are exchanged as label CSV (header row, comma separated, no
//! quoting; labels must not contain commas). A schema travels as a JSON
//! sidecar so that `save_csv` followed by `load_csv` with the same schema
//! reproduces the dataset exactly.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use super::binning::equal_depth_bin;
use super::dataset::Dataset;
use super::schema::{Cat, Feature, FeatureKind, Schema};
use crate::{Error, Result};

/// Optional per-column type hint for schema-less loading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnHint {
    Categorical,
    Numeric,
}

/// One column of a freshly parsed CSV with no schema yet.
#[derive(Clone, Debug)]
pub enum RawColumn {
    /// Every token parsed as f64; kept raw until discretized.
    Numeric(Vec<f64>),
    /// Distinct labels in first-appearance order and per-row codes.
    Categorical { labels: Vec<String>, codes: Vec<Cat> },
}

/// Parsed CSV before discretization.
#[derive(Clone, Debug)]
pub struct RawTable {
    pub names: Vec<String>,
    pub columns: Vec<RawColumn>,
    pub rows: usize,
}

impl RawTable {
    /// Bin numeric columns equal-depth and assemble a categorical dataset.
    pub fn discretize(&self, bins: usize) -> Result<(Arc<Schema>, Dataset)> {
        if self.rows == 0 {
            return Err(Error::Data("cannot infer a schema from zero rows".into()));
        }
        let mut features = Vec::with_capacity(self.columns.len());
        let mut data = vec![0 as Cat; self.rows * self.columns.len()];
        let width = self.columns.len();
        for (f, (name, col)) in self.names.iter().zip(&self.columns).enumerate() {
            let kind = match col {
                RawColumn::Categorical { labels, codes } => {
                    for (r, &c) in codes.iter().enumerate() {
                        data[r * width + f] = c;
                    }
                    FeatureKind::Categorical { labels: labels.clone() }
                }
                RawColumn::Numeric(values) => {
                    let (spec, indices) = equal_depth_bin(values, bins)?;
                    for (r, &i) in indices.iter().enumerate() {
                        data[r * width + f] = i as Cat;
                    }
                    FeatureKind::Binned { edges: spec.edges }
                }
            };
            features.push(Feature { name: name.clone(), kind });
        }
        let schema = Arc::new(Schema::new(features)?);
        let ds = Dataset::new(schema.clone(), data)?;
        Ok((schema, ds))
    }
}

fn split_line(line: &str) -> Vec<String> {
    line.split(',').map(|t| t.trim().to_string()).collect()
}

/// Parse a CSV with a header row and no schema. Without hints a column is
/// numeric when every token parses as f64 and categorical otherwise;
/// categorical labels are coded in first-appearance order.
pub fn load_csv_raw(path: &Path, hints: Option<&[ColumnHint]>) -> Result<RawTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let names = match lines.next() {
        Some(h) => split_line(h),
        None => return Err(Error::Data(format!("{} is empty", path.display()))),
    };
    let width = names.len();
    if let Some(h) = hints {
        if h.len() != width {
            return Err(Error::Config(format!("{} hints for {width} columns", h.len())));
        }
    }
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); width];
    let mut rows = 0usize;
    for (lineno, line) in lines.enumerate() {
        let toks = split_line(line);
        if toks.len() != width {
            return Err(Error::Data(format!(
                "{} line {}: {} fields, expected {width}",
                path.display(),
                lineno + 2,
                toks.len()
            )));
        }
        for (c, t) in toks.into_iter().enumerate() {
            cells[c].push(t);
        }
        rows += 1;
    }
    let mut columns = Vec::with_capacity(width);
    for (c, col) in cells.into_iter().enumerate() {
        let parsed: Option<Vec<f64>> = col
            .iter()
            .map(|t| t.parse::<f64>().ok().filter(|v| !v.is_nan()))
            .collect();
        let numeric = match hints.map(|h| h[c]) {
            Some(ColumnHint::Numeric) => Some(parsed.ok_or_else(|| {
                Error::Data(format!("column {} hinted numeric but does not parse", names[c]))
            })?),
            Some(ColumnHint::Categorical) => None,
            None => parsed,
        };
        match numeric {
            Some(values) => columns.push(RawColumn::Numeric(values)),
            None => {
                let mut labels: Vec<String> = Vec::new();
                let mut index: HashMap<&str, Cat> = HashMap::new();
                let mut codes = Vec::with_capacity(col.len());
                for t in &col {
                    let code = match index.get(t.as_str()) {
                        Some(&i) => i,
                        None => {
                            let i = labels.len() as Cat;
                            labels.push(t.clone());
                            index.insert(t, i);
                            i
                        }
                    };
                    codes.push(code);
                }
                columns.push(RawColumn::Categorical { labels, codes });
            }
        }
    }
    Ok(RawTable { names, columns, rows })
}

/// Load a CSV against a known schema. Header names must match the schema
/// order; values are decoded per feature (labels, `binN`, or raw numerics
/// for binned features). A header-only file yields an empty dataset.
pub fn load_csv(path: &Path, schema: &Arc<Schema>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let names = match lines.next() {
        Some(h) => split_line(h),
        None => return Err(Error::Data(format!("{} is empty", path.display()))),
    };
    let expected: Vec<String> = schema.features.iter().map(|f| f.name.clone()).collect();
    if names != expected {
        return Err(Error::Data(format!(
            "{} header {:?} does not match schema {:?}",
            path.display(),
            names,
            expected
        )));
    }
    let mut data = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let toks = split_line(line);
        if toks.len() != schema.len() {
            return Err(Error::Data(format!(
                "{} line {}: {} fields, expected {}",
                path.display(),
                lineno + 2,
                toks.len(),
                schema.len()
            )));
        }
        for (f, tok) in toks.iter().enumerate() {
            data.push(schema.feature(f).code(tok)?);
        }
    }
    Dataset::new(schema.clone(), data)
}

/// Write a dataset as label CSV.
pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let schema = ds.schema();
    let mut out = String::new();
    let names: Vec<&str> = schema.features.iter().map(|f| f.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for i in 0..ds.n_rows() {
        let row: Vec<String> = ds
            .row(i)
            .iter()
            .enumerate()
            .map(|(f, &c)| schema.feature(f).label(c))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Write a schema as its JSON sidecar.
pub fn save_schema(schema: &Schema, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(schema)?;
    std::fs::write(path, json).map_err(|e| Error::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Load a schema JSON sidecar.
pub fn load_schema(path: &Path) -> Result<Arc<Schema>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let schema: Schema = serde_json::from_str(&text).map_err(|e| Error::Data(format!("bad schema json: {e}")))?;
    Ok(Arc::new(Schema::new(schema.features)?))
}
