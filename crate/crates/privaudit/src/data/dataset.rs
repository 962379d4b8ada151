//! Row-major categorical dataset.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::schema::{Cat, Schema};
use crate::{Error, Result};

/// A matrix of category codes with a shared schema. Rows may carry optional
/// set identifiers for set-level membership experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    data: Vec<Cat>,
    set_ids: Option<Vec<u64>>,
}

impl Dataset {
    /// Wrap a flat row-major code buffer. Every code is validated against
    /// its feature's domain.
    pub fn new(schema: Arc<Schema>, data: Vec<Cat>) -> Result<Self> {
        let l = schema.len();
        if l == 0 || data.len() % l != 0 {
            return Err(Error::Data(format!(
                "buffer of {} codes does not tile {} features",
                data.len(),
                l
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            let f = i % l;
            if (v as usize) >= schema.domain(f) {
                return Err(Error::Data(format!(
                    "row {} feature {} has code {} outside domain {}",
                    i / l,
                    schema.feature(f).name,
                    v,
                    schema.domain(f)
                )));
            }
        }
        Ok(Dataset { schema, data, set_ids: None })
    }

    /// Build from explicit rows; mostly for tests.
    pub fn from_rows(schema: Arc<Schema>, rows: &[Vec<Cat>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * schema.len());
        for r in rows {
            if r.len() != schema.len() {
                return Err(Error::Data(format!(
                    "row has {} values, schema has {} features",
                    r.len(),
                    schema.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Dataset::new(schema, data)
    }

    /// Attach one set id per row.
    pub fn with_set_ids(mut self, ids: Vec<u64>) -> Result<Self> {
        if ids.len() != self.n_rows() {
            return Err(Error::Data("set id count does not match row count".into()));
        }
        self.set_ids = Some(ids);
        Ok(self)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    /// The flat row-major code buffer.
    pub fn raw(&self) -> &[Cat] {
        &self.data
    }

    pub fn n_rows(&self) -> usize {
        if self.schema.len() == 0 { 0 } else { self.data.len() / self.schema.len() }
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, i: usize) -> &[Cat] {
        let l = self.schema.len();
        &self.data[i * l..(i + 1) * l]
    }

    pub fn value(&self, row: usize, feature: usize) -> Cat {
        self.data[row * self.schema.len() + feature]
    }

    pub fn set_ids(&self) -> Option<&[u64]> {
        self.set_ids.as_deref()
    }

    /// Rows at `indices`, in the given order. Set ids follow their rows.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let l = self.schema.len();
        let mut data = Vec::with_capacity(indices.len() * l);
        for &i in indices {
            if i >= self.n_rows() {
                return Err(Error::Data(format!("row index {i} out of range")));
            }
            data.extend_from_slice(self.row(i));
        }
        let set_ids = self.set_ids.as_ref().map(|ids| indices.iter().map(|&i| ids[i]).collect());
        Ok(Dataset { schema: self.schema.clone(), data, set_ids })
    }

    /// Uniform sample of `k` distinct rows (partial Fisher-Yates order).
    pub fn sample_rows<R: Rng>(&self, k: usize, rng: &mut R) -> Result<Dataset> {
        let idx = self.sample_indices(k, rng)?;
        self.subset(&idx)
    }

    /// Indices of a uniform sample of `k` distinct rows.
    pub fn sample_indices<R: Rng>(&self, k: usize, rng: &mut R) -> Result<Vec<usize>> {
        let n = self.n_rows();
        if k > n {
            return Err(Error::Data(format!("cannot sample {k} rows from {n}")));
        }
        let mut all: Vec<usize> = (0..n).collect();
        let (picked, _) = all.partial_shuffle(rng, k);
        Ok(picked.to_vec())
    }

    /// Group rows into consecutive sets of `set_size` (the last set may be
    /// short) and attach the ids; stand-in for real household groupings.
    pub fn with_consecutive_set_ids(self, set_size: usize) -> Result<Dataset> {
        if set_size == 0 {
            return Err(Error::Config("set size must be positive".into()));
        }
        let ids = (0..self.n_rows()).map(|i| (i / set_size) as u64).collect();
        self.with_set_ids(ids)
    }

    /// Set ids whose group has at least `min_size` rows, ascending.
    pub fn qualifying_sets(&self, min_size: usize) -> Vec<u64> {
        let Some(ids) = &self.set_ids else { return Vec::new() };
        let mut counts: std::collections::BTreeMap<u64, usize> = std::collections::BTreeMap::new();
        for &id in ids {
            *counts.entry(id).or_insert(0) += 1;
        }
        counts.into_iter().filter(|&(_, c)| c >= min_size).map(|(id, _)| id).collect()
    }

    /// Uniform sample (without replacement) of `count` set ids among the
    /// groups holding at least `min_size` rows.
    pub fn sample_target_sets<R: Rng>(&self, count: usize, min_size: usize, rng: &mut R) -> Result<Vec<u64>> {
        let mut qualifying = self.qualifying_sets(min_size);
        if qualifying.len() < count {
            return Err(Error::Data(format!(
                "need {count} sets of {min_size}+ rows, only {} qualify",
                qualifying.len()
            )));
        }
        let (picked, _) = qualifying.partial_shuffle(rng, count);
        Ok(picked.to_vec())
    }

    /// Row indices belonging to a set id, in row order.
    pub fn set_rows(&self, id: u64) -> Vec<usize> {
        match &self.set_ids {
            None => Vec::new(),
            Some(ids) => ids.iter().enumerate().filter(|&(_, &s)| s == id).map(|(i, _)| i).collect(),
        }
    }

    /// Append another dataset with the same schema.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.schema != other.schema {
            return Err(Error::Data("cannot concat datasets with different schemas".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        let set_ids = match (&self.set_ids, &other.set_ids) {
            (Some(a), Some(b)) => Some(a.iter().chain(b.iter()).copied().collect()),
            (None, None) => None,
            _ => return Err(Error::Data("cannot concat datasets with mixed set ids".into())),
        };
        Ok(Dataset { schema: self.schema.clone(), data, set_ids })
    }
}
