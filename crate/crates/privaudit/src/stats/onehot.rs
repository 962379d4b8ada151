//! One-hot view of a categorical schema: each (feature, category) pair owns
//! one binary column. The evolutionary generator selects and measures its
//! marginals in this space.

use crate::data::{Cat, Schema};

/// Schema-derived map between categorical features and binary columns.
/// Offsets are contiguous in feature order, so the map is a pure function of
/// the schema and identical across processes.
#[derive(Clone, Debug, PartialEq)]
pub struct OneHotMap {
    offsets: Vec<usize>,
    cols: Vec<(usize, Cat)>,
}

impl OneHotMap {
    pub fn new(schema: &Schema) -> Self {
        let mut offsets = Vec::with_capacity(schema.len());
        let mut cols = Vec::new();
        for f in 0..schema.len() {
            offsets.push(cols.len());
            for c in 0..schema.domain(f) {
                cols.push((f, c as Cat));
            }
        }
        OneHotMap { offsets, cols }
    }

    /// Total binary width: the sum of domain sizes.
    pub fn width(&self) -> usize {
        self.cols.len()
    }

    /// Binary column index of (feature, category).
    pub fn col(&self, feature: usize, cat: Cat) -> usize {
        self.offsets[feature] + cat as usize
    }

    /// Inverse of [`OneHotMap::col`].
    pub fn decode(&self, col: usize) -> (usize, Cat) {
        self.cols[col]
    }

    /// Bit value of a row at a binary column.
    pub fn bit(&self, row: &[Cat], col: usize) -> u8 {
        let (f, c) = self.cols[col];
        u8::from(row[f] == c)
    }
}
