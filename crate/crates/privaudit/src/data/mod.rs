//! Tabular data model: schemas, datasets, discretization, CSV I/O and a
//! controllable synthetic population for experiments.
//!
//! All generator and attack code operates on fully categorical data: numeric
//! columns are discretized into equal-depth bins first. A [`Dataset`] is a
//! row-major matrix of category codes tied to a shared [`Schema`].

mod binning;
mod csv;
mod dataset;
mod population;
mod schema;

pub use binning::{bin_of, equal_depth_bin, BinningSpec};
pub use csv::{load_csv, load_csv_raw, load_schema, save_csv, save_schema, ColumnHint, RawColumn, RawTable};
pub use dataset::Dataset;
pub use population::{synthesize_population, PopulationConfig, PopulationEdge};
pub use schema::{Cat, Feature, FeatureKind, Schema};
