//! IID label fields, block factors, and uniform spanning trees.

mod config_io;
mod factor;
mod labels;
mod wilson;

pub use config_io::{read_configuration, write_configuration};
pub use factor::{
    apply_factor, builtin_factor_catalog, BlockFactor, CatalogEntry, Configuration, ParamKind,
    ParamSpec, Symbol,
};
pub use labels::{sample_labels, LabelField};
pub use wilson::{majority_label_statistic, wilson_ust, SpanningTree};
