//! Closed-loop search for the smallest JPEG within a distance budget.

pub mod plan;
pub mod search;
pub mod tables;

pub use plan::{apply_zero_plan, rank_coefficients, ImportanceOrder, ZeroPlan};
pub use search::{
    decide_sampling, encode_perceptual, local_optimize, select_best, select_global_table,
    CandidateJpeg, GlobalSelection, OptimizerConfig, OptimizerError, PerceptualResult, Provenance,
    DEFAULT_TABLE_COUNT,
};
pub use tables::{build_table_set, QuantTableSet};
