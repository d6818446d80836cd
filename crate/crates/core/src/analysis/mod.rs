//! Experiment battery and the statistics used to compare campaigns.

mod experiments;
mod histogram;
mod mann_whitney;

pub use experiments::{
    build_seed_pool, experiment_influenced_bytes, experiment_splicing, experiment_start_positions,
    experiment_stack_distance, stack_distance_with, SplicingReport,
};
pub use histogram::Histogram;
pub use mann_whitney::{mann_whitney_u, midranks, u_statistic, Alternative, MannWhitney, NORMAL_APPROX_MIN};
