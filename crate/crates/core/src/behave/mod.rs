//! Data-driven lifted maps from offline trajectories: Hankel partitioning,
//! low-rank output denoising, the pseudoinverse representation and a
//! least-squares Markov-parameter baseline.

mod baseline;
mod data;
mod hankel;
mod representation;

pub use baseline::{baseline_parametric, default_fir_horizon};
pub use data::{read_matrix_csv, write_matrix_csv, OfflineData};
pub use hankel::{denoise, hankel, partition, rank_condition, Denoised, HankelBlocks};
pub use representation::{
    build_representation, causal_project, identify, relative_error, Representation,
};
