//! Residual bounds from the eigen-expansion of the initial residual.

pub mod cluster;
pub mod decompose;
pub mod trend;
pub mod vandermonde;

pub use cluster::{
    cluster_assign, cluster_poly_bound, first_order_estimate, perturbation_split, ClusterAssignment,
    ClusterMode,
};
pub use decompose::{decompose_rhs, decompose_rhs_with, weighted_norm, DecomposeOptions, EigenData};
pub use vandermonde::{
    bound_curve, normal_case_bound, vandermonde_min, BoundRecord, BoundSeries, VandermondeSystem,
};
pub use trend::{kendall_tau, log_decrements, log_second_differences};
