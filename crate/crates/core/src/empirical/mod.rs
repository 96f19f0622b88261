//! Monte Carlo samplers, one-dimensional Wasserstein estimators, TV oracles
//! and the comparison of empirical values against bounds.

mod certify;
mod estimators;
mod export;
mod sampler;
mod scaling;
mod tv;

pub use certify::{certify, CertificationRow};
pub use estimators::{
    empirical_w1_cdf, empirical_wp, empirical_wp_values, w1_cdf_values, BootstrapConfig, EmpiricalEstimate,
    EstimatorTag,
};
pub use export::{read_batch, write_batch};
pub use sampler::{gaussian_batch, sample_increment, small_jump_batch, SampleBatch};
pub use scaling::{fit_loglog_slope, scaling_cell, ScalingCell, ScalingConfig};
pub use tv::{
    skellam_table, tv_exact_gaussian, tv_lattice, tv_numeric, Density1D, Gaussian, LatticeGaussMixture, TvGridConfig,
};

pub use crate::special::skellam_pmf;

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
