use serde::{Deserialize, Serialize};

use super::estimators::{empirical_wp_values, BootstrapConfig, EmpiricalEstimate};
use super::sampler::{gaussian_batch, small_jump_batch};
use crate::bounds::{small_jump_gauss_w, ConstantPolicy};
use crate::error::{ensure, Result};
use crate::measures::LevyMeasure;

/// One `eps` of a small-jump scaling study: `X^S_t(eps) / sigma_bar(eps)` against `N(0, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCell {
    pub eps: f64,
    pub sigma_bar: f64,
    /// Small-jump bound divided by `sigma_bar`.
    pub bound: f64,
    pub rigorous: bool,
    pub branch: String,
    pub empirical: EmpiricalEstimate,
    /// Substitution gap divided by `sigma_bar`.
    pub error_budget: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub t: f64,
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
    /// Substitution level as a fraction of `eps`.
    pub sim_fraction: f64,
    /// Cap on expected jump draws per cell; the sample count shrinks to fit.
    pub max_jump_draws: f64,
    pub bootstrap: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { t: 10.0, p: 1.0, samples: 100_000, seed: 1, sim_fraction: 0.5, max_jump_draws: 5e7, bootstrap: 400 }
    }
}

pub fn scaling_cell(nu: &LevyMeasure, eps: f64, cfg: &ScalingConfig) -> Result<ScalingCell> {
    ensure(cfg.sim_fraction > 0.0 && cfg.sim_fraction < 1.0, || {
        format!("substitution fraction must lie in (0, 1), got {}", cfg.sim_fraction)
    })?;
    let sbar = nu.sigma_bar_sq(eps)?.sqrt();
    let rep = small_jump_gauss_w(cfg.p, cfg.t, nu, eps, &ConstantPolicy::default())?;
    let sim_eps = cfg.sim_fraction * eps;
    let per_sample = cfg.t * (nu.mass_outside(sim_eps)? - nu.mass_outside(eps)?);
    let samples = if per_sample * cfg.samples as f64 > cfg.max_jump_draws {
        ((cfg.max_jump_draws / per_sample) as usize).clamp(1000, cfg.samples)
    } else {
        cfg.samples
    };
    let a = small_jump_batch(nu, eps, cfg.t, samples, cfg.seed, sim_eps)?.scaled(1.0 / sbar);
    // same seed: the Gaussian reference shares each sample's leading normal draw
    let b = gaussian_batch(0.0, cfg.t.sqrt(), samples, cfg.seed)?;
    let boot =
        BootstrapConfig { resamples: cfg.bootstrap, seed: cfg.seed ^ eps.to_bits(), ..BootstrapConfig::default() };
    let empirical = empirical_wp_values(&a.values, &b.values, cfg.p, &boot)?;
    let branch = rep.branches.get("min").cloned().unwrap_or_default();
    Ok(ScalingCell {
        eps,
        sigma_bar: sbar,
        bound: rep.value / sbar,
        rigorous: rep.rigorous,
        branch,
        empirical,
        error_budget: a.error_budget,
        samples,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    ensure(xs.len() == ys.len() && xs.len() >= 2, || "slope fit needs at least two paired points".into())?;
    ensure(xs.iter().chain(ys).all(|&v| v > 0.0), || "slope fit needs positive values".into())?;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
