use serde::{Deserialize, Serialize};

use super::sampler::SampleBatch;
use crate::error::{ensure, Result};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorTag {
    QuantileWp,
    CdfW1,
    TvDensityGrid,
    TvExactGaussian,
    TvSkellam,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub estimator: EstimatorTag,
    pub n: usize,
    /// Fewer than 100 samples per batch.
    pub low_sample: bool,
    /// For grid estimates: the tails outside the grid were not certified small.
    pub uncertified: bool,
}

impl EmpiricalEstimate {
    pub fn exact(point: f64, estimator: EstimatorTag) -> Self {
        Self { point, ci_low: point, ci_high: point, estimator, n: 0, low_sample: false, uncertified: false }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { resamples: 400, level: 0.95, seed: 0x5eed }
    }
}

fn argsort(v: &[f64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..v.len() as u32).collect();
    idx.sort_unstable_by(|&i, &j| v[i as usize].total_cmp(&v[j as usize]).then(i.cmp(&j)));
    idx
}

/// `(1/n) sum |a_(i) - b_(i)|^p` given sort orders and multiplicities.
fn coupled_cost(a: &[f64], b: &[f64], ia: &[u32], ib: &[u32], counts: Option<&[u32]>, p: f64) -> f64 {
    let w = |k: u32| counts.map_or(1, |c| c[k as usize]);
    let (mut i, mut j) = (0usize, 0usize);
    let (mut ra, mut rb) = (0u32, 0u32);
    let mut s = 0.0;
    let mut total = 0u64;
    loop {
        while ra == 0 && i < ia.len() {
            ra = w(ia[i]);
            if ra == 0 {
                i += 1;
            }
        }
        while rb == 0 && j < ib.len() {
            rb = w(ib[j]);
            if rb == 0 {
                j += 1;
            }
        }
        if ra == 0 || rb == 0 {
            break;
        }
        let m = ra.min(rb);
        let d = (a[ia[i] as usize] - b[ib[j] as usize]).abs();
        s += m as f64 * if p == 1.0 { d } else { d.powf(p) };
        total += m as u64;
        ra -= m;
        rb -= m;
        if ra == 0 {
            i += 1;
        }
        if rb == 0 {
            j += 1;
        }
    }
    s / total as f64
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Empirical `W_p` over order statistics with a paired percentile bootstrap.
///
/// Unequal batches are cut to the shorter length. Resample `r` draws sample
/// indices with replacement and applies the same multiplicities to both
/// batches, which keeps any coupling between them.
pub fn empirical_wp_values(a: &[f64], b: &[f64], p: f64, boot: &BootstrapConfig) -> Result<EmpiricalEstimate> {
    ensure((1.0..=2.0).contains(&p), || format!("order p must lie in [1, 2], got {p}"))?;
    let n = a.len().min(b.len());
    ensure(n > 0, || "empty sample batch".into())?;
    let (a, b) = (&a[..n], &b[..n]);
    let ia = argsort(a);
    let ib = argsort(b);
    let point = coupled_cost(a, b, &ia, &ib, None, p).powf(1.0 / p);
    let (mut lo, mut hi) = (point, point);
    if boot.resamples > 0 && n > 1 {
        let root = CounterRng::new(boot.seed);
        let mut stats = super::par_map(boot.resamples, |r| {
            let mut rng = root.stream(r as u64);
            let mut counts = vec![0u32; n];
            for _ in 0..n {
                counts[rng.below(n as u64) as usize] += 1;
            }
            coupled_cost(a, b, &ia, &ib, Some(&counts), p).powf(1.0 / p)
        });
        stats.sort_by(f64::total_cmp);
        let tail = 0.5 * (1.0 - boot.level);
        lo = percentile(&stats, tail).min(point);
        hi = percentile(&stats, 1.0 - tail).max(point);
    }
    Ok(EmpiricalEstimate {
        point,
        ci_low: lo,
        ci_high: hi,
        estimator: EstimatorTag::QuantileWp,
        n,
        low_sample: n < 100,
        uncertified: false,
    })
}

pub fn empirical_wp(a: &SampleBatch, b: &SampleBatch, p: f64) -> Result<EmpiricalEstimate> {
    let boot = BootstrapConfig { seed: a.seed ^ b.seed.rotate_left(17) ^ 0xb007, ..BootstrapConfig::default() };
    empirical_wp_values(&a.values, &b.values, p, &boot)
}

/// `int |F_n - G_n| dx` over the merged sample grid.
pub fn w1_cdf_values(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len().min(b.len());
    ensure(n > 0, || "empty sample batch".into())?;
    let mut xa = a[..n].to_vec();
    let mut xb = b[..n].to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut s = 0.0;
    let mut prev = xa[0].min(xb[0]);
    while i < n || j < n {
        let take_a = j == n || (i < n && xa[i] <= xb[j]);
        let x = if take_a { xa[i] } else { xb[j] };
        s += (i as f64 - j as f64).abs() * (x - prev);
        prev = x;
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok(s / n as f64)
}

/// CDF form of the empirical `W_1`; the interval comes from the quantile bootstrap.
pub fn empirical_w1_cdf(a: &SampleBatch, b: &SampleBatch) -> Result<EmpiricalEstimate> {
    let q = empirical_wp(a, b, 1.0)?;
    let point = w1_cdf_values(&a.values, &b.values)?;
    Ok(EmpiricalEstimate {
        point,
        ci_low: q.ci_low.min(point),
        ci_high: q.ci_high.max(point),
        estimator: EstimatorTag::CdfW1,
        ..q
    })
}
