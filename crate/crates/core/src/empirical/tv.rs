use std::collections::BTreeMap;

use super::estimators::{EmpiricalEstimate, EstimatorTag};
use crate::error::{ensure, Result};
use crate::quad::{integrate_split, QuadConfig};
use crate::special::{normal_cdf, normal_interval, normal_pdf, normal_sf, normal_two_sided, skellam_pmf};

/// Exact TV between `N(m1, s1^2)` and `N(m2, s2^2)`.
pub fn tv_exact_gaussian(m1: f64, s1: f64, m2: f64, s2: f64) -> Result<f64> {
    ensure(s1 > 0.0 && s2 > 0.0, || format!("standard deviations must be positive, got {s1}, {s2}"))?;
    if s1 == s2 {
        return Ok(normal_two_sided((m1 - m2).abs() / (2.0 * s1)));
    }
    // narrower density wins on the interval between the two crossings
    let (mn, sn, mw, sw) = if s1 < s2 { (m1, s1, m2, s2) } else { (m2, s2, m1, s1) };
    let a = 1.0 / (sw * sw) - 1.0 / (sn * sn);
    let b = 2.0 * (mn / (sn * sn) - mw / (sw * sw));
    let c = mw * mw / (sw * sw) - mn * mn / (sn * sn) - 2.0 * (sn / sw).ln();
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        let h = (-c / a).sqrt();
        (-h, h)
    } else {
        (q / a, c / q)
    };
    let (x1, x2) = (r1.min(r2), r1.max(r2));
    let pn = normal_interval((x1 - mn) / sn, (x2 - mn) / sn);
    let pw = normal_interval((x1 - mw) / sw, (x2 - mw) / sw);
    Ok((pn - pw).clamp(0.0, 1.0))
}

/// A probability density on the line with its distribution function.
pub trait Density1D: Sync {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
    /// Interval holding the bulk of the mass.
    fn bulk(&self) -> (f64, f64);
    /// Points where the density changes character, for splitting quadrature.
    fn breakpoints(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }
    /// Mass missing from the representation (truncated mixtures).
    fn dropped_mass(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub sd: f64,
}

impl Density1D for Gaussian {
    fn pdf(&self, x: f64) -> f64 {
        normal_pdf((x - self.mean) / self.sd) / self.sd
    }
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mean) / self.sd)
    }
    fn sf(&self, x: f64) -> f64 {
        normal_sf((x - self.mean) / self.sd)
    }
    fn bulk(&self) -> (f64, f64) {
        (self.mean - 8.0 * self.sd, self.mean + 8.0 * self.sd)
    }
}

/// `shift + step * K + N(0, sd^2)` for an integer-valued `K` with finite support table.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGaussMixture {
    pub shift: f64,
    pub step: f64,
    pub sd: f64,
    pub weights: Vec<(i64, f64)>,
    pub dropped: f64,
}

impl LatticeGaussMixture {
    /// `step * (N1 - N2) + N(0, sd^2)` with `N_i ~ Poisson(mu_i)`.
    pub fn skellam(step: f64, mu1: f64, mu2: f64, sd: f64) -> Result<Self> {
        ensure(step > 0.0 && sd > 0.0, || format!("step and sd must be positive, got {step}, {sd}"))?;
        ensure(mu1 >= 0.0 && mu2 >= 0.0, || "Poisson means must be non-negative".into())?;
        let weights = skellam_table(mu1, mu2);
        let total: f64 = weights.iter().map(|w| w.1).sum();
        Ok(Self { shift: 0.0, step, sd, weights, dropped: (1.0 - total).max(0.0) })
    }
}

/// Skellam pmf on a range carrying all but about `1e-15` of the mass.
pub fn skellam_table(mu1: f64, mu2: f64) -> Vec<(i64, f64)> {
    let centre = (mu1 - mu2).round() as i64;
    let spread = (10.0 * (mu1 + mu2).sqrt()).ceil() as i64 + 30;
    (centre - spread..=centre + spread).map(|k| (k, skellam_pmf(k, mu1, mu2))).filter(|w| w.1 > 0.0).collect()
}

impl Density1D for LatticeGaussMixture {
    fn pdf(&self, x: f64) -> f64 {
        let x = x - self.shift;
        // only atoms within 40 sd contribute above rounding
        let reach = 40.0 * self.sd;
        let (k0, k1) = (((x - reach) / self.step).floor() as i64, ((x + reach) / self.step).ceil() as i64);
        let first = self.weights.partition_point(|w| w.0 < k0);
        self.weights[first..]
            .iter()
            .take_while(|w| w.0 <= k1)
            .map(|&(k, p)| p * normal_pdf((x - k as f64 * self.step) / self.sd))
            .sum::<f64>()
            / self.sd
    }
    fn cdf(&self, x: f64) -> f64 {
        let x = x - self.shift;
        self.weights.iter().map(|&(k, p)| p * normal_cdf((x - k as f64 * self.step) / self.sd)).sum::<f64>()
            + self.dropped
    }
    fn sf(&self, x: f64) -> f64 {
        let x = x - self.shift;
        self.weights.iter().map(|&(k, p)| p * normal_sf((x - k as f64 * self.step) / self.sd)).sum::<f64>()
            + self.dropped
    }
    fn bulk(&self) -> (f64, f64) {
        let lo = self.weights.first().map_or(0, |w| w.0) as f64 * self.step;
        let hi = self.weights.last().map_or(0, |w| w.0) as f64 * self.step;
        (self.shift + lo - 8.0 * self.sd, self.shift + hi + 8.0 * self.sd)
    }
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.sd > 2.0 * self.step {
            return Vec::new();
        }
        let (k0, k1) = (((lo - self.shift) / self.step).floor() as i64, ((hi - self.shift) / self.step).ceil() as i64);
        let stride = ((k1 - k0) / 4000).max(1);
        (k0..=k1)
            .step_by(stride as usize)
            .flat_map(|k| [k as f64, k as f64 + 0.5].map(|j| self.shift + j * self.step))
            .collect()
    }
    fn dropped_mass(&self) -> f64 {
        self.dropped
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvGridConfig {
    /// Mass allowed outside the integration window, both densities together.
    pub tail_tol: f64,
    pub quad: QuadConfig,
}

impl Default for TvGridConfig {
    fn default() -> Self {
        Self { tail_tol: 1e-8, quad: QuadConfig { rel_tol: 1e-10, abs_tol: 1e-13, max_intervals: 20_000 } }
    }
}

/// `1/2 int |f - g|` on a window whose outside mass is certified by the CDFs.
///
/// The interval brackets the quadrature error, the mass outside the window
/// and any mass missing from truncated mixtures.
pub fn tv_numeric(f: &dyn Density1D, g: &dyn Density1D, cfg: &TvGridConfig) -> Result<EmpiricalEstimate> {
    let (fa, fb) = f.bulk();
    let (ga, gb) = g.bulk();
    let (mut lo, mut hi) = (fa.min(ga), fb.max(gb));
    let tails = |lo: f64, hi: f64| f.cdf(lo) + f.sf(hi) + g.cdf(lo) + g.sf(hi);
    let mut outside = tails(lo, hi);
    let mut grow = 0;
    while outside > cfg.tail_tol && grow < 60 {
        let w = 0.5 * (hi - lo);
        lo -= w;
        hi += w;
        outside = tails(lo, hi);
        grow += 1;
    }
    let mut breaks = f.breakpoints(lo, hi);
    breaks.extend(g.breakpoints(lo, hi));
    let uniq: BTreeMap<u64, f64> = breaks.into_iter().map(|x| (x.to_bits(), x)).collect();
    let breaks: Vec<f64> = uniq.into_values().collect();
    let q = integrate_split(&|x: f64| 0.5 * (f.pdf(x) - g.pdf(x)).abs(), lo, hi, &breaks, &cfg.quad)?;
    let slack = q.abs_err + 0.5 * outside + f.dropped_mass() + g.dropped_mass();
    Ok(EmpiricalEstimate {
        point: q.value,
        ci_low: (q.value - slack).max(0.0),
        ci_high: (q.value + slack).min(1.0),
        estimator: EstimatorTag::TvDensityGrid,
        n: 0,
        low_sample: false,
        uncertified: outside > cfg.tail_tol,
    })
}

/// Exact TV between two integer-valued laws given as `(k, p)` tables.
pub fn tv_lattice(p: &[(i64, f64)], q: &[(i64, f64)]) -> EmpiricalEstimate {
    let mut m: BTreeMap<i64, f64> = BTreeMap::new();
    for &(k, w) in p {
        *m.entry(k).or_default() += w;
    }
    for &(k, w) in q {
        *m.entry(k).or_default() -= w;
    }
    let covered: f64 = p.iter().map(|w| w.1).sum::<f64>().min(q.iter().map(|w| w.1).sum::<f64>());
    let point = 0.5 * m.values().map(|d| d.abs()).sum::<f64>();
    let slack = (1.0 - covered).max(0.0);
    EmpiricalEstimate {
        point,
        ci_low: (point - slack).max(0.0),
        ci_high: (point + slack).min(1.0),
        estimator: EstimatorTag::TvSkellam,
        n: 0,
        low_sample: false,
        uncertified: false,
    }
}
