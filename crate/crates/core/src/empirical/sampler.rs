use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::bounds::{small_jump_gauss_w, ConstantPolicy};
use crate::error::{ensure, Error, Result};
use crate::measures::{check_eps, Atom, JumpLaw, LevyMeasure, LevyTriplet};
use crate::rng::CounterRng;

/// Independent draws of `X_t`.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub t: f64,
    pub triplet: LevyTriplet,
    /// Level below which jumps are replaced by a Gaussian; `0` means exact.
    pub sim_eps: f64,
    /// Certified `W_1` gap between the sampled law and the true law.
    pub error_budget: f64,
}

impl SampleBatch {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_exact(&self) -> bool {
        self.error_budget == 0.0
    }

    /// Multiplies every sample (and the error budget) by `k`.
    pub fn scaled(mut self, k: f64) -> Self {
        for v in &mut self.values {
            *v *= k;
        }
        self.error_budget *= k.abs();
        self
    }
}

enum Plan {
    /// Gaussian part plus independent Poisson counts per atom.
    Atomic { mean: f64, sd: f64, atoms: Vec<(f64, Option<Poisson<f64>>)> },
    /// Gaussian part plus a compound Poisson process of big jumps.
    Compound { mean: f64, sd: f64, count: Option<Poisson<f64>>, law: Option<JumpLaw> },
}

fn poisson(mean: f64) -> Result<Option<Poisson<f64>>> {
    if mean == 0.0 {
        return Ok(None);
    }
    Poisson::new(mean).map(Some).map_err(|e| Error::InvalidInput(format!("Poisson mean {mean}: {e}")))
}

fn draw_count(d: &Option<Poisson<f64>>, rng: &mut CounterRng) -> u64 {
    d.as_ref().map_or(0, |d| d.sample(rng) as u64)
}

/// Samples `n` copies of `X_t`, sample `i` from stream `i` of `seed`.
///
/// Atomic measures are simulated exactly whatever `sim_eps` is. Otherwise the
/// jumps with `|x| <= sim_eps` are replaced by a Gaussian of the same variance
/// and the `W_1` cost of that substitution is recorded as `error_budget`.
///
/// Each sample draws its standard normal first, so batches sharing a seed are
/// coupled through common random numbers.
pub fn sample_increment(tr: &LevyTriplet, t: f64, n: usize, seed: u64, sim_eps: f64) -> Result<SampleBatch> {
    ensure(t > 0.0 && t.is_finite(), || format!("time must be positive, got {t}"))?;
    let (plan, used_eps, budget) = match tr.nu.atoms() {
        Some(atoms) => {
            let plan = Plan::Atomic {
                mean: t * tr.uncompensated_drift()?,
                sd: tr.sigma * t.sqrt(),
                atoms: atoms.iter().map(|&Atom { x, rate }| Ok((x, poisson(t * rate)?))).collect::<Result<_>>()?,
            };
            (plan, 0.0, 0.0)
        }
        None => {
            if sim_eps == 0.0 {
                return Err(Error::ExactSimulationUnavailable(
                    "infinite small-jump activity needs a positive substitution level".into(),
                ));
            }
            check_eps(sim_eps)?;
            let v = tr.truncate(sim_eps)?;
            let budget = if v.sigma_bar_sq > 0.0 {
                small_jump_gauss_w(1.0, t, &tr.nu, sim_eps, &ConstantPolicy::default())?.value
            } else {
                0.0
            };
            let plan = Plan::Compound {
                mean: t * v.drift,
                sd: (t * (v.sigma * v.sigma + v.sigma_bar_sq)).sqrt(),
                count: poisson(t * v.lambda)?,
                law: v.law,
            };
            (plan, sim_eps, budget)
        }
    };
    let root = CounterRng::new(seed);
    let draw = |i: usize| -> f64 {
        let mut rng = root.stream(i as u64);
        let z: f64 = StandardNormal.sample(&mut rng);
        match &plan {
            Plan::Atomic { mean, sd, atoms } => {
                let mut x = mean + sd * z;
                for (a, d) in atoms {
                    x += a * draw_count(d, &mut rng) as f64;
                }
                x
            }
            Plan::Compound { mean, sd, count, law } => {
                let mut x = mean + sd * z;
                let k = draw_count(count, &mut rng);
                if let Some(law) = law {
                    for _ in 0..k {
                        x += law.sample(&mut rng);
                    }
                }
                x
            }
        }
    };
    let values = super::par_map(n, draw);
    Ok(SampleBatch { values, seed, t, triplet: tr.clone(), sim_eps: used_eps, error_budget: budget })
}

/// `n` draws of `N(mean, sd^2)`.
pub fn gaussian_batch(mean: f64, sd: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    sample_increment(&LevyTriplet::brownian(mean, sd)?, 1.0, n, seed, 0.0)
}

/// Small-jump part `X^S_t(eps)` with measure `nu 1{|x| <= eps}`, compensated.
pub fn small_jump_batch(nu: &LevyMeasure, eps: f64, t: f64, n: usize, seed: u64, sim_eps: f64) -> Result<SampleBatch> {
    check_eps(eps)?;
    let tr = LevyTriplet::new(0.0, 0.0, nu.restrict_inside(eps))?;
    sample_increment(&tr, t, n, seed, sim_eps)
}
