//! Declarative experiment files.
//!
//! A scenario is a TOML document; see `scenarios/README.md` for the schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use levy_bounds::measures::{Atom, LevyMeasure, LevyTriplet, StablePower};
use levy_bounds::{ConstantPolicy, Theorem};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Bounds, lower bounds and Monte Carlo estimates for a pair of processes.
    Certify,
    /// Normalized small jumps of a stable-like measure against `N(0, t)` over `eps`.
    SmallJumpScaling,
    /// Total-variation decay of the two-point minimax construction.
    JrDecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Zero,
    TwoPoint {
        eps0: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    StablePower {
        c_pos: f64,
        c_neg: f64,
        alpha: f64,
        cutoff: Option<f64>,
    },
    Discrete {
        /// `[x, rate]` pairs.
        atoms: Vec<[f64; 2]>,
    },
}

fn one() -> f64 {
    1.0
}

impl MeasureSpec {
    pub fn build(&self, alpha_override: Option<f64>) -> levy_bounds::Result<LevyMeasure> {
        match self {
            Self::Zero => Ok(LevyMeasure::Zero),
            Self::TwoPoint { eps0, scale } => LevyMeasure::two_point(*eps0, *scale),
            Self::StablePower { c_pos, c_neg, alpha, cutoff } => {
                let sp = StablePower {
                    c_pos: *c_pos,
                    c_neg: *c_neg,
                    alpha: alpha_override.unwrap_or(*alpha),
                    cutoff: cutoff.unwrap_or(f64::INFINITY),
                };
                LevyMeasure::stable_power(sp)
            }
            Self::Discrete { atoms } => LevyMeasure::discrete(atoms.iter().map(|a| Atom { x: a[0], rate: a[1] })),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "zero_measure")]
    pub measure: MeasureSpec,
}

fn zero_measure() -> MeasureSpec {
    MeasureSpec::Zero
}

impl ProcessSpec {
    pub fn build(&self, alpha_override: Option<f64>) -> levy_bounds::Result<LevyTriplet> {
        LevyTriplet::new(self.b, self.sigma, self.measure.build(alpha_override)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Substitution level as a fraction of `eps` (scaling mode) or absolute (certify mode).
    #[serde(default)]
    pub sim_eps: f64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    /// Cap on expected jump draws per scaling cell.
    #[serde(default = "default_max_jump_draws")]
    pub max_jump_draws: f64,
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: 0,
            sim_eps: 0.0,
            bootstrap: default_bootstrap(),
            max_jump_draws: default_max_jump_draws(),
        }
    }
}

fn default_max_jump_draws() -> f64 {
    5e7
}

fn default_samples() -> usize {
    100_000
}

fn default_bootstrap() -> usize {
    400
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub n: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub mode: Mode,
    #[serde(default = "one")]
    pub p: f64,
    pub t: Option<f64>,
    pub eps: Option<f64>,
    /// Horizon for increment bounds.
    pub horizon: Option<f64>,
    /// Number of increments for increment bounds.
    pub increments: Option<u64>,
    /// Exponent `r` of the increment norm, or the activity index in `jr_decay`.
    pub r: Option<f64>,
    /// Moment budget `K` in `jr_decay`.
    pub k_budget: Option<f64>,
    /// Gaussian part split off for the small-jump TV bound.
    pub big_sigma: Option<f64>,
    #[serde(default)]
    pub theorems: Vec<String>,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    pub process1: Option<ProcessSpec>,
    pub process2: Option<ProcessSpec>,
    #[serde(default)]
    pub sweep: SweepSpec,
    /// Tolerance for the fitted slope in `small_jump_scaling`.
    pub slope_tolerance: Option<f64>,
    /// Constants left open by the underlying results (`c_p`, `rio_c`, ...).
    #[serde(default)]
    pub constants: ConstantPolicy,
}

/// Theorems a certify run can evaluate from a scenario file.
pub const RUNNABLE: [Theorem; 11] = [
    Theorem::SmallJumpW,
    Theorem::SmallJumpPair,
    Theorem::MainW,
    Theorem::TensorW,
    Theorem::MainTV,
    Theorem::SmallJumpTV,
    Theorem::LieseTV,
    Theorem::GaussW2,
    Theorem::GaussTV,
    Theorem::T1LowerW,
    Theorem::ToscaniTV,
];

impl Scenario {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, CliError> {
        let sc: Scenario =
            toml::from_str(text).map_err(|e| CliError::Schema { file: origin.to_string(), msg: e.to_string() })?;
        sc.validate().map_err(|msg| CliError::Schema { file: origin.to_string(), msg })?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn theorem_tags(&self) -> Result<Vec<Theorem>, String> {
        self.theorems
            .iter()
            .map(|s| {
                Theorem::parse(s).ok_or_else(|| format!("field `theorems`: unknown tag `{s}` (see `list-theorems`)"))
            })
            .collect()
    }

    fn need<T: Copy>(v: Option<T>, field: &str, why: &str) -> Result<T, String> {
        v.ok_or_else(|| format!("field `{field}` is required {why}"))
    }

    /// Values of `t` to visit: the sweep if present, else the scalar.
    pub fn t_values(&self) -> Vec<f64> {
        if self.sweep.t.is_empty() {
            self.t.into_iter().collect()
        } else {
            self.sweep.t.clone()
        }
    }

    pub fn eps_values(&self) -> Vec<f64> {
        if self.sweep.eps.is_empty() {
            self.eps.into_iter().collect()
        } else {
            self.sweep.eps.clone()
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(format!(
                "field `id`: `{}` must be non-empty and use only letters, digits, `_` or `-`",
                self.id
            ));
        }
        if !(1.0..=2.0).contains(&self.p) {
            return Err(format!("field `p`: {} must lie in [1, 2]", self.p));
        }
        if self.estimator.samples == 0 {
            return Err("field `estimator.samples` must be positive".into());
        }
        let tags = self.theorem_tags()?;
        match self.mode {
            Mode::Certify => self.validate_certify(&tags),
            Mode::SmallJumpScaling => {
                let p1 = Self::need(self.process1.as_ref(), "process1", "in small_jump_scaling mode")?;
                if !matches!(p1.measure, MeasureSpec::StablePower { .. }) {
                    return Err(
                        "field `process1.measure.family` must be `stable_power` in small_jump_scaling mode".into()
                    );
                }
                Self::need(self.t, "t", "in small_jump_scaling mode")?;
                if self.sweep.eps.len() < 2 {
                    return Err("field `sweep.eps` needs at least two values to fit a slope".into());
                }
                if !(self.estimator.sim_eps > 0.0 && self.estimator.sim_eps < 1.0) {
                    return Err(
                        "field `estimator.sim_eps` is a fraction of eps in (0, 1) in small_jump_scaling mode".into()
                    );
                }
                Ok(())
            }
            Mode::JrDecay => {
                let r = Self::need(self.r, "r", "in jr_decay mode")?;
                if !(r > 1.0 && r < 2.0) {
                    return Err(format!("field `r`: {r} must lie in (1, 2)"));
                }
                if self.sweep.n.is_empty() || self.sweep.n.iter().any(|&n| n < 2) {
                    return Err("field `sweep.n` must list sample sizes of at least 2".into());
                }
                Ok(())
            }
        }
    }

    fn validate_certify(&self, tags: &[Theorem]) -> Result<(), String> {
        let p1 = Self::need(self.process1.as_ref(), "process1", "in certify mode")?;
        let p2 = Self::need(self.process2.as_ref(), "process2", "in certify mode")?;
        if self.t_values().is_empty() {
            return Err("field `t` (or `sweep.t`) is required in certify mode".into());
        }
        if tags.is_empty() {
            return Err("field `theorems` must list at least one tag".into());
        }
        let tr1 = p1.build(None).map_err(|e| format!("field `process1`: {e}"))?;
        let tr2 = p2.build(None).map_err(|e| format!("field `process2`: {e}"))?;
        for &th in tags {
            if !RUNNABLE.contains(&th) {
                return Err(format!(
                    "field `theorems`: `{}` is available from the library API only, not in scenario runs",
                    th.name()
                ));
            }
            let needs_eps = matches!(
                th,
                Theorem::SmallJumpW
                    | Theorem::SmallJumpPair
                    | Theorem::MainW
                    | Theorem::TensorW
                    | Theorem::MainTV
                    | Theorem::SmallJumpTV
            );
            if needs_eps && self.eps_values().is_empty() {
                return Err(format!("theorem `{}` needs field `eps` (or `sweep.eps`)", th.name()));
            }
            match th {
                Theorem::MainTV if tr1.sigma <= 0.0 || tr2.sigma <= 0.0 => {
                    return Err("theorem `MainTV` requires σⱼ>0: set a positive `sigma` for both processes".into());
                }
                Theorem::SmallJumpTV if self.big_sigma.is_none_or(|s| s <= 0.0) => {
                    return Err(
                        "theorem `SmallJumpTV` needs a positive `big_sigma` (the Gaussian part split off)".into()
                    );
                }
                Theorem::ToscaniTV => {
                    let s = Self::need(self.big_sigma, "big_sigma", "for theorem `ToscaniTV`")?;
                    if !(s > 0.0 && s < tr1.sigma.min(tr2.sigma)) {
                        return Err(format!("theorem `ToscaniTV` needs 0 < big_sigma < min sigma, got {s}"));
                    }
                }
                Theorem::GaussW2 | Theorem::GaussTV if !(tr1.nu.is_zero() && tr2.nu.is_zero()) => {
                    return Err(format!(
                        "theorem `{}` compares Brownian motions: both measures must be `zero`",
                        th.name()
                    ));
                }
                Theorem::TensorW => {
                    Self::need(self.horizon, "horizon", "for theorem `TensorW`")?;
                    Self::need(self.increments, "increments", "for theorem `TensorW`")?;
                    let r = Self::need(self.r, "r", "for theorem `TensorW`")?;
                    if r < self.p {
                        return Err(format!("field `r`: {r} must be at least p = {}", self.p));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}
