use serde::{Deserialize, Serialize};

use super::estimators::EmpiricalEstimate;

/// Outcome of checking `lower <= empirical <= upper` for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationRow {
    pub label: String,
    pub lower: Option<f64>,
    pub empirical: EmpiricalEstimate,
    /// Sampler substitution gap, added to both sides of the interval.
    pub error_budget: f64,
    pub upper: Option<f64>,
    pub slack: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub pass: bool,
}

/// Accepts when `lower <= ci_high + budget` and `ci_low - budget <= upper (1 + slack)`.
pub fn certify(
    label: impl Into<String>,
    lower: Option<f64>,
    empirical: EmpiricalEstimate,
    error_budget: f64,
    upper: Option<f64>,
    slack: f64,
) -> CertificationRow {
    let lower_ok = lower.is_none_or(|l| l <= empirical.ci_high + error_budget);
    let upper_ok = upper.is_none_or(|u| empirical.ci_low - error_budget <= u * (1.0 + slack));
    CertificationRow {
        label: label.into(),
        lower,
        empirical,
        error_budget,
        upper,
        slack,
        lower_ok,
        upper_ok,
        pass: lower_ok && upper_ok && !empirical.uncertified,
    }
}
