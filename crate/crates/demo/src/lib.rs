//! Browser bindings: three closed-form computations a page can run
//! without a server. Each returns a JSON array of rows.
//!
//! The `*_rows` functions are plain Rust so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers only serialize and convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use levy_bounds::bounds::{lattice_w1_lower, small_jump_gauss_w, two_point_w1_floor, wp_lower_from_t1};
use levy_bounds::fourier::{jr_row, two_point_t1_witness};
use levy_bounds::measures::{LevyMeasure, StablePower};
use levy_bounds::ConstantPolicy;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub eps: f64,
    pub sigma_bar: f64,
    /// Small-jump `W_1` bound divided by `sigma_bar`.
    pub normalized_bound: f64,
    pub branch: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichPoint {
    pub t: f64,
    pub upper: f64,
    /// `E dist(N(0, t), eps Z)`.
    pub lattice_lower: f64,
    pub t1_lower: f64,
    /// `sqrt(2/pi) e^{-1} sqrt(t)` where claimed (`t <= eps^2`).
    pub claimed_floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayPoint {
    pub n: u64,
    pub tv_bound: f64,
    pub closed_form: f64,
    pub product_bound: f64,
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points).map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).collect()
}

/// Small-jump bound for the symmetric measure `|x|^{-1-alpha}` on `[-1, 1]`, over `eps` in `[eps_min, 1]`.
pub fn scaling_rows(alpha: f64, t: f64, eps_min: f64, points: usize) -> Result<Vec<ScalingPoint>, String> {
    if !(eps_min > 0.0 && eps_min < 1.0) {
        return Err(format!("eps_min must lie in (0, 1), got {eps_min}"));
    }
    let nu = LevyMeasure::stable_power(StablePower::symmetric(1.0, alpha)).map_err(|e| e.to_string())?;
    log_grid(eps_min, 1.0, points)
        .into_iter()
        .map(|eps| {
            let rep = small_jump_gauss_w(1.0, t, &nu, eps, &ConstantPolicy::default()).map_err(|e| e.to_string())?;
            let sbar = nu.sigma_bar_sq(eps).map_err(|e| e.to_string())?.sqrt();
            Ok(ScalingPoint {
                eps,
                sigma_bar: sbar,
                normalized_bound: rep.value / sbar,
                branch: rep.branches.get("min").cloned().unwrap_or_default(),
            })
        })
        .collect()
}

/// Bounds on `W_1` between the two-point process at level `eps` and `N(0, t)`, over `t` in `[t_min, t_max]`.
pub fn sandwich_rows(eps: f64, t_min: f64, t_max: f64, points: usize) -> Result<Vec<SandwichPoint>, String> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(format!("eps must lie in (0, 1], got {eps}"));
    }
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(format!("need 0 < t_min < t_max, got {t_min}, {t_max}"));
    }
    log_grid(t_min, t_max, points)
        .into_iter()
        .map(|t| {
            Ok(SandwichPoint {
                t,
                upper: (2.0 * t.sqrt()).min(0.5 * eps),
                lattice_lower: lattice_w1_lower(t, eps).map_err(|e| e.to_string())?,
                t1_lower: wp_lower_from_t1(two_point_t1_witness(t, eps)),
                claimed_floor: (t <= eps * eps).then(|| two_point_w1_floor(t)),
            })
        })
        .collect()
}

/// Minimax TV bound over `n` in `[n_min, n_max]`, with `T_1` at its cap.
pub fn decay_rows(r: f64, k_budget: f64, n_min: u64, n_max: u64, points: usize) -> Result<Vec<DecayPoint>, String> {
    if n_min < 2 || n_max <= n_min {
        return Err(format!("need 2 <= n_min < n_max, got {n_min}, {n_max}"));
    }
    let mut ns: Vec<u64> = log_grid(n_min as f64, n_max as f64, points).into_iter().map(|x| x.round() as u64).collect();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let row = jr_row(n, r, k_budget, false).map_err(|e| e.to_string())?;
            Ok(DecayPoint { n, tv_bound: row.tv_bound, closed_form: row.closed_form, product_bound: row.product_bound })
        })
        .collect()
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn small_jump_scaling(alpha: f64, t: f64, eps_min: f64, points: usize) -> Result<String, JsError> {
    to_js(scaling_rows(alpha, t, eps_min, points))
}

#[wasm_bindgen]
pub fn two_point_sandwich(eps: f64, t_min: f64, t_max: f64, points: usize) -> Result<String, JsError> {
    to_js(sandwich_rows(eps, t_min, t_max, points))
}

#[wasm_bindgen]
pub fn minimax_decay(r: f64, k_budget: f64, n_min: u32, n_max: u32, points: usize) -> Result<String, JsError> {
    to_js(decay_rows(r, k_budget, n_min as u64, n_max as u64, points))
}
