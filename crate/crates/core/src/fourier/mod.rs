//! Characteristic functions and Toscani-Fourier distances.
//!
//! `T_s(P, Q) = sup_u |phi_P(u) - phi_Q(u)| / |u|^s`. The sup is found on a
//! log-spaced grid, refined by golden-section search around the best grid
//! points, and certified beyond the grid by an analytic tail bound.

mod jr;

pub use jr::{jr_build, jr_row, jr_t1_bound, jr_tv_sequence, JrConstruction, JrRow, JrSequence, JrT1, JR_SEARCH_LIMIT};

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, Theorem};
use crate::error::{ensure, Result};
use crate::measures::{check_eps, LevyMeasure, LevyTriplet};

/// `E exp(iu X_t) = exp(t psi(u))`.
pub fn char_fn(tr: &LevyTriplet, t: f64, u: f64) -> Result<Complex64> {
    ensure(t >= 0.0, || format!("time must be non-negative, got {t}"))?;
    if u == 0.0 || t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok((tr.char_exponent(u)? * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupSearchConfig {
    pub u_min: f64,
    pub u_max: f64,
    pub coarse_points: usize,
    pub refine_iters: usize,
    pub top_k: usize,
    /// Bound on the objective for `|u| > u_max`; `2 / u_max^s` when absent.
    pub tail_certificate: Option<f64>,
}

impl SupSearchConfig {
    /// Grid adapted to a length scale: `u` from `1e-4 / scale` to `1e3 / scale`.
    pub fn for_scale(scale: f64) -> Self {
        Self {
            u_min: 1e-4 / scale,
            u_max: 1e3 / scale,
            coarse_points: 1 << 14,
            refine_iters: 60,
            top_k: 8,
            tail_certificate: None,
        }
    }

    /// Grid for two processes at time `t`: the length scale is the smallest of
    /// the standard deviations of `X_t` and the atom locations.
    pub fn for_pair(t: f64, tr1: &LevyTriplet, tr2: &LevyTriplet) -> Result<Self> {
        let mut scale = f64::INFINITY;
        for tr in [tr1, tr2] {
            let sd = (t * (tr.sigma * tr.sigma + tr.nu.abs_moment_inside(2.0, 1.0)?)).sqrt();
            if sd > 0.0 {
                scale = scale.min(sd);
            }
            if let Some(atoms) = tr.nu.atoms() {
                for a in atoms {
                    scale = scale.min(a.x.abs());
                }
            }
        }
        Ok(Self::for_scale(if scale.is_finite() { scale } else { 1.0 }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    /// Largest objective value found (a certified lower bound on the sup).
    pub lower: f64,
    /// `lower + tail certificate`.
    pub upper: f64,
    pub argmax: f64,
    pub tail: f64,
    /// The tail certificate does not exceed the value found.
    pub certified: bool,
}

#[cfg(feature = "parallel")]
fn eval_grid<F: Fn(f64) -> Result<f64> + Sync>(f: &F, us: &[f64]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    us.par_iter().map(|&u| f(u)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_grid<F: Fn(f64) -> Result<f64> + Sync>(f: &F, us: &[f64]) -> Result<Vec<f64>> {
    us.iter().map(|&u| f(u)).collect()
}

/// Maximizes a non-negative objective on `[u_min, u_max]`.
pub fn sup_search<F: Fn(f64) -> Result<f64> + Sync>(f: &F, s: f64, cfg: &SupSearchConfig) -> Result<SupResult> {
    ensure(cfg.u_min > 0.0 && cfg.u_max > cfg.u_min, || format!("bad search range [{}, {}]", cfg.u_min, cfg.u_max))?;
    ensure(cfg.coarse_points >= 3, || "grid needs at least 3 points".into())?;
    let n = cfg.coarse_points;
    let ratio = (cfg.u_max / cfg.u_min).ln();
    let us: Vec<f64> = (0..n).map(|i| cfg.u_min * (ratio * i as f64 / (n - 1) as f64).exp()).collect();
    let vals = eval_grid(f, &us)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut best = (vals[order[0]], us[order[0]]);
    let mut picked: Vec<usize> = Vec::new();
    for &i in &order {
        if picked.len() >= cfg.top_k {
            break;
        }
        if picked.iter().any(|&j| j.abs_diff(i) <= 1) {
            continue;
        }
        picked.push(i);
        let lo = us[i.saturating_sub(1)].ln();
        let hi = us[(i + 1).min(n - 1)].ln();
        let (v, u) = golden_max(f, lo, hi, cfg.refine_iters)?;
        if v > best.0 {
            best = (v, u);
        }
    }
    let tail = cfg.tail_certificate.unwrap_or(2.0 / cfg.u_max.powf(s));
    Ok(SupResult { lower: best.0, upper: best.0 + tail, argmax: best.1, tail, certified: tail <= best.0 })
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c.exp())?;
    let mut fd = f(d.exp())?;
    let mut best = if fc >= fd { (fc, c.exp()) } else { (fd, d.exp()) };
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c.exp())?;
            if fc > best.0 {
                best = (fc, c.exp());
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d.exp())?;
            if fd > best.0 {
                best = (fd, d.exp());
            }
        }
    }
    Ok(best)
}

/// Toscani-Fourier distance of order `s` between two characteristic functions.
pub fn toscani_distance<F1, F2>(s: f64, cf1: F1, cf2: F2, cfg: &SupSearchConfig) -> Result<SupResult>
where
    F1: Fn(f64) -> Result<Complex64> + Sync,
    F2: Fn(f64) -> Result<Complex64> + Sync,
{
    ensure(s > 0.0, || format!("order s must be positive, got {s}"))?;
    let obj = |u: f64| -> Result<f64> { Ok((cf1(u)? - cf2(u)?).norm() / u.powf(s)) };
    sup_search(&obj, s, cfg)
}

/// `T_1` between the laws of two processes at time `t`.
pub fn toscani_t1(tr1: &LevyTriplet, tr2: &LevyTriplet, t: f64, cfg: &SupSearchConfig) -> Result<SupResult> {
    toscani_distance(1.0, |u| char_fn(tr1, t, u), |u| char_fn(tr2, t, u), cfg)
}

/// Lower bound on `W_p` between the small jumps `|x| <= eps` at time `t` and
/// the Gaussian with the same variance.
pub fn gaussian_approx_lower(
    t: f64,
    nu: &LevyMeasure,
    eps: f64,
    cfg: &SupSearchConfig,
) -> Result<(BoundReport, SupResult)> {
    check_eps(eps)?;
    let nu_eps = nu.restrict_inside(eps);
    let s2 = nu_eps.sigma_bar_sq(eps)?;
    let cf1 = |u: f64| -> Result<Complex64> { Ok((nu_eps.char_integral(u)? * t).exp()) };
    let cf2 = |u: f64| -> Result<Complex64> { Ok(Complex64::new((-0.5 * t * s2 * u * u).exp(), 0.0)) };
    let sup = toscani_distance(1.0, cf1, cf2, cfg)?;
    let mut rep = BoundReport::lower(Theorem::T1LowerW, sup.lower / SQRT_2);
    rep.terms.insert("t1".into(), sup.lower);
    rep.terms.insert("argmax".into(), sup.argmax);
    Ok((rep, sup))
}

/// `T_1` witness values for the two-point process against `N(0, t)`.
pub fn two_point_t1_witness(t: f64, eps: f64) -> f64 {
    let u = if t >= eps * eps { 2.0 * std::f64::consts::PI / eps } else { 3.0 / t.sqrt() };
    ((-t * (1.0 - (u * eps).cos()) / (eps * eps)).exp() - (-0.5 * t * u * u).exp()).abs() / u
}
