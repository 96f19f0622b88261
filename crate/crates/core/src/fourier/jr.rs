//! Two-point minimax pair with matching characteristic functions on `|u| < u_n`.
//!
//! The template is built in Fourier space. Let `g(v) = (9/8 - v^2/2) 1{|v| <= 3/2}`
//! and let `k` be the density of a sum of four `U[-1/8, 1/8]`. Then
//! `m0 = g * k` equals `9/8 - 1/96 - v^2/2` on `|v| <= 1`, and its inverse
//! transform `h0(y) = G(y) sinc^4(y/8)` is integrable with a finite second moment.
//! Splitting `h0 = h0+ - h0-` gives two finite Levy measures whose exponents
//! differ by `m0(0) - m0(v)`, a parabola on the band. Scaling by
//! `x = y / u_n` and mass `a_n u_n^2` produces `F1` and `F2` with
//! `Psi2 - Psi1 = a_n u^2 / 2` on `|u| <= u_n`, which cancels the extra
//! Gaussian variance `a_n` of the first process.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{sup_search, SupResult, SupSearchConfig};
use crate::bounds::toscani_tv_formula;
use crate::error::{ensure, Error, Result};
use crate::special::gauss_legendre;

const A: f64 = 1.5;
const Y_MAX: f64 = 400.0;
const GL_ORDER: usize = 24;
/// Gaussian variance per unit time split off before applying the Toscani bound.
const SIGMA_SQ: f64 = 0.125;

fn big_g(y: f64) -> f64 {
    let z = A * y;
    if z.abs() < 0.05 {
        let z2 = z * z;
        A * A * A * (1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0 - z2 * z2 * z2 / 45360.0) / PI
    } else {
        (z.sin() - z * z.cos()) / (PI * y * y * y)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Inverse transform of `m0`.
pub(crate) fn h0(y: f64) -> f64 {
    big_g(y) * sinc(y / 8.0).powi(4)
}

fn template_g(v: f64) -> f64 {
    if v.abs() <= A {
        9.0 / 8.0 - 0.5 * v * v
    } else {
        0.0
    }
}

fn bspline4(x: f64) -> f64 {
    if !(0.0..=4.0).contains(&x) {
        0.0
    } else if x < 1.0 {
        x * x * x / 6.0
    } else if x < 2.0 {
        (-3.0 * x * x * x + 12.0 * x * x - 12.0 * x + 4.0) / 6.0
    } else if x < 3.0 {
        (3.0 * x * x * x - 24.0 * x * x + 60.0 * x - 44.0) / 6.0
    } else {
        (4.0 - x).powi(3) / 6.0
    }
}

fn smoothing_kernel(w: f64) -> f64 {
    4.0 * bspline4(4.0 * w + 2.0)
}

/// `int k(w) f(w) dw` over the support of `k`, split where `f` may kink.
fn smooth(v: f64, f: impl Fn(f64) -> f64) -> f64 {
    static GL4: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = GL4.get_or_init(|| gauss_legendre(4));
    let mut cuts = vec![-0.5, -0.25, 0.0, 0.25, 0.5];
    for c in [v - A, v + A, -A, A] {
        if c > -0.5 && c < 0.5 {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut s = 0.0;
    for p in cuts.windows(2) {
        let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
        for (xi, wi) in x.iter().zip(w) {
            let t = c + h * xi;
            s += h * wi * smoothing_kernel(t) * f(t);
        }
    }
    s
}

/// `m0 = g * k`, exact up to rounding (piecewise polynomial integrand).
#[cfg(test)]
pub(crate) fn m0(v: f64) -> f64 {
    smooth(v, |w| template_g(v - w))
}

/// `m0(0) - m0(v) - v^2/2`, evaluated without cancellation; zero on `|v| <= 1`.
pub(crate) fn m0_excess(v: f64) -> f64 {
    smooth(v, |w| {
        if (v - w).abs() <= A {
            // g(-w) - g(v - w) - v^2/2 with both arguments on the parabola
            -v * w
        } else {
            template_g(w) - 0.5 * v * v
        }
    })
}

/// Quadrature nodes on `(0, Y_MAX]` split at the sign changes of `h0`.
struct Template {
    y: Vec<f64>,
    /// `2 w_k h0-(y_k)`: weights over the full line for even integrands.
    neg: Vec<f64>,
    pos: Vec<f64>,
}

impl Template {
    fn get() -> &'static Template {
        static T: OnceLock<Template> = OnceLock::new();
        T.get_or_init(Template::build)
    }

    fn build() -> Template {
        let mut cuts = vec![0.0];
        let mut k = 1.0;
        loop {
            // roots of tan z = z lie in (k pi, k pi + pi/2)
            let mut z = (k + 0.5) * PI - 1.0 / ((k + 0.5) * PI);
            for _ in 0..50 {
                let f = z.sin() - z * z.cos();
                let step = f / (z * z.sin());
                z -= step;
                if step.abs() < 1e-15 * z {
                    break;
                }
            }
            let y = z / A;
            if y >= Y_MAX {
                break;
            }
            cuts.push(y);
            k += 1.0;
        }
        cuts.push(Y_MAX);
        let (gx, gw) = gauss_legendre(GL_ORDER);
        let mut t = Template { y: Vec::new(), neg: Vec::new(), pos: Vec::new() };
        for p in cuts.windows(2) {
            let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            for (xi, wi) in gx.iter().zip(&gw) {
                let y = c + h * xi;
                let v = 2.0 * h * wi * h0(y);
                t.y.push(y);
                t.pos.push(v.max(0.0));
                t.neg.push((-v).max(0.0));
            }
        }
        t
    }

    fn integrate(weights: &[f64], ys: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        weights.iter().zip(ys).map(|(w, &y)| w * f(y)).sum()
    }
}

/// `int (1 - cos vy) h0-(y) dy`.
pub(crate) fn psi0_neg(v: f64) -> f64 {
    let t = Template::get();
    Template::integrate(&t.neg, &t.y, |y| 1.0 - (v * y).cos())
}

/// `int (1 - cos vy) h0+(y) dy` by direct quadrature.
#[cfg(test)]
pub(crate) fn psi0_pos_direct(v: f64) -> f64 {
    let t = Template::get();
    Template::integrate(&t.pos, &t.y, |y| 1.0 - (v * y).cos())
}

/// `int phi(y) h0+-(y) dy` over the full line for even `phi`.
pub(crate) fn template_moment(positive: bool, phi: impl Fn(f64) -> f64) -> f64 {
    let t = Template::get();
    Template::integrate(if positive { &t.pos } else { &t.neg }, &t.y, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JrConstruction {
    pub n: u64,
    pub r: f64,
    pub k_budget: f64,
    pub a_n: f64,
    pub u_n: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    /// `int (|x|^r ^ 1) F_i(dx)` for `i = 1, 2`.
    pub budget_used: [f64; 2],
    /// Upper bound on `max_i E|X^i_{1/n}|`.
    pub moment_max: f64,
}

/// Builds the pair for sample size `n` and activity index `r`.
pub fn jr_build(n: u64, r: f64, k_budget: f64) -> Result<JrConstruction> {
    ensure(n >= 2, || format!("sample size must be at least 2, got {n}"))?;
    ensure(r > 1.0 && r < 2.0, || format!("activity index must lie in (1, 2), got {r}"))?;
    ensure(k_budget > 0.0, || format!("moment budget must be positive, got {k_budget}"))?;
    let nf = n as f64;
    let nl = nf * nf.ln();
    let a_n = nl.powf(-(2.0 - r) / 2.0);
    let u_n = 2.0 * nl.sqrt();
    let scale = a_n * u_n * u_n;
    let budget = |pos: bool| scale * template_moment(pos, |y| (y / u_n).powf(r).min(1.0));
    let budget_used = [budget(false), budget(true)];
    let needed = budget_used[0].max(budget_used[1]);
    if needed > k_budget {
        return Err(Error::BudgetViolated { needed, budget: k_budget });
    }
    let sigma1_sq = 1.0 + a_n;
    let sigma2_sq = 1.0;
    let m2 = |pos: bool| a_n * template_moment(pos, |y| y * y);
    let var1 = (sigma1_sq + m2(false)) / nf;
    let var2 = (sigma2_sq + m2(true)) / nf;
    let moment_max = var1.max(var2).sqrt();
    Ok(JrConstruction { n, r, k_budget, a_n, u_n, sigma1_sq, sigma2_sq, budget_used, moment_max })
}

impl JrConstruction {
    pub fn psi1(&self, u: f64) -> f64 {
        self.a_n * self.u_n * self.u_n * psi0_neg(u / self.u_n)
    }

    /// `Psi2 - Psi1`.
    pub fn psi_gap(&self, u: f64) -> f64 {
        let v = u / self.u_n;
        0.5 * self.a_n * u * u + self.a_n * self.u_n * self.u_n * m0_excess(v)
    }

    pub fn psi2(&self, u: f64) -> f64 {
        self.psi1(u) + self.psi_gap(u)
    }

    /// Characteristic function of `X^i_{1/n}`; both are real.
    pub fn char_fn(&self, i: usize, u: f64) -> f64 {
        let nf = self.n as f64;
        match i {
            1 => (-u * u * self.sigma1_sq / (2.0 * nf) - self.psi1(u) / nf).exp(),
            _ => (-u * u * self.sigma2_sq / (2.0 * nf) - self.psi2(u) / nf).exp(),
        }
    }

    /// `|phi1 - phi2| / u` for the marginals with `N(0, 1/(8n))` removed.
    pub fn t1_objective(&self, u: f64) -> f64 {
        let nf = self.n as f64;
        let v = u / self.u_n;
        let excess = self.a_n * self.u_n * self.u_n * m0_excess(v);
        let base = u * u * (SIGMA_SQ - self.sigma2_sq) / (2.0 * nf) - self.psi1(u) / nf;
        let (e1, e2) = (base - u * u * self.a_n / (2.0 * nf), base - u * u * self.a_n / (2.0 * nf) - excess / nf);
        let d = (e1 - e2).abs();
        e1.max(e2).exp() * (-(-d).exp_m1()) / u
    }

    /// `n^{-9/4} / (2 sqrt(log n))`.
    pub fn t1_cap(&self) -> f64 {
        let nf = self.n as f64;
        nf.powf(-2.25) / (2.0 * nf.ln().sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JrT1 {
    /// Certified sup over all `u`.
    pub sup: SupResult,
    /// Largest objective value found strictly inside the band.
    pub in_band: f64,
    pub cap: f64,
}

/// Computes `T_1` between the reduced marginals and checks it against the cap.
pub fn jr_t1_bound(c: &JrConstruction) -> Result<JrT1> {
    let f = |u: f64| -> Result<f64> { Ok(c.t1_objective(u)) };
    let band = SupSearchConfig {
        u_min: 1e-3,
        u_max: c.u_n * (1.0 - 1e-9),
        coarse_points: 1 << 12,
        refine_iters: 40,
        top_k: 4,
        tail_certificate: Some(0.0),
    };
    let in_band = sup_search(&f, 1.0, &band)?.lower;
    let u_max = 2.0 * c.u_n;
    let nf = c.n as f64;
    let outer = SupSearchConfig {
        u_min: c.u_n,
        u_max,
        coarse_points: 1 << 14,
        refine_iters: 60,
        top_k: 8,
        tail_certificate: Some((-7.0 * u_max * u_max / (16.0 * nf)).exp() / u_max),
    };
    let mut sup = sup_search(&f, 1.0, &outer)?;
    if in_band > sup.lower {
        sup.lower = in_band;
        sup.upper = in_band + sup.tail;
    }
    sup.certified = sup.tail <= sup.lower || sup.upper <= c.t1_cap();
    let cap = c.t1_cap();
    if sup.upper > cap {
        return Err(Error::ConstructionDefect(format!(
            "T1 = {:.3e} exceeds the cap {cap:.3e} at n = {}",
            sup.upper, c.n
        )));
    }
    Ok(JrT1 { sup, in_band, cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JrRow {
    pub n: u64,
    pub a_n: f64,
    pub u_n: f64,
    pub c_n: f64,
    pub t1_cap: f64,
    /// Certified sup search value, for `n` up to the search limit.
    pub t1_computed: Option<f64>,
    /// Per-increment TV bound with `T_1` replaced by the cap.
    pub tv_bound: f64,
    pub n_tv: f64,
    /// `sqrt(n * tv_bound)`.
    pub product_bound: f64,
    /// `(32/pi)^{1/6} C_n^{2/3} / (n (log n)^{1/3})`.
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JrSequence {
    pub rows: Vec<JrRow>,
    /// Smallest `n` from which the product bound decreases strictly.
    pub decreasing_from: Option<u64>,
}

/// Sample sizes above this skip the sup search and rely on the cap.
pub const JR_SEARCH_LIMIT: u64 = 10_000;

/// One decay row. `search` runs the certified `T_1` sup search as well.
pub fn jr_row(n: u64, r: f64, k_budget: f64, search: bool) -> Result<JrRow> {
    let c = jr_build(n, r, k_budget)?;
    let t1_computed = if search { Some(jr_t1_bound(&c)?.sup.upper) } else { None };
    let nf = n as f64;
    let t = 1.0 / nf;
    let cap = c.t1_cap();
    let tv = toscani_tv_formula(t, SIGMA_SQ.sqrt(), cap, c.moment_max);
    let c_n = c.moment_max.sqrt();
    let closed_form = (32.0 / PI).powf(1.0 / 6.0) * c_n.powf(2.0 / 3.0) / (nf * nf.ln().cbrt());
    Ok(JrRow {
        n,
        a_n: c.a_n,
        u_n: c.u_n,
        c_n,
        t1_cap: cap,
        t1_computed,
        tv_bound: tv,
        n_tv: nf * tv,
        product_bound: (nf * tv).sqrt(),
        closed_form,
    })
}

pub fn jr_tv_sequence(r: f64, ns: &[u64], k_budget: f64) -> Result<JrSequence> {
    let rows = ns.iter().map(|&n| jr_row(n, r, k_budget, n <= JR_SEARCH_LIMIT)).collect::<Result<Vec<_>>>()?;
    let mut decreasing_from = rows.last().map(|r| r.n);
    for i in (1..rows.len()).rev() {
        if rows[i].product_bound < rows[i - 1].product_bound {
            decreasing_from = Some(rows[i - 1].n);
        } else {
            break;
        }
    }
    Ok(JrSequence { rows, decreasing_from })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m0_is_parabolic_on_the_band() {
        let c0 = 9.0 / 8.0 - 1.0 / 96.0;
        for i in 0..=100 {
            let v = i as f64 / 100.0;
            assert!((m0(v) - (c0 - 0.5 * v * v)).abs() < 1e-14, "v = {v}");
        }
        assert_eq!(m0(2.0), 0.0);
        assert!(m0(1.5) > 0.0);
        for v in [0.0, 0.25, 0.5, 0.99, 1.0] {
            assert!(m0_excess(v).abs() < 1e-17);
        }
        for v in [1.1, 1.4, 1.9, 2.0, 3.0] {
            let direct = m0(0.0) - m0(v) - 0.5 * v * v;
            assert!((m0_excess(v) - direct).abs() < 1e-13, "v = {v}");
        }
    }

    #[test]
    fn template_inverts_m0() {
        // int h0 = m0(0) and int (1 - cos vy) h0 = m0(0) - m0(v)
        let total = template_moment(true, |_| 1.0) - template_moment(false, |_| 1.0);
        assert!((total - m0(0.0)).abs() < 1e-9, "{total}");
        for v in [0.3, 0.9, 1.2, 1.7, 2.5] {
            let lhs = psi0_pos_direct(v) - psi0_neg(v);
            assert!((lhs - (m0(0.0) - m0(v))).abs() < 1e-9, "v = {v}: {lhs}");
        }
    }

    #[test]
    fn formulas_for_n_100() {
        let c = jr_build(100, 1.5, 10.0).unwrap();
        let nl = 100f64 * 100f64.ln();
        assert_eq!(c.a_n, nl.powf(-0.25));
        assert!((c.u_n - 42.919).abs() < 1e-3);
    }
}
