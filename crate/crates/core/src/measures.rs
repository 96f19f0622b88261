//! Lévy measures, triplets and their truncations.
//!
//! A triplet `(b, sigma, nu)` uses the compensator `1{|x| <= 1}`. At a
//! truncation level `eps` the jumps split into the small part `|x| <= eps` and
//! the big part `|x| > eps`; the big part is a compound Poisson process with
//! intensity `lambda(eps)` and normalized jump law `F_eps`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, invalid, Error, Result};
use crate::quad::{self, Quad, QuadConfig};
use crate::rng::CounterRng;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub rate: f64,
}

/// Power-law density `c_pos x^{-1-alpha}` on `(0, cutoff]` and
/// `c_neg |x|^{-1-alpha}` on `[-cutoff, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StablePower {
    pub c_pos: f64,
    pub c_neg: f64,
    pub alpha: f64,
    /// `f64::INFINITY` for the full line.
    pub cutoff: f64,
}

impl StablePower {
    pub fn symmetric(c: f64, alpha: f64) -> Self {
        Self { c_pos: c, c_neg: c, alpha, cutoff: 1.0 }
    }

    /// Only positive jumps.
    pub fn one_sided(c: f64, alpha: f64) -> Self {
        Self { c_pos: c, c_neg: 0.0, alpha, cutoff: 1.0 }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn validate(&self) -> Result<()> {
        ensure((0.0..2.0).contains(&self.alpha), || format!("alpha must lie in [0, 2), got {}", self.alpha))?;
        ensure(self.c_pos >= 0.0 && self.c_neg >= 0.0, || "power-law constants must be non-negative".into())?;
        ensure(self.c_pos + self.c_neg > 0.0, || "power-law measure needs a positive constant".into())?;
        ensure(self.cutoff > 0.0, || format!("cutoff must be positive, got {}", self.cutoff))?;
        ensure(self.cutoff.is_finite() || self.alpha > 0.0, || "full-line power law needs alpha > 0".into())
    }

    fn c_sum(&self) -> f64 {
        self.c_pos + self.c_neg
    }

    /// `int_lo^hi m^{k - 1 - alpha} dm` with `hi` possibly infinite.
    fn radial(&self, k: f64, lo: f64, hi: f64) -> Result<f64> {
        let hi = hi.min(self.cutoff);
        if hi <= lo {
            return Ok(0.0);
        }
        let e = k - self.alpha;
        if lo == 0.0 && e <= 0.0 {
            return Err(Error::Integrability(format!(
                "power law with alpha = {} has no finite moment of order {k} at 0",
                self.alpha
            )));
        }
        if hi.is_infinite() && e >= 0.0 {
            return Err(Error::Integrability(format!(
                "full-line power law with alpha = {} has no finite moment of order {k} at infinity",
                self.alpha
            )));
        }
        if e == 0.0 {
            return Ok((hi / lo).ln());
        }
        let top = if hi.is_infinite() { 0.0 } else { hi.powf(e) };
        let bottom = if lo == 0.0 { 0.0 } else { lo.powf(e) };
        Ok((top - bottom) / e)
    }

    fn density(&self, x: f64) -> f64 {
        let a = x.abs();
        if a == 0.0 || a > self.cutoff {
            return 0.0;
        }
        let c = if x > 0.0 { self.c_pos } else { self.c_neg };
        c * a.powf(-1.0 - self.alpha)
    }
}

/// Measure given by a density, with support `[lo, hi]` (possibly infinite ends).
#[derive(Clone)]
pub struct DensityMeasure {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lo: f64,
    pub hi: f64,
    pub label: String,
}

impl fmt::Debug for DensityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMeasure")
            .field("label", &self.label)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl DensityMeasure {
    pub fn new(
        label: impl Into<String>,
        lo: f64,
        hi: f64,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        ensure(lo < hi, || format!("empty support [{lo}, {hi}]"))?;
        Ok(Self { density: Arc::new(density), lo, hi, label: label.into() })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 || x < self.lo || x > self.hi {
            0.0
        } else {
            (self.density)(x)
        }
    }

    /// Range of magnitudes `m` with `sign * m` in the support.
    fn side_range(&self, sign: f64) -> Option<(f64, f64)> {
        let (a, b) = if sign > 0.0 { (self.lo.max(0.0), self.hi) } else { ((-self.hi).max(0.0), -self.lo) };
        (b > a).then_some((a, b))
    }

    /// `int_{lo < m <= hi} w(m) f(sign m) dm` over one side.
    fn side_integral(&self, sign: f64, lo: f64, hi: f64, w: &dyn Fn(f64) -> f64, cfg: &QuadConfig) -> Result<Quad> {
        let Some((a, b)) = self.side_range(sign) else {
            return Ok(Quad::ZERO);
        };
        let lo = lo.max(a);
        let hi = hi.min(b);
        if hi <= lo {
            return Ok(Quad::ZERO);
        }
        let g = |m: f64| w(m) * self.eval(sign * m);
        match (lo == 0.0, hi.is_infinite()) {
            (false, false) => quad::integrate(&g, lo, hi, cfg),
            (true, false) => quad::integrate_from_zero(&g, hi, cfg),
            (false, true) => quad::integrate_to_infinity(&g, lo, cfg),
            (true, true) => {
                let l = quad::integrate_from_zero(&g, 1.0, cfg)?;
                let r = quad::integrate_to_infinity(&g, 1.0, cfg)?;
                Ok(Quad { value: l.value + r.value, abs_err: l.abs_err + r.abs_err })
            }
        }
    }

    fn both_sides(&self, lo: f64, hi: f64, w: &dyn Fn(f64) -> f64, signed: bool) -> Result<f64> {
        let cfg = QuadConfig::default();
        let p = self.side_integral(1.0, lo, hi, w, &cfg)?.value;
        let n = self.side_integral(-1.0, lo, hi, w, &cfg)?.value;
        Ok(if signed { p - n } else { p + n })
    }
}

#[derive(Debug, Clone)]
pub enum LevyMeasure {
    Zero,
    /// Atoms at `+-eps0`, each with rate `scale / (2 eps0^2)`.
    TwoPoint {
        eps0: f64,
        scale: f64,
    },
    StablePower(StablePower),
    /// Finitely many atoms, sorted by location.
    Discrete(Vec<Atom>),
    Density(DensityMeasure),
}

impl LevyMeasure {
    pub fn two_point(eps0: f64, scale: f64) -> Result<Self> {
        ensure(eps0 > 0.0 && eps0.is_finite(), || format!("two-point location must be positive, got {eps0}"))?;
        ensure(scale > 0.0 && scale.is_finite(), || format!("two-point scale must be positive, got {scale}"))?;
        Ok(Self::TwoPoint { eps0, scale })
    }

    pub fn stable_power(sp: StablePower) -> Result<Self> {
        sp.validate()?;
        Ok(Self::StablePower(sp))
    }

    pub fn discrete(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let mut v: Vec<Atom> = Vec::new();
        for a in atoms {
            ensure(a.x.is_finite() && a.x != 0.0, || {
                format!("atom location must be finite and non-zero, got {}", a.x)
            })?;
            ensure(a.rate >= 0.0 && a.rate.is_finite(), || {
                format!("atom rate must be finite and non-negative, got {}", a.rate)
            })?;
            if a.rate > 0.0 {
                v.push(a);
            }
        }
        v.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(v.len());
        for a in v {
            match merged.last_mut() {
                Some(last) if last.x == a.x => last.rate += a.rate,
                _ => merged.push(a),
            }
        }
        if merged.is_empty() {
            return Ok(Self::Zero);
        }
        Ok(Self::Discrete(merged))
    }

    pub fn density(d: DensityMeasure) -> Self {
        Self::Density(d)
    }

    /// Atoms of a purely atomic measure.
    pub fn atoms(&self) -> Option<Vec<Atom>> {
        match self {
            Self::Zero => Some(Vec::new()),
            Self::TwoPoint { eps0, scale } => {
                let r = scale / (2.0 * eps0 * eps0);
                Some(vec![Atom { x: -eps0, rate: r }, Atom { x: *eps0, rate: r }])
            }
            Self::Discrete(a) => Some(a.clone()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::TwoPoint { scale, .. } => *scale == 0.0,
            Self::Discrete(a) => a.iter().all(|a| a.rate == 0.0),
            _ => false,
        }
    }

    pub fn is_finite_activity(&self) -> bool {
        match self {
            Self::StablePower(_) => false,
            Self::Density(_) => self.total_mass().is_ok_and(f64::is_finite),
            _ => true,
        }
    }

    pub fn total_mass(&self) -> Result<f64> {
        match self {
            Self::StablePower(_) => Ok(f64::INFINITY),
            Self::Density(d) => d.both_sides(0.0, f64::INFINITY, &|_| 1.0, false),
            _ => Ok(self.atoms().unwrap().iter().map(|a| a.rate).sum()),
        }
    }

    /// `int_{0 < |x| <= eps} |x|^q nu(dx)`.
    pub fn abs_moment_inside(&self, q: f64, eps: f64) -> Result<f64> {
        ensure(eps >= 0.0, || format!("truncation level must be non-negative, got {eps}"))?;
        match self {
            Self::StablePower(sp) => Ok(sp.c_sum() * sp.radial(q, 0.0, eps)?),
            Self::Density(d) => d.both_sides(0.0, eps, &|m| m.powf(q), false),
            _ => {
                Ok(self.atoms().unwrap().iter().filter(|a| a.x.abs() <= eps).map(|a| a.rate * a.x.abs().powf(q)).sum())
            }
        }
    }

    /// Small-jump variance `int_{|x| <= eps} x^2 nu(dx)`.
    pub fn sigma_bar_sq(&self, eps: f64) -> Result<f64> {
        self.abs_moment_inside(2.0, eps)
    }

    /// Big-jump intensity `nu(|x| > eps)`.
    pub fn mass_outside(&self, eps: f64) -> Result<f64> {
        self.abs_moment_outside(0.0, eps)
    }

    /// `int_{|x| > eps} |x|^q nu(dx)`.
    pub fn abs_moment_outside(&self, q: f64, eps: f64) -> Result<f64> {
        ensure(eps > 0.0, || format!("truncation level must be positive, got {eps}"))?;
        match self {
            Self::StablePower(sp) => Ok(sp.c_sum() * sp.radial(q, eps, f64::INFINITY)?),
            Self::Density(d) => d.both_sides(eps, f64::INFINITY, &|m| m.powf(q), false),
            _ => Ok(self.atoms().unwrap().iter().filter(|a| a.x.abs() > eps).map(|a| a.rate * a.x.abs().powf(q)).sum()),
        }
    }

    /// Signed first moment `int_{lo < |x| <= hi} x nu(dx)`.
    pub fn signed_moment_band(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        match self {
            Self::StablePower(sp) => {
                let d = sp.c_pos - sp.c_neg;
                if d == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(d * sp.radial(1.0, lo, hi)?)
                }
            }
            Self::Density(d) => d.both_sides(lo, hi, &|m| m, true),
            _ => Ok(self
                .atoms()
                .unwrap()
                .iter()
                .filter(|a| a.x.abs() > lo && a.x.abs() <= hi)
                .map(|a| a.rate * a.x)
                .sum()),
        }
    }

    /// Restriction of the measure to `|x| <= eps`.
    pub fn restrict_inside(&self, eps: f64) -> LevyMeasure {
        match self {
            Self::Zero => Self::Zero,
            Self::TwoPoint { eps0, .. } => {
                if *eps0 <= eps {
                    self.clone()
                } else {
                    Self::Zero
                }
            }
            Self::StablePower(sp) => Self::StablePower(StablePower { cutoff: sp.cutoff.min(eps), ..*sp }),
            Self::Discrete(a) => {
                let kept: Vec<Atom> = a.iter().copied().filter(|a| a.x.abs() <= eps).collect();
                if kept.is_empty() {
                    Self::Zero
                } else {
                    Self::Discrete(kept)
                }
            }
            Self::Density(d) => Self::Density(DensityMeasure { lo: d.lo.max(-eps), hi: d.hi.min(eps), ..d.clone() }),
        }
    }

    /// Pointwise density of the absolutely continuous part.
    pub fn density_at(&self, x: f64) -> f64 {
        match self {
            Self::StablePower(sp) => sp.density(x),
            Self::Density(d) => d.eval(x),
            _ => 0.0,
        }
    }

    /// `int (e^{iux} - 1 - iux 1{|x| <= 1}) nu(dx)`.
    pub fn char_integral(&self, u: f64) -> Result<Complex64> {
        match self {
            Self::StablePower(sp) => stable_char_integral(sp, u),
            Self::Density(d) => density_char_integral(d, u),
            _ => Ok(self
                .atoms()
                .unwrap()
                .iter()
                .map(|a| {
                    let ux = u * a.x;
                    let comp = if a.x.abs() <= 1.0 { ux } else { 0.0 };
                    a.rate * Complex64::new(ux.cos() - 1.0, ux.sin() - comp)
                })
                .sum()),
        }
    }

    /// Squared Hellinger distance `int (sqrt(d nu1) - sqrt(d nu2))^2`, no factor 1/2.
    pub fn hellinger_sq(&self, other: &LevyMeasure) -> Result<f64> {
        match (self.atoms(), other.atoms()) {
            (Some(a), Some(b)) => Ok(atomic_hellinger_sq(&a, &b)),
            (Some(a), None) => {
                let m = other.total_mass()?;
                Ok(a.iter().map(|x| x.rate).sum::<f64>()
                    + finite_or_diverge(m, "Hellinger distance to a measure of infinite mass")?)
            }
            (None, Some(b)) => {
                let m = self.total_mass()?;
                Ok(b.iter().map(|x| x.rate).sum::<f64>()
                    + finite_or_diverge(m, "Hellinger distance to a measure of infinite mass")?)
            }
            (None, None) => continuous_hellinger_sq(self, other),
        }
    }
}

fn finite_or_diverge(m: f64, what: &str) -> Result<f64> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Integrability(what.into()))
    }
}

fn atomic_hellinger_sq(a: &[Atom], b: &[Atom]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        let (r1, r2) = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.x == y.x => {
                i += 1;
                j += 1;
                (x.rate, y.rate)
            }
            (Some(x), Some(y)) if x.x < y.x => {
                i += 1;
                (x.rate, 0.0)
            }
            (Some(_), Some(y)) => {
                j += 1;
                (0.0, y.rate)
            }
            (Some(x), None) => {
                i += 1;
                (x.rate, 0.0)
            }
            (None, Some(y)) => {
                j += 1;
                (0.0, y.rate)
            }
            (None, None) => unreachable!(),
        };
        let d = r1.sqrt() - r2.sqrt();
        s += d * d;
    }
    s
}

fn continuous_hellinger_sq(m1: &LevyMeasure, m2: &LevyMeasure) -> Result<f64> {
    let cfg = QuadConfig::default();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let g = |m: f64| {
            let d = m1.density_at(sign * m).sqrt() - m2.density_at(sign * m).sqrt();
            d * d
        };
        let near = quad::integrate_from_zero(&g, 1.0, &cfg)?;
        let far = quad::integrate_to_infinity(&g, 1.0, &cfg)?;
        total += near.value + far.value;
    }
    Ok(total)
}

/// Closed forms on the full line, numeric integration with a finite cutoff.
fn stable_char_integral(sp: &StablePower, u: f64) -> Result<Complex64> {
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = sp.alpha;
    let au = u.abs();
    if sp.cutoff.is_infinite() {
        let re = if a == 1.0 { -PI / 2.0 * au } else { gamma(-a) * (PI * a / 2.0).cos() * au.powf(a) };
        let im = if a == 1.0 {
            u * (1.0 - EULER_GAMMA - au.ln())
        } else {
            -gamma(-a) * (PI * a / 2.0).sin() * au.powf(a) * u.signum() - u / (1.0 - a)
        };
        return Ok(Complex64::new(sp.c_sum() * re, (sp.c_pos - sp.c_neg) * im));
    }
    let r = sp.cutoff;
    let w = |m: f64| m.powf(-1.0 - a);
    let re_f = |m: f64| (-2.0 * (0.5 * u * m).sin().powi(2)) * w(m);
    let im_f = |m: f64| compensated_sin(u * m, m <= 1.0) * w(m);
    let cfg = QuadConfig::default();
    let re = oscillatory_radial(&re_f, u, r, &[], &cfg)?;
    let im = if sp.c_pos == sp.c_neg { 0.0 } else { oscillatory_radial(&im_f, u, r, &[1.0], &cfg)? };
    Ok(Complex64::new(sp.c_sum() * re, (sp.c_pos - sp.c_neg) * im))
}

/// `sin(x) - x` when `compensate`, else `sin(x)`; the difference uses its
/// series near 0 where subtraction would cancel.
fn compensated_sin(x: f64, compensate: bool) -> f64 {
    if !compensate {
        return x.sin();
    }
    if x.abs() > 0.5 {
        return x.sin() - x;
    }
    let x2 = x * x;
    let mut term = -x * x2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-17 * sum.abs() {
        term *= -x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `int_0^r g(m) dm` for an integrand oscillating at frequency `u`, with a
/// power singularity at 0.
fn oscillatory_radial(g: &dyn Fn(f64) -> f64, u: f64, r: f64, breaks: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let x0 = r.min(1.0 / u.abs());
    let mut v = quad::integrate_from_zero(g, x0, cfg)?.value;
    let mut lo = x0;
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > x0 && b < r).collect();
    pts.push(r);
    for p in pts {
        v += quad::integrate_periods(g, u, lo, p, cfg)?.value;
        lo = p;
    }
    Ok(v)
}

fn density_char_integral(d: &DensityMeasure, u: f64) -> Result<Complex64> {
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cfg = QuadConfig::default();
    let tol = 1e-11;
    let mut out = Complex64::new(0.0, 0.0);
    for sign in [1.0, -1.0] {
        let Some((_, b)) = d.side_range(sign) else {
            continue;
        };
        let mut r = b;
        if r.is_infinite() {
            // tail beyond r contributes at most 2 nu(|x| > r)
            r = 1.0;
            loop {
                let tail = d.side_integral(sign, r, f64::INFINITY, &|_| 1.0, &cfg)?.value;
                if 2.0 * tail < tol {
                    break;
                }
                r *= 2.0;
                if r > 1e12 {
                    return Err(Error::Integrability("density tail too heavy for characteristic integral".into()));
                }
            }
        }
        let f = |m: f64| d.eval(sign * m);
        let re_f = |m: f64| -2.0 * (0.5 * u * m).sin().powi(2) * f(m);
        let im_f = |m: f64| compensated_sin(sign * u * m, m <= 1.0) * f(m);
        out.re += oscillatory_radial(&re_f, u, r, &[], &cfg)?;
        out.im += oscillatory_radial(&im_f, u, r, &[1.0], &cfg)?;
    }
    Ok(out)
}

/// Generating triplet `(b, sigma, nu)`.
#[derive(Debug, Clone)]
pub struct LevyTriplet {
    pub b: f64,
    pub sigma: f64,
    pub nu: LevyMeasure,
}

impl LevyTriplet {
    pub fn new(b: f64, sigma: f64, nu: LevyMeasure) -> Result<Self> {
        ensure(b.is_finite(), || format!("drift must be finite, got {b}"))?;
        ensure(sigma >= 0.0 && sigma.is_finite(), || {
            format!("volatility must be finite and non-negative, got {sigma}")
        })?;
        Ok(Self { b, sigma, nu })
    }

    pub fn brownian(b: f64, sigma: f64) -> Result<Self> {
        Self::new(b, sigma, LevyMeasure::Zero)
    }

    /// Characteristic exponent `psi(u)` with `E e^{iuX_t} = e^{t psi(u)}`.
    pub fn char_exponent(&self, u: f64) -> Result<Complex64> {
        Ok(Complex64::new(-0.5 * self.sigma * self.sigma * u * u, self.b * u) + self.nu.char_integral(u)?)
    }

    /// Drift `b(eps) = b - int_{eps < |x| <= 1} x nu(dx)`.
    pub fn drift_at(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(self.b - self.nu.signed_moment_band(eps, 1.0)?)
    }

    /// Drift without compensation, `b - int_{|x| <= 1} x nu(dx)`.
    pub fn uncompensated_drift(&self) -> Result<f64> {
        Ok(self.b - self.nu.signed_moment_band(0.0, 1.0)?)
    }

    /// `E X_1 = b + int_{|x| > 1} x nu(dx)`.
    pub fn mean_rate(&self) -> Result<f64> {
        let big = self.nu.signed_moment_band(1.0, f64::INFINITY)?;
        self.nu.abs_moment_outside(1.0, 1.0)?;
        Ok(self.b + big)
    }

    /// `E X_t^2`.
    pub fn second_moment(&self, t: f64) -> Result<f64> {
        let var =
            self.sigma * self.sigma + self.nu.abs_moment_inside(2.0, 1.0)? + self.nu.abs_moment_outside(2.0, 1.0)?;
        let m = t * self.mean_rate()?;
        Ok(t * var + m * m)
    }

    pub fn truncate(&self, eps: f64) -> Result<TruncationView> {
        TruncationView::new(self, eps)
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    ensure(eps > 0.0 && eps <= 1.0, || format!("truncation level must lie in (0, 1], got {eps}"))
}

/// Split of a triplet at level `eps`.
#[derive(Debug, Clone)]
pub struct TruncationView {
    pub eps: f64,
    pub sigma: f64,
    pub sigma_bar_sq: f64,
    /// `nu(|x| > eps)`.
    pub lambda: f64,
    /// `b(eps)`.
    pub drift: f64,
    /// `None` when `lambda == 0`.
    pub law: Option<JumpLaw>,
}

impl TruncationView {
    pub fn new(tr: &LevyTriplet, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let lambda = tr.nu.mass_outside(eps)?;
        let law = if lambda > 0.0 { Some(JumpLaw::big_jumps(&tr.nu, eps)?) } else { None };
        Ok(Self { eps, sigma: tr.sigma, sigma_bar_sq: tr.nu.sigma_bar_sq(eps)?, lambda, drift: tr.drift_at(eps)?, law })
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar_sq.sqrt()
    }
}

/// Probability law of a single jump.
#[derive(Debug, Clone)]
pub enum JumpLaw {
    Discrete {
        xs: Vec<f64>,
        probs: Vec<f64>,
        cdf: Vec<f64>,
    },
    /// Normalized power law on `lo < |x| <= hi`.
    Power {
        sp: StablePower,
        lo: f64,
        hi: f64,
        mass: f64,
    },
    /// Normalized density on `|x| > lo`, with a tabulated quantile function.
    Tabulated {
        d: DensityMeasure,
        lo: f64,
        mass: f64,
        xs: Vec<f64>,
        cdf: Vec<f64>,
    },
}

impl JumpLaw {
    pub fn discrete(atoms: &[Atom]) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.rate).sum();
        if total <= 0.0 {
            return Err(Error::DegenerateLaw("jump law with zero mass".into()));
        }
        let mut sorted: Vec<Atom> = atoms.to_vec();
        sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
        let xs: Vec<f64> = sorted.iter().map(|a| a.x).collect();
        let probs: Vec<f64> = sorted.iter().map(|a| a.rate / total).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self::Discrete { xs, probs, cdf })
    }

    /// Normalized restriction of `nu` to `|x| > eps`.
    pub fn big_jumps(nu: &LevyMeasure, eps: f64) -> Result<Self> {
        let mass = nu.mass_outside(eps)?;
        if mass <= 0.0 {
            return Err(Error::DegenerateLaw(format!("no jumps above {eps}")));
        }
        match nu {
            LevyMeasure::StablePower(sp) => Ok(Self::Power { sp: *sp, lo: eps, hi: sp.cutoff, mass }),
            LevyMeasure::Density(d) => Self::tabulate(d, eps, mass),
            _ => {
                let atoms: Vec<Atom> = nu.atoms().unwrap().into_iter().filter(|a| a.x.abs() > eps).collect();
                Self::discrete(&atoms)
            }
        }
    }

    fn tabulate(d: &DensityMeasure, eps: f64, mass: f64) -> Result<Self> {
        let cfg = QuadConfig { rel_tol: 1e-9, ..QuadConfig::default() };
        // cells (m_lo, m_hi, mass) per side, ordered outward from eps
        let mut sides: Vec<Vec<(f64, f64, f64)>> = Vec::new();
        for sign in [-1.0, 1.0] {
            let mut cells = Vec::new();
            if let Some((a, b)) = d.side_range(sign) {
                let mut lo = eps.max(a);
                let side_mass = d.side_integral(sign, lo, b, &|_| 1.0, &cfg)?.value;
                let mut covered = 0.0;
                while lo < b && covered < side_mass * (1.0 - 1e-13) && cells.len() < 200_000 {
                    let hi = (lo * 1.02).min(b);
                    let m = d.side_integral(sign, lo, hi, &|_| 1.0, &cfg)?.value;
                    cells.push((lo, hi, m));
                    covered += m;
                    lo = hi;
                }
            }
            sides.push(cells);
        }
        let mut xs = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        if let Some(far) = sides[0].last() {
            xs.push(-far.1);
            cdf.push(0.0);
            for c in sides[0].iter().rev() {
                acc += c.2;
                xs.push(-c.0);
                cdf.push(acc / mass);
            }
        }
        if let Some(near) = sides[1].first() {
            xs.push(near.0);
            cdf.push(acc / mass);
            for c in &sides[1] {
                acc += c.2;
                xs.push(c.1);
                cdf.push(acc / mass);
            }
        }
        if xs.len() < 2 {
            return Err(Error::DegenerateLaw("tabulated jump law is empty".into()));
        }
        let last = cdf.len() - 1;
        cdf[last] = 1.0;
        Ok(Self::Tabulated { d: d.clone(), lo: eps, mass, xs, cdf })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::Discrete { .. })
    }

    /// `E|Y|^p`.
    pub fn abs_moment(&self, p: f64) -> Result<f64> {
        match self {
            Self::Discrete { xs, probs, .. } => Ok(xs.iter().zip(probs).map(|(x, q)| q * x.abs().powf(p)).sum()),
            Self::Power { sp, lo, hi, mass } => Ok(sp.c_sum() * sp.radial(p, *lo, *hi)? / mass),
            Self::Tabulated { d, lo, mass, .. } => Ok(d.both_sides(*lo, f64::INFINITY, &|m| m.powf(p), false)? / mass),
        }
    }

    /// Quantile function on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Discrete { xs, cdf, .. } => {
                let i = cdf.partition_point(|&c| c < u);
                xs[i.min(xs.len() - 1)]
            }
            Self::Power { sp, lo, hi, .. } => {
                let wneg = sp.c_neg / sp.c_sum();
                if u < wneg {
                    -power_magnitude(sp.alpha, *lo, *hi, 1.0 - u / wneg)
                } else {
                    power_magnitude(sp.alpha, *lo, *hi, (u - wneg) / (1.0 - wneg))
                }
            }
            Self::Tabulated { xs, cdf, .. } => {
                let i = cdf.partition_point(|&c| c < u).clamp(1, xs.len() - 1);
                let (c0, c1) = (cdf[i - 1], cdf[i]);
                if c1 <= c0 {
                    return xs[i];
                }
                xs[i - 1] + (xs[i] - xs[i - 1]) * (u - c0) / (c1 - c0)
            }
        }
    }

    /// Atoms where the quantile function jumps (discrete laws only).
    fn cdf_breaks(&self) -> Vec<f64> {
        match self {
            Self::Discrete { cdf, .. } => cdf[..cdf.len() - 1].to_vec(),
            Self::Power { sp, .. } => vec![sp.c_neg / sp.c_sum()],
            Self::Tabulated { xs, cdf, .. } => {
                let mut v = Vec::new();
                for i in 1..xs.len() {
                    if xs[i - 1] < 0.0 && xs[i] > 0.0 {
                        v.push(cdf[i - 1]);
                    }
                }
                v
            }
        }
    }

    pub fn sample(&self, rng: &mut CounterRng) -> f64 {
        match self {
            Self::Discrete { xs, cdf, .. } if xs.len() <= 2 => {
                let u = rng.uniform();
                if u <= cdf[0] {
                    xs[0]
                } else {
                    xs[xs.len() - 1]
                }
            }
            _ => self.quantile(rng.uniform()),
        }
    }

    /// Density of the absolutely continuous law at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Self::Discrete { .. } => 0.0,
            Self::Power { sp, lo, hi, mass } => {
                if x.abs() > *lo && x.abs() <= *hi {
                    sp.density(x) / mass
                } else {
                    0.0
                }
            }
            Self::Tabulated { d, lo, mass, .. } => {
                if x.abs() > *lo {
                    d.eval(x) / mass
                } else {
                    0.0
                }
            }
        }
    }

    fn support_bound(&self) -> (f64, f64) {
        match self {
            Self::Discrete { xs, .. } => (xs[0], xs[xs.len() - 1]),
            Self::Power { sp, lo, hi, .. } => {
                (if sp.c_neg > 0.0 { -hi } else { *lo }, if sp.c_pos > 0.0 { *hi } else { -lo })
            }
            Self::Tabulated { xs, .. } => (xs[0], xs[xs.len() - 1]),
        }
    }
}

fn power_magnitude(alpha: f64, lo: f64, hi: f64, v: f64) -> f64 {
    if alpha == 0.0 {
        return lo * (hi / lo).powf(v);
    }
    let a = lo.powf(-alpha);
    let b = if hi.is_infinite() { 0.0 } else { hi.powf(-alpha) };
    (a - v * (a - b)).powf(-1.0 / alpha)
}

/// `W_p` between two jump laws by the monotone (quantile) coupling.
pub fn jump_law_wp(p: f64, a: &JumpLaw, b: &JumpLaw) -> Result<f64> {
    ensure(p >= 1.0, || format!("order p must be at least 1, got {p}"))?;
    if let (JumpLaw::Discrete { xs: x1, cdf: c1, .. }, JumpLaw::Discrete { xs: x2, cdf: c2, .. }) = (a, b) {
        return Ok(discrete_wp(p, x1, c1, x2, c2));
    }
    a.abs_moment(p)?;
    b.abs_moment(p)?;
    let mut breaks = a.cdf_breaks();
    breaks.extend(b.cdf_breaks());
    let f = |u: f64| (a.quantile(u) - b.quantile(u)).abs().powf(p);
    let cfg = QuadConfig { rel_tol: 1e-9, abs_tol: 1e-13, max_intervals: 20_000 };
    let mut pts: Vec<f64> = breaks.into_iter().filter(|&x| x > 0.0 && x < 1.0).collect();
    pts.push(0.5);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    let mut lo = 0.0;
    for &m in pts.iter().chain(std::iter::once(&1.0)) {
        // endpoints of (0,1) may be singular for unbounded laws
        let mid = 0.5 * (lo + m);
        let left = if lo == 0.0 {
            quad::integrate_from_zero(&|s: f64| f(s), mid, &cfg)?.value
        } else {
            quad::integrate(&f, lo, mid, &cfg)?.value
        };
        let right = if m == 1.0 {
            quad::integrate_from_zero(&|s: f64| f(1.0 - s), 1.0 - mid, &cfg)?.value
        } else {
            quad::integrate(&f, mid, m, &cfg)?.value
        };
        total += left + right;
        lo = m;
    }
    Ok(total.powf(1.0 / p))
}

fn discrete_wp(p: f64, x1: &[f64], c1: &[f64], x2: &[f64], c2: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut acc = 0.0;
    while i < x1.len() && j < x2.len() {
        let next = c1[i].min(c2[j]);
        acc += (next - prev) * (x1[i] - x2[j]).abs().powf(p);
        prev = next;
        if c1[i] <= next {
            i += 1;
        }
        if c2[j] <= next {
            j += 1;
        }
    }
    acc.max(0.0).powf(1.0 / p)
}

/// Total variation between two jump laws.
pub fn jump_law_tv(a: &JumpLaw, b: &JumpLaw) -> Result<f64> {
    match (a, b) {
        (JumpLaw::Discrete { xs: x1, probs: p1, .. }, JumpLaw::Discrete { xs: x2, probs: p2, .. }) => {
            let a1: Vec<Atom> = x1.iter().zip(p1).map(|(&x, &rate)| Atom { x, rate }).collect();
            let a2: Vec<Atom> = x2.iter().zip(p2).map(|(&x, &rate)| Atom { x, rate }).collect();
            Ok(0.5 * l1_atoms(&a1, &a2))
        }
        (JumpLaw::Discrete { .. }, _) | (_, JumpLaw::Discrete { .. }) => Ok(1.0),
        _ => {
            let (l1, h1) = a.support_bound();
            let (l2, h2) = b.support_bound();
            let lo = l1.min(l2);
            let hi = h1.max(h2);
            let mut brk = vec![0.0];
            for law in [a, b] {
                match law {
                    JumpLaw::Power { lo, hi, .. } => brk.extend([-*lo, *lo, -*hi, *hi]),
                    JumpLaw::Tabulated { lo, .. } => brk.extend([-*lo, *lo]),
                    JumpLaw::Discrete { .. } => {}
                }
            }
            brk.retain(|x| x.is_finite());
            let f = |x: f64| (a.pdf(x) - b.pdf(x)).abs();
            let cfg = QuadConfig { rel_tol: 1e-9, abs_tol: 1e-12, max_intervals: 20_000 };
            let mut total = 0.0;
            for sign in [-1.0, 1.0] {
                let g = |m: f64| f(sign * m);
                let mut pts: Vec<f64> = brk.iter().map(|x| x * sign).filter(|&m| m > 0.0).collect();
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                let far = if sign > 0.0 { hi } else { -lo };
                if far <= 0.0 {
                    continue;
                }
                let first = pts.first().copied().unwrap_or(far.min(1.0));
                let mut prev = first;
                for &m in pts.iter().skip(1) {
                    if m > prev && m <= far {
                        total += quad::integrate(&g, prev, m, &cfg)?.value;
                        prev = m;
                    }
                }
                if far.is_infinite() {
                    total += quad::integrate_to_infinity(&g, prev, &cfg)?.value;
                } else if far > prev {
                    total += quad::integrate(&g, prev, far, &cfg)?.value;
                }
            }
            Ok((0.5 * total).min(1.0))
        }
    }
}

fn l1_atoms(a: &[Atom], b: &[Atom]) -> f64 {
    let mut s = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.x == y.x => {
                s += (x.rate - y.rate).abs();
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.x < y.x => {
                s += x.rate;
                i += 1;
            }
            (Some(_), Some(y)) => {
                s += y.rate;
                j += 1;
            }
            (Some(x), None) => {
                s += x.rate;
                i += 1;
            }
            (None, Some(y)) => {
                s += y.rate;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    s
}

/// Rejects measures that are not Lévy measures (`int (x^2 ^ 1) nu = inf`).
pub fn check_levy(nu: &LevyMeasure) -> Result<()> {
    let s = nu.sigma_bar_sq(1.0)?;
    let m = nu.mass_outside(1.0)?;
    if !(s + m).is_finite() {
        return Err(invalid("measure does not integrate x^2 ^ 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn stable_power_closed_forms() {
        let nu = LevyMeasure::stable_power(StablePower::symmetric(1.0, 1.0).with_cutoff(f64::INFINITY)).unwrap();
        assert!(close(nu.mass_outside(0.5).unwrap(), 4.0, 1e-15));
        let nu = LevyMeasure::stable_power(StablePower::symmetric(1.0, 1.0)).unwrap();
        // 2 C eps^{2 - alpha} / (2 - alpha)
        assert!(close(nu.sigma_bar_sq(0.25).unwrap(), 0.5, 1e-15));
        assert!(close(nu.mass_outside(0.5).unwrap(), 2.0, 1e-15));
    }

    #[test]
    fn two_point_functionals() {
        let nu = LevyMeasure::two_point(0.5, 1.0).unwrap();
        assert_eq!(nu.mass_outside(1.0).unwrap(), 0.0);
        assert!(close(nu.sigma_bar_sq(0.5).unwrap(), 1.0, 1e-15));
        assert!(close(nu.mass_outside(0.25).unwrap(), 4.0, 1e-15));
    }

    #[test]
    fn discrete_truncation() {
        let nu = LevyMeasure::discrete([Atom { x: 2.0, rate: 3.0 }]).unwrap();
        let tr = LevyTriplet::new(0.0, 0.0, nu).unwrap();
        let v = tr.truncate(1.0).unwrap();
        assert_eq!(v.lambda, 3.0);
        match v.law.unwrap() {
            JumpLaw::Discrete { xs, probs, .. } => {
                assert_eq!(xs, vec![2.0]);
                assert_eq!(probs, vec![1.0]);
            }
            _ => panic!("expected discrete law"),
        }
    }

    #[test]
    fn divergent_moment_is_an_error() {
        let nu = LevyMeasure::stable_power(StablePower::symmetric(1.0, 1.5)).unwrap();
        assert!(matches!(nu.abs_moment_inside(1.0, 0.5), Err(Error::Integrability(_))));
    }

    #[test]
    fn hellinger_atomic() {
        let a = LevyMeasure::discrete([Atom { x: 1.0, rate: 4.0 }]).unwrap();
        let b = LevyMeasure::discrete([Atom { x: 1.0, rate: 1.0 }, Atom { x: 2.0, rate: 2.0 }]).unwrap();
        assert!(close(a.hellinger_sq(&b).unwrap(), 1.0 + 2.0, 1e-15));
        assert!(close(a.hellinger_sq(&LevyMeasure::Zero).unwrap(), 4.0, 1e-15));
    }

    #[test]
    fn discrete_wp_by_quantile_coupling() {
        let a = JumpLaw::discrete(&[Atom { x: 0.0 + 1.0, rate: 1.0 }]).unwrap();
        let b = JumpLaw::discrete(&[Atom { x: 2.0, rate: 1.0 }, Atom { x: 4.0, rate: 1.0 }]).unwrap();
        assert!(close(jump_law_wp(1.0, &a, &b).unwrap(), 2.0, 1e-15));
        assert!(close(jump_law_wp(2.0, &a, &b).unwrap(), (5.0f64).sqrt(), 1e-15));
    }

    #[test]
    fn compensated_sine_keeps_relative_accuracy() {
        // mpmath: sin(x) - x
        for (x, want) in
            [(1e-3, -1.666_666_583_333_335_3e-10), (0.3, -0.004_479_793_338_660_425), (-0.5, 0.020_574_461_395_797)]
        {
            assert!(close(compensated_sin(x, true), want, 1e-14), "x = {x}");
        }
        assert_eq!(compensated_sin(0.0, true), 0.0);
        assert_eq!(compensated_sin(2.0, false), 2f64.sin());
    }
}
