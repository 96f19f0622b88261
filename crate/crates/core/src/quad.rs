//! Adaptive Gauss-Kronrod quadrature and panel splitting helpers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub abs_err: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad { value: 0.0, abs_err: 0.0 };

    fn add(self, o: Quad) -> Quad {
        Quad { value: self.value + o.value, abs_err: self.abs_err + o.abs_err }
    }
}

// Kronrod nodes and weights, kept at full published precision
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_636_791_800,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
pub fn gk21<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Quad {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * h;
    resabs *= h.abs();
    resasc *= h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Quad { value, abs_err: err }
}

/// Globally adaptive integration on a finite interval.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quad> {
    if a == b {
        return Ok(Quad::ZERO);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    let first = gk21(f, a, b);
    let mut parts = vec![(a, b, first)];
    let mut total = first;
    loop {
        if !total.value.is_finite() {
            return Err(Error::Integrability(format!("non-finite integrand on [{a}, {b}]")));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.value.abs());
        if total.abs_err <= target {
            return Ok(total);
        }
        if parts.len() >= cfg.max_intervals {
            return Err(Error::Accuracy { achieved: total.abs_err, target });
        }
        let (i, _) =
            parts.iter().enumerate().max_by(|x, y| x.1 .2.abs_err.total_cmp(&y.1 .2.abs_err)).expect("non-empty");
        let (lo, hi, q) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Accuracy { achieved: total.abs_err, target });
        }
        let l = gk21(f, lo, mid);
        let r = gk21(f, mid, hi);
        total.value += l.value + r.value - q.value;
        total.abs_err += l.abs_err + r.abs_err - q.abs_err;
        parts.push((lo, mid, l));
        parts.push((mid, hi, r));
        if total.abs_err < 0.0 {
            total.abs_err = parts.iter().map(|p| p.2.abs_err).sum();
        }
    }
}

/// Integrates over `[a, b]` after splitting at the given interior breakpoints.
pub fn integrate_split<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<Quad> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.insert(0, a);
    pts.push(b);
    let mut acc = Quad::ZERO;
    for w in pts.windows(2) {
        acc = acc.add(integrate(f, w[0], w[1], cfg)?);
    }
    Ok(acc)
}

/// Integrates over `(0, eps]` where the integrand may carry an integrable
/// power singularity at zero. Panels halve towards the origin; the remainder
/// is extrapolated geometrically and must be negligible.
pub fn integrate_from_zero<F: Fn(f64) -> f64 + ?Sized>(f: &F, eps: f64, cfg: &QuadConfig) -> Result<Quad> {
    if eps <= 0.0 {
        return Ok(Quad::ZERO);
    }
    let mut acc = Quad::ZERO;
    let mut hi = eps;
    let mut prev = f64::NAN;
    let mut small_run = 0;
    for _ in 0..1100 {
        let lo = 0.5 * hi;
        let q = integrate(f, lo, hi, cfg)?;
        acc = acc.add(q);
        let target = cfg.abs_tol.max(cfg.rel_tol * acc.value.abs());
        if prev.is_finite() && prev != 0.0 {
            let ratio = (q.value / prev).abs();
            if ratio >= 0.999 && q.value.abs() > target {
                return Err(Error::Integrability(format!(
                    "integral near 0 does not converge (panel ratio {ratio:.4})"
                )));
            }
            let tail = if ratio < 1.0 { q.value.abs() * ratio / (1.0 - ratio) } else { f64::INFINITY };
            if tail <= 0.1 * target {
                small_run += 1;
                if small_run >= 3 {
                    acc.abs_err += tail;
                    return Ok(acc);
                }
            } else {
                small_run = 0;
            }
        } else if q.value == 0.0 && prev == 0.0 {
            small_run += 1;
            if small_run >= 8 {
                return Ok(acc);
            }
        }
        prev = q.value;
        hi = lo;
        if hi < f64::MIN_POSITIVE {
            break;
        }
    }
    Ok(acc)
}

/// Integrates over `[a, inf)` with panels doubling outward, stopping once the
/// geometric tail estimate is negligible.
pub fn integrate_to_infinity<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, cfg: &QuadConfig) -> Result<Quad> {
    if a <= 0.0 {
        return Err(Error::InvalidInput(format!("outward panels need a positive start, got {a}")));
    }
    let mut acc = Quad::ZERO;
    let mut lo = a;
    let mut prev = f64::NAN;
    let mut small_run = 0;
    for _ in 0..1000 {
        let hi = 2.0 * lo;
        let q = integrate(f, lo, hi, cfg)?;
        acc = acc.add(q);
        let target = cfg.abs_tol.max(cfg.rel_tol * acc.value.abs());
        if prev.is_finite() && prev != 0.0 {
            let ratio = (q.value / prev).abs();
            if ratio >= 0.999 && q.value.abs() > target {
                return Err(Error::Integrability(format!("tail integral does not converge (panel ratio {ratio:.4})")));
            }
            let tail = if ratio < 1.0 { q.value.abs() * ratio / (1.0 - ratio) } else { f64::INFINITY };
            if tail <= 0.1 * target {
                small_run += 1;
                if small_run >= 3 {
                    acc.abs_err += tail;
                    return Ok(acc);
                }
            } else {
                small_run = 0;
            }
        } else if q.value == 0.0 && prev == 0.0 {
            small_run += 1;
            if small_run >= 8 {
                return Ok(acc);
            }
        }
        prev = q.value;
        lo = hi;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::Integrability("tail integral did not settle".into()))
}

/// Integrates an oscillating integrand over `[a, b]` panel by panel, one
/// panel per period `2 pi / |u|`.
pub fn integrate_periods<F: Fn(f64) -> f64 + ?Sized>(f: &F, u: f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quad> {
    if b <= a {
        return Ok(Quad::ZERO);
    }
    if u == 0.0 {
        return integrate(f, a, b, cfg);
    }
    let period = 2.0 * std::f64::consts::PI / u.abs();
    let n = ((b - a) / period).ceil().max(1.0);
    if n > 5e6 {
        return Err(Error::InvalidInput(format!("{n} oscillation periods on [{a}, {b}]")));
    }
    let n = n as usize;
    let step = (b - a) / n as f64;
    let mut acc = Quad::ZERO;
    let local = QuadConfig { abs_tol: cfg.abs_tol / n as f64, ..*cfg };
    for i in 0..n {
        let lo = a + step * i as f64;
        let hi = if i + 1 == n { b } else { lo + step };
        acc = acc.add(integrate(f, lo, hi, &local)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_singular_integrals() {
        let cfg = QuadConfig::default();
        let q = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, &cfg).unwrap();
        assert!((q.value - 2.0).abs() < 1e-13);
        // x^{-1/2} on (0, 1]
        let q = integrate_from_zero(&|x: f64| x.powf(-0.5), 1.0, &cfg).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9);
        // x^{-2} on [1, inf)
        let q = integrate_to_infinity(&|x: f64| x.powi(-2), 1.0, &cfg).unwrap();
        assert!((q.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn divergent_integral_is_reported() {
        let cfg = QuadConfig::default();
        let r = integrate_from_zero(&|x: f64| 1.0 / x, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Integrability(_))));
    }
}
