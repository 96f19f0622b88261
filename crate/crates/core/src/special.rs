//! Special functions used across the crate.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)` without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `P(a < Z <= b)` for a standard normal `Z`, computed on the side that avoids cancellation.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    }
}

/// `2 Phi(x) - 1 = erf(x / sqrt 2)`.
pub fn normal_two_sided(x: f64) -> f64 {
    libm::erf(x / SQRT_2)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_factorial(k)).exp()
}

/// `ln(e^{-x} I_nu(x))` for integer order `nu` and `x >= 0`.
///
/// Power series summed in log space for moderate arguments, Hankel expansion
/// once `x` dominates `nu^2`.
pub fn ln_bessel_i_scaled(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let n = nu as f64;
    if x >= 25.0 && x >= n * n {
        if let Some(v) = hankel_scaled(n, x) {
            return v;
        }
    }
    series_ln_i(n, x) - x
}

fn series_ln_i(n: f64, x: f64) -> f64 {
    let lh = (0.5 * x).ln();
    let mut lt = n * lh - ln_gamma(n + 1.0);
    let mut m = lt;
    let mut s = 1.0;
    let mut k = 0.0_f64;
    loop {
        lt += 2.0 * lh - (k + 1.0).ln() - (k + n + 1.0).ln();
        k += 1.0;
        if lt > m {
            s = s * (m - lt).exp() + 1.0;
            m = lt;
        } else {
            s += (lt - m).exp();
            let past_peak = 0.25 * x * x < (k + 1.0) * (k + n + 1.0);
            if past_peak && lt < m - 40.0 {
                break;
            }
        }
    }
    m + s.ln()
}

fn hankel_scaled(n: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * n * n;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let j = (2 * k - 1) as f64;
        term *= -(mu - j * j) / (k as f64 * 8.0 * x);
        let a = term.abs();
        if a > prev {
            return None;
        }
        sum += term;
        if a < 1e-17 * sum.abs() {
            return Some(sum.ln() - 0.5 * (2.0 * PI * x).ln());
        }
        prev = a;
    }
    None
}

/// Skellam probability `P(N1 - N2 = k)` for independent Poisson means `mu1`, `mu2`.
pub fn skellam_pmf(k: i64, mu1: f64, mu2: f64) -> f64 {
    if mu1 == 0.0 && mu2 == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if mu2 == 0.0 {
        return if k < 0 { 0.0 } else { poisson_pmf(k as u64, mu1) };
    }
    if mu1 == 0.0 {
        return if k > 0 { 0.0 } else { poisson_pmf((-k) as u64, mu2) };
    }
    let x = 2.0 * (mu1 * mu2).sqrt();
    let d = mu1.sqrt() - mu2.sqrt();
    let ln_p = -d * d + 0.5 * k as f64 * (mu1.ln() - mu2.ln()) + ln_bessel_i_scaled(k.unsigned_abs() as u32, x);
    ln_p.exp()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm) / (z * z - 1.0);
            if n == 1 {
                dp = 1.0;
            }
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-15);
        assert!((normal_sf(8.0) - 6.220_960_574_271_785e-16).abs() < 1e-28);
    }

    #[test]
    fn bessel_matches_known_values() {
        // I_0(1), I_1(1), I_5(10) from tables
        let i0 = (ln_bessel_i_scaled(0, 1.0) + 1.0).exp();
        assert!((i0 - 1.266_065_877_752_008_4).abs() < 1e-14);
        let i1 = (ln_bessel_i_scaled(1, 1.0) + 1.0).exp();
        assert!((i1 - 0.565_159_103_992_485_1).abs() < 1e-14);
        let i5 = (ln_bessel_i_scaled(5, 10.0) + 10.0).exp();
        assert!((i5 / 777.188_286_403_259_9 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bessel_branches_agree_at_switch() {
        for &(nu, x) in &[(0u32, 25.0), (3, 30.0), (5, 40.0), (2, 200.0)] {
            let a = series_ln_i(nu as f64, x) - x;
            let b = hankel_scaled(nu as f64, x).unwrap();
            assert!((a - b).abs() < 1e-12, "nu={nu} x={x} {a} {b}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m12: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((m12 - 2.0 / 13.0).abs() < 1e-14);
    }
}
