//! Acceptance gate. Runs every criterion in sequence, prints one line each
//! and exits non-zero if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use levy_bounds::bounds::{
    conv_tv_from_w1, gauss_tv_bound, gauss_w2, increments_wp_bound, lattice_w1_lower, liese_tv, main_tv_bound,
    marginal_wp_bound, poisson_moment, small_jump_tv, stirling2, two_point_w1_floor,
};
use levy_bounds::empirical::{
    empirical_wp, empirical_wp_values, fit_loglog_slope, gaussian_batch, sample_increment, scaling_cell, skellam_table,
    small_jump_batch, tv_exact_gaussian, tv_numeric, w1_cdf_values, BootstrapConfig, EmpiricalEstimate, Gaussian,
    LatticeGaussMixture, ScalingConfig, TvGridConfig,
};
use levy_bounds::fourier::{gaussian_approx_lower, jr_tv_sequence, SupSearchConfig};
use levy_bounds::special::poisson_pmf;
use levy_bounds::{Atom, ConstantPolicy, CounterRng, LevyMeasure, LevyTriplet, StablePower};

const EPS: f64 = 0.1;
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Two-point process at level `EPS` against `N(0, t)`, 10^5 exact samples.
struct SandwichCell {
    t: f64,
    w1: EmpiricalEstimate,
}

fn sandwich_cells() -> Vec<SandwichCell> {
    let nu = LevyMeasure::two_point(EPS, 1.0).unwrap();
    [EPS * EPS / 4.0, EPS * EPS, 4.0 * EPS * EPS]
        .into_iter()
        .map(|t| {
            let a = small_jump_batch(&nu, EPS, t, 100_000, SEED, 0.0).unwrap();
            assert!(a.is_exact());
            let b = gaussian_batch(0.0, t.sqrt(), 100_000, SEED).unwrap();
            SandwichCell { t, w1: empirical_wp(&a, &b, 1.0).unwrap() }
        })
        .collect()
}

fn two_point_sandwich(cells: &[SandwichCell]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in cells {
        let upper = (2.0 * c.t.sqrt()).min(EPS / 2.0);
        let upper_ok = c.w1.ci_low <= upper;
        let floor = (c.t <= EPS * EPS).then(|| two_point_w1_floor(c.t));
        let lower_ok = floor.is_none_or(|f| f <= c.w1.ci_high);
        pass &= upper_ok && lower_ok;
        let floor_txt = floor.map_or("none".to_string(), |f| format!("{f:.5}{}", if lower_ok { "" } else { "!" }));
        parts.push(format!(
            "t={:.4}: W1={:.5} [{:.5},{:.5}] floor={floor_txt} lattice={:.5} upper={upper:.4}",
            c.t,
            c.w1.point,
            c.w1.ci_low,
            c.w1.ci_high,
            lattice_w1_lower(c.t, EPS).unwrap()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn stable_scaling() -> Outcome {
    let eps: Vec<f64> = (3..=8).map(|k| 0.5f64.powi(k)).collect();
    let cfg = ScalingConfig { t: 10.0, p: 1.0, samples: 100_000, seed: SEED, sim_fraction: 0.5, ..Default::default() };
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 1.5] {
        let nu = LevyMeasure::stable_power(StablePower::one_sided(1.0, alpha)).unwrap();
        let cells: Vec<_> = eps.iter().map(|&e| scaling_cell(&nu, e, &cfg).unwrap()).collect();
        let bounds: Vec<f64> = cells.iter().map(|c| c.bound).collect();
        let emp: Vec<f64> = cells.iter().map(|c| c.empirical.point).collect();
        let bound_slope = fit_loglog_slope(&eps, &bounds).unwrap();
        let emp_slope = fit_loglog_slope(&eps, &emp).unwrap();
        let ok = (bound_slope - alpha / 2.0).abs() < 1e-9 && (emp_slope - alpha / 2.0).abs() <= 0.1;
        pass &= ok;
        let min_n = cells.iter().map(|c| c.samples).min().unwrap();
        parts.push(format!(
            "alpha={alpha}: bound slope {bound_slope:.6} empirical slope {emp_slope:.3} (target {:.2}, min n {min_n})",
            alpha / 2.0
        ));
    }
    outcome(pass, parts.join("; "))
}

fn gaussian_exactness() -> Outcome {
    let mut rng = CounterRng::new(2024);
    let n = 20_000;
    let base = gaussian_batch(0.0, 1.0, n, 100).unwrap();
    let mut worst: f64 = 0.0;
    let mut w2_ok = true;
    for i in 0..20 {
        let m = -2.0 + 4.0 * rng.uniform();
        let s = 0.3 + 2.7 * rng.uniform();
        let other = gaussian_batch(m, s, n, 101 + i).unwrap();
        let e = empirical_wp(&base, &other, 2.0).unwrap();
        let exact = gauss_w2(0.0, 1.0, m, s).unwrap();
        let ratio = (e.point - exact).abs() / e.half_width();
        worst = worst.max(ratio);
        w2_ok &= ratio <= 3.0;
    }
    // scipy: 2 Phi(eps/2) - 1
    let frozen = [
        (0.01, 0.003989406181481581),
        (0.05, 0.019945036390476067),
        (0.1, 0.03987761167674497),
        (0.25, 0.09947644966022584),
        (0.5, 0.1974126513658474),
    ];
    let mut tv_ok = true;
    let mut ratio_005 = f64::NAN;
    for (e, want) in frozen {
        let tv = tv_exact_gaussian(0.0, 1.0, e, 1.0).unwrap();
        let bound = conv_tv_from_w1(e, (2.0 / PI).sqrt());
        tv_ok &= (tv - want).abs() <= 1e-10 && tv <= bound && (bound - e / (2.0 * PI).sqrt()).abs() < 1e-15;
        if e == 0.05 {
            ratio_005 = bound / tv;
        }
    }
    let sharp = (ratio_005 - 1.0).abs() <= 0.02;
    outcome(
        w2_ok && tv_ok && sharp,
        format!("worst |W2 error|/CI = {worst:.2} over 20 pairs; TV identity {tv_ok}; bound/exact at eps=0.05 = {ratio_005:.5}"),
    )
}

fn convolution_tv() -> Outcome {
    let big_sigma = 1.0;
    let mut pass = true;
    let mut min_gap = f64::INFINITY;
    let mut parts = Vec::new();
    for t in [0.01, 0.1, 1.0] {
        for eps in [0.05, 0.1, 0.2] {
            let nu = LevyMeasure::two_point(eps, 1.0).unwrap();
            let mu = t / (2.0 * eps * eps);
            let mix = LatticeGaussMixture::skellam(eps, mu, mu, t.sqrt() * big_sigma).unwrap();
            let sbar2 = nu.sigma_bar_sq(eps).unwrap();
            let gauss = Gaussian { mean: 0.0, sd: (t * sbar2 + t * big_sigma * big_sigma).sqrt() };
            let tv = tv_numeric(&mix, &gauss, &TvGridConfig::default()).unwrap();
            let bound = small_jump_tv(t, big_sigma, &nu, eps).unwrap();
            let ok = !tv.uncertified && tv.ci_high < bound;
            pass &= ok;
            min_gap = min_gap.min(bound - tv.ci_high);
            if !ok {
                parts.push(format!("t={t} eps={eps}: TV {:.3e} vs bound {bound:.3e}", tv.point));
            }
        }
    }
    let detail =
        if parts.is_empty() { format!("9/9 cells strict, smallest gap {min_gap:.3e}") } else { parts.join("; ") };
    outcome(pass, detail)
}

fn toscani_lower(cells: &[SandwichCell]) -> Outcome {
    let nu = LevyMeasure::two_point(EPS, 1.0).unwrap();
    let tp = LevyTriplet::new(0.0, 0.0, nu.clone()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for c in cells {
        let bm = LevyTriplet::brownian(0.0, 1.0).unwrap();
        let cfg = SupSearchConfig::for_pair(c.t, &tp, &bm).unwrap();
        let (rep, sup) = gaussian_approx_lower(c.t, &nu, EPS, &cfg).unwrap();
        let witness = if c.t >= EPS * EPS {
            (1.0 - (-2.0 * PI * PI).exp()) / (2.0 * PI) * EPS
        } else {
            c.t.sqrt() * ((-2f64).exp() - (-4.5f64).exp()) / 3.0
        };
        let ok = sup.certified && sup.lower >= witness && rep.value <= c.w1.ci_high;
        pass &= ok;
        parts.push(format!(
            "t={:.4}: T1={:.5} witness={witness:.5} T1/sqrt2={:.5} <= W1 hi {:.5}",
            c.t,
            sup.lower,
            sup.lower / SQRT_2,
            c.w1.ci_high
        ));
    }
    outcome(pass, parts.join("; "))
}

fn minimax_decay() -> Outcome {
    let ns: Vec<u64> = (0..=16).map(|k| 10f64.powf(2.0 + k as f64 / 4.0).round() as u64).collect();
    let seq = jr_tv_sequence(1.5, &ns, 4.0).unwrap();
    let below_closed = seq.rows.iter().all(|r| r.tv_bound <= r.closed_form);
    let searched: Vec<_> = seq.rows.iter().filter(|r| r.n <= 10_000).collect();
    let cap_ok = searched.iter().all(|r| r.t1_computed.is_some_and(|v| v <= r.t1_cap));
    let decreasing = seq.rows.windows(2).all(|w| w[1].product_bound < w[0].product_bound);
    let first = &seq.rows[0];
    let last = seq.rows.last().unwrap();
    outcome(
        below_closed && cap_ok && decreasing && searched.len() == 9,
        format!(
            "{} rows; TV <= closed form {below_closed}; cap verified at {} n <= 1e4 {cap_ok}; product {:.4e} -> {:.4e} strictly decreasing {decreasing}",
            seq.rows.len(),
            searched.len(),
            first.product_bound,
            last.product_bound
        ),
    )
}

fn liese_triviality() -> Outcome {
    // total jump intensity 2 at t = 1
    let eps0 = 0.1;
    let nu = LevyMeasure::two_point(eps0, 2.0 * eps0 * eps0).unwrap();
    let x = LevyTriplet::new(0.0, 1.0, nu).unwrap();
    let bm = LevyTriplet::brownian(0.0, 1.0).unwrap();
    let liese = liese_tv(1.0, &x, &bm, None).unwrap();
    let main = main_tv_bound(1.0, &x, &bm, eps0).unwrap().value;
    outcome(liese >= 1.0 && main < 1.0, format!("Liese {liese:.4}, main TV bound {main:.4}"))
}

fn property_sweep() -> Outcome {
    let mut failed = Vec::new();
    let mut total = 0;
    let mut check = |name: &str, ok: bool| {
        total += 1;
        if !ok {
            failed.push(name.to_string());
        }
    };
    check(
        "stirling recurrence",
        (0..25u32).all(|p| {
            (1..=p + 1).all(|k| {
                stirling2(p + 1, k).unwrap() == k as u128 * stirling2(p, k).unwrap() + stirling2(p, k - 1).unwrap()
            })
        }),
    );
    check(
        "poisson moment series",
        (1..=6u32).all(|p| {
            [0.0, 0.2, 1.0, 3.7, 9.0].iter().all(|&ell| {
                let series: f64 = (0..400u64).map(|k| (k as f64).powi(p as i32) * poisson_pmf(k, ell)).sum();
                (poisson_moment(p, ell).unwrap() - series).abs() <= 1e-12 * series.max(1.0)
            })
        }),
    );
    check(
        "skellam normalization",
        [(0.0, 0.0), (0.3, 0.0), (1.0, 4.0), (50.0, 50.0), (300.0, 20.0)]
            .iter()
            .all(|&(a, b)| (skellam_table(a, b).iter().map(|w| w.1).sum::<f64>() - 1.0).abs() < 1e-10),
    );
    let no_boot = BootstrapConfig { resamples: 0, ..Default::default() };
    check(
        "quantile/cdf identity",
        (0..5u64).all(|i| {
            let a = gaussian_batch(0.0, 1.0, 5000, 10 * i).unwrap();
            let b = gaussian_batch(0.5 * i as f64, 1.0 + 0.3 * i as f64, 5000, 10 * i + 1).unwrap();
            let q = empirical_wp_values(&a.values, &b.values, 1.0, &no_boot).unwrap().point;
            let c = w1_cdf_values(&a.values, &b.values).unwrap();
            (q - c).abs() <= 1e-12 * c.max(1.0)
        }),
    );
    {
        let n = 20_000;
        let tp = LevyTriplet::new(0.0, 0.0, LevyMeasure::two_point(0.2, 1.0).unwrap()).unwrap();
        let x1 = sample_increment(&tp, 1.0, n, 1, 0.0).unwrap();
        let x2 = gaussian_batch(0.3, 1.4, n, 2).unwrap();
        let y1 = gaussian_batch(0.0, 1.0, n, 3).unwrap();
        let y2 = gaussian_batch(-0.2, 0.7, n, 4).unwrap();
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u + v).collect::<Vec<_>>();
        let boot = BootstrapConfig::default();
        let whole =
            empirical_wp_values(&sum(&x1.values, &y1.values), &sum(&x2.values, &y2.values), 1.0, &boot).unwrap();
        let a = empirical_wp_values(&x1.values, &x2.values, 1.0, &boot).unwrap();
        let b = empirical_wp_values(&y1.values, &y2.values, 1.0, &boot).unwrap();
        check("subadditivity", whole.ci_low <= a.ci_high + b.ci_high);
    }
    let policy = ConstantPolicy::default();
    let pairs = [
        (
            LevyTriplet::new(0.2, 0.5, LevyMeasure::two_point(0.1, 1.0).unwrap()).unwrap(),
            LevyTriplet::new(-0.1, 1.0, LevyMeasure::discrete([Atom { x: 1.5, rate: 0.7 }]).unwrap()).unwrap(),
        ),
        (
            LevyTriplet::new(0.0, 0.0, LevyMeasure::stable_power(StablePower::symmetric(1.0, 1.2)).unwrap()).unwrap(),
            LevyTriplet::brownian(0.0, 1.0).unwrap(),
        ),
    ];
    check(
        "tensorization n=1",
        pairs.iter().all(|(x, y)| {
            [0.3, 2.0].iter().all(|&h| {
                let m = marginal_wp_bound(1.0, h, x, y, 0.5, &policy, None).unwrap().value;
                let t = increments_wp_bound(1.0, 2.0, h, 1, x, y, 0.5, &policy, None).unwrap().value;
                m.to_bits() == t.to_bits()
            })
        }),
    );
    let gauss = [(0.3, 1.0, -0.2, 1.5), (0.0, 0.4, 0.0, 0.4), (1.0, 2.0, 0.0, 0.5)];
    check(
        "gaussian reductions",
        gauss.iter().all(|&(b1, s1, b2, s2)| {
            let x = LevyTriplet::brownian(b1, s1).unwrap();
            let y = LevyTriplet::brownian(b2, s2).unwrap();
            [0.5, 2.0].iter().all(|&t: &f64| {
                let w = marginal_wp_bound(2.0, t, &x, &y, 1.0, &policy, None).unwrap().value;
                let tv = main_tv_bound(t, &x, &y, 1.0).unwrap().value;
                let st = t.sqrt();
                (w - gauss_w2(t * b1, st * s1, t * b2, st * s2).unwrap()).abs() < 1e-14
                    && (tv - gauss_tv_bound(t * b1, st * s1, t * b2, st * s2).unwrap()).abs() < 1e-14
            })
        }),
    );
    let detail = if failed.is_empty() {
        format!("{total} invariant families green")
    } else {
        format!("failing: {}", failed.join(", "))
    };
    outcome(failed.is_empty(), detail)
}

fn report(n: usize, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took <= l);
    let pass = o.pass && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
    println!(
        "criterion {n} {name}: {} ({:.1}s{budget}{}) {}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        if in_time { "" } else { ", over budget" },
        o.detail
    );
    pass
}

fn main() {
    let mut results = Vec::new();
    let mut cells = Vec::new();
    results.push(report(1, "two-point sandwich", Some(Duration::from_secs(30)), || {
        cells = sandwich_cells();
        two_point_sandwich(&cells)
    }));
    results.push(report(2, "stable scaling", Some(Duration::from_secs(120)), stable_scaling));
    results.push(report(3, "gaussian exactness", None, gaussian_exactness));
    results.push(report(4, "convolution TV", None, convolution_tv));
    results.push(report(5, "Fourier lower bound", None, || toscani_lower(&cells)));
    results.push(report(6, "minimax decay", Some(Duration::from_secs(120)), minimax_decay));
    results.push(report(7, "Hellinger baseline", None, liese_triviality));
    results.push(report(8, "property sweep", None, property_sweep));
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
