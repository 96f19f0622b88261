use std::f64::consts::PI;

use proptest::prelude::*;

use levy_bounds::bounds::{
    gauss_tv_bound, gauss_w2, increments_wp_bound, lattice_w1_lower, liese_tv, main_tv_bound, marginal_wp_bound,
    poisson_moment, small_jump_gauss_w, stirling2,
};
use levy_bounds::empirical::{
    empirical_w1_cdf, empirical_wp, empirical_wp_values, gaussian_batch, sample_increment, skellam_table,
    tv_exact_gaussian, w1_cdf_values, BootstrapConfig,
};
use levy_bounds::fourier::{char_fn, toscani_t1, SupSearchConfig};
use levy_bounds::special::poisson_pmf;
use levy_bounds::{Atom, ConstantPolicy, LevyMeasure, LevyTriplet, StablePower};

fn policy() -> ConstantPolicy {
    ConstantPolicy::default()
}

fn measure() -> impl Strategy<Value = LevyMeasure> {
    prop_oneof![
        Just(LevyMeasure::Zero),
        (0.05..1.0f64, 0.1..3.0f64).prop_map(|(e, s)| LevyMeasure::two_point(e, s).unwrap()),
        (0.2..1.8f64, 0.1..2.0f64, 0.0..2.0f64).prop_map(|(a, cp, cn)| LevyMeasure::stable_power(StablePower {
            c_pos: cp,
            c_neg: cn,
            alpha: a,
            cutoff: 1.0
        })
        .unwrap()),
        prop::collection::vec((-3.0..3.0f64, 0.01..2.0f64), 1..4).prop_map(|v| {
            LevyMeasure::discrete(v.into_iter().filter(|a| a.0.abs() > 1e-3).map(|(x, rate)| Atom { x, rate })).unwrap()
        }),
    ]
}

fn triplet() -> impl Strategy<Value = LevyTriplet> {
    (-1.0..1.0f64, 0.0..2.0f64, measure()).prop_map(|(b, s, nu)| LevyTriplet::new(b, s, nu).unwrap())
}

proptest! {
    #[test]
    fn stirling_recurrence(p in 0u32..20, k in 1u32..20) {
        let lhs = stirling2(p + 1, k).unwrap();
        let rhs = k as u128 * stirling2(p, k).unwrap() + stirling2(p, k - 1).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poisson_moment_matches_series(p in 1u32..7, ell in 0.0..12.0f64) {
        let series: f64 = (0..400u64).map(|k| (k as f64).powi(p as i32) * poisson_pmf(k, ell)).sum();
        let got = poisson_moment(p, ell).unwrap();
        prop_assert!((got - series).abs() <= 1e-12 * series.max(1.0), "{} vs {}", got, series);
    }

    #[test]
    fn skellam_normalizes(mu1 in 0.0..200.0f64, mu2 in 0.0..200.0f64) {
        let total: f64 = skellam_table(mu1, mu2).iter().map(|w| w.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "{}", total);
    }

    #[test]
    fn gaussian_tv_below_its_bound(m1 in -3.0..3.0f64, s1 in 0.1..3.0f64, m2 in -3.0..3.0f64, s2 in 0.1..3.0f64) {
        let exact = tv_exact_gaussian(m1, s1, m2, s2).unwrap();
        prop_assert!((0.0..=1.0).contains(&exact));
        prop_assert!(exact <= gauss_tv_bound(m1, s1, m2, s2).unwrap() + 1e-15);
        prop_assert!((exact - tv_exact_gaussian(m2, s2, m1, s1).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn characteristic_function_is_bounded_and_hermitian(tr in triplet(), t in 0.01..5.0f64, u in -40.0..40.0f64) {
        let a = char_fn(&tr, t, u).unwrap();
        let b = char_fn(&tr, t, -u).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-12);
        prop_assert!((a - b.conj()).norm() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn marginal_bound_reduces_to_gaussian_w2(t in 0.01..5.0f64, b1 in -1.0..1.0f64, s1 in 0.0..2.0f64, b2 in -1.0..1.0f64, s2 in 0.0..2.0f64, p in prop_oneof![Just(1.0), Just(1.5), Just(2.0)]) {
        let x = LevyTriplet::brownian(b1, s1).unwrap();
        let y = LevyTriplet::brownian(b2, s2).unwrap();
        let got = marginal_wp_bound(p, t, &x, &y, 0.5, &policy(), None).unwrap().value;
        let want = gauss_w2(t * b1, t.sqrt() * s1, t * b2, t.sqrt() * s2).unwrap();
        prop_assert!((got - want).abs() <= 1e-14 * want.max(1.0));
    }

    #[test]
    fn tv_bound_reduces_to_gaussian_bound(t in 0.01..5.0f64, b1 in -1.0..1.0f64, s1 in 0.05..2.0f64, b2 in -1.0..1.0f64, s2 in 0.05..2.0f64) {
        let x = LevyTriplet::brownian(b1, s1).unwrap();
        let y = LevyTriplet::brownian(b2, s2).unwrap();
        let got = main_tv_bound(t, &x, &y, 0.5).unwrap().value;
        let want = gauss_tv_bound(t * b1, t.sqrt() * s1, t * b2, t.sqrt() * s2).unwrap();
        prop_assert!((got - want).abs() <= 1e-14 * want.max(1.0));
    }

    #[test]
    fn single_increment_is_the_marginal(x in triplet(), y in triplet(), horizon in 0.05..4.0f64, r in 1.0..3.0f64) {
        let eps = 0.5;
        let m = marginal_wp_bound(1.0, horizon, &x, &y, eps, &policy(), None);
        let n1 = increments_wp_bound(1.0, r, horizon, 1, &x, &y, eps, &policy(), None);
        match (m, n1) {
            (Ok(m), Ok(n1)) => prop_assert_eq!(m.value.to_bits(), n1.value.to_bits()),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn identical_triplets_are_at_distance_small_jumps_only(x in triplet(), t in 0.05..4.0f64) {
        let eps = 0.5;
        let r = marginal_wp_bound(1.0, t, &x, &x, eps, &policy(), None).unwrap();
        prop_assert_eq!(r.terms["gaussian"], 0.0);
        prop_assert_eq!(r.terms["big_jumps"], 0.0);
        prop_assert_eq!(r.terms["small_jumps_1"], r.terms["small_jumps_2"]);
    }

    #[test]
    fn small_jump_bound_grows_with_time(sp in (0.2..1.8f64, 0.5..2.0f64), t1 in 0.001..10.0f64, dt in 0.0..10.0f64, eps in 0.01..1.0f64) {
        let nu = LevyMeasure::stable_power(StablePower::symmetric(sp.1, sp.0)).unwrap();
        let a = small_jump_gauss_w(1.0, t1, &nu, eps, &policy()).unwrap();
        let b = small_jump_gauss_w(1.0, t1 + dt, &nu, eps, &policy()).unwrap();
        prop_assert!(a.value <= b.value);
        prop_assert!(a.value <= a.terms["coarse_cap"].max(a.terms["moment"]));
    }

    #[test]
    fn liese_grows_with_hellinger(s in 0.1..2.0f64, h1 in 0.0..3.0f64, dh in 0.0..3.0f64) {
        let x = LevyTriplet::brownian(0.0, s).unwrap();
        let a = liese_tv(1.0, &x, &x, Some(h1)).unwrap();
        let b = liese_tv(1.0, &x, &x, Some(h1 + dh)).unwrap();
        prop_assert!(a <= b);
        prop_assert!((a - 2.0 * (1.0 - (-h1).exp()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lattice_bound_stays_below_trivial_caps(t in 1e-6..4.0f64, eps in 0.001..1.0f64) {
        let v = lattice_w1_lower(t, eps).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= (2.0 * t / PI).sqrt() * (1.0 + 1e-12));
        prop_assert!(v <= 0.25 * eps * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quantile_and_cdf_w1_agree(seed in any::<u64>(), m in -2.0..2.0f64, s in 0.2..3.0f64, n in 100usize..3000) {
        let a = gaussian_batch(0.0, 1.0, n, seed).unwrap();
        let b = gaussian_batch(m, s, n, seed.wrapping_add(1)).unwrap();
        let q = empirical_wp_values(&a.values, &b.values, 1.0, &BootstrapConfig { resamples: 0, ..Default::default() }).unwrap();
        let c = w1_cdf_values(&a.values, &b.values).unwrap();
        prop_assert!((q.point - c).abs() <= 1e-12 * c.max(1.0), "{} vs {}", q.point, c);
        let cdf = empirical_w1_cdf(&a, &b).unwrap();
        prop_assert!((cdf.point - c).abs() <= 1e-12 * c.max(1.0));
    }

    #[test]
    fn toscani_sup_dominates_every_frequency(tr1 in triplet(), tr2 in triplet(), t in 0.1..3.0f64, u in 0.05..30.0f64) {
        let cfg = SupSearchConfig::for_pair(t, &tr1, &tr2).unwrap();
        let sup = toscani_t1(&tr1, &tr2, t, &cfg).unwrap();
        let at_u = (char_fn(&tr1, t, u).unwrap() - char_fn(&tr2, t, u).unwrap()).norm() / u;
        prop_assert!(sup.lower <= sup.upper);
        if sup.certified {
            prop_assert!(at_u <= sup.upper * (1.0 + 1e-9) + 1e-15, "{} > {}", at_u, sup.upper);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic(tr in triplet(), seed in any::<u64>(), t in 0.1..2.0f64) {
        let a = sample_increment(&tr, t, 200, seed, 0.05).unwrap();
        let b = sample_increment(&tr, t, 200, seed, 0.05).unwrap();
        prop_assert_eq!(&a.values, &b.values);
        let c = sample_increment(&tr, t, 200, seed ^ 1, 0.05).unwrap();
        prop_assert!(a.values != c.values || a.values.iter().all(|v| *v == a.values[0]));
    }

    #[test]
    fn subadditive_under_independent_sums(seed in any::<u64>(), m in -1.0..1.0f64, s in 0.3..2.0f64, eps in 0.05..0.5f64) {
        let n = 4000;
        let x = LevyTriplet::new(0.0, 0.0, LevyMeasure::two_point(eps, 1.0).unwrap()).unwrap();
        let x1 = sample_increment(&x, 1.0, n, seed, 0.0).unwrap();
        let y1 = gaussian_batch(0.0, 1.0, n, seed.wrapping_add(1)).unwrap();
        let x2 = gaussian_batch(m, s, n, seed.wrapping_add(2)).unwrap();
        let y2 = gaussian_batch(0.0, 1.0, n, seed.wrapping_add(3)).unwrap();
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u + v).collect::<Vec<_>>();
        let boot = BootstrapConfig { resamples: 200, ..Default::default() };
        let whole = empirical_wp_values(&sum(&x1.values, &y1.values), &sum(&x2.values, &y2.values), 1.0, &boot).unwrap();
        let first = empirical_wp_values(&x1.values, &x2.values, 1.0, &boot).unwrap();
        let second = empirical_wp_values(&y1.values, &y2.values, 1.0, &boot).unwrap();
        prop_assert!(whole.ci_low <= first.ci_high + second.ci_high, "{:?} {:?} {:?}", whole, first, second);
    }
}

#[test]
fn two_point_batch_is_centred() {
    let eps = 0.1;
    let x = LevyTriplet::new(0.0, 0.0, LevyMeasure::two_point(eps, 1.0).unwrap()).unwrap();
    for (t, seed) in [(0.0025, 1), (0.01, 2), (1.0, 3)] {
        let b = sample_increment(&x, t, 100_000, seed, 0.0).unwrap();
        assert!(b.is_exact());
        let n = b.n() as f64;
        let mean = b.values.iter().sum::<f64>() / n;
        let var = b.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 4.0 * (var / n).sqrt(), "t = {t}: mean {mean}");
        // variance rate is one
        assert!((var / t - 1.0).abs() < 0.05, "t = {t}: var {var}");
        // every value on the lattice
        assert!(b.values.iter().all(|v| ((v / eps) - (v / eps).round()).abs() < 1e-9));
    }
}

#[test]
fn empirical_gaussian_distances() {
    let n = 100_000;
    let a = gaussian_batch(0.0, 1.0, n, 10).unwrap();
    let shifted = gaussian_batch(3.0, 1.0, n, 11).unwrap();
    let e = empirical_wp(&a, &shifted, 1.0).unwrap();
    assert!(e.ci_low <= 3.0 && 3.0 <= e.ci_high, "{e:?}");
    let wide = gaussian_batch(0.0, 2.0, n, 12).unwrap();
    let e = empirical_wp(&a, &wide, 2.0).unwrap();
    assert!(e.ci_low <= 1.0 && 1.0 <= e.ci_high, "{e:?}");
    assert_eq!(empirical_wp(&a, &a, 1.0).unwrap().point, 0.0);
    let tiny = gaussian_batch(0.0, 1.0, 50, 1).unwrap();
    assert!(empirical_wp(&tiny, &tiny, 1.0).unwrap().low_sample);
}
