use levy_bounds_demo::{decay_rows, sandwich_rows, scaling_rows};

#[test]
fn scaling_slope_is_half_alpha_on_the_moment_branch() {
    let rows = scaling_rows(1.0, 10.0, 1e-3, 7).unwrap();
    assert_eq!(rows.len(), 7);
    assert!((rows[0].eps - 1e-3).abs() < 1e-15 && (rows[6].eps - 1.0).abs() < 1e-12);
    for w in rows.windows(2).filter(|w| w[0].branch == "moment" && w[1].branch == "moment") {
        let slope = (w[1].normalized_bound / w[0].normalized_bound).ln() / (w[1].eps / w[0].eps).ln();
        assert!((slope - 0.5).abs() < 1e-9, "slope {slope}");
    }
    assert!(scaling_rows(1.0, 10.0, 0.0, 5).is_err());
    assert!(scaling_rows(2.5, 10.0, 0.01, 5).is_err());
}

#[test]
fn sandwich_orders_its_bounds() {
    // scipy quadrature of E dist(N(0, t), 0.1 Z)
    let oracle = [(0.0025, 0.02485426197315401), (0.01, 0.024999999945787322), (0.04, 0.025)];
    let rows = sandwich_rows(0.1, 0.0025, 0.04, 3).unwrap();
    for (row, (t, want)) in rows.iter().zip(oracle) {
        assert!((row.t - t).abs() < 1e-15);
        assert!((row.lattice_lower - want).abs() < 1e-10, "t = {t}: {}", row.lattice_lower);
        assert!(row.lattice_lower <= row.upper && row.t1_lower <= row.upper);
    }
    assert!(rows[2].claimed_floor.is_none());
    // at t = eps^2 the claimed floor sits above a valid lower bound's ceiling
    assert!(rows[1].claimed_floor.unwrap() > 0.0293);
    assert!(sandwich_rows(0.1, 0.04, 0.01, 3).is_err());
}

#[test]
fn decay_rows_fall() {
    let rows = decay_rows(1.5, 4.0, 100, 1_000_000, 5).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![100, 1000, 10_000, 100_000, 1_000_000]);
    for w in rows.windows(2) {
        assert!(w[1].product_bound < w[0].product_bound);
    }
    assert!(rows.iter().all(|r| r.tv_bound <= r.closed_form));
    assert!(decay_rows(1.5, 4.0, 1, 10, 3).is_err());
}
