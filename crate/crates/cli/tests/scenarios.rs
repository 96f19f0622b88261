use std::path::{Path, PathBuf};

use serde_json::Value;

use levy_bounds_cli::plot::{render, PlotKind};
use levy_bounds_cli::{run, CliError, Report, Scenario};

fn repo_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(sub)
}

fn bundled(id: &str) -> Scenario {
    Scenario::load(&repo_dir("scenarios").join(format!("{id}.toml"))).unwrap()
}

fn schema_error(text: &str) -> String {
    match Scenario::from_toml(text, "inline.toml") {
        Err(CliError::Schema { msg, .. }) => msg,
        other => panic!("expected a schema error, got {other:?}"),
    }
}

/// Structural equality with a relative tolerance on numbers.
fn assert_json_close(a: &Value, b: &Value, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300), "{path}: {x} vs {y}");
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}: length");
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                assert_json_close(u, v, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            assert_eq!(kx, ky, "{path}: keys");
            for (k, u) in x {
                assert_json_close(u, &y[k], &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

fn check_golden(id: &str) {
    let report = run(&bundled(id), None, None).unwrap();
    let fresh = serde_json::to_value(&report).unwrap();
    let text = std::fs::read_to_string(repo_dir("scenarios/golden").join(format!("{id}.json"))).unwrap();
    let golden: Value = serde_json::from_str(&text).unwrap();
    assert_json_close(&fresh, &golden, id);
}

#[test]
fn bundled_scenarios_validate() {
    let mut n = 0;
    for entry in std::fs::read_dir(repo_dir("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let sc = Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(path.file_stem().unwrap().to_str().unwrap(), sc.id);
            n += 1;
        }
    }
    assert_eq!(n, 5);
}

#[test]
fn golden_gaussian_exact() {
    check_golden("gaussian_exact");
}

#[test]
fn golden_twopoint_tv() {
    check_golden("twopoint_tv");
}

#[test]
fn golden_twopoint_vs_bm() {
    check_golden("twopoint_vs_bm");
}

#[test]
fn golden_jr_lower_bound() {
    check_golden("jr_lower_bound");
}

#[test]
fn gaussian_scenario_passes_every_row() {
    let r = run(&bundled("gaussian_exact"), Some(5_000), None).unwrap();
    assert!(r.passed, "{:#?}", r.rows.iter().filter(|x| !x.pass).collect::<Vec<_>>());
    assert_eq!(r.rows.len(), 8);
}

#[test]
fn twopoint_sandwich_fails_only_at_eps_squared() {
    let r = run(&bundled("twopoint_vs_bm"), Some(20_000), None).unwrap();
    assert!(!r.passed);
    let failing: Vec<_> = r.rows.iter().filter(|x| !x.pass).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0].theorem, "SmallJumpW");
    assert_eq!(failing[0].t, Some(0.01));
    assert_eq!(failing[0].note, "estimate below the lower bound");
    // above eps^2 no floor is claimed
    let last = r.rows.iter().find(|x| x.t == Some(0.04) && x.theorem == "SmallJumpW").unwrap();
    assert_eq!(last.lower_bound, None);
}

#[test]
fn runs_are_reproducible_and_seeded() {
    let sc = bundled("gaussian_exact");
    let a = run(&sc, Some(3_000), Some(11)).unwrap();
    let b = run(&sc, Some(3_000), Some(11)).unwrap();
    let c = run(&sc, Some(3_000), Some(12)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.rows[0].empirical, c.rows[0].empirical);
    assert_eq!(a.scenario.estimator.seed, 11);
    assert_eq!(a.rows[0].samples, Some(3_000));
}

#[test]
fn outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&bundled("twopoint_tv"), None, None).unwrap();
    let files = r.write(dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("twopoint_tv.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "scenario,mode,point,t,eps,alpha,n,p,theorem,bound,rigorous,direction,branch,empirical,ci_low,ci_high,samples,error_budget,lower_bound,pass,note"
    );
    assert_eq!(csv.lines().count(), 1 + r.rows.len());
    let back = Report::load(&dir.path().join("twopoint_tv.json")).unwrap();
    assert_eq!(back, r);
}

#[test]
fn decay_report_writes_its_table() {
    let mut sc = bundled("jr_lower_bound");
    sc.sweep.n = vec![100, 1000, 100_000];
    let r = run(&sc, None, None).unwrap();
    assert!(r.passed);
    assert!(r.decay[0].below_cap == Some(true) && r.decay[2].below_cap.is_none());
    let dir = tempfile::tempdir().unwrap();
    r.write(dir.path()).unwrap();
    let t = std::fs::read_to_string(dir.path().join("jr_lower_bound_decay.csv")).unwrap();
    assert!(t.starts_with("n,a_n,u_n,c_n,t1_cap,t1_computed,tv_bound,n_tv,product_bound,closed_form,"));
    assert_eq!(t.lines().count(), 4);
}

#[test]
fn plots_are_deterministic_and_kind_checked() {
    let load = |id: &str| Report::load(&repo_dir("scenarios/golden").join(format!("{id}.json"))).unwrap();
    for (id, kind) in [
        ("stable_scaling", PlotKind::Scaling),
        ("twopoint_vs_bm", PlotKind::Sandwich),
        ("jr_lower_bound", PlotKind::Decay),
    ] {
        let r = load(id);
        let a = render(&r, kind).unwrap();
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert_eq!(a, render(&r, kind).unwrap());
        let stored =
            std::fs::read_to_string(repo_dir("scenarios/golden").join(format!("{id}_{}.svg", kind.name()))).unwrap();
        assert_eq!(a, stored, "{id}");
    }
    assert!(render(&load("jr_lower_bound"), PlotKind::Sandwich).is_err());
    assert!(render(&load("twopoint_tv"), PlotKind::Scaling).is_err());
    assert!("histogram".parse::<PlotKind>().is_err());
}

const TV_BASE: &str = r#"
id = "x"
mode = "certify"
t = 1.0
eps = 0.5
theorems = ["MainTV"]
[process1]
sigma = 0.0
measure = { family = "two_point", eps0 = 0.1 }
[process2]
sigma = 1.0
"#;

#[test]
fn schema_errors_are_actionable() {
    assert!(schema_error(TV_BASE).contains("requires σⱼ>0"));
    let unknown = TV_BASE.replace("MainTV", "MainTVX");
    assert!(schema_error(&unknown).contains("unknown tag `MainTVX`"));
    let library_only = TV_BASE.replace("MainTV", "CSTV");
    assert!(schema_error(&library_only).contains("library API only"));
    let typo = TV_BASE.replace("sigma = 1.0", "sigmaa = 1.0");
    assert!(schema_error(&typo).contains("sigmaa"));
    let no_eps = TV_BASE.replace("eps = 0.5\n", "").replace("sigma = 0.0", "sigma = 1.0");
    assert!(schema_error(&no_eps).contains("needs field `eps`"));
    let bad_p = format!("p = 3.0\n{TV_BASE}");
    assert!(schema_error(&bad_p).contains("must lie in [1, 2]"));
    let bad_family = TV_BASE.replace("two_point", "cauchy");
    assert!(schema_error(&bad_family).contains("cauchy"));
    let bad_measure = TV_BASE.replace("eps0 = 0.1", "eps0 = -0.1");
    assert!(schema_error(&bad_measure).contains("process1"));
    let scaling = r#"
id = "s"
mode = "small_jump_scaling"
t = 10.0
[sweep]
eps = [0.1]
[estimator]
sim_eps = 0.5
[process1]
measure = { family = "stable_power", c_pos = 1.0, c_neg = 0.0, alpha = 1.0 }
"#;
    assert!(schema_error(scaling).contains("at least two values"));
    let decay = "id = \"d\"\nmode = \"jr_decay\"\nr = 2.5\n[sweep]\nn = [100]\n";
    assert!(schema_error(decay).contains("must lie in (1, 2)"));
    let gauss = TV_BASE.replace("MainTV", "GaussTV").replace("sigma = 0.0", "sigma = 1.0");
    assert!(schema_error(&gauss).contains("both measures must be `zero`"));
}

#[test]
fn scaling_mode_reports_slopes() {
    let text = r#"
id = "tiny_scaling"
mode = "small_jump_scaling"
t = 10.0
[sweep]
eps = [0.125, 0.0625]
[estimator]
samples = 2000
seed = 3
sim_eps = 0.5
[process1]
measure = { family = "stable_power", c_pos = 1.0, c_neg = 0.0, alpha = 0.5 }
"#;
    let r = run(&Scenario::from_toml(text, "inline").unwrap(), None, None).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.slopes.len(), 1);
    assert!((r.slopes[0].bound_slope - 0.25).abs() < 1e-9);
    assert!(r.rows.iter().all(|x| x.alpha == Some(0.5) && x.branch == "min=moment"));
}
