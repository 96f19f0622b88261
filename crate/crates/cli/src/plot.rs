//! Log-log SVG charts drawn from a JSON report.
//!
//! The output is plain SVG with fixed formatting, so the same report always
//! yields the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::report::Report;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Normalized small-jump distance against `eps`, one pair of curves per `alpha`.
    Scaling,
    /// Lower bound, estimate and upper bound of the small-jump distance against `t`.
    Sandwich,
    /// Minimax TV bound and its closed form against `n`.
    Decay,
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "scaling" => Ok(Self::Scaling),
            "sandwich" => Ok(Self::Sandwich),
            "decay" => Ok(Self::Decay),
            _ => Err(format!("unknown plot kind `{s}` (expected scaling, sandwich or decay)")),
        }
    }
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Scaling => "scaling",
            Self::Sandwich => "sandwich",
            Self::Decay => "decay",
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    /// `(low, high)` per point.
    bars: Option<Vec<(f64, f64)>>,
    color: &'static str,
    dashed: bool,
}

struct Chart {
    title: String,
    xlabel: &'static str,
    ylabel: &'static str,
    series: Vec<Series>,
}

pub fn render(report: &Report, kind: PlotKind) -> Result<String, CliError> {
    let chart = match kind {
        PlotKind::Scaling => scaling_chart(report),
        PlotKind::Sandwich => sandwich_chart(report),
        PlotKind::Decay => decay_chart(report),
    }
    .map_err(|msg| CliError::Schema { file: report.scenario.id.clone(), msg })?;
    Ok(draw(&chart))
}

fn key(v: f64) -> u64 {
    v.to_bits()
}

fn scaling_chart(r: &Report) -> Result<Chart, String> {
    let mut by_alpha: BTreeMap<u64, Vec<&crate::runner::Row>> = BTreeMap::new();
    for row in r.rows.iter().filter(|x| x.alpha.is_some() && x.eps.is_some()) {
        by_alpha.entry(key(row.alpha.unwrap())).or_default().push(row);
    }
    if by_alpha.is_empty() {
        return Err("plot `scaling` needs a small_jump_scaling report".into());
    }
    let mut series = Vec::new();
    for (i, rows) in by_alpha.values().enumerate() {
        let alpha = rows[0].alpha.unwrap();
        let color = PALETTE[i % PALETTE.len()];
        let emp: Vec<(f64, f64)> = rows.iter().filter_map(|x| Some((x.eps?, x.empirical?))).collect();
        let bars = rows.iter().filter_map(|x| Some((x.ci_low?, x.ci_high?))).collect();
        series.push(Series {
            label: format!("estimate, alpha = {alpha}"),
            points: emp,
            bars: Some(bars),
            color,
            dashed: false,
        });
        let b: Vec<(f64, f64)> = rows.iter().filter_map(|x| Some((x.eps?, x.bound?))).collect();
        series.push(Series { label: format!("bound, alpha = {alpha}"), points: b, bars: None, color, dashed: true });
    }
    Ok(Chart { title: format!("{}: W_p / sigma_bar", r.scenario.id), xlabel: "eps", ylabel: "distance", series })
}

fn sandwich_chart(r: &Report) -> Result<Chart, String> {
    let mut by_eps: BTreeMap<u64, Vec<&crate::runner::Row>> = BTreeMap::new();
    for row in r.rows.iter().filter(|x| x.theorem == "SmallJumpW" && x.t.is_some() && x.eps.is_some()) {
        by_eps.entry(key(row.eps.unwrap())).or_default().push(row);
    }
    if by_eps.is_empty() {
        return Err("plot `sandwich` needs SmallJumpW rows from a certify report".into());
    }
    let mut series = Vec::new();
    for (i, rows) in by_eps.values().enumerate() {
        let eps = rows[0].eps.unwrap();
        let c = |k: usize| PALETTE[(3 * i + k) % PALETTE.len()];
        let pts = |f: fn(&crate::runner::Row) -> Option<f64>| -> Vec<(f64, f64)> {
            rows.iter().filter_map(|x| Some((x.t?, f(x)?))).collect()
        };
        let bars = rows.iter().filter_map(|x| Some((x.ci_low?, x.ci_high?))).collect();
        series.push(Series {
            label: format!("estimate, eps = {eps}"),
            points: pts(|x| x.empirical),
            bars: Some(bars),
            color: c(0),
            dashed: false,
        });
        series.push(Series {
            label: format!("upper, eps = {eps}"),
            points: pts(|x| x.bound),
            bars: None,
            color: c(1),
            dashed: true,
        });
        let lower = pts(|x| x.lower_bound);
        if !lower.is_empty() {
            series.push(Series {
                label: format!("lower, eps = {eps}"),
                points: lower,
                bars: None,
                color: c(2),
                dashed: true,
            });
        }
    }
    Ok(Chart { title: format!("{}: small-jump W_p", r.scenario.id), xlabel: "t", ylabel: "distance", series })
}

fn decay_chart(r: &Report) -> Result<Chart, String> {
    if r.decay.is_empty() {
        return Err("plot `decay` needs a jr_decay report".into());
    }
    let pts = |f: fn(&crate::runner::DecayRow) -> f64| -> Vec<(f64, f64)> {
        r.decay.iter().map(|d| (d.n as f64, f(d))).collect()
    };
    let series = vec![
        Series {
            label: "TV per increment".into(),
            points: pts(|d| d.tv_bound),
            bars: None,
            color: PALETTE[0],
            dashed: false,
        },
        Series {
            label: "closed form".into(),
            points: pts(|d| d.closed_form),
            bars: None,
            color: PALETTE[1],
            dashed: true,
        },
        Series {
            label: "sqrt(n TV)".into(),
            points: pts(|d| d.product_bound),
            bars: None,
            color: PALETTE[2],
            dashed: false,
        },
    ];
    Ok(Chart { title: format!("{}: minimax TV decay", r.scenario.id), xlabel: "n", ylabel: "bound", series })
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Decade range covering every positive value.
fn decades(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| *v > 0.0 && v.is_finite()) {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (a, b) = (lo.floor(), hi.ceil());
    if b > a {
        (a, b)
    } else {
        (a, a + 1.0)
    }
}

fn draw(c: &Chart) -> String {
    let (xa, xb) = decades(c.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (ya, yb) = decades(c.series.iter().flat_map(|s| {
        let bars = s.bars.iter().flatten().flat_map(|b| [b.0, b.1]);
        s.points.iter().map(|p| p.1).chain(bars).collect::<Vec<_>>()
    }));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x.log10() - xa) / (xb - xa) * pw;
    let sy = |y: f64| TOP + ph - (y.max(10f64.powf(ya)).log10() - ya) / (yb - ya) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        esc(&c.title)
    );
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for d in xa as i32..=xb as i32 {
        let x = sx(10f64.powi(d));
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#, TOP + ph + 18.0);
    }
    for d in ya as i32..=yb as i32 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0);
        // short ranges get 2x and 5x ticks
        if yb - ya <= 2.0 && (d as f64) < yb {
            for m in [2.0, 5.0] {
                let y = sy(m * 10f64.powi(d));
                let _ =
                    writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#eee"/>"##, LEFT + pw);
                let _ = writeln!(
                    s,
                    r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#666">{m}e{d}</text>"##,
                    LEFT - 6.0,
                    y + 4.0
                );
            }
        }
    }
    let _ =
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 16.0, c.xlabel);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        c.ylabel
    );
    for (i, se) in c.series.iter().enumerate() {
        let pts: Vec<String> = se
            .points
            .iter()
            .filter(|p| p.0 > 0.0 && p.1 > 0.0)
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let dash = if se.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            pts.join(" "),
            se.color
        );
        if !se.dashed {
            for p in se.points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0) {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, sx(p.0), sy(p.1), se.color);
            }
        }
        if let Some(bars) = &se.bars {
            for (p, b) in se.points.iter().zip(bars) {
                let x = sx(p.0);
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{}"/>"#,
                    sy(b.0),
                    sy(b.1),
                    se.color
                );
            }
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0,
            se.color
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 30.0, ly + 4.0, esc(&se.label));
    }
    s.push_str("</svg>\n");
    s
}

fn esc(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
