//! Minimal SVG line plots for the dispersion curves.

use std::fmt::Write;

use crate::dispersion::{BandGapReport, Branch, Kind, Sample};

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
    /// Horizontal bands shaded across the plot, in y units.
    pub shade_y: Vec<(f64, f64)>,
    /// Vertical bands, in x units.
    pub shade_x: Vec<(f64, f64)>,
}

impl Plot {
    pub fn render(&self) -> String {
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(tx(x));
            x1 = x1.max(tx(x));
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x1 > x0) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        y0 = y0.min(0.0);
        if !(y1 > y0) {
            y1 = y0 + 1.0;
        }
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        for &(a, b) in &self.shade_y {
            let (ya, yb) = (sy(b.min(y1)), sy(a.max(y0)));
            let _ = writeln!(
                s,
                r##"<rect x="{LEFT:.2}" y="{ya:.2}" width="{pw:.2}" height="{:.2}" fill="#cccccc" fill-opacity="0.6"/>"##,
                (yb - ya).max(0.0)
            );
        }
        for &(a, b) in &self.shade_x {
            let lo = (sx(a) - LEFT).clamp(0.0, pw) + LEFT;
            let hi = (sx(b) - LEFT).clamp(0.0, pw) + LEFT;
            let _ = writeln!(
                s,
                r##"<rect x="{lo:.2}" y="{TOP:.2}" width="{:.2}" height="{ph:.2}" fill="#cccccc" fill-opacity="0.6"/>"##,
                (hi - lo).max(0.0)
            );
        }
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=5 {
            let f = i as f64 / 5.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let px = LEFT + f * pw;
            let py = TOP + (1.0 - f) * ph;
            let xl = if self.log_x { format!("1e{xv:.1}") } else { format!("{xv:.3e}") };
            let _ = writeln!(
                s,
                r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{xl}</text>"#,
                TOP + ph + 16.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{yv:.3e}</text>"#,
                LEFT - 6.0,
                py + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (n, series) in self.series.iter().enumerate() {
            let color = COLORS[n % COLORS.len()];
            let mut d = String::new();
            let mut pen_down = false;
            for &(x, y) in &series.points {
                if !(x.is_finite() && y.is_finite()) {
                    pen_down = false;
                    continue;
                }
                let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(x), sy(y));
                pen_down = true;
            }
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                d.trim_end()
            );
            let ly = TOP + 14.0 + 14.0 * n as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{ly:.2}" font-size="11" fill="{color}" text-anchor="end">{}</text>"#,
                W - RIGHT - 6.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn branch_label(b: &Branch) -> String {
    format!("{} {} {} x{}", b.id, b.mode_class, b.kind, b.multiplicity)
}

/// Frequency against k, then phase and group velocity against frequency.
/// Static branches are left out; resolved gaps are shaded on the
/// frequency axis of each plot (as a vertical band when ω is on x).
pub fn dispersion_plots(branches: &[Branch], gaps: &BandGapReport) -> [String; 3] {
    let moving: Vec<&Branch> = branches.iter().filter(|b| b.kind != Kind::Static).collect();
    let bands: Vec<(f64, f64)> = gaps.resolved().map(|g| (g.low, g.high)).collect();
    type Pick = dyn Fn(&Sample) -> f64;
    let make = |title: &str, x_label: &str, y_label: &str, log_x: bool, fx: &Pick, fy: &Pick| {
        let omega_on_x = !log_x;
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x,
            series: moving
                .iter()
                .map(|b| Series {
                    label: branch_label(b),
                    points: b.samples.iter().map(|s| (fx(s), fy(s))).collect(),
                })
                .collect(),
            shade_y: if omega_on_x { Vec::new() } else { bands.clone() },
            shade_x: if omega_on_x { bands.clone() } else { Vec::new() },
        }
        .render()
    };
    [
        make("Dispersion", "k (1/m)", "omega (rad/s)", true, &|s| s.k, &|s| s.omega),
        make("Phase velocity", "omega (rad/s)", "omega/k (m/s)", false, &|s| s.omega, &|s| s.v_phase),
        make("Group velocity", "omega (rad/s)", "d omega/dk (m/s)", false, &|s| s.omega, &|s| s.v_group),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_paths_and_shading() {
        let p = Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            series: vec![Series {
                label: "a<b".into(),
                points: vec![(1.0, 1.0), (10.0, 2.0), (100.0, f64::NAN), (1000.0, 3.0)],
            }],
            shade_y: vec![(1.5, 2.5)],
            shade_x: vec![(2.0, 20.0)],
        };
        let s = p.render();
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<path").count(), 1);
        let d = s.split("<path d=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(d.matches('M').count(), 2, "{d}");
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("fill-opacity").count(), 2);
    }
}
