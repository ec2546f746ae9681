//! Static 800×600 SVG line plots: one polyline per series, labelled axes and
//! a legend. Coordinates are printed with three decimals so output is stable.

use std::fmt::Write;

use crate::config::PlotScale;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub scale: PlotScale,
    pub series: Vec<Series>,
    /// Extra legend lines without a swatch.
    pub notes: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("log-log plot refuses nonpositive value {value} in series {series} ({axis} axis)")]
    Nonpositive {
        series: String,
        axis: &'static str,
        value: f64,
    },
    #[error("nothing to plot: every series is empty")]
    Empty,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let pad = if hi == 0.0 { 1.0 } else { 0.5 * hi.abs() };
            (lo, hi) = if log { (lo - 0.5, hi + 0.5) } else { (lo - pad, hi + pad) };
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in the transformed coordinate and their labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            if b >= a {
                let stride = ((b - a) / 8 + 1) as usize;
                return (a..=b).step_by(stride).map(|e| (f64::from(e), format!("1e{e}"))).collect();
            }
        }
        (0..=4)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * f64::from(i) / 4.0;
                let label = if self.log { format!("{:.3e}", 10f64.powf(t)) } else { format!("{t:.4}") };
                (t, label)
            })
            .collect()
    }
}

impl Plot {
    pub fn render(&self) -> Result<String, PlotError> {
        let log = self.scale == PlotScale::Loglog;
        let points = || self.series.iter().flat_map(|s| s.points.iter().copied());
        if points().next().is_none() {
            return Err(PlotError::Empty);
        }
        if log {
            for s in &self.series {
                for &(x, y) in &s.points {
                    for (axis, value) in [("x", x), ("y", y)] {
                        if !(value > 0.0) {
                            return Err(PlotError::Nonpositive {
                                series: s.name.clone(),
                                axis,
                                value,
                            });
                        }
                    }
                }
            }
        }
        let ax = Axis::fit(points().map(|p| p.0), log);
        let ay = Axis::fit(points().map(|p| p.1), log);
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let px = |x: f64| LEFT + pw * ax.unit(x);
        let py = |y: f64| TOP + ph * (1.0 - ay.unit(y));

        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(w, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            w,
            r#"<rect x="{LEFT:.3}" y="{TOP:.3}" width="{pw:.3}" height="{ph:.3}" fill="none" stroke="black"/>"#
        );
        for (t, label) in ax.ticks() {
            let x = LEFT + pw * (t - ax.lo) / (ax.hi - ax.lo);
            let _ = writeln!(
                w,
                r##"<line x1="{x:.3}" y1="{TOP:.3}" x2="{x:.3}" y2="{:.3}" stroke="#dddddd"/>"##,
                TOP + ph
            );
            let _ = writeln!(
                w,
                r#"<text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
                TOP + ph + 18.0,
                escape(&label)
            );
        }
        for (t, label) in ay.ticks() {
            let y = TOP + ph * (1.0 - (t - ay.lo) / (ay.hi - ay.lo));
            let _ = writeln!(
                w,
                r##"<line x1="{LEFT:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#dddddd"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                escape(&label)
            );
        }
        let _ = writeln!(
            w,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 24.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            w,
            r#"<text x="20" y="{:.3}" text-anchor="middle" transform="rotate(-90 20 {:.3})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        let legend_x = LEFT + pw + 16.0;
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let coords: Vec<String> =
                series.points.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
            let ly = TOP + 10.0 + 20.0 * i as f64;
            let _ = writeln!(
                w,
                r#"<line x1="{legend_x:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{color}" stroke-width="3"/>"#,
                legend_x + 20.0
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.3}" y="{:.3}">{}</text>"#,
                legend_x + 26.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        for (i, note) in self.notes.iter().enumerate() {
            let ly = TOP + 10.0 + 20.0 * (self.series.len() + i) as f64;
            let _ = writeln!(w, r#"<text x="{legend_x:.3}" y="{:.3}">{}</text>"#, ly + 4.0, escape(note));
        }
        let _ = writeln!(w, "</svg>");
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(scale: PlotScale, points: Vec<(f64, f64)>) -> Plot {
        Plot {
            title: "t".into(),
            x_label: "n".into(),
            y_label: "sup_error".into(),
            scale,
            series: vec![Series {
                name: "e2".into(),
                points,
            }],
            notes: vec![],
        }
    }

    #[test]
    fn self_contained_and_labelled() {
        let s = plot(PlotScale::Loglog, vec![(4.0, 0.5), (8.0, 0.25)]).render().unwrap();
        assert!(s.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\""));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.contains(">n</text>") && s.contains(">sup_error</text>"));
        assert!(!s.contains("href"));
    }

    #[test]
    fn loglog_refuses_nonpositive() {
        let err = plot(PlotScale::Loglog, vec![(4.0, 0.0)]).render().unwrap_err();
        assert!(matches!(err, PlotError::Nonpositive { axis: "y", .. }));
        assert!(plot(PlotScale::Linear, vec![(4.0, 0.0), (5.0, -1.0)]).render().is_ok());
    }

    #[test]
    fn single_point_renders() {
        assert!(plot(PlotScale::Linear, vec![(1.0, 1.0)]).render().is_ok());
        assert!(plot(PlotScale::Linear, vec![]).render().is_err());
    }
}
