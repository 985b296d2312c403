//! Static SVG charts on log-log axes, rendered without any display
//! dependency. Scatter, line, and shaded-band series cover everything the
//! fit and TTF reports need; each series becomes exactly one `<path>`
//! element, which keeps the output smoke-checkable.

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 64.0;

const PALETTE: [&str; 5] = ["#1b6ca8", "#c23b22", "#2e7d32", "#7b1fa2", "#6d4c41"];

#[derive(Debug, Clone)]
pub enum Series {
    Scatter {
        label: String,
        points: Vec<(f64, f64)>,
    },
    Line {
        label: String,
        points: Vec<(f64, f64)>,
    },
    /// Shaded region between two polylines sharing an x-ordering.
    Band {
        label: String,
        lower: Vec<(f64, f64)>,
        upper: Vec<(f64, f64)>,
    },
}

impl Series {
    fn label(&self) -> &str {
        match self {
            Series::Scatter { label, .. }
            | Series::Line { label, .. }
            | Series::Band { label, .. } => label,
        }
    }

    fn points(&self) -> Vec<(f64, f64)> {
        match self {
            Series::Scatter { points, .. } | Series::Line { points, .. } => points.clone(),
            Series::Band { lower, upper, .. } => {
                lower.iter().chain(upper.iter()).copied().collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// log10 range over the finite positive values of every series, padded
/// by 5% of its span (half a decade when degenerate).
fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        if v.is_finite() && v > 0.0 {
            let l = v.log10();
            lo = lo.min(l);
            hi = hi.max(l);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn decade_ticks(lo: f64, hi: f64) -> Vec<i64> {
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    if last < first {
        return vec![];
    }
    let span = (last - first) as usize + 1;
    let stride = span.div_ceil(10).max(1);
    (first..=last).step_by(stride).collect()
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + (v.log10() - self.x_lo) / (self.x_hi - self.x_lo) * plot_w
    }

    fn y(&self, v: f64) -> f64 {
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        HEIGHT - MARGIN_BOTTOM - (v.log10() - self.y_lo) / (self.y_hi - self.y_lo) * plot_h
    }

    fn contains(&self, p: (f64, f64)) -> bool {
        p.0.is_finite() && p.0 > 0.0 && p.1.is_finite() && p.1 > 0.0
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn polyline_path(frame: &Frame, points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for &p in points {
        if !frame.contains(p) {
            pen_down = false;
            continue;
        }
        let cmd = if pen_down { 'L' } else { 'M' };
        d.push_str(&format!("{cmd}{} {} ", fmt(frame.x(p.0)), fmt(frame.y(p.1))));
        pen_down = true;
    }
    d.trim_end().to_string()
}

/// Render a chart with both axes logarithmic. Non-finite and
/// non-positive points are dropped (they have no place on a log axis).
pub fn render_log_log(spec: &ChartSpec) -> String {
    let (x_lo, x_hi) = axis_range(spec.series.iter().flat_map(|s| {
        s.points().into_iter().map(|p| p.0).collect::<Vec<_>>()
    }));
    let (y_lo, y_hi) = axis_range(spec.series.iter().flat_map(|s| {
        s.points().into_iter().map(|p| p.1).collect::<Vec<_>>()
    }));
    let frame = Frame { x_lo, x_hi, y_lo, y_hi };

    let mut svg = String::with_capacity(8192);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(&spec.title)
    ));

    // grid and tick labels
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;
    for k in decade_ticks(x_lo, x_hi) {
        let x = frame.x(10f64.powi(k as i32));
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{MARGIN_TOP}\" x2=\"{x:.2}\" y2=\"{plot_bottom}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e{k}</text>\n",
            plot_bottom + 16.0
        ));
    }
    for k in decade_ticks(y_lo, y_hi) {
        let y = frame.y(10f64.powi(k as i32));
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            WIDTH - MARGIN_RIGHT
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{k}</text>\n",
            MARGIN_LEFT - 6.0,
            y + 4.0
        ));
    }
    // frame
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    ));

    // series, bands first so strokes stay visible
    let mut ordered: Vec<(usize, &Series)> = spec.series.iter().enumerate().collect();
    ordered.sort_by_key(|(i, s)| (!matches!(s, Series::Band { .. }), *i));
    for (idx, series) in &ordered {
        let color = PALETTE[idx % PALETTE.len()];
        match series {
            Series::Band { lower, upper, .. } => {
                let mut pts: Vec<(f64, f64)> = lower.clone();
                let mut back: Vec<(f64, f64)> = upper.clone();
                back.reverse();
                pts.extend(back);
                let d = polyline_path(&frame, &pts);
                if !d.is_empty() {
                    svg.push_str(&format!(
                        "<path d=\"{d} Z\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n"
                    ));
                }
            }
            Series::Line { points, .. } => {
                let d = polyline_path(&frame, points);
                if !d.is_empty() {
                    svg.push_str(&format!(
                        "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n"
                    ));
                }
            }
            Series::Scatter { points, .. } => {
                // one path of small crosses per scatter series
                let mut d = String::new();
                for &p in points {
                    if !frame.contains(p) {
                        continue;
                    }
                    let (x, y) = (frame.x(p.0), frame.y(p.1));
                    d.push_str(&format!(
                        "M{} {} L{} {} M{} {} L{} {} ",
                        fmt(x - 3.5),
                        fmt(y),
                        fmt(x + 3.5),
                        fmt(y),
                        fmt(x),
                        fmt(y - 3.5),
                        fmt(x),
                        fmt(y + 3.5)
                    ));
                }
                if !d.is_empty() {
                    svg.push_str(&format!(
                        "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                        d.trim_end()
                    ));
                }
            }
        }
    }

    // legend
    for (row, (idx, series)) in ordered.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_TOP + 16.0 + 16.0 * row as f64;
        let x = WIDTH - MARGIN_RIGHT - 180.0;
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            y - 4.0,
            x + 18.0,
            y - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            x + 24.0,
            escape(series.label())
        ));
    }

    // axis labels
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        HEIGHT - 18.0,
        escape(&spec.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>\n",
        MARGIN_TOP + (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / 2.0,
        MARGIN_TOP + (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / 2.0,
        escape(&spec.y_label)
    ));

    svg.push_str("</svg>\n");
    svg
}
