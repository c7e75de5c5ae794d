//! Standalone SVG line plot of a sweep: score against leading dimension,
//! with detected spikes marked.

use std::fmt::Write;

use crate::partition::{ScoreSeries, Spike};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const MARKED_SPIKES: usize = 5;

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    while t <= hi + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

pub fn sweep_svg(series: &ScoreSeries, spikes: &[Spike]) -> String {
    let pts: Vec<(f64, f64)> = series
        .scored()
        .map(|(c, v)| (c.leading_dim() as f64, v))
        .collect();
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{} score by leading dimension</text>"#,
        WIDTH / 2.0,
        series.measure
    )
    .unwrap();
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }

    let (xmin, xmax) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (ymin, ymax) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (xmax, ymax) = (
        if xmax > xmin { xmax } else { xmin + 1.0 },
        if ymax > ymin { ymax } else { ymin + 1.0 },
    );
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h;

    let bottom = MARGIN_TOP + plot_h;
    writeln!(
        s,
        r#"<g stroke="black"><line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{}" y2="{bottom}"/><line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}"/></g>"#,
        MARGIN_LEFT + plot_w
    )
    .unwrap();
    for t in nice_ticks(xmin, xmax, 10) {
        let x = sx(t);
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        )
        .unwrap();
    }
    for t in nice_ticks(ymin, ymax, 6) {
        let y = sy(t);
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">leading dimension</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();

    let path: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#,
        path.join(" ")
    )
    .unwrap();

    for spike in spikes.iter().take(MARKED_SPIKES) {
        let (x, y) = (sx(spike.candidate.leading_dim() as f64), sy(spike.value));
        writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="crimson" stroke-width="2"/><text x="{x:.2}" y="{:.2}" fill="crimson" text-anchor="middle">{}</text>"#,
            y + 18.0,
            spike.candidate
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
