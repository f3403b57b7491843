//! Minimal static SVG plots.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::StepRecord;
use crate::scenario::{ActorId, PhaseSpan};

const W: f64 = 720.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

struct Axes {
    x_max: f64,
    y_max: f64,
}

impl Axes {
    fn new(x_max: f64, y_max: f64) -> Self {
        Axes {
            x_max: if x_max > 0.0 { x_max } else { 1.0 },
            y_max: if y_max > 0.0 { y_max } else { 1.0 },
        }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + x / self.x_max * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - y / self.y_max * (H - 2.0 * PAD)
    }

    fn frame(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let _ = write!(
            out,
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{cx}" y="20" text-anchor="middle" font-size="14">{title}</text>
<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>
<text x="{cx}" y="{xl}" text-anchor="middle">{x_label}</text>
<text x="16" y="{cy}" text-anchor="middle" transform="rotate(-90 16 {cy})">{y_label}</text>
"##,
            cx = W / 2.0,
            cy = H / 2.0,
            b = H - PAD,
            r = W - PAD,
            xl = H - 16.0,
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
                self.px(f * self.x_max),
                H - PAD + 16.0,
                f * self.x_max
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
                PAD - 6.0,
                self.py(f * self.y_max) + 4.0,
                f * self.y_max
            );
        }
    }
}

fn legend(out: &mut String, ids: &[&ActorId]) {
    for (i, id) in ids.iter().enumerate() {
        let y = PAD + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            W - PAD - 60.0,
            y - 9.0,
            PALETTE[i % PALETTE.len()],
            W - PAD - 45.0,
            y,
            id
        );
    }
}

fn actor_ids(records: &[StepRecord]) -> Vec<&ActorId> {
    let mut ids: Vec<&ActorId> = records.iter().map(|r| &r.actor_id).collect();
    ids.sort();
    ids.dedup();
    ids
}

/// Importance against prediction error, one dot per actor and replan tick.
pub fn scatter(records: &[StepRecord]) -> String {
    let ids = actor_ids(records);
    let points: Vec<(usize, f64, f64)> = records
        .iter()
        .filter_map(|r| {
            let c = ids.iter().position(|id| **id == r.actor_id)?;
            Some((c, r.prediction_error?, r.gamma_euclid.or(r.gamma_kl)?))
        })
        .collect();
    let axes = Axes::new(
        points.iter().map(|p| p.1).fold(0.0, f64::max),
        points.iter().map(|p| p.2).fold(0.0, f64::max),
    );
    let mut out = String::new();
    axes.frame(
        &mut out,
        "Actor importance vs prediction error",
        "prediction error (m)",
        "importance",
    );
    for (c, e, g) in points {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}" fill-opacity="0.7"/>"#,
            axes.px(e),
            axes.py(g),
            PALETTE[c % PALETTE.len()]
        );
    }
    legend(&mut out, &ids);
    out.push_str("</svg>\n");
    out
}

/// Importance of every actor over time with phase boundaries.
pub fn timeline(records: &[StepRecord], phases: &[PhaseSpan], horizon_ticks: usize) -> String {
    let ids = actor_ids(records);
    let mut series: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        if let (Some(c), Some(g)) = (
            ids.iter().position(|id| **id == r.actor_id),
            r.gamma_euclid.or(r.gamma_kl),
        ) {
            series.entry(c).or_default().push((r.tick as f64, g));
        }
    }
    let y_max = series.values().flatten().map(|p| p.1).fold(0.0, f64::max);
    let axes = Axes::new(horizon_ticks as f64, y_max);
    let mut out = String::new();
    axes.frame(&mut out, "Actor importance over time", "tick", "importance");
    for p in phases {
        let x = axes.px(p.start_tick as f64);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{PAD}" x2="{x:.1}" y2="{:.1}" stroke="#bbbbbb" stroke-dasharray="4 3"/><text x="{:.1}" y="{:.1}">{}</text>"##,
            H - PAD,
            x + 3.0,
            PAD - 6.0,
            p.name
        );
    }
    for (c, pts) in &series {
        let path: Vec<String> = pts
            .iter()
            .map(|(t, g)| format!("{:.1},{:.1}", axes.px(*t), axes.py(*g)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.2"/>"#,
            path.join(" "),
            PALETTE[c % PALETTE.len()]
        );
    }
    legend(&mut out, &ids);
    out.push_str("</svg>\n");
    out
}
