//! Static SVG of the level curves `∂Γ`, `∂Γ_1`, `∂Γ_2`, the `τ` box, the
//! convergence domain and direction rays.
//!
//! Each set is convex, so its boundary is traced column by column from the
//! sublevel interval of the vertical section.

use std::fmt::Write;

use crate::asymptotics::{DirectionRate, DomainDescription};
use crate::error::Result;
use crate::model::MgfSurface;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 48.0;
const COLUMNS: usize = 600;
const DOMAIN_SAMPLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq)]
struct View {
    x: [f64; 2],
    y: [f64; 2],
}

impl View {
    fn around(points: &[[f64; 2]]) -> View {
        let (mut x, mut y) = ([0.0f64, 0.0f64], [0.0f64, 0.0f64]);
        for p in points.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
            x = [x[0].min(p[0]), x[1].max(p[0])];
            y = [y[0].min(p[1]), y[1].max(p[1])];
        }
        // Square aspect so the convex shapes are not distorted.
        let span = (x[1] - x[0]).max(y[1] - y[0]).max(1e-3) * 1.3;
        let (cx, cy) = (0.5 * (x[0] + x[1]), 0.5 * (y[0] + y[1]));
        View {
            x: [cx - span / 2.0, cx + span / 2.0],
            y: [cy - span / 2.0, cy + span / 2.0],
        }
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        let w = WIDTH - 2.0 * MARGIN;
        let h = HEIGHT - 2.0 * MARGIN;
        (
            MARGIN + (p[0] - self.x[0]) / (self.x[1] - self.x[0]) * w,
            MARGIN + (self.y[1] - p[1]) / (self.y[1] - self.y[0]) * h,
        )
    }

    /// Clamps far-away coordinates so the clip path, not the renderer, cuts them.
    fn clamp(&self, p: [f64; 2]) -> [f64; 2] {
        let sx = self.x[1] - self.x[0];
        let sy = self.y[1] - self.y[0];
        [
            p[0].clamp(self.x[0] - sx, self.x[1] + sx),
            p[1].clamp(self.y[0] - sy, self.y[1] + sy),
        ]
    }
}

fn path(view: &View, pts: &[[f64; 2]], close: bool) -> String {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = view.px(view.clamp(*p));
        let _ = write!(d, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
    }
    if close {
        d.push_str(" Z");
    }
    d
}

/// Closed outlines of `{s < 1}` restricted to the view, one per run of columns.
fn level_set_outlines(s: &MgfSurface, view: &View) -> Vec<Vec<[f64; 2]>> {
    let sx = view.x[1] - view.x[0];
    let lo_x = view.x[0] - 0.05 * sx;
    let step = 1.1 * sx / COLUMNS as f64;
    let mut runs = Vec::new();
    let (mut lower, mut upper): (Vec<[f64; 2]>, Vec<[f64; 2]>) = (Vec::new(), Vec::new());
    let mut flush = |lower: &mut Vec<[f64; 2]>, upper: &mut Vec<[f64; 2]>| {
        if lower.len() > 1 {
            let mut outline = std::mem::take(lower);
            outline.extend(upper.drain(..).rev());
            runs.push(outline);
        }
        lower.clear();
        upper.clear();
    };
    for i in 0..=COLUMNS {
        let x = lo_x + step * i as f64;
        match s.axis_section(1, x).sublevel(1.0) {
            Some((a, b)) => {
                lower.push([x, a.as_f64()]);
                upper.push([x, b.as_f64()]);
            }
            None => flush(&mut lower, &mut upper),
        }
    }
    flush(&mut lower, &mut upper);
    runs
}

/// Deterministic SVG for a convergence domain and the given direction rates.
pub fn render_svg(dom: &DomainDescription, rays: &[(String, DirectionRate)]) -> Result<String> {
    let pts = &dom.geometry.points;
    let tau = dom.tau();
    let mut anchors = vec![[0.0, 0.0], tau, [tau[0], 0.0], [0.0, tau[1]]];
    for k in 0..2 {
        anchors.extend([pts.theta_max[k], pts.theta_min[k], pts.theta_c[k]]);
    }
    for (_, r) in rays {
        anchors.push([r.alpha * r.c[0], r.alpha * r.c[1]]);
    }
    let view = View::around(&anchors);
    let s = dom.geometry.surfaces();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let (cx0, cy0) = view.px([view.x[0], view.y[1]]);
    let (cx1, cy1) = view.px([view.x[1], view.y[0]]);
    let _ = writeln!(
        svg,
        r#"<defs><clipPath id="plot"><rect x="{cx0:.2}" y="{cy0:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        cx1 - cx0,
        cy1 - cy0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(svg, r#"<g clip-path="url(#plot)">"#);

    // Domain: boundary samples closed through the far lower-left corner.
    let mut domain = dom.sample_boundary(DOMAIN_SAMPLES);
    if !domain.is_empty() {
        let far = [
            view.x[0] - 10.0 * (view.x[1] - view.x[0]),
            view.y[0] - 10.0 * (view.y[1] - view.y[0]),
        ];
        domain.push(far);
        let _ = writeln!(
            svg,
            r##"<path id="domain" d="{}" fill="#cfe3f7" fill-opacity="0.7" stroke="#1f5f9f" stroke-width="1.5"/>"##,
            path(&view, &domain, true)
        );
    }

    for (id, surface, colour) in [
        ("gamma", &s.gamma, "#000000"),
        ("gamma1", &s.gamma1, "#c0392b"),
        ("gamma2", &s.gamma2, "#27873d"),
    ] {
        for outline in level_set_outlines(surface, &view) {
            let _ = writeln!(
                svg,
                r#"<path class="{id}" d="{}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#,
                path(&view, &outline, true)
            );
        }
    }

    // τ box.
    let low = [view.x[0] - (view.x[1] - view.x[0]), view.y[0] - (view.y[1] - view.y[0])];
    let tau_box = [[low[0], tau[1]], tau, [tau[0], low[1]]];
    let _ = writeln!(
        svg,
        r##"<path id="tau" d="{}" fill="none" stroke="#7d3c98" stroke-width="1.2" stroke-dasharray="6 4"/>"##,
        path(&view, &tau_box, false)
    );

    // Axes.
    let (ox, oy) = view.px([0.0, 0.0]);
    let _ = writeln!(
        svg,
        r##"<line x1="{cx0:.2}" y1="{oy:.2}" x2="{cx1:.2}" y2="{oy:.2}" stroke="#888888" stroke-width="0.8"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{ox:.2}" y1="{cy0:.2}" x2="{ox:.2}" y2="{cy1:.2}" stroke="#888888" stroke-width="0.8"/>"##
    );

    for (label, r) in rays {
        let end = [r.alpha * r.c[0], r.alpha * r.c[1]];
        let (ex, ey) = view.px(end);
        let _ = writeln!(
            svg,
            r##"<line class="ray" x1="{ox:.2}" y1="{oy:.2}" x2="{ex:.2}" y2="{ey:.2}" stroke="#e67e22" stroke-width="1.5"/>"##
        );
        let _ = writeln!(svg, r##"<circle cx="{ex:.2}" cy="{ey:.2}" r="3" fill="#e67e22"/>"##);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">c=({label})</text>"#,
            ex + 5.0,
            ey - 5.0
        );
    }
    for k in 0..2 {
        let (x, y) = view.px(pts.theta_c[k]);
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">θ({},c)</text>"#,
            x + 5.0,
            y + 14.0,
            k + 1
        );
    }
    svg.push_str("</g>\n");

    let _ = writeln!(
        svg,
        r##"<rect x="{cx0:.2}" y="{cy0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444"/>"##,
        cx1 - cx0,
        cy1 - cy0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{cx0:.2}" y="{:.2}">θ1 ∈ [{:.3}, {:.3}]</text>"#,
        cy1 + 18.0,
        view.x[0],
        view.x[1]
    );
    let _ = writeln!(
        svg,
        r#"<text x="{cx0:.2}" y="{:.2}">θ2 ∈ [{:.3}, {:.3}]</text>"#,
        cy1 + 34.0,
        view.y[0],
        view.y[1]
    );
    let legend = [
        ("#000000", "∂Γ"),
        ("#c0392b", "∂Γ1"),
        ("#27873d", "∂Γ2"),
        ("#7d3c98", "τ box"),
        ("#1f5f9f", "domain"),
    ];
    for (i, (colour, name)) in legend.iter().enumerate() {
        let x = cx0 + 8.0 + 80.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"/>"#,
            cy0 - 14.0,
            x + 18.0,
            cy0 - 14.0
        );
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{name}</text>"#, x + 22.0, cy0 - 10.0);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometrySummary;
    use crate::model::fixtures::e1;

    fn e1_domain() -> DomainDescription {
        DomainDescription::new(GeometrySummary::compute(&e1().surfaces()).unwrap()).unwrap()
    }

    #[test]
    fn svg_is_deterministic_and_complete() {
        let dom = e1_domain();
        let rays = vec![("1,1".to_string(), dom.alpha_direction([1.0, 1.0]).unwrap())];
        let a = render_svg(&dom, &rays).unwrap();
        let b = render_svg(&dom, &rays).unwrap();
        assert_eq!(a, b);
        for needle in [
            r#"id="domain""#,
            r#"class="gamma""#,
            r#"class="gamma1""#,
            r#"class="gamma2""#,
            r#"id="tau""#,
            r#"class="ray""#,
        ] {
            assert!(a.contains(needle), "missing {needle}");
        }
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn outlines_lie_on_the_level_curve() {
        let dom = e1_domain();
        let s = dom.geometry.surfaces();
        let view = View::around(&[[-2.0, -2.0], [2.0, 2.0]]);
        let outlines = level_set_outlines(&s.gamma, &view);
        assert_eq!(outlines.len(), 1);
        for p in &outlines[0] {
            assert!((s.gamma.value(*p) - 1.0).abs() < 1e-8);
        }
    }
}
