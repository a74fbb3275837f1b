//! SVG panels, one per coordinate, of the complex-plane traces: hyperplane
//! points `-lambda_k` and the segments swept by each polytope.

use std::fmt::Write as _;

use crate::config::GlueConfiguration;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlotError {
    #[error("{what} has nonzero first component {value}; only data in 0 + C can be drawn")]
    NonPlanar { what: String, value: f64 },
}

const PANEL: f64 = 320.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

struct Panel {
    points: Vec<(String, f64, f64)>,
    segments: Vec<(String, usize, [f64; 4])>,
}

pub fn render_svg(cfg: &GlueConfiguration) -> Result<String, PlotError> {
    let n = cfg.n();
    let tol = 1e-12;
    let mut panels: Vec<Panel> = (0..n)
        .map(|_| Panel {
            points: vec![],
            segments: vec![],
        })
        .collect();
    for (k, l) in cfg.arrangement.lambda().iter().enumerate() {
        if l[0].abs() > tol {
            return Err(PlotError::NonPlanar {
                what: format!("lambda[{k}]"),
                value: l[0],
            });
        }
        let col = cfg.arrangement.torus().column(k);
        for (alpha, &c) in col.iter().enumerate() {
            if c.abs() == 1 && col.iter().filter(|x| **x != 0).count() == 1 {
                let sign = c as f64;
                panels[alpha].points.push((format!("{}", k), -sign * l[1], -sign * l[2]));
            }
        }
    }
    for (i, p) in cfg.polytopes.iter().enumerate() {
        let (cos, sin) = p.theta.cos_sin();
        for (alpha, q) in p.q.0.iter().enumerate() {
            if q[0].abs() > tol {
                return Err(PlotError::NonPlanar {
                    what: format!("{}.q[{alpha}]", p.name),
                    value: q[0],
                });
            }
            let xs = p.base.vertices().iter().map(|v| v[alpha]);
            let lo = xs.clone().fold(f64::INFINITY, f64::min) * p.scale;
            let hi = xs.fold(f64::NEG_INFINITY, f64::max) * p.scale;
            panels[alpha].segments.push((
                p.name.clone(),
                i,
                [q[1] + lo * cos, q[2] + lo * sin, q[1] + hi * cos, q[2] + hi * sin],
            ));
        }
    }

    let width = n.max(1) as f64 * (PANEL + MARGIN) + MARGIN;
    let height = PANEL + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.3}\" height=\"{height:.3}\" viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (alpha, panel) in panels.iter().enumerate() {
        let coords = panel
            .points
            .iter()
            .flat_map(|&(_, x, y)| [x, y])
            .chain(panel.segments.iter().flat_map(|(_, _, s)| *s));
        let extent = coords.fold(1.0f64, |m, v| m.max(v.abs())) * 1.15;
        let ox = MARGIN + alpha as f64 * (PANEL + MARGIN) + PANEL / 2.0;
        let oy = MARGIN + PANEL / 2.0;
        let unit = PANEL / (2.0 * extent);
        let at = |x: f64, y: f64| (ox + x * unit, oy - y * unit);

        let _ = writeln!(svg, "<g id=\"coordinate-{}\">", alpha + 1);
        let _ = writeln!(
            svg,
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{PANEL:.3}\" height=\"{PANEL:.3}\" fill=\"none\" stroke=\"#cccccc\"/>",
            ox - PANEL / 2.0,
            oy - PANEL / 2.0
        );
        let (x0, _) = at(-extent, 0.0);
        let (x1, _) = at(extent, 0.0);
        let (_, y0) = at(0.0, extent);
        let (_, y1) = at(0.0, -extent);
        let _ = writeln!(svg, "<line x1=\"{x0:.3}\" y1=\"{oy:.3}\" x2=\"{x1:.3}\" y2=\"{oy:.3}\" stroke=\"#999999\"/>");
        let _ = writeln!(svg, "<line x1=\"{ox:.3}\" y1=\"{y0:.3}\" x2=\"{ox:.3}\" y2=\"{y1:.3}\" stroke=\"#999999\"/>");
        let _ = writeln!(
            svg,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\">coordinate {}</text>",
            ox - PANEL / 2.0 + 4.0,
            oy - PANEL / 2.0 + 14.0,
            alpha + 1
        );
        for (name, i, s) in &panel.segments {
            let (ax, ay) = at(s[0], s[1]);
            let (bx, by) = at(s[2], s[3]);
            let colour = PALETTE[i % PALETTE.len()];
            let _ = writeln!(
                svg,
                "<line x1=\"{ax:.3}\" y1=\"{ay:.3}\" x2=\"{bx:.3}\" y2=\"{by:.3}\" stroke=\"{colour}\" stroke-width=\"3\"><title>{name}</title></line>"
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"10\" fill=\"{colour}\">{name}</text>",
                (ax + bx) / 2.0 + 4.0,
                (ay + by) / 2.0 - 4.0
            );
        }
        for (label, x, y) in &panel.points {
            let (cx, cy) = at(*x, *y);
            let _ = writeln!(
                svg,
                "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"3\" fill=\"black\"><title>hyperplane {label}</title></circle>"
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
