//! Dependency-free SVG heatmaps of phase-diagram grids.

use std::fmt::Write;

use super::PhaseDiagramGrid;
use crate::divisibility::DivisibilityClass;

/// Fill colours per class.
#[derive(Clone, Debug, PartialEq)]
pub struct Palette {
    pub pd0: String,
    pub pd1: String,
    pub pd2: String,
    pub error: String,
}

impl Default for Palette {
    /// Gray for PD2, blue for PD1, red for PD0.
    fn default() -> Self {
        Self { pd0: "#d62728".into(), pd1: "#1f77b4".into(), pd2: "#9e9e9e".into(), error: "#ffffff".into() }
    }
}

impl Palette {
    pub fn fill(&self, class: Option<DivisibilityClass>) -> &str {
        match class {
            Some(DivisibilityClass::PD0) => &self.pd0,
            Some(DivisibilityClass::PD1) => &self.pd1,
            Some(DivisibilityClass::PD2) => &self.pd2,
            None => &self.error,
        }
    }
}

const PLOT: f64 = 480.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;
const RIGHT: f64 = 20.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A grid edge between two cells as a segment in plot coordinates.
type Segment = ((f64, f64), (f64, f64));

struct Layout {
    nx: usize,
    ny: usize,
    w: f64,
    h: f64,
}

impl Layout {
    fn left(&self, ix: usize) -> f64 {
        LEFT + ix as f64 * self.w
    }

    /// Row `iy = 0` sits at the bottom.
    fn top(&self, iy: usize) -> f64 {
        TOP + (self.ny - 1 - iy) as f64 * self.h
    }

    /// Shared edges between horizontally and vertically adjacent cells whose
    /// `key` differs.
    fn edges<K: PartialEq, F: Fn(usize, usize) -> K>(&self, key: F) -> Vec<Segment> {
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let here = key(ix, iy);
                if ix + 1 < self.nx && here != key(ix + 1, iy) {
                    let x = self.left(ix + 1);
                    out.push(((x, self.top(iy)), (x, self.top(iy) + self.h)));
                }
                if iy + 1 < self.ny && here != key(ix, iy + 1) {
                    let y = self.top(iy);
                    out.push(((self.left(ix), y), (self.left(ix) + self.w, y)));
                }
            }
        }
        out
    }
}

fn polylines(out: &mut String, class: &str, style: &str, segments: &[Segment]) {
    for ((x0, y0), (x1, y1)) in segments {
        let _ = writeln!(
            out,
            r#"<polyline class="{class}" points="{x0:.2},{y0:.2} {x1:.2},{y1:.2}" fill="none" {style}/>"#
        );
    }
}

/// Cells whose BLP measure exceeds the grid's detection threshold.
pub(crate) fn blp_detected(grid: &PhaseDiagramGrid, ix: usize, iy: usize) -> bool {
    grid.cell(ix, iy).blp.is_some_and(|b| b > grid.spec.detection_threshold)
}

/// One rect per cell, class-boundary polylines, axis labels, and a dashed
/// contour around BLP-detected cells when the grid holds both detected and
/// undetected PD0 cells.
pub fn encode_svg(grid: &PhaseDiagramGrid, palette: &Palette) -> String {
    let spec = &grid.spec;
    let layout = Layout { nx: spec.x.n, ny: spec.y.n, w: PLOT / spec.x.n as f64, h: PLOT / spec.y.n as f64 };
    let width = LEFT + PLOT + RIGHT;
    let height = TOP + PLOT + BOTTOM;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    for iy in 0..layout.ny {
        for ix in 0..layout.nx {
            let c = grid.cell(ix, iy);
            let label = c.class.map_or("ERR", |k| k.name());
            let _ = writeln!(
                out,
                r#"<rect class="cell {label}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                layout.left(ix),
                layout.top(iy),
                layout.w,
                layout.h,
                palette.fill(c.class)
            );
        }
    }

    let class_boundary = layout.edges(|ix, iy| grid.cell(ix, iy).class);
    polylines(&mut out, "class-boundary", r##"stroke="#000000" stroke-width="1""##, &class_boundary);

    let pd0 = |ix: usize, iy: usize| grid.cell(ix, iy).class == Some(DivisibilityClass::PD0);
    let mut detected_pd0 = false;
    let mut undetected_pd0 = false;
    for iy in 0..layout.ny {
        for ix in 0..layout.nx {
            if pd0(ix, iy) {
                if blp_detected(grid, ix, iy) {
                    detected_pd0 = true;
                } else {
                    undetected_pd0 = true;
                }
            }
        }
    }
    if detected_pd0 && undetected_pd0 {
        let contour = layout.edges(|ix, iy| blp_detected(grid, ix, iy));
        polylines(
            &mut out,
            "blp-contour",
            r##"stroke="#000000" stroke-width="2" stroke-dasharray="6,4""##,
            &contour,
        );
    }

    let (x0, y0, x1, y1) = (LEFT, TOP + PLOT, LEFT + PLOT, TOP);
    let _ = writeln!(out, r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#000000"/>"##);
    let _ = writeln!(out, r##"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000000"/>"##);
    let tick = |v: f64| super::format_sig9((v * 1e4).round() / 1e4);
    let _ = writeln!(out, r#"<text x="{x0}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(spec.x.min));
    let _ = writeln!(out, r#"<text x="{x1}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(spec.x.max));
    let _ = writeln!(out, r#"<text x="{}" y="{y0}" font-size="12" text-anchor="end">{}</text>"#, x0 - 6.0, tick(spec.y.min));
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#, x0 - 6.0, y1 + 12.0, tick(spec.y.max));
    let _ = writeln!(
        out,
        r#"<text class="x-label" x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + PLOT / 2.0,
        y0 + 40.0,
        escape(&spec.x.name)
    );
    let (lx, ly) = (LEFT - 50.0, TOP + PLOT / 2.0);
    let _ = writeln!(
        out,
        r#"<text class="y-label" x="{lx}" y="{ly}" font-size="14" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(&spec.y.name)
    );
    out.push_str("</svg>\n");
    out
}
