//! SVG pictures of track layouts and OBJ export of 3D drawings.

use std::fmt::Write;

use crate::docs::{DrawingDocument, LayoutDocument};

const STEP: f64 = 40.0;
const MARGIN: f64 = 30.0;

/// One horizontal line per track (first track on top), a dot per vertex in
/// track order, and a curve per edge.
pub fn export_track_svg(layout: &LayoutDocument) -> String {
    let n = layout.graph.vertex_count;
    let mut at = vec![(0.0, 0.0); n];
    let widest = layout.tracks.iter().map(|t| t.vertices.len()).max().unwrap_or(1).max(1);
    for (j, t) in layout.tracks.iter().enumerate() {
        for (p, &v) in t.vertices.iter().enumerate() {
            if v < n {
                at[v] = (MARGIN + STEP * p as f64, MARGIN + STEP * j as f64);
            }
        }
    }
    let width = 2.0 * MARGIN + STEP * (widest - 1) as f64;
    let height = 2.0 * MARGIN + STEP * layout.tracks.len().saturating_sub(1) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<g class="tracks" stroke="lightgray">"#);
    for (j, t) in layout.tracks.iter().enumerate() {
        let y = MARGIN + STEP * j as f64;
        let _ = writeln!(
            s,
            r#"<line data-track="{},{},{}" x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#,
            t.depth,
            t.residue,
            t.slot,
            MARGIN / 2.0,
            width - MARGIN / 2.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g class="edges" fill="none" stroke="#3366aa">"##);
    for e in &layout.graph.edges {
        let ((x1, y1), (x2, y2)) = (at[e[0]], at[e[1]]);
        // Bow sideways so same-track-pair edges stay distinguishable.
        let (cx, cy) = ((x1 + x2) / 2.0 + (y2 - y1).abs() / 4.0, (y1 + y2) / 2.0);
        let _ = writeln!(s, r#"<path d="M {x1} {y1} Q {cx} {cy} {x2} {y2}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="vertices" fill="black">"#);
    for (v, &(x, y)) in at.iter().enumerate() {
        let _ = writeln!(s, r#"<circle data-vertex="{v}" cx="{x}" cy="{y}" r="4"/>"#);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

/// Wavefront OBJ: one `v` record per vertex and one `l` record per edge.
pub fn export_obj(d: &DrawingDocument) -> String {
    let mut s = String::from("# qtrack drawing\n");
    for p in &d.positions {
        let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
    }
    for e in &d.graph.edges {
        let _ = writeln!(s, "l {} {}", e[0] + 1, e[1] + 1);
    }
    s
}
