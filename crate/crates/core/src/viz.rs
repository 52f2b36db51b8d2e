//! SVG rendering of planar embeddings, with optional edge arrows.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::embedding::DancarEmbedding;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub show_edges: bool,
    pub highlight: BTreeSet<NodeId>,
    pub stroke_width: f64,
    /// Size of the longer canvas side in pixels.
    pub canvas_px: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            show_edges: false,
            highlight: BTreeSet::new(),
            stroke_width: 1.0,
            canvas_px: 800.0,
        }
    }
}

const PADDING: f64 = 0.05;
const ANCHOR_PX: f64 = 2.0;
const DISK_STROKE: &str = "#1f77b4";
const HIGHLIGHT_STROKE: &str = "#d62728";

/// Bounding box `[xmin, ymin, xmax, ymax]` of all disks and anchors.
fn bounds(emb: &DancarEmbedding) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for v in 0..emb.node_count() {
        let c = emb.center(v);
        let r = emb.radius(v);
        let a = emb.anchor(v);
        b[0] = b[0].min(c[0] - r).min(a[0]);
        b[1] = b[1].min(c[1] - r).min(a[1]);
        b[2] = b[2].max(c[0] + r).max(a[0]);
        b[3] = b[3].max(c[1] + r).max(a[1]);
    }
    if emb.node_count() == 0 {
        b = [-1.0, -1.0, 1.0, 1.0];
    }
    b
}

/// Renders a 2-dimensional embedding as an SVG 1.1 document.
///
/// The view is fitted to the bounding box of all disks with 5% padding, and
/// the y axis points up. With `show_edges` and a graph, each edge `v -> w`
/// is drawn as an arrow from `c_v` to `x_w`.
pub fn render_svg(
    emb: &DancarEmbedding,
    graph: Option<&DirectedGraph>,
    opts: &RenderOptions,
) -> Result<String> {
    if emb.dim() != 2 {
        return Err(Error::Dimension(emb.dim()));
    }
    if let Some(g) = graph {
        if g.node_count() != emb.node_count() {
            return Err(Error::NodeMismatch(format!(
                "graph has {} nodes, embedding has {}",
                g.node_count(),
                emb.node_count()
            )));
        }
    }

    let [x0, y0, x1, y1] = bounds(emb);
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let pad = span * PADDING;
    let scale = opts.canvas_px / (span + 2.0 * pad);
    let width = (x1 - x0 + 2.0 * pad) * scale;
    let height = (y1 - y0 + 2.0 * pad) * scale;
    let px = |x: f64| (x - x0 + pad) * scale;
    let py = |y: f64| (y1 + pad - y) * scale;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M 0 0 L 10 5 L 0 10 z" fill="#555555"/></marker></defs>"##
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let _ = writeln!(svg, r#"<g id="disks" fill="none">"#);
    for v in 0..emb.node_count() {
        let c = emb.center(v);
        let highlighted = opts.highlight.contains(&v);
        let (stroke, sw) = if highlighted {
            (HIGHLIGHT_STROKE, 2.0 * opts.stroke_width)
        } else {
            (DISK_STROKE, opts.stroke_width)
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{}" cy="{}" r="{}" stroke="{stroke}" stroke-width="{sw}"/>"#,
            px(c[0]),
            py(c[1]),
            emb.radius(v) * scale
        );
    }
    let _ = writeln!(svg, "</g>");

    if let (true, Some(g)) = (opts.show_edges, graph) {
        let _ = writeln!(
            svg,
            r##"<g id="edges" stroke="#555555" stroke-width="{}">"##,
            0.5 * opts.stroke_width
        );
        for (v, w) in g.edges() {
            let c = emb.center(v);
            let a = emb.anchor(w);
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" marker-end="url(#arrow)"/>"#,
                px(c[0]),
                py(c[1]),
                px(a[0]),
                py(a[1])
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    let _ = writeln!(svg, r#"<g id="anchors">"#);
    for v in 0..emb.node_count() {
        let a = emb.anchor(v);
        let fill = if opts.highlight.contains(&v) {
            HIGHLIGHT_STROKE
        } else {
            "black"
        };
        let _ = writeln!(
            svg,
            r#"<ellipse cx="{}" cy="{}" rx="{ANCHOR_PX}" ry="{ANCHOR_PX}" fill="{fill}"/>"#,
            px(a[0]),
            py(a[1])
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
