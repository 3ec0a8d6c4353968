//! Deterministic SVG rendering of a diagram.
//!
//! Geometry stays exact until the final coordinate formatting: bisector
//! lines are clipped to the viewport with rational arithmetic, and only the
//! emitted pixel coordinates round to floating point. Output is stable
//! across runs for identical input: elements appear in index order.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::arrangement::{GeomRef, VertexKind};
use crate::diagram::FullOacd;
use crate::exact::{Point2, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RenderError {
    /// x0 < x1 and y0 < y1 are required.
    EmptyBox,
    /// Every generator must lie strictly inside the viewport.
    BboxTooSmall { generator: usize },
}

impl std::fmt::Display for RenderError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenderError::EmptyBox => write!(f, "viewport has no area"),
            RenderError::BboxTooSmall { generator } => {
                write!(f, "generator {generator} lies outside the viewport")
            }
        }
    }
}

impl std::error::Error for RenderError {}

/// Axis-aligned viewport in diagram coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBox {
    x0: Rat,
    y0: Rat,
    x1: Rat,
    y1: Rat,
}

impl BBox {
    pub fn new(x0: Rat, y0: Rat, x1: Rat, y1: Rat) -> Result<BBox, RenderError> {
        if x0 < x1 && y0 < y1 {
            Ok(BBox { x0, y0, x1, y1 })
        } else {
            Err(RenderError::EmptyBox)
        }
    }

    pub fn from_ints(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<BBox, RenderError> {
        BBox::new(
            Rat::from_integer(x0.into()),
            Rat::from_integer(y0.into()),
            Rat::from_integer(x1.into()),
            Rat::from_integer(y1.into()),
        )
    }

    /// The smallest box strictly containing all generators, padded by the
    /// larger of one quarter of the spread per side and 1.
    pub fn around(points: &[Point2]) -> BBox {
        let xs: Vec<&Rat> = points.iter().map(|p| &p.x).collect();
        let ys: Vec<&Rat> = points.iter().map(|p| &p.y).collect();
        let min_x = (*xs.iter().min().unwrap()).clone();
        let max_x = (*xs.iter().max().unwrap()).clone();
        let min_y = (*ys.iter().min().unwrap()).clone();
        let max_y = (*ys.iter().max().unwrap()).clone();
        let one = Rat::from_integer(1.into());
        let quarter = Rat::new(1.into(), 4.into());
        let pad_x = ((&max_x - &min_x) * &quarter).max(one.clone());
        let pad_y = ((&max_y - &min_y) * &quarter).max(one);
        BBox {
            x0: min_x - &pad_x,
            x1: max_x + &pad_x,
            y0: min_y - &pad_y,
            y1: max_y + &pad_y,
        }
    }

    fn contains_strict(&self, p: &Point2) -> bool {
        self.x0 < p.x && p.x < self.x1 && self.y0 < p.y && p.y < self.y1
    }

    fn contains(&self, p: &Point2) -> bool {
        self.x0 <= p.x && p.x <= self.x1 && self.y0 <= p.y && p.y <= self.y1
    }
}

#[derive(Clone, Debug)]
pub struct RenderOptions {
    /// Pixel width of the drawing; height follows the viewport aspect ratio.
    pub width_px: f64,
    /// Label every cell with its compact code at its representative point.
    pub cell_labels: bool,
    /// Label edges with their compact codes at their representative points.
    pub edge_labels: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width_px: 800.0,
            cell_labels: true,
            edge_labels: false,
        }
    }
}

fn px(v: f64) -> String {
    format!("{v:.3}")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the diagram into a standalone SVG document.
pub fn render_svg(
    d: &FullOacd,
    bbox: &BBox,
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    for (i, p) in d.generators().points().iter().enumerate() {
        if !bbox.contains_strict(p) {
            return Err(RenderError::BboxTooSmall { generator: i });
        }
    }
    let arr = d.arrangement();
    let wx = &bbox.x1 - &bbox.x0;
    let wy = &bbox.y1 - &bbox.y0;
    let width = opts.width_px;
    let height = width * (wy.to_f64().unwrap_or(1.0) / wx.to_f64().unwrap_or(1.0));
    let sx = width / wx.to_f64().unwrap_or(1.0);
    let sy = height / wy.to_f64().unwrap_or(1.0);
    let x0 = bbox.x0.to_f64().unwrap_or(0.0);
    let y1 = bbox.y1.to_f64().unwrap_or(0.0);
    let to_px = |p: &Point2| -> (f64, f64) {
        let x = (p.x.to_f64().unwrap_or(0.0) - x0) * sx;
        let y = (y1 - p.y.to_f64().unwrap_or(0.0)) * sy;
        (x, y)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        px(width),
        px(height),
        px(width),
        px(height)
    );
    svg.push_str(
        "<style>\n\
         .bisector { stroke: #555; stroke-width: 1; }\n\
         .generator { fill: #c02020; }\n\
         .v2 { fill: #1050c0; }\n\
         .v3 { fill: #108030; }\n\
         .cell-label { font: 12px monospace; fill: #222; text-anchor: middle; }\n\
         .edge-label { font: 10px monospace; fill: #666; text-anchor: middle; }\n\
         .gen-label { font: 11px sans-serif; fill: #c02020; }\n\
         </style>\n",
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        px(width),
        px(height)
    );

    // Bisector carrier lines, clipped exactly to the viewport.
    for (bi, b) in arr.bisectors.iter().enumerate() {
        if let Some((p, q)) = clip_line(&b.a.clone().into(), &b.b.clone().into(), &b.c.clone().into(), bbox)
        {
            let (x1p, y1p) = to_px(&p);
            let (x2p, y2p) = to_px(&q);
            let _ = writeln!(
                svg,
                "<line class=\"bisector\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"><title>bisector {bi}: pair ({}, {})</title></line>",
                px(x1p),
                px(y1p),
                px(x2p),
                px(y2p),
                b.i,
                b.j
            );
        }
    }

    // Vertices as dots, 2-I and 3-I distinguishable by class and size.
    for (vi, v) in arr.vertices.iter().enumerate() {
        if !bbox.contains(&v.location) {
            continue;
        }
        let (x, y) = to_px(&v.location);
        let (class, r) = match v.kind {
            VertexKind::TwoI => ("v2", 3.0),
            VertexKind::ThreeI => ("v3", 4.5),
        };
        let code = d.code_of(GeomRef::Vertex(vi));
        let _ = writeln!(
            svg,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{r}\"><title>{}</title></circle>",
            px(x),
            px(y),
            esc(&code.to_string())
        );
    }

    // Generators as squares with indices.
    for (gi, g) in d.generators().points().iter().enumerate() {
        let (x, y) = to_px(g);
        let _ = writeln!(
            svg,
            "<rect class=\"generator\" x=\"{}\" y=\"{}\" width=\"6\" height=\"6\"/>",
            px(x - 3.0),
            px(y - 3.0)
        );
        let _ = writeln!(
            svg,
            "<text class=\"gen-label\" x=\"{}\" y=\"{}\">g{gi}</text>",
            px(x + 5.0),
            px(y - 5.0)
        );
    }

    // Cell labels at representative points.
    if opts.cell_labels {
        for f in 0..arr.faces.len() {
            let rep = arr.representative_point(GeomRef::Cell(f));
            if !bbox.contains(&rep) {
                continue;
            }
            let (x, y) = to_px(&rep);
            let code = d.code_of(GeomRef::Cell(f));
            let _ = writeln!(
                svg,
                "<text class=\"cell-label\" x=\"{}\" y=\"{}\">{}</text>",
                px(x),
                px(y),
                esc(&code.to_string())
            );
        }
    }

    // Edge labels at representative points.
    if opts.edge_labels {
        for e in 0..arr.edges.len() {
            let rep = arr.representative_point(GeomRef::Edge(e));
            if !bbox.contains(&rep) {
                continue;
            }
            let (x, y) = to_px(&rep);
            let code = d.code_of(GeomRef::Edge(e));
            let _ = writeln!(
                svg,
                "<text class=\"edge-label\" x=\"{}\" y=\"{}\">{}</text>",
                px(x),
                px(y),
                esc(&code.to_string())
            );
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Clips the line a·x + b·y + c = 0 to the box, exactly. Returns the two
/// clip points ordered along the line direction (b, -a), or None when the
/// line misses the box or only grazes a corner.
fn clip_line(a: &Rat, b: &Rat, c: &Rat, bbox: &BBox) -> Option<(Point2, Point2)> {
    let zero = Rat::from_integer(0.into());
    let mut hits: Vec<Point2> = Vec::new();
    let mut push = |p: Point2| {
        if bbox.contains(&p) && !hits.contains(&p) {
            hits.push(p);
        }
    };
    if b != &zero {
        for x in [&bbox.x0, &bbox.x1] {
            let y = -(c + a * x) / b;
            push(Point2::new(x.clone(), y));
        }
    }
    if a != &zero {
        for y in [&bbox.y0, &bbox.y1] {
            let x = -(c + b * y) / a;
            push(Point2::new(x, y.clone()));
        }
    }
    if hits.len() < 2 {
        return None;
    }
    // Order along the direction (b, -a) and take the extremes.
    let key = |p: &Point2| b * &p.x - a * &p.y;
    hits.sort_by(|p, q| key(p).cmp(&key(q)));
    let first = hits.first().unwrap().clone();
    let last = hits.last().unwrap().clone();
    if first == last {
        return None;
    }
    Some((first, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::GeneratorSet;

    fn triangle() -> FullOacd {
        let gs = GeneratorSet::from_ints(&[(0, 0), (4, 0), (0, 4)]).unwrap();
        FullOacd::build(gs).unwrap()
    }

    #[test]
    fn svg_is_stable_and_well_formed() {
        let d = triangle();
        let bbox = BBox::from_ints(-3, -3, 7, 7).unwrap();
        let svg1 = render_svg(&d, &bbox, &RenderOptions::default()).unwrap();
        let svg2 = render_svg(&d, &bbox, &RenderOptions::default()).unwrap();
        assert_eq!(svg1, svg2);
        assert!(svg1.starts_with("<svg "));
        assert!(svg1.trim_end().ends_with("</svg>"));
        // Balanced tags for the elements we emit.
        for tag in ["<line ", "<circle ", "<text ", "<rect "] {
            assert!(svg1.contains(tag), "missing {tag}");
        }
        // Three clipped bisector lines, one vertex dot, six cell labels.
        assert_eq!(svg1.matches("<line class=\"bisector\"").count(), 3);
        assert_eq!(svg1.matches("<circle class=\"v3\"").count(), 1);
        assert_eq!(svg1.matches("<text class=\"cell-label\"").count(), 6);
    }

    #[test]
    fn generators_must_sit_inside_the_viewport() {
        let d = triangle();
        let bbox = BBox::from_ints(1, 1, 9, 9).unwrap();
        assert_eq!(
            render_svg(&d, &bbox, &RenderOptions::default()),
            Err(RenderError::BboxTooSmall { generator: 0 })
        );
        assert_eq!(BBox::from_ints(2, 2, 2, 5), Err(RenderError::EmptyBox));
    }

    #[test]
    fn automatic_viewport_contains_generators() {
        let d = triangle();
        let bbox = BBox::around(d.generators().points());
        assert!(render_svg(&d, &bbox, &RenderOptions::default()).is_ok());
    }

    #[test]
    fn edge_labels_are_optional() {
        let d = triangle();
        let bbox = BBox::from_ints(-3, -3, 7, 7).unwrap();
        let opts = RenderOptions {
            edge_labels: true,
            ..RenderOptions::default()
        };
        let with = render_svg(&d, &bbox, &opts).unwrap();
        let without = render_svg(&d, &bbox, &RenderOptions::default()).unwrap();
        assert!(with.matches("<text class=\"edge-label\"").count() > 0);
        assert_eq!(without.matches("<text class=\"edge-label\"").count(), 0);
    }

    #[test]
    fn clip_misses_and_tangents_return_none() {
        let bbox = BBox::from_ints(0, 0, 2, 2).unwrap();
        let one = Rat::from_integer(1.into());
        let zero = Rat::from_integer(0.into());
        // x = 5: outside.
        assert!(clip_line(&one, &zero, &Rat::from_integer((-5).into()), &bbox).is_none());
        // Diagonal through one corner only: x + y = 0 grazes (0,0).
        assert!(clip_line(&one, &one, &zero, &bbox).is_none());
        // Proper crossing: y = 1.
        let seg = clip_line(&zero, &one, &Rat::from_integer((-1).into()), &bbox).unwrap();
        assert_ne!(seg.0, seg.1);
    }
}
