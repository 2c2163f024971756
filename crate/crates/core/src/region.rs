//! The output type: a union of components bounded by closed chains of arcs
//! and segments.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::arc::{CircularArc, Provenance};
use crate::geom::{ccw_delta, point_segment_distance, BBox, Point};
use crate::hull::polygon_area;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Edge {
    Segment(Point, Point),
    Arc(CircularArc),
}

impl Edge {
    pub fn source(&self) -> Point {
        match self {
            Edge::Segment(a, _) => *a,
            Edge::Arc(c) => c.source(),
        }
    }

    pub fn target(&self) -> Point {
        match self {
            Edge::Segment(_, b) => *b,
            Edge::Arc(c) => c.target(),
        }
    }

    pub fn is_arc(&self) -> bool {
        matches!(self, Edge::Arc(_))
    }

    pub fn length(&self) -> f64 {
        match self {
            Edge::Segment(a, b) => a.dist(*b),
            Edge::Arc(c) => c.length(),
        }
    }

    pub fn reversed(&self) -> Edge {
        match self {
            Edge::Segment(a, b) => Edge::Segment(*b, *a),
            Edge::Arc(c) => Edge::Arc(c.reversed()),
        }
    }

    /// Point at fraction `s ∈ [0, 1]` along the direction of travel.
    pub fn point_at_fraction(&self, s: f64) -> Point {
        match self {
            Edge::Segment(a, b) => a.lerp(*b, s),
            Edge::Arc(c) => {
                let t = if c.ccw { s } else { 1.0 - s };
                c.point_at(t * c.sweep)
            }
        }
    }

    pub fn midpoint(&self) -> Point {
        self.point_at_fraction(0.5)
    }

    pub fn distance(&self, p: Point) -> f64 {
        match self {
            Edge::Segment(a, b) => point_segment_distance(p, *a, *b),
            Edge::Arc(c) => c.distance(p),
        }
    }

    pub fn bbox(&self) -> BBox {
        match self {
            Edge::Segment(a, b) => BBox::of_points([a, b]),
            Edge::Arc(c) => c.bbox(),
        }
    }

    /// Polyline from source to target (arcs subdivided by `max_step` radians).
    pub fn polyline(&self, max_step: f64) -> Vec<Point> {
        match self {
            Edge::Segment(a, b) => vec![*a, *b],
            Edge::Arc(c) => c.sample(max_step),
        }
    }

    /// Contribution to the signed area of a closed chain (Green's theorem).
    pub fn area_term(&self) -> f64 {
        match self {
            Edge::Segment(a, b) => 0.5 * a.cross(*b),
            Edge::Arc(c) => {
                // Half of ∮ x dy - y dx along the direction of travel.
                let (r, o) = (c.radius, c.center);
                let (t0, t1) = (c.start, c.start + c.sweep);
                let lin = r * (o.x * (t1.sin() - t0.sin()) + o.y * (t0.cos() - t1.cos()));
                let v = 0.5 * (r * r * c.sweep + lin);
                if c.ccw {
                    v
                } else {
                    -v
                }
            }
        }
    }

    /// X-coordinates where this edge crosses the horizontal line `y`, with the
    /// half-open rule that keeps crossing parity consistent at shared vertices.
    fn row_crossings(&self, y: f64, out: &mut Vec<f64>) {
        match self {
            Edge::Segment(a, b) => {
                if (a.y > y) != (b.y > y) {
                    out.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
            Edge::Arc(c) => {
                // Split into y-monotone pieces at the circle's top and bottom.
                let mut cuts = vec![0.0];
                for a in [FRAC_PI_2, 1.5 * PI] {
                    let t = ccw_delta(c.start, a);
                    if t > 0.0 && t < c.sweep {
                        cuts.push(t);
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.push(c.sweep);
                for w in cuts.windows(2) {
                    let (p, q) = (c.point_at(w[0]), c.point_at(w[1]));
                    if (p.y > y) == (q.y > y) {
                        continue;
                    }
                    let dy = y - c.center.y;
                    let dx = (c.radius * c.radius - dy * dy).max(0.0).sqrt();
                    let mid = ccw_delta(0.0, c.start + 0.5 * (w[0] + w[1]));
                    let right = !(FRAC_PI_2..1.5 * PI).contains(&mid);
                    out.push(if right {
                        c.center.x + dx
                    } else {
                        c.center.x - dx
                    });
                }
            }
        }
    }
}

/// Serialized form of an edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeRecord {
    #[serde(rename = "type")]
    kind: String,
    endpoints: [Point; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    center: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    ccw: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    provenance: Option<Provenance>,
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rec = match self {
            Edge::Segment(a, b) => EdgeRecord {
                kind: "segment".into(),
                endpoints: [*a, *b],
                center: None,
                radius: None,
                ccw: None,
                provenance: None,
            },
            Edge::Arc(c) => EdgeRecord {
                kind: "arc".into(),
                endpoints: [c.source(), c.target()],
                center: Some(c.center),
                radius: Some(c.radius),
                ccw: Some(c.ccw),
                provenance: c.provenance,
            },
        };
        rec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = EdgeRecord::deserialize(d)?;
        let [a, b] = rec.endpoints;
        match rec.kind.as_str() {
            "segment" => Ok(Edge::Segment(a, b)),
            "arc" => {
                let (Some(center), Some(radius)) = (rec.center, rec.radius) else {
                    return Err(D::Error::custom("arc edge without center/radius"));
                };
                let mut arc = CircularArc::between(center, radius, a, b, rec.ccw.unwrap_or(true));
                arc.provenance = rec.provenance;
                Ok(Edge::Arc(arc))
            }
            other => Err(D::Error::custom(format!("unknown edge type {other:?}"))),
        }
    }
}

/// A closed chain of edges; the target of each edge is the source of the next.
pub type Chain = Vec<Edge>;

pub fn chain_signed_area(chain: &[Edge]) -> f64 {
    chain.iter().map(Edge::area_term).sum()
}

pub fn chain_vertices(chain: &[Edge]) -> Vec<Point> {
    chain.iter().map(Edge::source).collect()
}

/// A test row near `y` that keeps clear of every edge endpoint. Consecutive
/// edges meet at endpoints that agree only up to rounding, so a row through a
/// shared vertex could count a single crossing there.
fn crossing_row<'a>(y: f64, edges: impl Iterator<Item = &'a Edge> + Clone) -> f64 {
    let scale = edges
        .clone()
        .map(|e| {
            let (a, b) = (e.source(), e.target());
            a.x.abs().max(a.y.abs()).max(b.x.abs()).max(b.y.abs())
        })
        .fold(1.0f64, f64::max);
    let tol = 1e-11 * scale;
    let mut row = y;
    for _ in 0..64 {
        let hit = edges
            .clone()
            .any(|e| (e.source().y - row).abs() <= tol || (e.target().y - row).abs() <= tol);
        if !hit {
            break;
        }
        row += 3.0 * tol;
    }
    row
}

/// A connected piece of the region: its outer boundary (counterclockwise,
/// region on the left) and any holes (clockwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub boundary: Chain,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Chain>,
}

impl Component {
    pub fn area(&self) -> f64 {
        chain_signed_area(&self.boundary)
            + self.holes.iter().map(|h| chain_signed_area(h)).sum::<f64>()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + Clone {
        self.boundary.iter().chain(self.holes.iter().flatten())
    }

    pub fn contains(&self, p: Point) -> bool {
        let y = crossing_row(p.y, self.edges());
        let mut xs = Vec::new();
        for e in self.edges() {
            e.row_crossings(y, &mut xs);
        }
        xs.iter().filter(|&&x| x > p.x).count() % 2 == 1
    }
}

/// The Θ-region: an open set given by its components (or the whole plane).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub theta: f64,
    #[serde(default)]
    pub whole_plane: bool,
    pub components: Vec<Component>,
}

impl Region {
    pub fn empty(theta: f64) -> Self {
        Region {
            theta,
            whole_plane: false,
            components: Vec::new(),
        }
    }

    pub fn plane(theta: f64) -> Self {
        Region {
            theta,
            whole_plane: true,
            components: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.whole_plane && self.components.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + Clone {
        self.components.iter().flat_map(Component::edges)
    }

    /// Number of boundary edges over all components.
    pub fn complexity(&self) -> usize {
        self.edges().count()
    }

    pub fn arc_count(&self) -> usize {
        self.edges().filter(|e| e.is_arc()).count()
    }

    pub fn area(&self) -> f64 {
        if self.whole_plane {
            return f64::INFINITY;
        }
        self.components.iter().map(Component::area).sum()
    }

    pub fn bbox(&self) -> BBox {
        self.edges().fold(BBox::empty(), |b, e| b.union(&e.bbox()))
    }

    /// Point-in-region by crossing parity over all boundary chains. Points
    /// on the boundary are not meaningful (the region is open).
    pub fn contains(&self, p: Point) -> bool {
        if self.whole_plane {
            return true;
        }
        let y = crossing_row(p.y, self.edges());
        let mut xs = Vec::new();
        for e in self.edges() {
            e.row_crossings(y, &mut xs);
        }
        xs.iter().filter(|&&x| x > p.x).count() % 2 == 1
    }

    /// Membership for a whole row of sample abscissae at height `y`.
    pub fn contains_row(&self, y: f64, xs: &[f64]) -> Vec<bool> {
        if self.whole_plane {
            return vec![true; xs.len()];
        }
        let y = crossing_row(y, self.edges());
        let mut cr = Vec::new();
        for e in self.edges() {
            e.row_crossings(y, &mut cr);
        }
        cr.sort_by(f64::total_cmp);
        xs.iter()
            .map(|&x| {
                let right = cr.len() - cr.partition_point(|&c| c <= x);
                right % 2 == 1
            })
            .collect()
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|e| e.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the component containing `p`, if any.
    pub fn component_of(&self, p: Point) -> Option<usize> {
        self.components.iter().position(|c| c.contains(p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("region serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// SVG drawing with the guards, the filled region and optional extra arcs.
    pub fn to_svg(&self, guards: &[Point], extra_arcs: &[CircularArc]) -> String {
        let mut bb = BBox::of_points(guards).union(&self.bbox());
        for a in extra_arcs {
            bb = bb.union(&a.bbox());
        }
        if bb.is_empty() {
            bb = BBox::new(Point::new(-1.0, -1.0), Point::new(1.0, 1.0));
        }
        let bb = bb.expand(0.05 * bb.diameter().max(1e-9));
        let scale = 800.0 / bb.width().max(bb.height());
        let tx = |p: Point| ((p.x - bb.min.x) * scale, (bb.max.y - p.y) * scale);
        let (w, h) = (bb.width() * scale, bb.height() * scale);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.1} {h:.1}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        );
        if self.whole_plane {
            s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#9ecae1\"/>\n");
        }
        let path_of = |chain: &[Edge]| {
            let mut d = String::new();
            for (k, e) in chain.iter().enumerate() {
                let (x0, y0) = tx(e.source());
                if k == 0 {
                    d.push_str(&format!("M{x0:.3},{y0:.3} "));
                }
                let (x1, y1) = tx(e.target());
                match e {
                    Edge::Segment(..) => d.push_str(&format!("L{x1:.3},{y1:.3} ")),
                    Edge::Arc(c) => {
                        let r = c.radius * scale;
                        let large = u8::from(c.sweep > PI);
                        // Screen y points down, so counterclockwise becomes sweep-flag 0.
                        let sweep = u8::from(!c.ccw);
                        d.push_str(&format!(
                            "A{r:.3},{r:.3} 0 {large} {sweep} {x1:.3},{y1:.3} "
                        ));
                    }
                }
            }
            d.push('Z');
            d
        };
        for c in &self.components {
            let mut d = path_of(&c.boundary);
            for hole in &c.holes {
                d.push(' ');
                d.push_str(&path_of(hole));
            }
            s.push_str(&format!(
                "<path d=\"{d}\" fill=\"#9ecae1\" fill-rule=\"evenodd\" stroke=\"#08519c\" stroke-width=\"1.2\"/>\n"
            ));
        }
        for a in extra_arcs {
            let (x0, y0) = tx(a.point_at(0.0));
            let (x1, y1) = tx(a.point_at(a.sweep));
            let r = a.radius * scale;
            let (large, sweep) = (u8::from(a.sweep > PI), u8::from(!a.ccw));
            s.push_str(&format!(
                "<path d=\"M{x0:.3},{y0:.3} A{r:.3},{r:.3} 0 {large} {sweep} {x1:.3},{y1:.3}\" fill=\"none\" stroke=\"#fd8d3c\" stroke-width=\"0.6\"/>\n"
            ));
        }
        for g in guards {
            let (x, y) = tx(*g);
            s.push_str(&format!(
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"2.5\" fill=\"black\"/>\n"
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Polygon (counterclockwise vertex list) as a single closed chain.
pub fn polygon_chain(poly: &[Point]) -> Chain {
    let n = poly.len();
    (0..n)
        .map(|i| Edge::Segment(poly[i], poly[(i + 1) % n]))
        .collect()
}

pub fn polygon_region(theta: f64, poly: &[Point]) -> Region {
    if poly.len() < 3 || polygon_area(poly) <= 0.0 {
        return Region::empty(theta);
    }
    Region {
        theta,
        whole_plane: false,
        components: vec![Component {
            boundary: polygon_chain(poly),
            holes: vec![],
        }],
    }
}
