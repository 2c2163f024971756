//! Circular arcs, inscribed-angle constructions and intersection routines.
//!
//! An arc stores its point set as the counterclockwise angular span
//! `[start, start + sweep]` on its supporting circle; the separate `ccw`
//! flag only records the traversal direction (source to target).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ccw_delta, normalize_angle, orient, BBox, Point, Side, REL_EPS};

/// Where an inscribed-angle arc came from: the apex of an empty cone on
/// the arc has `left` on its counterclockwise ray and `right` on its
/// clockwise ray, and sees them under `inscribed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub left: Point,
    pub right: Point,
    pub inscribed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularArc {
    pub center: Point,
    pub radius: f64,
    pub start: f64,
    pub sweep: f64,
    pub ccw: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl CircularArc {
    pub fn new(center: Point, radius: f64, start: f64, sweep: f64, ccw: bool) -> Self {
        CircularArc {
            center,
            radius,
            start: normalize_angle(start),
            sweep: sweep.clamp(0.0, TAU),
            ccw,
            provenance: None,
        }
    }

    /// Arc from `from` to `to` on the circle, travelling in the given
    /// rotational sense.
    pub fn between(center: Point, radius: f64, from: Point, to: Point, ccw: bool) -> Self {
        let a = (from - center).angle();
        let b = (to - center).angle();
        if ccw {
            CircularArc::new(center, radius, a, ccw_delta(a, b), true)
        } else {
            CircularArc::new(center, radius, b, ccw_delta(b, a), false)
        }
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.center + Point::polar(self.start + t) * self.radius
    }

    pub fn end_angle(&self) -> f64 {
        normalize_angle(self.start + self.sweep)
    }

    pub fn source(&self) -> Point {
        if self.ccw {
            self.point_at(0.0)
        } else {
            self.point_at(self.sweep)
        }
    }

    pub fn target(&self) -> Point {
        if self.ccw {
            self.point_at(self.sweep)
        } else {
            self.point_at(0.0)
        }
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5 * self.sweep)
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep
    }

    pub fn reversed(&self) -> Self {
        CircularArc {
            ccw: !self.ccw,
            ..*self
        }
    }

    /// Counterclockwise offset of `p`'s polar angle from `start`, in `[0, 2π)`.
    pub fn param_of(&self, p: Point) -> f64 {
        ccw_delta(self.start, (p - self.center).angle())
    }

    /// Parameter in `[-tol, sweep + tol]` if the direction of `p` falls in
    /// the span (with angular slack `tol`), snapping near-wrap values.
    pub fn span_param(&self, p: Point, tol: f64) -> Option<f64> {
        let t = self.param_of(p);
        if t <= self.sweep + tol {
            Some(t.min(self.sweep))
        } else if t >= TAU - tol {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn contains_point(&self, p: Point, tol: f64) -> bool {
        ((p - self.center).norm() - self.radius).abs() <= tol
            && self.span_param(p, tol / self.radius).is_some()
    }

    /// Sub-arc for parameters `t0 <= t1`, keeping direction and provenance.
    pub fn sub_arc(&self, t0: f64, t1: f64) -> Self {
        CircularArc {
            start: normalize_angle(self.start + t0),
            sweep: (t1 - t0).max(0.0),
            ..*self
        }
    }

    /// Unit tangent in the direction of travel at parameter `t`.
    pub fn tangent_at(&self, t: f64) -> Point {
        let d = Point::polar(self.start + t).perp();
        if self.ccw {
            d
        } else {
            -d
        }
    }

    /// Signed curvature along the direction of travel.
    pub fn signed_curvature(&self) -> f64 {
        if self.ccw {
            1.0 / self.radius
        } else {
            -1.0 / self.radius
        }
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        b.include(self.point_at(0.0));
        b.include(self.point_at(self.sweep));
        for k in 0..4 {
            let a = k as f64 * PI / 2.0;
            if ccw_delta(self.start, a) <= self.sweep {
                b.include(self.center + Point::polar(a) * self.radius);
            }
        }
        b
    }

    /// Polyline approximation with at most `max_step` radians per segment.
    pub fn sample(&self, max_step: f64) -> Vec<Point> {
        let n = ((self.sweep / max_step).ceil() as usize).max(1);
        let mut pts: Vec<Point> = (0..=n)
            .map(|i| self.point_at(self.sweep * i as f64 / n as f64))
            .collect();
        if !self.ccw {
            pts.reverse();
        }
        pts
    }

    /// Distance from `p` to the arc's point set.
    pub fn distance(&self, p: Point) -> f64 {
        let v = p - self.center;
        if v.norm2() > 0.0 && self.param_of(p) <= self.sweep {
            return (v.norm() - self.radius).abs();
        }
        p.dist(self.point_at(0.0))
            .min(p.dist(self.point_at(self.sweep)))
    }

    fn default_tol(&self) -> f64 {
        REL_EPS * (self.radius + self.center.norm()).max(1.0)
    }
}

/// The arc through `a` and `b` whose points lie on the requested side of the
/// directed chord `a -> b`. From every point `p` of the arc, the chord is
/// seen under the inscribed angle `theta`; for `Side::Left` the ray towards
/// `b` is reached from the ray towards `a` by a counterclockwise turn of
/// `theta`.
pub fn inscribed_arc(a: Point, b: Point, theta: f64, side: Side) -> Result<CircularArc> {
    if a == b {
        return Err(Error::DegenerateChord(a));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidInscribedAngle(theta));
    }
    if side == Side::Right {
        return inscribed_arc(b, a, theta, Side::Left);
    }
    let chord = b - a;
    let len = chord.norm();
    let radius = len / (2.0 * theta.sin());
    let normal = chord.perp() * (1.0 / len);
    let center = a.midpoint(b) + normal * (radius * theta.cos());
    let start = (b - center).angle();
    let sweep = TAU - 2.0 * theta;
    let mut arc = CircularArc::new(center, radius, start, sweep, true);
    arc.provenance = Some(Provenance {
        left: b,
        right: a,
        inscribed: theta,
    });
    Ok(arc)
}

/// Inscribed-angle arc for an empty cone with `left` on its counterclockwise
/// ray and `right` on its clockwise ray.
pub fn cone_arc(left: Point, right: Point, theta: f64) -> Result<CircularArc> {
    inscribed_arc(right, left, theta, Side::Left)
}

/// Closed region bounded by an inscribed-angle arc and its chord.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularSegment {
    pub arc: CircularArc,
    pub left: Point,
    pub right: Point,
    pub theta: f64,
}

impl CircularSegment {
    pub fn new(left: Point, right: Point, theta: f64) -> Result<Self> {
        Ok(CircularSegment {
            arc: cone_arc(left, right, theta)?,
            left,
            right,
            theta,
        })
    }

    /// Angle test: `p` is on the apex side of the chord (or on it) and
    /// sees the chord under at least `theta`.
    pub fn contains(&self, p: Point) -> bool {
        if p == self.left || p == self.right {
            return true;
        }
        if orient(self.right, self.left, p) < 0.0 {
            return false;
        }
        let u = self.right - p;
        let v = self.left - p;
        let ang = u.cross(v).abs().atan2(u.dot(v));
        ang >= self.theta
    }

    /// Geometric test: chord half-plane intersected with the closed disk.
    pub fn contains_geometric(&self, p: Point) -> bool {
        orient(self.right, self.left, p) >= 0.0 && p.dist(self.arc.center) <= self.arc.radius
    }
}

/// Outcome of intersecting two arcs.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcIntersection {
    Points(Vec<Point>),
    /// The arcs share a circle and overlap along these sub-arcs.
    Overlap(Vec<CircularArc>),
}

/// Circle/circle intersection points (0, 1 or 2). `None` for coincident
/// circles.
pub fn circle_circle(c0: Point, r0: f64, c1: Point, r1: f64, tol: f64) -> Option<Vec<Point>> {
    let d = c1 - c0;
    let dist = d.norm();
    if dist <= tol && (r0 - r1).abs() <= tol {
        return None;
    }
    if dist <= tol || dist > r0 + r1 + tol || dist < (r0 - r1).abs() - tol {
        return Some(Vec::new());
    }
    let a = (r0 * r0 - r1 * r1 + dist * dist) / (2.0 * dist);
    let h2 = r0 * r0 - a * a;
    let u = d * (1.0 / dist);
    let base = c0 + u * a;
    if h2 <= (tol * tol).max(4.0 * f64::EPSILON * r0 * r0) {
        return Some(vec![base]);
    }
    let h = h2.sqrt();
    Some(vec![base + u.perp() * h, base - u.perp() * h])
}

/// Circle/line intersection, returned as line parameters `s` with points
/// `a + s (b - a)`.
pub fn circle_line_params(c: Point, r: f64, a: Point, b: Point, tol: f64) -> Vec<f64> {
    let d = b - a;
    let dd = d.norm2();
    if dd == 0.0 {
        return Vec::new();
    }
    let s0 = (c - a).dot(d) / dd;
    let foot = a + d * s0;
    let dist = foot.dist(c);
    if dist > r + tol {
        return Vec::new();
    }
    let half2 = r * r - dist * dist;
    if half2 <= tol * tol {
        return vec![s0];
    }
    let half = half2.sqrt() / dd.sqrt();
    vec![s0 - half, s0 + half]
}

/// Intersections of two arcs; co-circular overlapping arcs are reported as
/// an overlap.
pub fn arc_arc_intersections(a: &CircularArc, b: &CircularArc) -> ArcIntersection {
    let tol = a.default_tol().max(b.default_tol());
    arc_arc_intersections_tol(a, b, tol)
}

pub fn arc_arc_intersections_tol(a: &CircularArc, b: &CircularArc, tol: f64) -> ArcIntersection {
    match circle_circle(a.center, a.radius, b.center, b.radius, tol) {
        Some(pts) => ArcIntersection::Points(
            pts.into_iter()
                .filter(|p| {
                    a.span_param(*p, tol / a.radius).is_some()
                        && b.span_param(*p, tol / b.radius).is_some()
                })
                .collect(),
        ),
        None => {
            let spans = overlap_spans(a, b, tol / a.radius);
            let mut arcs = Vec::new();
            let mut points = Vec::new();
            for (t0, t1) in spans {
                if t1 - t0 <= tol / a.radius {
                    points.push(a.point_at(t0));
                } else {
                    arcs.push(a.sub_arc(t0, t1));
                }
            }
            if arcs.is_empty() {
                ArcIntersection::Points(points)
            } else {
                ArcIntersection::Overlap(arcs)
            }
        }
    }
}

/// Overlap of two co-circular spans, as parameter ranges on `a`.
fn overlap_spans(a: &CircularArc, b: &CircularArc, atol: f64) -> Vec<(f64, f64)> {
    let off = ccw_delta(a.start, b.start);
    let mut out = Vec::new();
    // b's span in a's parameter space, possibly wrapping once.
    for shift in [off - TAU, off, off + TAU] {
        let lo = shift.max(0.0);
        let hi = (shift + b.sweep).min(a.sweep);
        if hi >= lo - atol {
            out.push((lo, hi.max(lo)));
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.dedup_by(|x, y| (x.0 - y.0).abs() <= atol && (x.1 - y.1).abs() <= atol);
    out
}

/// Intersections of an arc with the infinite line through `p` and `q`.
pub fn arc_line_intersections(arc: &CircularArc, p: Point, q: Point) -> Vec<Point> {
    let tol = arc.default_tol();
    circle_line_params(arc.center, arc.radius, p, q, tol)
        .into_iter()
        .map(|s| p + (q - p) * s)
        .filter(|x| arc.span_param(*x, tol / arc.radius).is_some())
        .collect()
}

/// Intersections of an arc with the closed segment `p q`.
pub fn arc_segment_intersections(arc: &CircularArc, p: Point, q: Point) -> Vec<Point> {
    let tol = arc.default_tol();
    let stol = tol / p.dist(q).max(f64::MIN_POSITIVE);
    circle_line_params(arc.center, arc.radius, p, q, tol)
        .into_iter()
        .filter(|s| *s >= -stol && *s <= 1.0 + stol)
        .map(|s| p + (q - p) * s)
        .filter(|x| arc.span_param(*x, tol / arc.radius).is_some())
        .collect()
}
