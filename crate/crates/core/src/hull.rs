//! Convex hulls (Andrew's monotone chain on the exact orientation predicate).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orient, Point};

/// Counterclockwise hull polygon; a subset of the input points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexHull {
    pub vertices: Vec<Point>,
}

impl ConvexHull {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the hull has fewer than three vertices.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed-hull membership using exact orientation.
    pub fn contains(&self, p: Point) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0] == p,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                orient(a, b, p) == 0.0 && (p - a).dot(b - a) >= 0.0 && (p - b).dot(a - b) >= 0.0
            }
            _ => self.edges().all(|(a, b)| orient(a, b, p) >= 0.0),
        }
    }

    /// Strictly interior points (never true for degenerate hulls).
    pub fn contains_strict(&self, p: Point) -> bool {
        self.vertices.len() >= 3 && self.edges().all(|(a, b)| orient(a, b, p) > 0.0)
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    /// Index of the vertex maximizing `dot(v, dir)`.
    pub fn extreme_index(&self, dir: Point) -> Option<usize> {
        (0..self.vertices.len()).max_by(|&i, &j| {
            self.vertices[i]
                .dot(dir)
                .total_cmp(&self.vertices[j].dot(dir))
        })
    }
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
}

fn sorted_unique(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    pts
}

fn chain(pts: &[Point], keep_collinear: bool) -> Vec<Point> {
    let n = pts.len();
    if n <= 1 {
        return pts.to_vec();
    }
    let pops = |o: f64| if keep_collinear { o < 0.0 } else { o <= 0.0 };
    let mut hull: Vec<Point> = Vec::with_capacity(2 * n);
    for &p in pts {
        while hull.len() >= 2 && pops(orient(hull[hull.len() - 2], hull[hull.len() - 1], p)) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && pops(orient(hull[hull.len() - 2], hull[hull.len() - 1], p)) {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Strict convex hull: collinear boundary points are dropped. Collinear
/// inputs give the two extreme points; a singleton gives itself.
pub fn convex_hull(points: &[Point]) -> Result<ConvexHull> {
    if points.is_empty() {
        return Err(Error::EmptyGuardSet);
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::NonFinite(*p));
    }
    let pts = sorted_unique(points);
    let mut vertices = chain(&pts, false);
    if vertices.len() == 2 && vertices[0] == vertices[1] {
        vertices.pop();
    }
    Ok(ConvexHull { vertices })
}

/// Hull boundary including points lying on hull edges, counterclockwise.
/// For collinear input the result is the sorted point list.
pub fn convex_hull_with_collinear(points: &[Point]) -> Result<ConvexHull> {
    let strict = convex_hull(points)?;
    if strict.vertices.len() < 3 {
        return Ok(ConvexHull {
            vertices: sorted_unique(points),
        });
    }
    let pts = sorted_unique(points);
    Ok(ConvexHull {
        vertices: chain(&pts, true),
    })
}
