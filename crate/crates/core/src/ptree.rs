//! Simplicial partition tree for half-plane extreme-point queries.
//!
//! Every node owns a triangle, the points inside it and the convex hull of
//! those points. Children come from a fan split of the parent triangle
//! around one of its corners into `r` wedges of (almost) equal size; the
//! fan apex rotates with depth so the triangles do not all get thin in the
//! same direction.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geom::{normalize_angle, orient, BBox, Point, Side};

#[derive(Debug, Clone)]
pub struct Node {
    pub triangle: [Point; 3],
    pub points: Vec<usize>,
    pub children: Vec<usize>,
    /// Strict hull of the node's points as indices, counterclockwise.
    pub hull: Vec<usize>,
    /// Direction angle of each hull edge, rotated so that it increases.
    edge_angles: Vec<f64>,
    edge_offset: usize,
}

#[derive(Debug, Clone)]
pub struct PartitionTree {
    points: Vec<Point>,
    nodes: Vec<Node>,
    r: usize,
}

/// Lexicographic ranking used to break ties between equally extreme points.
fn better(pts: &[Point], dir: Point, a: usize, b: usize) -> bool {
    key_cmp(pts, dir, a, b) == Ordering::Less
}

fn key_cmp(pts: &[Point], dir: Point, a: usize, b: usize) -> Ordering {
    let (pa, pb) = (pts[a], pts[b]);
    pb.dot(dir)
        .total_cmp(&pa.dot(dir))
        .then_with(|| pa.x.total_cmp(&pb.x))
        .then_with(|| pa.y.total_cmp(&pb.y))
        .then_with(|| a.cmp(&b))
}

fn strictly_on(side: Side, o: f64) -> bool {
    match side {
        Side::Left => o > 0.0,
        Side::Right => o < 0.0,
    }
}

/// Reference answer: linear scan with the same tie-breaking.
pub fn naive_extreme(
    points: &[Point],
    a: Point,
    b: Point,
    side: Side,
    dir: Point,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &p) in points.iter().enumerate() {
        if strictly_on(side, orient(a, b, p)) && best.is_none_or(|j| better(points, dir, i, j)) {
            best = Some(i);
        }
    }
    best
}

fn hull_indices(pts: &[Point], idx: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = idx.to_vec();
    v.sort_by(|&a, &b| pts[a].lex_cmp(&pts[b]).then(a.cmp(&b)));
    v.dedup_by(|a, b| pts[*a] == pts[*b]);
    if v.len() <= 2 {
        return v;
    }
    let mut h: Vec<usize> = Vec::with_capacity(2 * v.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(v.iter())
        } else {
            Box::new(v.iter().rev())
        };
        for &i in iter {
            while h.len() >= start + 2
                && orient(pts[h[h.len() - 2]], pts[h[h.len() - 1]], pts[i]) <= 0.0
            {
                h.pop();
            }
            h.push(i);
        }
        h.pop();
    }
    if h.len() == 2 && pts[h[0]] == pts[h[1]] {
        h.pop();
    }
    h
}

impl Node {
    fn new(pts: &[Point], triangle: [Point; 3], points: Vec<usize>, hull: Vec<usize>) -> Node {
        let m = hull.len();
        let mut edge_angles: Vec<f64> = (0..m)
            .map(|i| (pts[hull[(i + 1) % m]] - pts[hull[i]]).angle())
            .collect();
        let edge_offset = if m >= 3 {
            (0..m)
                .min_by(|&a, &b| edge_angles[a].total_cmp(&edge_angles[b]))
                .unwrap_or(0)
        } else {
            0
        };
        edge_angles.rotate_left(edge_offset);
        Node {
            triangle,
            points,
            children: Vec::new(),
            hull,
            edge_angles,
            edge_offset,
        }
    }

    /// Hull vertex maximizing `dot(·, dir)` with lexicographic tie-break:
    /// binary search over edge directions, then a local climb.
    fn hull_extreme(&self, pts: &[Point], dir: Point) -> usize {
        let m = self.hull.len();
        if m <= 3 {
            return *self
                .hull
                .iter()
                .min_by(|&&a, &&b| key_cmp(pts, dir, a, b))
                .expect("non-empty hull");
        }
        // The extreme vertex starts the first edge turning past dir + π/2.
        let target = normalize_angle(dir.angle() + 0.5 * std::f64::consts::PI);
        let first = self.edge_angles[0];
        let rel = |a: f64| normalize_angle(a - first);
        let k = self.edge_angles.partition_point(|&a| rel(a) < rel(target));
        let mut i = (k + self.edge_offset) % m;
        let val = |i: usize| pts[self.hull[i]].dot(dir);
        loop {
            let nx = (i + 1) % m;
            let pv = (i + m - 1) % m;
            if val(nx) > val(i) {
                i = nx;
            } else if val(pv) > val(i) {
                i = pv;
            } else {
                break;
            }
        }
        let mut best = self.hull[i];
        for d in [m - 1, 1] {
            let j = self.hull[(i + d) % m];
            if better(pts, dir, j, best) {
                best = j;
            }
        }
        best
    }
}

fn enclosing_triangle(bb: &BBox) -> [Point; 3] {
    let c = bb.center();
    let r = 0.5 * bb.diameter().max(1.0) * 1.01 + 1.0;
    [
        c + Point::polar(-TAU / 12.0 - TAU / 3.0) * (2.0 * r),
        c + Point::polar(-TAU / 12.0) * (2.0 * r),
        c + Point::polar(TAU / 4.0) * (2.0 * r),
    ]
}

/// Point where the ray from `apex` with direction `d` meets line `b c`.
fn ray_hit(apex: Point, d: Point, b: Point, c: Point) -> Point {
    let e = c - b;
    let den = d.cross(e);
    if den.abs() < 1e-300 {
        return b.midpoint(c);
    }
    let t = (b - apex).cross(e) / den;
    apex + d * t
}

/// Point on segment `b c` that is hit by the ray from `apex` through `q`.
fn fan_cut(apex: Point, q: Point, b: Point, c: Point) -> Point {
    let d = q - apex;
    if d.norm2() == 0.0 {
        return b.midpoint(c);
    }
    let p = ray_hit(apex, d, b, c);
    let e = c - b;
    let s = ((p - b).dot(e) / e.norm2()).clamp(0.0, 1.0);
    b + e * s
}

impl PartitionTree {
    pub fn build(points: &[Point], r: usize) -> Result<PartitionTree> {
        if r < 2 {
            return Err(Error::InvalidParameter(format!(
                "branching factor {r} below 2"
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::NonFinite(*p));
        }
        let mut tree = PartitionTree {
            points: points.to_vec(),
            nodes: Vec::new(),
            r,
        };
        let tri = enclosing_triangle(&BBox::of_points(points));
        tree.build_node(tri, (0..points.len()).collect(), 0);
        Ok(tree)
    }

    fn build_node(&mut self, tri: [Point; 3], idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let pts = &self.points;
        if idx.len() <= self.r {
            let hull = hull_indices(pts, &idx);
            self.nodes.push(Node::new(pts, tri, idx, hull));
            return id;
        }
        self.nodes
            .push(Node::new(pts, tri, idx.clone(), Vec::new()));
        let apex_k = depth % 3;
        let apex = tri[apex_k];
        let (b, c) = (tri[(apex_k + 1) % 3], tri[(apex_k + 2) % 3]);
        let mut sorted = idx.clone();
        // Angular order around the apex from ray apex->b towards apex->c.
        sorted.sort_by(|&i, &j| {
            let (p, q) = (pts[i], pts[j]);
            let o = orient(apex, p, q);
            if o > 0.0 {
                Ordering::Less
            } else if o < 0.0 {
                Ordering::Greater
            } else {
                (p - apex)
                    .norm2()
                    .total_cmp(&(q - apex).norm2())
                    .then(p.lex_cmp(&q))
                    .then(i.cmp(&j))
            }
        });
        let n = sorted.len();
        let parts = self.r.min(n);
        let mut children = Vec::with_capacity(parts);
        let mut lo = 0;
        let mut left = b;
        for k in 0..parts {
            let hi = (k + 1) * n / parts;
            let right = if k + 1 == parts {
                c
            } else {
                let (p, q) = (self.points[sorted[hi - 1]], self.points[sorted[hi]]);
                fan_cut(apex, p.midpoint(q), b, c)
            };
            let chunk = sorted[lo..hi].to_vec();
            let child = self.build_node([apex, left, right], chunk, depth + 1);
            children.push(child);
            lo = hi;
            left = right;
        }
        let pts = &self.points;
        let mut cand: Vec<usize> = Vec::new();
        for &ch in &children {
            cand.extend_from_slice(&self.nodes[ch].hull);
        }
        let hull = hull_indices(pts, &cand);
        let node = Node::new(pts, tri, idx, hull);
        self.nodes[id] = Node { children, ..node };
        id
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn branching(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Among points strictly on `side` of the directed line `a -> b`, the
    /// index of the one maximizing `dot(p, dir)`; ties go to the
    /// lexicographically smallest `(x, y)`.
    pub fn extreme_in_halfplane(
        &self,
        a: Point,
        b: Point,
        side: Side,
        dir: Point,
    ) -> Option<usize> {
        self.extreme_with_stats(a, b, side, dir).0
    }

    /// As [`extreme_in_halfplane`](Self::extreme_in_halfplane), also
    /// returning the number of nodes visited.
    pub fn extreme_with_stats(
        &self,
        a: Point,
        b: Point,
        side: Side,
        dir: Point,
    ) -> (Option<usize>, usize) {
        if self.points.is_empty() {
            return (None, 0);
        }
        let mut best: Option<usize> = None;
        let mut visits = 0;
        let mut stack = vec![0usize];
        let pts = &self.points;
        while let Some(id) = stack.pop() {
            visits += 1;
            let node = &self.nodes[id];
            let top = node.hull_extreme(pts, dir);
            if let Some(bi) = best {
                if better(pts, dir, bi, top) {
                    continue;
                }
            }
            let inside = node
                .hull
                .iter()
                .filter(|&&h| strictly_on(side, orient(a, b, pts[h])))
                .count();
            if inside == 0 {
                continue;
            }
            if inside == node.hull.len() {
                // The whole node is on the open side; its hull extreme wins.
                if best.is_none_or(|bi| better(pts, dir, top, bi)) {
                    best = Some(top);
                }
                continue;
            }
            if node.children.is_empty() {
                for &i in &node.points {
                    if strictly_on(side, orient(a, b, pts[i]))
                        && best.is_none_or(|bi| better(pts, dir, i, bi))
                    {
                        best = Some(i);
                    }
                }
            } else {
                // Visit the most promising child last so it is popped first.
                let mut ch = node.children.clone();
                ch.sort_by(|&x, &y| {
                    let (ex, ey) = (
                        self.nodes[x].hull_extreme(pts, dir),
                        self.nodes[y].hull_extreme(pts, dir),
                    );
                    key_cmp(pts, dir, ey, ex)
                });
                stack.extend(ch);
            }
        }
        (best, visits)
    }

    /// All points strictly on `side` with `dot(p, dir) >= threshold`, sorted
    /// by the same ranking as [`extreme_in_halfplane`](Self::extreme_in_halfplane).
    pub fn report_at_least(
        &self,
        a: Point,
        b: Point,
        side: Side,
        dir: Point,
        threshold: f64,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        if self.points.is_empty() {
            return out;
        }
        let pts = &self.points;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.hull.is_empty() || pts[node.hull_extreme(pts, dir)].dot(dir) < threshold {
                continue;
            }
            if node
                .hull
                .iter()
                .all(|&h| !strictly_on(side, orient(a, b, pts[h])))
            {
                continue;
            }
            if node.children.is_empty() {
                out.extend(node.points.iter().copied().filter(|&i| {
                    pts[i].dot(dir) >= threshold && strictly_on(side, orient(a, b, pts[i]))
                }));
            } else {
                stack.extend(node.children.iter().copied());
            }
        }
        out.sort_by(|&x, &y| key_cmp(pts, dir, x, y));
        out
    }

    /// Number of the root's child triangles whose interior the line `a b` meets.
    pub fn crossing_number(&self, a: Point, b: Point) -> usize {
        let Some(root) = self.nodes.first() else {
            return 0;
        };
        root.children
            .iter()
            .filter(|&&c| {
                let t = self.nodes[c].triangle;
                let s: Vec<f64> = t.iter().map(|&v| orient(a, b, v)).collect();
                s.iter().any(|&x| x > 0.0) && s.iter().any(|&x| x < 0.0)
            })
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &PartitionTree, id: usize) -> usize {
            1 + t.nodes[id]
                .children
                .iter()
                .map(|&c| go(t, c))
                .max()
                .unwrap_or(0)
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(self, 0)
        }
    }
}

/// Reference for [`PartitionTree::report_at_least`].
pub fn naive_report_at_least(
    points: &[Point],
    a: Point,
    b: Point,
    side: Side,
    dir: Point,
    threshold: f64,
) -> Vec<usize> {
    let mut out: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].dot(dir) >= threshold && strictly_on(side, orient(a, b, points[i])))
        .collect();
    out.sort_by(|&x, &y| key_cmp(points, dir, x, y));
    out
}
