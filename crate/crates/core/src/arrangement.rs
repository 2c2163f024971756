//! Planar arrangement of boundary curves, face classification and region
//! extraction for Θ < π.
//!
//! Curves are intersected pairwise (sweep-and-prune on bounding boxes),
//! intersection points are snapped into vertices, and the split edges are
//! linked into a doubly connected edge list. Each bounded face is labelled
//! by probing a representative point; the region is the union of guarded
//! faces, traced with the guarded side on the left.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use crate::arc::{arc_arc_intersections, arc_segment_intersections, ArcIntersection, CircularArc};
use crate::arcgen::{generate_candidate_arcs, trim_arcs, TangentBackend};
use crate::error::{Error, Result};
use crate::geom::{normalize_angle, orient, BBox, Point};
use crate::hull::convex_hull;
use crate::oracle::{batch_unguarded, is_theta_guarded, GuardSet};
use crate::region::{chain_signed_area, Chain, Component, Edge, Region};

/// How face representatives are classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassifyBackend {
    #[default]
    Batch,
    Oracle,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RegionOptions {
    pub tangent: TangentBackend,
    pub classify: ClassifyBackend,
    /// Restricts the computation to this window (intersected with the hull).
    pub window: Option<BBox>,
}

/// A closed walk of half-edges with its face on the left.
#[derive(Debug, Clone)]
pub struct Cycle {
    pub half_edges: Vec<usize>,
    pub area: f64,
    pub component: usize,
}

/// A face: bounded faces have an outer cycle, the unbounded face (index 0)
/// has none. `holes` are the cycles of nested components.
#[derive(Debug, Clone, Default)]
pub struct Face {
    pub outer: Option<usize>,
    pub holes: Vec<usize>,
    pub guarded: Option<bool>,
    pub probe: Option<Point>,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub vertices: Vec<Point>,
    /// Edge `e` runs from `ends[e].0` to `ends[e].1`; half-edge `2e` is the
    /// forward copy and `2e + 1` its twin.
    pub edges: Vec<Edge>,
    pub ends: Vec<(usize, usize)>,
    pub next: Vec<usize>,
    pub cycles: Vec<Cycle>,
    pub faces: Vec<Face>,
    pub half_face: Vec<usize>,
    /// Number of connected components of the edge graph.
    pub components: usize,
    pub snap: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Snaps points to vertices: a point within `tol` of an existing vertex
/// reuses it.
struct Snapper {
    tol: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point>,
}

impl Snapper {
    fn new(tol: f64) -> Self {
        Snapper {
            tol,
            cells: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn cell(&self, p: Point) -> (i64, i64) {
        (
            (p.x / self.tol).floor() as i64,
            (p.y / self.tol).floor() as i64,
        )
    }

    fn insert(&mut self, p: Point) -> usize {
        let (cx, cy) = self.cell(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &i in ids {
                        let d = self.points[i].dist(p);
                        if d <= self.tol && best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, i));
                        }
                    }
                }
            }
        }
        if let Some((_, i)) = best {
            return i;
        }
        let i = self.points.len();
        self.points.push(p);
        self.cells.entry((cx, cy)).or_default().push(i);
        i
    }
}

fn segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Option<Point> {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 * o2 > 0.0 || o3 * o4 > 0.0 || (o1 == 0.0 && o2 == 0.0) {
        return None;
    }
    let r = b - a;
    let s = d - c;
    let den = r.cross(s);
    if den == 0.0 {
        return None;
    }
    let t = ((c - a).cross(s) / den).clamp(0.0, 1.0);
    Some(a + r * t)
}

fn intersections(a: &Edge, b: &Edge) -> Vec<Point> {
    match (a, b) {
        (Edge::Segment(p, q), Edge::Segment(r, s)) => {
            segment_intersection(*p, *q, *r, *s).into_iter().collect()
        }
        (Edge::Arc(c), Edge::Segment(p, q)) | (Edge::Segment(p, q), Edge::Arc(c)) => {
            arc_segment_intersections(c, *p, *q)
        }
        (Edge::Arc(c), Edge::Arc(d)) => match arc_arc_intersections(c, d) {
            ArcIntersection::Points(v) => v,
            ArcIntersection::Overlap(arcs) => arcs
                .iter()
                .flat_map(|o| [o.point_at(0.0), o.point_at(o.sweep)])
                .collect(),
        },
    }
}

/// Parameter of a point on a curve: `[0, 1]` along segments, the angular
/// offset from the start on arcs.
fn curve_param(e: &Edge, p: Point) -> f64 {
    match e {
        Edge::Segment(a, b) => {
            let d = *b - *a;
            ((p - *a).dot(d) / d.norm2()).clamp(0.0, 1.0)
        }
        Edge::Arc(c) => {
            let t = c.param_of(p);
            if t > c.sweep {
                // Outside the span only by rounding: snap to the nearer end.
                if t - c.sweep < TAU - t {
                    c.sweep
                } else {
                    0.0
                }
            } else {
                t
            }
        }
    }
}

fn piece(e: &Edge, t0: f64, t1: f64, p0: Point, p1: Point) -> Edge {
    match e {
        Edge::Segment(..) => Edge::Segment(p0, p1),
        Edge::Arc(c) => Edge::Arc(c.sub_arc(t0, t1)),
    }
}

/// Unit tangent and signed curvature of a half-edge geometry at its source.
fn outgoing(e: &Edge) -> (f64, f64) {
    match e {
        Edge::Segment(a, b) => ((*b - *a).angle(), 0.0),
        Edge::Arc(c) => {
            let t = if c.ccw { 0.0 } else { c.sweep };
            (c.tangent_at(t).angle(), c.signed_curvature())
        }
    }
}

fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    // Convex, counterclockwise.
    let n = poly.len();
    (0..n).all(|i| orient(poly[i], poly[(i + 1) % n], p) >= 0.0)
}

/// Convex polygon (counterclockwise) clipped to an axis-aligned box.
pub fn clip_convex(poly: &[Point], bb: &BBox) -> Vec<Point> {
    let planes: [(Point, f64); 4] = [
        (Point::new(1.0, 0.0), -bb.min.x),
        (Point::new(-1.0, 0.0), bb.max.x),
        (Point::new(0.0, 1.0), -bb.min.y),
        (Point::new(0.0, -1.0), bb.max.y),
    ];
    let mut out = poly.to_vec();
    for (n, c) in planes {
        let inside = |p: Point| n.dot(p) + c >= 0.0;
        let mut next = Vec::new();
        for i in 0..out.len() {
            let (a, b) = (out[i], out[(i + 1) % out.len()]);
            let (ia, ib) = (inside(a), inside(b));
            if ia {
                next.push(a);
            }
            if ia != ib {
                let (da, db) = (n.dot(a) + c, n.dot(b) + c);
                next.push(a + (b - a) * (da / (da - db)));
            }
        }
        out = next;
        if out.is_empty() {
            break;
        }
    }
    out.dedup();
    if out.len() > 1 && out[0] == out[out.len() - 1] {
        out.pop();
    }
    out
}

impl Arrangement {
    /// Builds the arrangement of `curves`. With a `domain` (convex,
    /// counterclockwise) its edges are added and arc pieces outside it are
    /// dropped; dangling arc pieces are pruned.
    pub fn build(curves: &[Edge], domain: Option<&[Point]>, snap: f64) -> Result<Arrangement> {
        let mut all: Vec<Edge> = Vec::new();
        let mut is_domain: Vec<bool> = Vec::new();
        if let Some(d) = domain {
            for i in 0..d.len() {
                all.push(Edge::Segment(d[i], d[(i + 1) % d.len()]));
                is_domain.push(true);
            }
        }
        for c in curves {
            let c = match c {
                Edge::Arc(a) if !a.ccw => Edge::Arc(a.reversed()),
                other => *other,
            };
            if c.length() > snap {
                all.push(c);
                is_domain.push(false);
            }
        }

        // Split points per curve: endpoints, long-arc midpoints, intersections.
        let mut splits: Vec<Vec<(Point, Option<f64>)>> = all
            .iter()
            .map(|e| match e {
                Edge::Segment(a, b) => vec![(*a, Some(0.0)), (*b, Some(1.0))],
                Edge::Arc(c) => {
                    let parts = (c.sweep / (0.75 * PI)).ceil() as usize;
                    (0..=parts)
                        .map(|k| {
                            let t = c.sweep * k as f64 / parts as f64;
                            (c.point_at(t), Some(t))
                        })
                        .collect()
                }
            })
            .collect();
        let boxes: Vec<BBox> = all.iter().map(|e| e.bbox().expand(snap)).collect();
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_by(|&a, &b| boxes[a].min.x.total_cmp(&boxes[b].min.x));
        let mut active: Vec<usize> = Vec::new();
        for &i in &order {
            active.retain(|&j| boxes[j].max.x >= boxes[i].min.x);
            for &j in &active {
                if !boxes[i].overlaps(&boxes[j]) {
                    continue;
                }
                for p in intersections(&all[i], &all[j]) {
                    splits[i].push((p, None));
                    splits[j].push((p, None));
                }
            }
            active.push(i);
        }

        // Snap and split.
        let mut snapper = Snapper::new(snap);
        let mut edges: Vec<Edge> = Vec::new();
        let mut ends: Vec<(usize, usize)> = Vec::new();
        let mut dom: Vec<bool> = Vec::new();
        let mut seen: HashMap<(usize, usize), Vec<Point>> = HashMap::new();
        for (ci, e) in all.iter().enumerate() {
            let mut pts: Vec<(f64, usize, Point)> = splits[ci]
                .iter()
                .map(|&(p, t)| (t.unwrap_or_else(|| curve_param(e, p)), snapper.insert(p), p))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|b, a| a.1 == b.1);
            for w in pts.windows(2) {
                let (t0, u, p0) = w[0];
                let (t1, v, p1) = w[1];
                if u == v {
                    continue;
                }
                let g = piece(e, t0, t1, p0, p1);
                if !is_domain[ci] {
                    if let Some(d) = domain {
                        let m = g.midpoint();
                        if !point_in_polygon(d, m) {
                            continue;
                        }
                    }
                }
                let m = g.midpoint();
                let key = (u.min(v), u.max(v));
                let dups = seen.entry(key).or_default();
                if dups.iter().any(|q| q.dist(m) <= 4.0 * snap) {
                    continue;
                }
                dups.push(m);
                edges.push(g);
                ends.push((u, v));
                dom.push(is_domain[ci]);
            }
        }
        let vertices = snapper.points;

        // Prune dangling arc pieces.
        let mut alive = vec![true; edges.len()];
        loop {
            let mut deg = vec![0usize; vertices.len()];
            for (e, &(u, v)) in ends.iter().enumerate() {
                if alive[e] {
                    deg[u] += 1;
                    deg[v] += 1;
                }
            }
            let mut changed = false;
            for (e, &(u, v)) in ends.iter().enumerate() {
                if alive[e] && !dom[e] && (deg[u] == 1 || deg[v] == 1) {
                    alive[e] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![usize::MAX; vertices.len()];
        let mut verts = Vec::new();
        let mut out_edges = Vec::new();
        let mut out_ends = Vec::new();
        for e in 0..edges.len() {
            if !alive[e] {
                continue;
            }
            let (u, v) = ends[e];
            for w in [u, v] {
                if remap[w] == usize::MAX {
                    remap[w] = verts.len();
                    verts.push(vertices[w]);
                }
            }
            out_edges.push(edges[e]);
            out_ends.push((remap[u], remap[v]));
        }
        Self::link(verts, out_edges, out_ends, snap)
    }

    fn half_geom(&self, h: usize) -> Edge {
        let e = self.edges[h / 2];
        if h.is_multiple_of(2) {
            e
        } else {
            e.reversed()
        }
    }

    pub fn origin(&self, h: usize) -> usize {
        let (u, v) = self.ends[h / 2];
        if h.is_multiple_of(2) {
            u
        } else {
            v
        }
    }

    fn link(
        vertices: Vec<Point>,
        edges: Vec<Edge>,
        ends: Vec<(usize, usize)>,
        snap: f64,
    ) -> Result<Arrangement> {
        let nh = 2 * edges.len();
        let mut arr = Arrangement {
            vertices,
            edges,
            ends,
            next: vec![0; nh],
            cycles: Vec::new(),
            faces: Vec::new(),
            half_face: vec![0; nh],
            components: 0,
            snap,
        };
        // Outgoing half-edges around each vertex in counterclockwise order.
        let mut around: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); arr.vertices.len()];
        for h in 0..nh {
            let (a, k) = outgoing(&arr.half_geom(h));
            around[arr.origin(h)].push((normalize_angle(a), k, h));
        }
        let mut pos = vec![0usize; nh];
        for list in &mut around {
            list.sort_by(|x, y| x.0.total_cmp(&y.0));
            // Curves leaving in the same direction: the one bending further
            // left comes later counterclockwise.
            let mut i = 0;
            while i < list.len() {
                let mut j = i + 1;
                while j < list.len() && list[j].0 - list[i].0 <= 1e-9 {
                    j += 1;
                }
                list[i..j].sort_by(|x, y| x.1.total_cmp(&y.1));
                i = j;
            }
            for (i, &(_, _, h)) in list.iter().enumerate() {
                pos[h] = i;
            }
        }
        for h in 0..nh {
            let t = h ^ 1;
            let list = &around[arr.origin(t)];
            arr.next[h] = list[(pos[t] + list.len() - 1) % list.len()].2;
        }

        // Cycles.
        let mut uf = UnionFind::new(arr.vertices.len());
        for &(u, v) in &arr.ends {
            uf.union(u, v);
        }
        let mut visited = vec![false; nh];
        for h0 in 0..nh {
            if visited[h0] {
                continue;
            }
            let mut hs = Vec::new();
            let mut h = h0;
            while !visited[h] {
                visited[h] = true;
                hs.push(h);
                h = arr.next[h];
            }
            if h != h0 {
                return Err(Error::Degeneracy {
                    at: arr.vertices[arr.origin(h0)],
                    what: "face walk did not close".into(),
                });
            }
            let area = hs.iter().map(|&h| arr.half_geom(h).area_term()).sum();
            let component = uf.find(arr.origin(h0));
            arr.cycles.push(Cycle {
                half_edges: hs,
                area,
                component,
            });
        }

        // Euler characteristic per component and one outer cycle each.
        let mut comp_ids: Vec<usize> = (0..arr.vertices.len()).map(|v| uf.find(v)).collect();
        comp_ids.sort_unstable();
        comp_ids.dedup();
        arr.components = comp_ids.len();
        for &c in &comp_ids {
            let v = (0..arr.vertices.len()).filter(|&x| uf.find(x) == c).count() as i64;
            let e = arr.ends.iter().filter(|&&(u, _)| uf.find(u) == c).count() as i64;
            let f = arr.cycles.iter().filter(|cy| cy.component == c).count() as i64;
            let outer = arr
                .cycles
                .iter()
                .filter(|cy| cy.component == c && cy.area < 0.0)
                .count();
            if v - e + f != 2 || outer != 1 {
                return Err(Error::Degeneracy {
                    at: arr.vertices[c],
                    what: format!(
                        "arrangement component has V - E + F = {} with {outer} outer cycles",
                        v - e + f
                    ),
                });
            }
        }

        // Faces: the unbounded face, then one per positive cycle; outer
        // cycles of components become holes of the smallest enclosing face.
        arr.faces.push(Face::default());
        let mut face_of_cycle = vec![0usize; arr.cycles.len()];
        for (ci, cy) in arr.cycles.iter().enumerate() {
            if cy.area > 0.0 {
                face_of_cycle[ci] = arr.faces.len();
                arr.faces.push(Face {
                    outer: Some(ci),
                    ..Face::default()
                });
            }
        }
        let chains: Vec<Chain> = (0..arr.cycles.len()).map(|c| arr.cycle_chain(c)).collect();
        for (ci, cy) in arr.cycles.iter().enumerate() {
            if cy.area > 0.0 {
                continue;
            }
            let probe = chains[ci][0].midpoint();
            let host = arr
                .cycles
                .iter()
                .enumerate()
                .filter(|(cj, o)| {
                    o.area > 0.0
                        && o.component != cy.component
                        && chain_contains(&chains[*cj], probe)
                })
                .min_by(|a, b| a.1.area.total_cmp(&b.1.area))
                .map(|(cj, _)| face_of_cycle[cj])
                .unwrap_or(0);
            face_of_cycle[ci] = host;
            arr.faces[host].holes.push(ci);
        }
        for (ci, cy) in arr.cycles.iter().enumerate() {
            for &h in &cy.half_edges {
                arr.half_face[h] = face_of_cycle[ci];
            }
        }
        arr.faces[0].guarded = Some(false);
        Ok(arr)
    }

    pub fn cycle_chain(&self, c: usize) -> Chain {
        self.cycles[c]
            .half_edges
            .iter()
            .map(|&h| self.half_geom(h))
            .collect()
    }

    /// Face count ψ, including the unbounded face.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Combinatorial complexity μ = V + E + F.
    pub fn complexity(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.faces.len()
    }

    /// `V - E + F` summed the way Euler's formula holds for a graph with
    /// `components` connected pieces: equals `1 + components`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    fn face_shape(&self, f: usize) -> Component {
        Component {
            boundary: self.faces[f]
                .outer
                .map(|c| self.cycle_chain(c))
                .unwrap_or_default(),
            holes: self.faces[f]
                .holes
                .iter()
                .map(|&c| self.cycle_chain(c))
                .collect(),
        }
    }
}

fn chain_contains(chain: &Chain, p: Point) -> bool {
    Component {
        boundary: chain.clone(),
        holes: Vec::new(),
    }
    .contains(p)
}

/// Representative probes of a bounded face: the vertex centroid when it
/// lies well inside, and a point offset inward from the longest edge.
fn face_probes(arr: &Arrangement, f: usize) -> Result<(Option<Point>, Point)> {
    let shape = arr.face_shape(f);
    let outer = arr.faces[f].outer.expect("bounded face");
    let hs = &arr.cycles[outer].half_edges;
    let clear = |p: Point, d: f64| shape.contains(p) && shape.edges().all(|e| e.distance(p) >= d);
    let n = hs.len() as f64;
    let centroid = hs.iter().fold(Point::default(), |s, &h| {
        s + arr.vertices[arr.origin(h)] * (1.0 / n)
    });
    let centroid = clear(centroid, 8.0 * arr.snap).then_some(centroid);
    let longest = hs
        .iter()
        .map(|&h| arr.half_geom(h))
        .max_by(|a, b| a.length().total_cmp(&b.length()))
        .expect("non-empty cycle");
    let m = longest.midpoint();
    let inward = match longest {
        Edge::Segment(a, b) => (b - a).perp() * (1.0 / a.dist(b)),
        Edge::Arc(c) => c.tangent_at(0.5 * c.sweep).perp(),
    };
    let mut d = 0.1 * longest.length();
    for _ in 0..60 {
        let q = m + inward * d;
        if clear(q, 0.5 * d) {
            return Ok((centroid, q));
        }
        d *= 0.5;
        if d < arr.snap {
            break;
        }
    }
    Err(Error::Degeneracy {
        at: m,
        what: format!("no interior probe found for face {f}"),
    })
}

/// Labels every bounded face guarded or not. Both probes are classified
/// when the centroid is usable; disagreement is reported as an error.
pub fn classify_faces(
    arr: &mut Arrangement,
    gs: &GuardSet,
    theta: f64,
    backend: ClassifyBackend,
) -> Result<()> {
    let mut probes: Vec<(usize, Point)> = Vec::new();
    for f in 1..arr.faces.len() {
        let (c, q) = face_probes(arr, f)?;
        probes.push((f, q));
        if let Some(c) = c {
            probes.push((f, c));
        }
    }
    let pts: Vec<Point> = probes.iter().map(|x| x.1).collect();
    let guarded: Vec<bool> = match backend {
        ClassifyBackend::Oracle => pts
            .iter()
            .map(|&p| is_theta_guarded(p, gs, theta))
            .collect(),
        ClassifyBackend::Batch => {
            let mut g = vec![true; pts.len()];
            for (i, _) in batch_unguarded(&pts, gs, theta)? {
                g[i] = false;
            }
            g
        }
    };
    for (k, &(f, p)) in probes.iter().enumerate() {
        match arr.faces[f].guarded {
            None => {
                arr.faces[f].guarded = Some(guarded[k]);
                arr.faces[f].probe = Some(p);
            }
            Some(g) if g != guarded[k] => return Err(Error::ProbeDisagreement { face: f, at: p }),
            _ => {}
        }
    }
    Ok(())
}

fn same_circle(a: &CircularArc, b: &CircularArc, tol: f64) -> bool {
    a.ccw == b.ccw && a.center.dist(b.center) <= tol && (a.radius - b.radius).abs() <= tol
}

/// Joins `a` followed by `b` when they continue one another on the same
/// circle or line.
fn join(a: &Edge, b: &Edge, tol: f64) -> Option<Edge> {
    match (a, b) {
        (Edge::Segment(p, q), Edge::Segment(q2, r)) => {
            let (u, v) = (*q - *p, *r - *q2);
            let straight = u.cross(v).abs() <= tol * (u.norm() + v.norm()) && u.dot(v) > 0.0;
            straight.then_some(Edge::Segment(*p, *r))
        }
        (Edge::Arc(x), Edge::Arc(y)) if same_circle(x, y, tol) && x.sweep + y.sweep < TAU => {
            let first = if x.ccw { x } else { y };
            let mut c = *first;
            c.sweep = x.sweep + y.sweep;
            Some(Edge::Arc(c))
        }
        _ => None,
    }
}

fn merge_chain(chain: Chain, tol: f64) -> Chain {
    let mut out: Chain = Vec::with_capacity(chain.len());
    for e in chain {
        match out.last().and_then(|l| join(l, &e, tol)) {
            Some(j) => *out.last_mut().unwrap() = j,
            None => out.push(e),
        }
    }
    while out.len() > 2 {
        match join(&out[out.len() - 1], &out[0], tol) {
            Some(j) => {
                out.pop();
                out[0] = j;
            }
            None => break,
        }
    }
    out
}

/// The union of guarded faces as a region: boundary edges separate a
/// guarded from an unguarded face and are oriented with the guarded side
/// on the left; edges between two guarded faces are dropped.
pub fn extract_region(arr: &Arrangement, theta: f64) -> Result<Region> {
    let guarded = |h: usize| arr.faces[arr.half_face[h]].guarded == Some(true);
    let boundary = |h: usize| guarded(h) && !guarded(h ^ 1);
    let mut used = vec![false; arr.next.len()];
    let mut outers: Vec<Chain> = Vec::new();
    let mut holes: Vec<Chain> = Vec::new();
    for h0 in 0..arr.next.len() {
        if used[h0] || !boundary(h0) {
            continue;
        }
        let mut chain = Vec::new();
        let mut h = h0;
        loop {
            used[h] = true;
            chain.push(arr.half_geom(h));
            let mut n = arr.next[h];
            let mut guard = 0;
            while !boundary(n) {
                n = arr.next[n ^ 1];
                guard += 1;
                if guard > arr.next.len() {
                    return Err(Error::Degeneracy {
                        at: arr.vertices[arr.origin(h)],
                        what: "boundary walk stuck".into(),
                    });
                }
            }
            if n == h0 {
                break;
            }
            if used[n] {
                return Err(Error::Degeneracy {
                    at: arr.vertices[arr.origin(n)],
                    what: "boundary walk revisited an edge".into(),
                });
            }
            h = n;
        }
        let chain = merge_chain(chain, 4.0 * arr.snap);
        if chain_signed_area(&chain) > 0.0 {
            outers.push(chain);
        } else {
            holes.push(chain);
        }
    }
    let mut components: Vec<Component> = outers
        .into_iter()
        .map(|boundary| Component {
            boundary,
            holes: Vec::new(),
        })
        .collect();
    for hole in holes {
        let probe = hole[0].midpoint();
        let host = components
            .iter()
            .enumerate()
            .filter(|(_, c)| chain_contains(&c.boundary, probe))
            .min_by(|a, b| {
                chain_signed_area(&a.1.boundary).total_cmp(&chain_signed_area(&b.1.boundary))
            })
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Degeneracy {
                at: probe,
                what: "hole outside every component".into(),
            })?;
        components[host].holes.push(hole);
    }
    Ok(Region {
        theta,
        whole_plane: false,
        components,
    })
}

/// Everything produced on the way to a Θ < π region.
#[derive(Debug, Clone)]
pub struct LtPiOutput {
    pub region: Region,
    pub arrangement: Option<Arrangement>,
    pub arcs: Vec<CircularArc>,
    pub candidate_count: usize,
}

/// Region for Θ ∈ (0, π).
pub fn region_theta_lt_pi(gs: &GuardSet, theta: f64, opts: &RegionOptions) -> Result<Region> {
    region_theta_lt_pi_detailed(gs, theta, opts).map(|o| o.region)
}

pub fn region_theta_lt_pi_detailed(
    gs: &GuardSet,
    theta: f64,
    opts: &RegionOptions,
) -> Result<LtPiOutput> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::WrongRegime {
            theta,
            expected: "(0, π)",
        });
    }
    let empty = |candidate_count| LtPiOutput {
        region: Region::empty(theta),
        arrangement: None,
        arcs: Vec::new(),
        candidate_count,
    };
    // Every point sees some gap of at least 2π/n.
    if gs.is_empty() || theta <= TAU / gs.len() as f64 {
        return Ok(empty(0));
    }
    let set = generate_candidate_arcs(gs, theta, opts.tangent)?;
    if set.provably_empty || set.is_empty() {
        return Ok(empty(set.len()));
    }
    let mut domain = convex_hull(gs.guards())?.vertices;
    if let Some(w) = &opts.window {
        domain = clip_convex(&domain, w);
    }
    if domain.len() < 3 {
        return Ok(empty(set.len()));
    }
    let arcs = trim_arcs(&set);
    let curves: Vec<Edge> = arcs.iter().map(|a| Edge::Arc(*a)).collect();
    let mut arr = Arrangement::build(&curves, Some(&domain), gs.eps())?;
    classify_faces(&mut arr, gs, theta, opts.classify)?;
    let region = extract_region(&arr, theta)?;
    Ok(LtPiOutput {
        region,
        arrangement: Some(arr),
        arcs,
        candidate_count: set.len(),
    })
}
