//! Candidate arcs for Θ < π.
//!
//! Every boundary point `p` of the region is the apex of an empty Θ-cone
//! with a guard `l` on its counterclockwise ray and a guard `r` on its
//! clockwise ray, so it lies on the inscribed-angle arc `C_{l,r}`. The
//! candidate pairs come from the hull edges and from sliding the maximal
//! empty cones of every guard backwards along one of their bounding rays
//! until the other ray touches a guard.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arc::{cone_arc, CircularArc, CircularSegment};
use crate::error::{Error, Result};
use crate::geom::{ccw_delta, orient, Point, Side};
use crate::hull::convex_hull_with_collinear;
use crate::oracle::{direction_groups, gaps, ConeWitness, GuardSet};
use crate::ptree::PartitionTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TangentBackend {
    #[default]
    Naive,
    PartitionTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcOrigin {
    HullEdge,
    /// The counterclockwise ray stayed anchored; the tangent guard landed
    /// on the clockwise ray.
    SlideRight,
    /// The clockwise ray stayed anchored; the tangent guard landed on the
    /// counterclockwise ray.
    SlideLeft,
}

/// An inscribed-angle arc `C_{l,r}` between two guards, stored as the full
/// arc from `l` to `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateArc {
    pub left: usize,
    pub right: usize,
    pub origin: ArcOrigin,
    pub arc: CircularArc,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArcStats {
    pub hull_edge: usize,
    pub slide_right: usize,
    pub slide_left: usize,
    pub maximal_cones: usize,
    pub slides_without_tangent: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateArcSet {
    pub theta: f64,
    pub guards: Vec<Point>,
    pub arcs: Vec<CandidateArc>,
    pub stats: ArcStats,
    /// Set when the guards are collinear, so no point is guarded.
    pub provably_empty: bool,
    /// Slides with a tangent guard, per apex guard.
    pub slides_per_guard: Vec<usize>,
}

impl CandidateArcSet {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        self.arcs.iter().map(|a| (a.left, a.right)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("arc set serializes")
    }
}

/// Tangent-guard search over the guard set.
pub struct TangentFinder<'a> {
    guards: &'a [Point],
    tree: Option<PartitionTree>,
    tol: f64,
}

/// Result of sliding a cone: the guards first touched by the free ray and
/// the apex at contact.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangency {
    pub guards: Vec<usize>,
    pub apex: Point,
    pub distance: f64,
}

impl<'a> TangentFinder<'a> {
    pub fn new(gs: &'a GuardSet, backend: TangentBackend) -> Result<Self> {
        let tree = match backend {
            TangentBackend::Naive => None,
            TangentBackend::PartitionTree => Some(PartitionTree::build(gs.guards(), 8)?),
        };
        Ok(TangentFinder {
            guards: gs.guards(),
            tree,
            tol: gs.eps(),
        })
    }

    fn extreme(&self, a: Point, b: Point, side: Side, dir: Point) -> Option<usize> {
        match &self.tree {
            Some(t) => t.extreme_in_halfplane(a, b, side, dir),
            None => crate::ptree::naive_extreme(self.guards, a, b, side, dir),
        }
    }

    fn at_least(&self, a: Point, b: Point, side: Side, dir: Point, thr: f64) -> Vec<usize> {
        match &self.tree {
            Some(t) => t.report_at_least(a, b, side, dir, thr),
            None => crate::ptree::naive_report_at_least(self.guards, a, b, side, dir, thr),
        }
    }

    /// Slides the cone with apex `g`, anchored ray through `anchor` and free
    /// ray turned by `theta` towards `side`, backwards along the anchored
    /// ray. Returns every guard the free ray touches first (ties
    /// within tolerance), or `None` when the cone escapes.
    pub fn slide(&self, g: Point, anchor: Point, theta: f64, side: Side) -> Option<Tangency> {
        let anchor_dir = (anchor - g).angle();
        let u = Point::polar(anchor_dir);
        let s = theta.sin();
        // Free-ray direction and the query direction that ranks guards by
        // how early the free ray reaches them.
        let (free, dir) = match side {
            Side::Left => {
                let f = Point::polar(anchor_dir + theta);
                (f, -f.perp())
            }
            Side::Right => {
                let f = Point::polar(anchor_dir - theta);
                (f, f.perp())
            }
        };
        let first = self.extreme(g, anchor, side, dir)?;
        let best = self.guards[first].dot(dir);
        let touched = self.at_least(g, anchor, side, dir, best - self.tol * s);
        let t_of = |q: Point| match side {
            Side::Left => free.cross(q - g) / s,
            Side::Right => (q - g).cross(free) / s,
        };
        let distance = t_of(self.guards[first]).max(0.0);
        Some(Tangency {
            guards: touched,
            apex: g - u * distance,
            distance,
        })
    }
}

/// The tangent guard for the cone at `g` whose anchored ray passes through
/// `anchor` and whose free ray is turned by `theta` to `side`.
pub fn find_tangent_guard(
    g: Point,
    anchor: Point,
    theta: f64,
    side: Side,
    gs: &GuardSet,
    backend: TangentBackend,
) -> Result<Option<(Point, Point)>> {
    if g == anchor {
        return Err(Error::CoincidentPoints(g));
    }
    let a = (anchor - g).angle();
    let f = match side {
        Side::Left => a + theta,
        Side::Right => a - theta,
    };
    let w = ConeWitness {
        apex: g,
        start: if side == Side::Left { a } else { f },
        extent: theta,
        g_min: None,
        g_max: None,
    };
    if !w.is_empty_for(gs.guards(), gs.eps()) {
        return Err(Error::ConeNotEmpty { apex: g });
    }
    let finder = TangentFinder::new(gs, backend)?;
    Ok(finder
        .slide(g, anchor, theta, side)
        .map(|t| (gs.guards()[t.guards[0]], t.apex)))
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < PI {
        Ok(())
    } else {
        Err(Error::WrongRegime {
            theta,
            expected: "(0, π)",
        })
    }
}

pub fn generate_candidate_arcs(
    gs: &GuardSet,
    theta: f64,
    backend: TangentBackend,
) -> Result<CandidateArcSet> {
    check_theta(theta)?;
    let guards = gs.guards();
    let n = guards.len();
    let mut set = CandidateArcSet {
        theta,
        guards: guards.to_vec(),
        arcs: Vec::new(),
        stats: ArcStats::default(),
        provably_empty: false,
        slides_per_guard: vec![0; n],
    };
    if n < 3
        || guards
            .iter()
            .all(|&q| orient(guards[0], guards[1], q) == 0.0)
    {
        set.provably_empty = true;
        return Ok(set);
    }
    let index: BTreeMap<(u64, u64), usize> = guards
        .iter()
        .enumerate()
        .map(|(i, p)| (((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits()), i))
        .collect();
    let idx_of = |p: Point| index[&((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())];

    let mut raw: Vec<(usize, usize, ArcOrigin)> = Vec::new();
    let hull = convex_hull_with_collinear(guards)?;
    let h = &hull.vertices;
    for k in 0..h.len() {
        let (u, v) = (h[k], h[(k + 1) % h.len()]);
        raw.push((idx_of(u), idx_of(v), ArcOrigin::HullEdge));
    }

    let finder = TangentFinder::new(gs, backend)?;
    let per_guard: Vec<SlideResult> = (0..n)
        .into_par_iter()
        .map(|gi| slide_pairs(gi, guards, theta, &finder))
        .collect();
    for (gi, (pairs, cones, slides, misses)) in per_guard.into_iter().enumerate() {
        raw.extend(pairs);
        set.stats.maximal_cones += cones;
        set.stats.slides_without_tangent += misses;
        set.slides_per_guard[gi] = slides;
    }

    // One arc per ordered guard pair; the first origin seen wins.
    let mut seen = BTreeMap::new();
    for (l, r, o) in raw {
        if l != r {
            seen.entry((l, r)).or_insert(o);
        }
    }
    for ((l, r), origin) in seen {
        let arc = cone_arc(guards[l], guards[r], theta)?;
        match origin {
            ArcOrigin::HullEdge => set.stats.hull_edge += 1,
            ArcOrigin::SlideRight => set.stats.slide_right += 1,
            ArcOrigin::SlideLeft => set.stats.slide_left += 1,
        }
        set.arcs.push(CandidateArc {
            left: l,
            right: r,
            origin,
            arc,
        });
    }
    Ok(set)
}

/// Pairs contributed by the maximal empty cones at guard `gi`, with the
/// number of cones, successful slides and escaped slides.
/// Guard pairs, maximal cones, slides with a tangent guard, slides without.
type SlideResult = (Vec<(usize, usize, ArcOrigin)>, usize, usize, usize);

fn slide_pairs(gi: usize, guards: &[Point], theta: f64, finder: &TangentFinder) -> SlideResult {
    let g = guards[gi];
    let groups = direction_groups(g, guards);
    let mut out = Vec::new();
    let (mut cones, mut slides, mut misses) = (0, 0, 0);
    let behind = |anchor: Point, dist: f64| -> Vec<usize> {
        // Guards on the anchored line behind g that the apex passes.
        let u = anchor - g;
        guards
            .iter()
            .enumerate()
            .filter(|&(_, &q)| {
                q != g
                    && orient(g, anchor, q) == 0.0
                    && (q - g).dot(u) < 0.0
                    && g.dist(q) <= dist * (1.0 + 1e-12)
            })
            .map(|(m, _)| m)
            .collect()
    };
    for gap in gaps(&groups) {
        if gap.extent < theta {
            continue;
        }
        cones += 1;
        let cw_anchor = guards[groups[gap.from].members[0]];
        let ccw_anchor = guards[groups[gap.to].members[0]];
        // Arcs leaving g itself: the cone turns about a witness while g
        // stays on the other ray.
        for &a in &groups[gap.from].members {
            out.push((gi, a, ArcOrigin::SlideLeft));
        }
        for &b in &groups[gap.to].members {
            out.push((b, gi, ArcOrigin::SlideRight));
        }
        // Clockwise ray anchored; the counterclockwise ray is free.
        match finder.slide(g, cw_anchor, theta, Side::Left) {
            Some(t) => {
                slides += 1;
                let mut anchors: Vec<usize> = groups[gap.from].members.clone();
                anchors.push(gi);
                anchors.extend(behind(cw_anchor, t.distance));
                for &q in &t.guards {
                    for &a in &anchors {
                        out.push((q, a, ArcOrigin::SlideLeft));
                    }
                }
            }
            None => misses += 1,
        }
        // Counterclockwise ray anchored; the clockwise ray is free.
        match finder.slide(g, ccw_anchor, theta, Side::Right) {
            Some(t) => {
                slides += 1;
                let mut anchors: Vec<usize> = groups[gap.to].members.clone();
                anchors.push(gi);
                anchors.extend(behind(ccw_anchor, t.distance));
                for &q in &t.guards {
                    for &a in &anchors {
                        out.push((a, q, ArcOrigin::SlideRight));
                    }
                }
            }
            None => misses += 1,
        }
    }
    (out, cones, slides, misses)
}

/// Parameter intervals of the arc `C_{l,r}` (from `l` at 0 to `r` at the
/// sweep) whose apex cone contains a guard strictly inside.
fn blocked_intervals(arc: &CircularArc, l: Point, r: Point, guards: &[Point]) -> Vec<(f64, f64)> {
    let sweep = arc.sweep;
    let hit = |v: Point, q: Point| -> Option<f64> {
        let d = q - v;
        let d2 = d.norm2();
        if d2 == 0.0 {
            return None;
        }
        let s = -2.0 * (v - arc.center).dot(d) / d2;
        let t = arc.param_of(v + d * s);
        (t > 0.0 && t < sweep).then_some(t)
    };
    let mut out = Vec::new();
    for &q in guards {
        if q == l || q == r {
            continue;
        }
        let mut cuts = vec![0.0, sweep];
        cuts.extend(hit(r, q));
        cuts.extend(hit(l, q));
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let p = arc.point_at(0.5 * (w[0] + w[1]));
            if orient(r, q, p) > 0.0 && orient(l, q, p) < 0.0 {
                out.push((w[0], w[1]));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in out {
        match merged.last_mut() {
            Some(m) if a <= m.1 => m.1 = m.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

/// Pieces of the candidate arcs whose apex cones are empty: exactly the
/// arcs that can carry boundary points. Co-circular pieces are merged.
pub fn trim_arcs(set: &CandidateArcSet) -> Vec<CircularArc> {
    let guards = &set.guards;
    let pieces: Vec<CircularArc> = set
        .arcs
        .par_iter()
        .flat_map_iter(|ca| {
            let (l, r) = (guards[ca.left], guards[ca.right]);
            let blocked = blocked_intervals(&ca.arc, l, r, guards);
            let mut free = Vec::new();
            let mut t = 0.0;
            for (a, b) in blocked {
                if a > t {
                    free.push(ca.arc.sub_arc(t, a));
                }
                t = t.max(b);
            }
            if t < ca.arc.sweep {
                free.push(ca.arc.sub_arc(t, ca.arc.sweep));
            }
            free.into_iter().filter(|a| a.length() > 0.0)
        })
        .collect();
    merge_cocircular(
        pieces,
        set.guards.iter().map(|p| p.norm()).fold(1.0, f64::max) * 1e-12,
    )
}

/// Unites arcs lying on the same circle (within `tol`) into maximal arcs.
pub fn merge_cocircular(mut arcs: Vec<CircularArc>, tol: f64) -> Vec<CircularArc> {
    arcs.sort_by(|a, b| {
        a.center
            .x
            .total_cmp(&b.center.x)
            .then(a.center.y.total_cmp(&b.center.y))
            .then(a.radius.total_cmp(&b.radius))
    });
    let same = |a: &CircularArc, b: &CircularArc| {
        a.center.dist(b.center) <= tol && (a.radius - b.radius).abs() <= tol
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < arcs.len() {
        // Greedy clustering; the x-sorted order keeps clusters contiguous
        // unless two distinct circles interleave within tolerance.
        let mut cluster = vec![arcs[i]];
        let mut j = i + 1;
        while j < arcs.len() && arcs[j].center.x - arcs[i].center.x <= tol {
            if same(&arcs[i], &arcs[j]) {
                cluster.push(arcs[j]);
                arcs.remove(j);
            } else {
                j += 1;
            }
        }
        out.extend(merge_cluster(&cluster));
        i += 1;
    }
    out
}

fn merge_cluster(cluster: &[CircularArc]) -> Vec<CircularArc> {
    if cluster.len() == 1 {
        let mut a = cluster[0];
        a.ccw = true;
        return vec![a];
    }
    let base = cluster[0];
    // Angular intervals relative to the start of the first arc.
    let mut iv: Vec<(f64, f64)> = cluster
        .iter()
        .map(|a| {
            let s = ccw_delta(base.start, a.start);
            (s, s + a.sweep)
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(m) if a <= m.1 => m.1 = m.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    // Wrap-around: an interval reaching past 2π may cover the first ones.
    while merged.len() > 1 {
        let last = *merged.last().unwrap();
        if last.1 - TAU >= merged[0].0 {
            merged.pop();
            let first = merged.remove(0);
            merged.push((last.0, (first.1 + TAU).max(last.1)));
        } else {
            break;
        }
    }
    merged
        .into_iter()
        .map(|(a, b)| {
            let mut arc = CircularArc::new(
                base.center,
                base.radius,
                base.start + a,
                (b - a).min(TAU),
                true,
            );
            arc.provenance = base.provenance;
            arc
        })
        .collect()
}

/// A tunnel traced by rotating an empty Θ-cone between two guards in both
/// directions until its apex reaches a guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tunnel {
    /// Guards met on the counterclockwise rays, in order of appearance.
    pub left: Vec<Point>,
    /// Guards met on the clockwise rays, in order of appearance.
    pub right: Vec<Point>,
    /// Consecutive (left, right) pairs whose arcs bound the tunnel.
    pub pairs: Vec<(Point, Point)>,
    pub arcs: Vec<CircularArc>,
    pub l0: Point,
    pub r0: Point,
    pub theta: f64,
}

impl Tunnel {
    /// Membership in `U`: every circular segment of the pairs intersected
    /// with the half-plane left of `r0 -> l0`.
    pub fn u_contains(&self, p: Point) -> bool {
        orient(self.r0, self.l0, p) >= 0.0
            && self.pairs.iter().all(|&(l, r)| {
                CircularSegment::new(l, r, self.theta)
                    .map(|s| s.contains_geometric(p))
                    .unwrap_or(false)
            })
    }
}

/// First parameter after `t` (moving towards `forward` end) at which a guard
/// enters the cone of `C_{l,r}`, with that guard and the ray it lands on.
fn next_event(
    arc: &CircularArc,
    l: Point,
    r: Point,
    guards: &[Point],
    t: f64,
    forward: bool,
) -> Option<(f64, Point, bool)> {
    let eps = 1e-12;
    let mut best: Option<(f64, Point, bool)> = None;
    for &q in guards {
        if q == l || q == r {
            continue;
        }
        for (v, on_right) in [(r, true), (l, false)] {
            let d = q - v;
            if d.norm2() == 0.0 {
                continue;
            }
            let s = -2.0 * (v - arc.center).dot(d) / d.norm2();
            let tq = arc.param_of(v + d * s);
            if !(tq > 0.0 && tq < arc.sweep) {
                continue;
            }
            let ahead = if forward { tq > t + eps } else { tq < t - eps };
            if !ahead {
                continue;
            }
            // The guard must enter the cone when crossing this parameter.
            let probe = if forward {
                tq + 1e-9 * arc.sweep
            } else {
                tq - 1e-9 * arc.sweep
            };
            let p = arc.point_at(probe.clamp(0.0, arc.sweep));
            if !(orient(r, q, p) > 0.0 && orient(l, q, p) < 0.0) {
                continue;
            }
            let closer = match best {
                None => true,
                Some((bt, _, _)) => {
                    if forward {
                        tq < bt
                    } else {
                        tq > bt
                    }
                }
            };
            if closer {
                best = Some((tq, q, on_right));
            }
        }
    }
    best
}

/// Diagnostic: the tunnel through the empty cone `start`, which must have
/// extent Θ with its witnesses on both rays.
pub fn trace_tunnel(start: &ConeWitness, gs: &GuardSet, theta: f64) -> Result<Tunnel> {
    check_theta(theta)?;
    let (Some(l), Some(r)) = (start.g_min, start.g_max) else {
        return Err(Error::InvalidParameter(
            "tunnel start needs guards on both rays".into(),
        ));
    };
    if (start.extent - theta).abs() > 1e-9 || !start.is_empty_for(gs.guards(), gs.eps()) {
        return Err(Error::ConeNotEmpty { apex: start.apex });
    }
    let guards = gs.guards();
    let arc0 = cone_arc(l, r, theta)?;
    let t0 = arc0.param_of(start.apex);

    // Forward: the apex moves towards r; guards replace l or r as they land.
    let mut fwd: Vec<((Point, Point), CircularArc)> = Vec::new();
    let (mut cl, mut cr, mut t) = (l, r, t0);
    for _ in 0..4 * guards.len() + 4 {
        let arc = cone_arc(cl, cr, theta)?;
        match next_event(&arc, cl, cr, guards, t, true) {
            None => {
                fwd.push(((cl, cr), arc.sub_arc(t, arc.sweep)));
                break;
            }
            Some((tq, q, on_right)) => {
                fwd.push(((cl, cr), arc.sub_arc(t, tq)));
                let apex = arc.point_at(tq);
                if on_right {
                    cr = q;
                } else {
                    cl = q;
                }
                t = cone_arc(cl, cr, theta)?.param_of(apex);
            }
        }
    }
    // Backward: the apex moves towards l.
    let mut bwd: Vec<((Point, Point), CircularArc)> = Vec::new();
    let (mut cl, mut cr, mut t) = (l, r, t0);
    for _ in 0..4 * guards.len() + 4 {
        let arc = cone_arc(cl, cr, theta)?;
        match next_event(&arc, cl, cr, guards, t, false) {
            None => {
                bwd.push(((cl, cr), arc.sub_arc(0.0, t)));
                break;
            }
            Some((tq, q, on_right)) => {
                bwd.push(((cl, cr), arc.sub_arc(tq, t)));
                let apex = arc.point_at(tq);
                if on_right {
                    cr = q;
                } else {
                    cl = q;
                }
                t = cone_arc(cl, cr, theta)?.param_of(apex);
            }
        }
    }
    let l0 = bwd.last().map(|x| x.0 .0).unwrap_or(l);
    let r0 = fwd.last().map(|x| x.0 .1).unwrap_or(r);
    let mut seq: Vec<((Point, Point), CircularArc)> = bwd.into_iter().rev().collect();
    // The starting pair appears in both halves; join its two pieces.
    let first_fwd = fwd.remove(0);
    if let Some(last) = seq.last_mut() {
        let a = last.1;
        last.1 = a.sub_arc(0.0, a.sweep + first_fwd.1.sweep);
    }
    seq.extend(fwd);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for ((pl, pr), _) in &seq {
        if left.last() != Some(pl) {
            left.push(*pl);
        }
        if right.last() != Some(pr) {
            right.push(*pr);
        }
    }
    Ok(Tunnel {
        left,
        right,
        pairs: seq.iter().map(|x| x.0).collect(),
        arcs: seq.iter().map(|x| x.1).collect(),
        l0,
        r0,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{is_theta_guarded, max_empty_cone};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn tangent_example() {
        let gs = GuardSet::new([p(0.0, 0.0), p(4.0, 0.0), p(2.0, 3.0)]).unwrap();
        for backend in [TangentBackend::Naive, TangentBackend::PartitionTree] {
            let (q, apex) =
                find_tangent_guard(p(0.0, 0.0), p(4.0, 0.0), PI / 4.0, Side::Left, &gs, backend)
                    .unwrap()
                    .unwrap();
            assert_eq!(q, p(2.0, 3.0));
            assert!(apex.dist(p(-1.0, 0.0)) < 1e-12);
        }
        let none = find_tangent_guard(
            p(0.0, 0.0),
            p(4.0, 0.0),
            PI / 4.0,
            Side::Right,
            &gs,
            TangentBackend::Naive,
        );
        assert_eq!(none.unwrap(), None);
        let blocked = find_tangent_guard(
            p(0.0, 0.0),
            p(4.0, 0.0),
            PI / 2.0,
            Side::Left,
            &gs,
            TangentBackend::Naive,
        );
        assert!(matches!(blocked, Err(Error::ConeNotEmpty { .. })));
    }

    #[test]
    fn square_with_center() {
        let gs = GuardSet::new([
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(0.0, 1.0),
            p(0.5, 0.5),
        ])
        .unwrap();
        let theta = PI / 2.0 - 0.2;
        let set = generate_candidate_arcs(&gs, theta, TangentBackend::Naive).unwrap();
        assert_eq!(set.stats.hull_edge, 4);
        // Four gaps of π/2 at the center guard.
        let center_cones = maximal_cone_count(&gs, 4, theta);
        assert_eq!(center_cones, 4);
        for a in &set.arcs {
            assert!((a.arc.provenance.unwrap().inscribed - theta).abs() < 1e-15);
        }
        assert!(!set.provably_empty);
    }

    fn maximal_cone_count(gs: &GuardSet, gi: usize, theta: f64) -> usize {
        crate::oracle::maximal_empty_cones(gs.guards()[gi], gs, theta).len()
    }

    #[test]
    fn collinear_is_provably_empty() {
        let gs = GuardSet::new((0..5).map(|i| p(i as f64, 2.0 * i as f64))).unwrap();
        let set = generate_candidate_arcs(&gs, 1.0, TangentBackend::Naive).unwrap();
        assert!(set.provably_empty && set.is_empty());
        assert!(generate_candidate_arcs(&gs, PI, TangentBackend::Naive).is_err());
    }

    #[test]
    fn backends_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..8 {
            let n = rng.gen_range(5..60);
            let gs = GuardSet::new((0..n).map(|_| p(rng.gen(), rng.gen()))).unwrap();
            let theta = rng.gen_range(0.2..3.0);
            let a = generate_candidate_arcs(&gs, theta, TangentBackend::Naive).unwrap();
            let b = generate_candidate_arcs(&gs, theta, TangentBackend::PartitionTree).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn endpoint_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..10 {
            let gs = GuardSet::new((0..40).map(|_| p(rng.gen(), rng.gen()))).unwrap();
            let theta = rng.gen_range(0.1..3.0);
            let set = generate_candidate_arcs(&gs, theta, TangentBackend::Naive).unwrap();
            let cap = 2 * (TAU / theta).floor() as usize;
            assert!(set.slides_per_guard.iter().all(|&s| s <= cap));
        }
    }

    /// Boundary cells of a fine oracle raster lie near the trimmed arcs.
    #[test]
    fn trimmed_arcs_cover_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let n = rng.gen_range(3..40);
            let gs = GuardSet::new((0..n).map(|_| p(rng.gen(), rng.gen()))).unwrap();
            let theta = rng.gen_range(0.2..3.1);
            let set = generate_candidate_arcs(&gs, theta, TangentBackend::Naive).unwrap();
            let arcs = trim_arcs(&set);
            let res = 120;
            let ras =
                crate::oracle::rasterize(&gs, theta, gs.bbox().scaled(1.6), res, res).unwrap();
            let diag = ras.cell_diagonal();
            for r in 0..res {
                for c in 0..res {
                    for (c2, r2) in [(c + 1, r), (c, r + 1)] {
                        if c2 >= res
                            || r2 >= res
                            || ras.guarded[r * res + c] == ras.guarded[r2 * res + c2]
                        {
                            continue;
                        }
                        let m = ras.center(c, r).midpoint(ras.center(c2, r2));
                        let d = arcs
                            .iter()
                            .map(|x| x.distance(m))
                            .fold(f64::INFINITY, f64::min);
                        assert!(d <= diag, "boundary near {m:?} is {d} from every arc");
                    }
                }
            }
        }
    }

    #[test]
    fn trimmed_points_have_empty_cones() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let gs = GuardSet::new((0..30).map(|_| p(rng.gen(), rng.gen()))).unwrap();
        let theta = 1.2;
        let set = generate_candidate_arcs(&gs, theta, TangentBackend::Naive).unwrap();
        for a in trim_arcs(&set) {
            let q = a.midpoint();
            assert!(max_empty_cone(q, &gs).extent >= theta - 1e-7);
            // Just inside the circle the chord is seen under a larger angle.
            let _ = is_theta_guarded(q, &gs, theta);
        }
    }

    #[test]
    fn merge_overlapping_cocircular() {
        let c = p(1.0, 2.0);
        let a = CircularArc::new(c, 1.0, 0.0, 1.0, true);
        let b = CircularArc::new(c, 1.0, 0.5, 1.0, true);
        let d = CircularArc::new(c, 1.0, 3.0, 0.5, true);
        let m = merge_cocircular(vec![a, b, d], 1e-12);
        assert_eq!(m.len(), 2);
        let wrap = merge_cocircular(
            vec![
                CircularArc::new(c, 1.0, 6.0, 1.0, true),
                CircularArc::new(c, 1.0, 0.5, 1.0, true),
            ],
            1e-12,
        );
        assert_eq!(wrap.len(), 1);
        assert!((wrap[0].sweep - (1.5 + TAU - 6.0)).abs() < 1e-12);
    }

    fn funnel() -> (GuardSet, ConeWitness, f64) {
        // Two guards on each side of a downward funnel.
        let gs = GuardSet::new([p(-1.0, 0.0), p(1.0, 0.0), p(-3.0, 2.0), p(3.0, 2.0)]).unwrap();
        let theta = 1.0;
        let arc = cone_arc(p(-1.0, 0.0), p(1.0, 0.0), theta).unwrap();
        let apex = arc.midpoint();
        let w = ConeWitness {
            apex,
            start: (p(1.0, 0.0) - apex).angle(),
            extent: theta,
            g_min: Some(p(-1.0, 0.0)),
            g_max: Some(p(1.0, 0.0)),
        };
        (gs, w, theta)
    }

    #[test]
    fn tunnel_counts_and_convexity() {
        let (gs, w, theta) = funnel();
        let t = trace_tunnel(&w, &gs, theta).unwrap();
        assert_eq!(t.pairs.len(), t.left.len() + t.right.len() - 1);
        assert!(!t.pairs.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let bb = gs.bbox().scaled(4.0);
        let inside: Vec<Point> = (0..4000)
            .map(|_| {
                p(
                    rng.gen_range(bb.min.x..bb.max.x),
                    rng.gen_range(bb.min.y..bb.max.y),
                )
            })
            .filter(|&q| t.u_contains(q))
            .collect();
        assert!(!inside.is_empty());
        for k in 1..inside.len() {
            assert!(t.u_contains(inside[k].midpoint(inside[k - 1])));
        }
        let set = generate_candidate_arcs(&gs, theta, TangentBackend::Naive).unwrap();
        let pairs: BTreeSet<(usize, usize)> = set.pairs();
        for (l, r) in &t.pairs {
            let key = (gs.index_of(*l).unwrap(), gs.index_of(*r).unwrap());
            assert!(pairs.contains(&key), "tunnel pair {key:?} missing");
        }
    }
}
