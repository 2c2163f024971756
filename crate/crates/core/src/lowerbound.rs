//! Guard sets whose Θ-region breaks into (2i+1)² components inside the box
//! B_i, with n = 96i − 4 guards.
//!
//! First step: every half of the box B_{4i} is cut into 8i cells of width 1
//! and height 4i. The 2i medial cells carry pattern A (a thin vertical
//! tunnel reaching the axis), the others pattern B (three guards on the
//! top edge). Second step: for every tilted tunnel class one blocker is
//! placed far out on the ray of its deepest-cone slope, on the boundary of
//! a box B_x found by doubling search.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::arrangement::{region_theta_lt_pi, ClassifyBackend, RegionOptions};
use crate::error::{Error, Result};
use crate::geom::{BBox, Point};
use crate::oracle::{rasterize, GuardSet};

/// Largest B_x half-width tried, in multiples of i.
const BX_CAP: f64 = 1.0e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boxes {
    /// Half-widths of the axis-aligned squares centred at the origin.
    pub b_i: f64,
    pub b_2i: f64,
    pub b_4i: f64,
    pub b_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundInstance {
    pub i: usize,
    pub theta: f64,
    pub guards: Vec<Point>,
    pub boxes: Boxes,
    pub expected_components: usize,
    pub first_step_guards: usize,
    pub blockers: Vec<Point>,
    /// Axis directions of the deepest tilted cones in the upper half, one
    /// per offset h = 1..2i−1 and orientation.
    pub slopes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMethod {
    Raster,
    Arrangement,
}

pub fn theta_i(i: usize) -> f64 {
    2.0 * (1.0 / (8.0 * i as f64)).atan()
}

/// Key for exact deduplication of constructed points (all coordinates are
/// multiples of 1/4 in the first step).
fn key(p: Point) -> (i64, i64) {
    ((p.x * 4.0).round() as i64, (p.y * 4.0).round() as i64)
}

/// The four symmetric copies of an upper-half point.
fn halves(p: Point) -> [Point; 4] {
    [
        p,
        Point::new(p.x, -p.y),
        Point::new(p.y, p.x),
        Point::new(-p.y, p.x),
    ]
}

/// Left edge of the k-th pattern-A cell (k = 1..2i).
fn a_cell(i: usize, k: usize) -> f64 {
    -(i as f64) + (k - 1) as f64
}

/// First-step guards of the upper half, ordered by construction.
pub fn upper_half_pattern(i: usize) -> Vec<Point> {
    let fi = i as f64;
    let (y2, y4) = (2.0 * fi, 4.0 * fi);
    let mut out = Vec::new();
    for c in 0..8 * i {
        let x = -4.0 * fi + c as f64;
        if x >= -fi && x < fi {
            // Pattern A.
            out.extend([
                Point::new(x + 0.25, y2),
                Point::new(x + 0.75, y2),
                Point::new(x, y4),
                Point::new(x + 1.0, y4),
                Point::new(x, y2),
                Point::new(x + 1.0, y2),
            ]);
        } else {
            // Pattern B.
            out.extend([
                Point::new(x, y4),
                Point::new(x + 0.5, y4),
                Point::new(x + 1.0, y4),
            ]);
        }
    }
    out
}

/// All first-step guards, shared points counted once.
pub fn first_step(i: usize) -> Vec<Point> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in upper_half_pattern(i) {
        for q in halves(p) {
            if seen.insert(key(q)) {
                out.push(q);
            }
        }
    }
    out
}

/// Guards bounding the tunnel through the k-th top opening and the l-th
/// middle opening of the upper half: (left guards, right guards).
fn tunnel_guards(i: usize, k: usize, l: usize) -> ([Point; 2], [Point; 2]) {
    let (y2, y4) = (2.0 * i as f64, 4.0 * i as f64);
    let (xp, xq) = (a_cell(i, k), a_cell(i, l));
    (
        [Point::new(xp, y4), Point::new(xq + 0.25, y2)],
        [Point::new(xp + 1.0, y4), Point::new(xq + 0.75, y2)],
    )
}

/// Ray directions of a cone with axis `phi`: (counterclockwise, clockwise).
fn rays(phi: f64, theta: f64) -> (Point, Point) {
    (
        Point::polar(phi + 0.5 * theta),
        Point::polar(phi - 0.5 * theta),
    )
}

/// Apex with `cross(ul, a) = s` and `cross(ur, a) = t`.
fn apex_from(ul: Point, ur: Point, s: f64, t: f64) -> Point {
    let det = ul.cross(ur);
    // cross(u, a) = u.x a.y − u.y a.x.
    let ax = (s * ur.x - t * ul.x) / det;
    let ay = (s * ur.y - t * ul.y) / det;
    Point::new(ax, ay)
}

/// Lowest apex of a cone with axis `phi` keeping `left` guards on its left
/// and `right` guards on its right.
fn deepest_for_axis(phi: f64, theta: f64, left: &[Point], right: &[Point]) -> Point {
    let (ul, ur) = rays(phi, theta);
    let s = left
        .iter()
        .map(|g| ul.cross(*g))
        .fold(f64::INFINITY, f64::min);
    let t = right
        .iter()
        .map(|g| ur.cross(*g))
        .fold(f64::NEG_INFINITY, f64::max);
    apex_from(ul, ur, s, t)
}

/// Axis range of cones through both openings: the counterclockwise ray
/// runs through both left-side intervals.
fn axis_range(theta: f64, left: &[Point; 2], right: &[Point; 2]) -> (f64, f64) {
    let (top_l, mid_l) = (left[0], left[1]);
    let (top_r, mid_r) = (right[0], right[1]);
    let a = (top_l - mid_r).angle();
    let b = (top_r - mid_l).angle();
    (a.min(b) - theta, a.max(b) + theta)
}

/// Deepest empty cone through the tunnel: axis direction and apex.
pub fn deepest_cone(i: usize, k: usize, l: usize, theta: f64) -> (f64, Point) {
    let (left, right) = tunnel_guards(i, k, l);
    let (lo, hi) = axis_range(theta, &left, &right);
    let y = |phi: f64| deepest_for_axis(phi, theta, &left, &right).y;
    let n = 4000;
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|j| lo + step * j as f64)
        .min_by(|a, b| y(*a).total_cmp(&y(*b)))
        .unwrap();
    // Golden-section refinement around the best sample.
    let (mut a, mut b) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if y(c) <= y(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let phi = 0.5 * (a + b);
    (phi, deepest_for_axis(phi, theta, &left, &right))
}

fn in_cone(p: Point, apex: Point, phi: f64, half: f64) -> f64 {
    // Positive when strictly inside, by the angular margin.
    let d = p - apex;
    let off = (d.angle() - phi + PI).rem_euclid(2.0 * PI) - PI;
    half - off.abs()
}

/// Blocker on the boundary of B_x along the axis `phi` of the upper half.
/// Axes leaning left are mirrors of the right-leaning ones, placed exactly
/// mirrored.
fn blocker_at(phi: f64, x: f64) -> Point {
    if phi > FRAC_PI_2 {
        let b = blocker_at(PI - phi, x);
        return Point::new(-b.x, b.y);
    }
    let u = Point::polar(phi);
    u * (x / u.x.abs().max(u.y.abs()))
}

/// Does the cone (apex, rays) meet the open square of half-width `h`?
fn cone_meets_box(apex: Point, ul: Point, ur: Point, h: f64) -> bool {
    let mut poly = vec![
        Point::new(-h, -h),
        Point::new(h, -h),
        Point::new(h, h),
        Point::new(-h, h),
    ];
    // Inside: cross(ul, p − a) ≤ 0 and cross(ur, p − a) ≥ 0.
    for (u, sign) in [(ul, -1.0), (ur, 1.0)] {
        let f = |p: Point| sign * u.cross(p - apex);
        let mut next = Vec::new();
        for j in 0..poly.len() {
            let (a, b) = (poly[j], poly[(j + 1) % poly.len()]);
            let (fa, fb) = (f(a), f(b));
            if fa >= 0.0 {
                next.push(a);
            }
            if (fa >= 0.0) != (fb >= 0.0) {
                next.push(a + (b - a) * (fa / (fa - fb)));
            }
        }
        poly = next;
        if poly.len() < 3 {
            return false;
        }
    }
    crate::hull::polygon_area(&poly) > 1e-12 * h * h
}

struct Classes {
    /// (axis, member tunnels (k, l)) per tilted class in the upper half.
    classes: Vec<(f64, Vec<(usize, usize)>)>,
}

fn tilted_classes(i: usize, theta: f64) -> Classes {
    let mut classes = Vec::new();
    for h in 1..2 * i {
        let (phi, _) = deepest_cone(i, 1, 1 + h, theta);
        classes.push((phi, (1..=2 * i - h).map(|j| (j, j + h)).collect()));
        classes.push((PI - phi, (1..=2 * i - h).map(|j| (j + h, j)).collect()));
    }
    Classes { classes }
}

/// Which B_x condition fails, if any.
fn check_bx(i: usize, theta: f64, cls: &Classes, x: f64) -> Option<String> {
    let half = 0.5 * theta;
    let wanted: Vec<(Point, f64)> = (1..=2 * i)
        .map(|k| (Point::new(a_cell(i, k) + 0.5, 0.0), FRAC_PI_2))
        .collect();
    let mut blockers = Vec::new();
    for (phi, members) in &cls.classes {
        let b = blocker_at(*phi, x);
        // Condition 1: outside every wanted cone (of all four halves).
        for (apex, axis) in &wanted {
            for (a, ax) in [
                (*apex, *axis),
                (Point::new(apex.x, -apex.y), -axis),
                (Point::new(apex.y, apex.x), 0.0),
                (Point::new(-apex.y, apex.x), PI),
            ] {
                if in_cone(b, a, ax, half) >= -1e-12 {
                    return Some(format!("blocker {b:?} touches a wanted cone"));
                }
            }
        }
        // Condition 2: inside every deepest cone of its class.
        for &(k, l) in members {
            let (left, right) = tunnel_guards(i, k, l);
            let apex = deepest_for_axis(*phi, theta, &left, &right);
            if in_cone(b, apex, *phi, half) <= 1e-12 {
                return Some(format!(
                    "blocker {b:?} outside the deepest cone of tunnel ({k}, {l})"
                ));
            }
        }
        blockers.push(b);
    }
    // Exclusion: no empty cone through an unwanted tunnel meets B_i.
    let all: Vec<Point> = blockers.iter().flat_map(|b| halves(*b)).collect();
    let fi = i as f64;
    for k in 1..=2 * i {
        for l in 1..=2 * i {
            if k == l {
                continue;
            }
            let (left, right) = tunnel_guards(i, k, l);
            let (lo, hi) = axis_range(theta, &left, &right);
            let n = 400;
            for j in 0..=n {
                let phi = lo + (hi - lo) * j as f64 / n as f64;
                if let Some(a) = deepest_unblocked(phi, theta, &left, &right, &all, fi) {
                    return Some(format!(
                        "unwanted tunnel ({k}, {l}) reaches B_i with apex {a:?}"
                    ));
                }
            }
        }
    }
    None
}

/// Apex of an empty cone with axis `phi` through the tunnel that meets the
/// open box of half-width `h`, if any. Candidates are the corners of the
/// feasible apex set in ray coordinates.
fn deepest_unblocked(
    phi: f64,
    theta: f64,
    left: &[Point],
    right: &[Point],
    blockers: &[Point],
    h: f64,
) -> Option<Point> {
    let (ul, ur) = rays(phi, theta);
    let s0 = left
        .iter()
        .map(|g| ul.cross(*g))
        .fold(f64::INFINITY, f64::min);
    let t0 = right
        .iter()
        .map(|g| ur.cross(*g))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut bs: Vec<(f64, f64)> = blockers
        .iter()
        .map(|b| (ul.cross(*b), ur.cross(*b)))
        .collect();
    bs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // A blocker is inside the cone at (s, t) iff s > sb and t < tb.
    let mut cands: Vec<f64> = bs.iter().map(|b| b.0).filter(|&s| s < s0).collect();
    cands.push(s0);
    for s in cands {
        let t = bs
            .iter()
            .filter(|b| b.0 < s)
            .map(|b| b.1)
            .fold(t0, f64::max);
        let a = apex_from(ul, ur, s, t);
        if cone_meets_box(a, ul, ur, h) {
            return Some(a);
        }
    }
    None
}

pub fn generate(i: usize) -> Result<LowerBoundInstance> {
    generate_with_cap(i, BX_CAP * i as f64)
}

/// As [`generate`], failing once B_x would exceed half-width `cap`.
pub fn generate_with_cap(i: usize, cap: f64) -> Result<LowerBoundInstance> {
    if i == 0 {
        return Err(Error::InvalidParameter("i must be at least 1".into()));
    }
    let theta = theta_i(i);
    let first = first_step(i);
    let cls = tilted_classes(i, theta);
    let fi = i as f64;
    let mut x = 8.0 * fi;
    while let Some(why) = check_bx(i, theta, &cls, x) {
        if 2.0 * x > cap {
            return Err(Error::Verification(format!(
                "no B_x up to half-width {cap}: {why}"
            )));
        }
        x *= 2.0;
    }
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut blockers = Vec::new();
    for (phi, _) in &cls.classes {
        for q in halves(blocker_at(*phi, x)) {
            if seen.insert((q.x.to_bits(), q.y.to_bits())) {
                blockers.push(q);
            }
        }
    }
    let mut guards = first.clone();
    guards.extend(blockers.iter().copied());
    Ok(LowerBoundInstance {
        i,
        theta,
        guards,
        boxes: Boxes {
            b_i: fi,
            b_2i: 2.0 * fi,
            b_4i: 4.0 * fi,
            b_x: x,
        },
        expected_components: (2 * i + 1) * (2 * i + 1),
        first_step_guards: first.len(),
        blockers,
        slopes: cls.classes.iter().map(|c| c.0).collect(),
    })
}

impl LowerBoundInstance {
    pub fn guard_set(&self) -> Result<GuardSet> {
        GuardSet::new(self.guards.iter().copied())
    }

    pub fn box_i(&self) -> BBox {
        let h = self.boxes.b_i;
        BBox::new(Point::new(-h, -h), Point::new(h, h))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Raster cells per unit length: odd (so cell centres fall on the tunnel
/// axes at half-integers) and at least 40(2i+1) cells across B_i.
pub fn raster_cells_per_unit(i: usize) -> usize {
    let need = (20 * (2 * i + 1)).div_ceil(i);
    need | 1
}

/// Number of Θ-region components inside B_i.
pub fn verify_fragmentation(inst: &LowerBoundInstance, method: VerifyMethod) -> Result<usize> {
    let gs = inst.guard_set()?;
    match method {
        VerifyMethod::Raster => {
            let m = raster_cells_per_unit(inst.i);
            let cells = 2 * inst.i * m;
            let r = rasterize(&gs, inst.theta, inst.box_i(), cells, cells)?;
            Ok(r.guarded_components())
        }
        VerifyMethod::Arrangement => {
            let opts = RegionOptions {
                window: Some(inst.box_i()),
                classify: ClassifyBackend::Batch,
                ..RegionOptions::default()
            };
            Ok(region_theta_lt_pi(&gs, inst.theta, &opts)?.components.len())
        }
    }
}

/// Runs both methods and reports a mismatch as an error.
pub fn verify_fragmentation_both(inst: &LowerBoundInstance) -> Result<usize> {
    let a = verify_fragmentation(inst, VerifyMethod::Raster)?;
    let b = verify_fragmentation(inst, VerifyMethod::Arrangement)?;
    if a != b {
        return Err(Error::Verification(format!(
            "raster counts {a} components, arrangement {b}"
        )));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{is_theta_guarded, maximal_empty_cones};

    #[test]
    fn counts_for_small_i() {
        for i in 1..=10 {
            assert_eq!(first_step(i).len(), 80 * i + 4, "i = {i}");
        }
    }

    #[test]
    fn wanted_deepest_cone_is_the_pattern_cone() {
        let th = theta_i(2);
        let (phi, apex) = deepest_cone(2, 3, 3, th);
        assert!((phi - FRAC_PI_2).abs() < 1e-7, "{phi}");
        assert!(
            apex.dist(Point::new(a_cell(2, 3) + 0.5, 0.0)) < 1e-7,
            "{apex:?}"
        );
    }

    fn is_symmetric(pts: &[Point]) -> bool {
        let set: BTreeSet<(u64, u64)> = pts
            .iter()
            .map(|p| ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits()))
            .collect();
        pts.iter().all(|p| {
            set.contains(&((-p.x + 0.0).to_bits(), p.y.to_bits()))
                && set.contains(&(p.x.to_bits(), (-p.y + 0.0).to_bits()))
        })
    }

    #[test]
    fn instance_sizes_and_symmetry() {
        for i in 1..=10 {
            let inst = generate(i).unwrap();
            assert_eq!(inst.first_step_guards, 80 * i + 4);
            assert_eq!(inst.blockers.len(), 16 * i - 8);
            assert_eq!(inst.guards.len(), 96 * i - 4);
            assert_eq!(inst.guard_set().unwrap().len(), 96 * i - 4);
            assert_eq!(inst.expected_components, (2 * i + 1) * (2 * i + 1));
            assert!(is_symmetric(&inst.guards), "i = {i}");
            assert_eq!(inst.theta, theta_i(i));
        }
        assert!(generate(0).is_err());
    }

    #[test]
    fn pattern_a_guards_lie_on_the_cone() {
        for i in 1..=4 {
            let th = theta_i(i);
            for k in 1..=2 * i {
                let apex = Point::new(a_cell(i, k) + 0.5, 0.0);
                let (left, right) = tunnel_guards(i, k, k);
                for g in left.iter().chain(right.iter()) {
                    assert!(in_cone(*g, apex, FRAC_PI_2, 0.5 * th).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn deepest_slopes_do_not_depend_on_the_cell() {
        let i = 3;
        let th = theta_i(i);
        for h in 1..2 * i {
            let (phi, a1) = deepest_cone(i, 1, 1 + h, th);
            for j in 2..=2 * i - h {
                let (pj, aj) = deepest_cone(i, j, j + h, th);
                assert!((pj - phi).abs() < 1e-7, "h {h} j {j}: {pj} vs {phi}");
                assert!((aj.y - a1.y).abs() < 1e-7);
            }
            let (pd, _) = deepest_cone(i, 1 + h, 1, th);
            assert!((pd - (PI - phi)).abs() < 1e-7);
        }
    }

    #[test]
    fn blockers_satisfy_both_conditions() {
        for i in 1..=3 {
            let inst = generate(i).unwrap();
            let th = inst.theta;
            let cls = tilted_classes(i, th);
            for (phi, members) in &cls.classes {
                let b = blocker_at(*phi, inst.boxes.b_x);
                assert!(inst.blockers.contains(&b));
                for &(k, l) in members {
                    let (left, right) = tunnel_guards(i, k, l);
                    let apex = deepest_for_axis(*phi, th, &left, &right);
                    assert!(in_cone(b, apex, *phi, 0.5 * th) > 0.0);
                }
                for k in 1..=2 * i {
                    for q in halves(b) {
                        let apex = Point::new(a_cell(i, k) + 0.5, 0.0);
                        assert!(in_cone(q, apex, FRAC_PI_2, 0.5 * th) < 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn tiny_cap_reports_the_failed_condition() {
        let err = generate_with_cap(2, 1.0).unwrap_err().to_string();
        assert!(err.contains("no B_x"), "{err}");
    }

    #[test]
    fn wanted_tunnels_reach_the_axis() {
        let i = 2;
        let inst = generate(i).unwrap();
        let gs = inst.guard_set().unwrap();
        for k in 1..=2 * i {
            let x = a_cell(i, k);
            for s in 1..=40 {
                let y = i as f64 * s as f64 / 40.0;
                // The axis of the tunnel is unguarded all the way down, its
                // cell walls are guarded away from the horizontal tunnels.
                assert!(
                    !is_theta_guarded(Point::new(x + 0.5, y), &gs, inst.theta),
                    "axis at {y}"
                );
                if (y - y.floor() - 0.5).abs() > 0.2 {
                    assert!(
                        is_theta_guarded(Point::new(x + 0.02, y), &gs, inst.theta),
                        "wall at ({x}, {y})"
                    );
                    assert!(
                        is_theta_guarded(Point::new(x + 0.98, y), &gs, inst.theta),
                        "wall at ({}, {y})",
                        x + 1.0
                    );
                }
            }
        }
    }

    #[test]
    fn pattern_b_blocks_entry_from_above() {
        // No empty Θ-cone below y = 2i crosses the top edge of its pattern-B
        // cell with both rays.
        for i in 1..=3 {
            let inst = generate(i).unwrap();
            let gs = inst.guard_set().unwrap();
            let fi = i as f64;
            for xs in 0..(3 * i * 16) {
                let x = fi + (xs as f64 + 0.5) / 16.0;
                let cell = x.floor();
                for ys in 0..=32 {
                    let y = -2.0 * fi + 4.0 * fi * ys as f64 / 32.0 - 1e-9;
                    for (p, lo, hi) in [
                        (
                            Point::new(x, y),
                            Point::new(cell + 1.0, 4.0 * fi),
                            Point::new(cell, 4.0 * fi),
                        ),
                        (
                            Point::new(-x, y),
                            Point::new(-cell, 4.0 * fi),
                            Point::new(-cell - 1.0, 4.0 * fi),
                        ),
                    ] {
                        let (a, b) = ((lo - p).angle(), (hi - p).angle());
                        for c in maximal_empty_cones(p, &gs, inst.theta) {
                            let s = c.start.max(a);
                            let e = (c.start + c.extent).min(b);
                            assert!(
                                e - s < inst.theta,
                                "cone through the top of cell {cell} from {p:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fragmentation_counts() {
        for i in 1..=2 {
            let inst = generate(i).unwrap();
            let n = verify_fragmentation_both(&inst).unwrap();
            assert_eq!(n, inst.expected_components);
        }
    }

    #[test]
    fn removing_a_tunnel_cell_changes_the_count() {
        let mut inst = generate(1).unwrap();
        let x = a_cell(1, 1);
        let (left, right) = tunnel_guards(1, 1, 1);
        let drop: Vec<Point> = left.iter().chain(right.iter()).copied().collect();
        inst.guards.retain(|g| !drop.contains(g));
        assert!(x < 0.0);
        let n = verify_fragmentation(&inst, VerifyMethod::Raster).unwrap();
        assert!(n < inst.expected_components, "count {n}");
    }

    #[test]
    fn json_round_trip() {
        let inst = generate(1).unwrap();
        let back = LowerBoundInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
    }
}
