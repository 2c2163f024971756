//! Ground-truth guardedness.
//!
//! `f(p)` is the largest circular gap between the directions from `p` to
//! the guards; `p` is Θ-guarded iff `f(p) < Θ` (cones are open).

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ccw_delta, orient, BBox, Point, REL_EPS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardSet {
    guards: Vec<Point>,
    bbox: BBox,
}

impl GuardSet {
    /// Drops exact duplicates (first occurrence wins) and rejects
    /// non-finite coordinates.
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut guards: Vec<Point> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for p in points {
            if !p.is_finite() {
                return Err(Error::NonFinite(p));
            }
            // -0.0 and 0.0 are the same coordinate.
            let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
            if seen.insert(key) {
                guards.push(p);
            }
        }
        let bbox = BBox::of_points(&guards);
        Ok(GuardSet { guards, bbox })
    }

    pub fn guards(&self) -> &[Point] {
        &self.guards
    }

    pub fn len(&self) -> usize {
        self.guards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guards.is_empty()
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    /// Absolute tolerance derived from the bounding-box diameter.
    pub fn eps(&self) -> f64 {
        REL_EPS * self.bbox.diameter().max(1e-300)
    }

    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.guards.iter().position(|&g| g == p)
    }

    pub fn without(&self, idx: usize) -> GuardSet {
        let mut g = self.guards.clone();
        g.remove(idx);
        GuardSet::new(g).expect("subset of a valid set")
    }
}

/// An empty open cone: apex, clockwise bounding direction `start`, angular
/// `extent`, and the guards on its counterclockwise (`g_min`) and clockwise
/// (`g_max`) bounding rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeWitness {
    pub apex: Point,
    pub start: f64,
    pub extent: f64,
    pub g_min: Option<Point>,
    pub g_max: Option<Point>,
}

impl ConeWitness {
    /// Direct membership test: true when no guard lies strictly inside the
    /// open cone.
    pub fn is_empty_for(&self, guards: &[Point], tol: f64) -> bool {
        guards.iter().all(|&g| {
            if g == self.apex {
                return true;
            }
            let d = ccw_delta(self.start, (g - self.apex).angle());
            let r = g.dist(self.apex);
            // Angular slack scaled so that guards on the rays count as outside.
            let slack = (tol / r).clamp(1e-12, 1e-9);
            !(d > slack && d < self.extent - slack)
        })
    }
}

/// Guards sharing one exact direction from an apex, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGroup {
    pub angle: f64,
    pub members: Vec<usize>,
}

/// Directions from `apex` to every guard except those coinciding with it,
/// sorted by angle and grouped by exact collinearity.
pub fn direction_groups(apex: Point, guards: &[Point]) -> Vec<DirectionGroup> {
    let mut dirs: Vec<(f64, usize)> = guards
        .iter()
        .enumerate()
        .filter(|(_, &g)| g != apex)
        .map(|(i, &g)| ((g - apex).angle(), i))
        .collect();
    dirs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut groups: Vec<DirectionGroup> = Vec::new();
    for (ang, i) in dirs {
        if let Some(last) = groups.last_mut() {
            let j = last.members[0];
            let (gi, gj) = (guards[i], guards[j]);
            if orient(apex, gj, gi) == 0.0 && (gi - apex).dot(gj - apex) > 0.0 {
                last.members.push(i);
                continue;
            }
        }
        groups.push(DirectionGroup {
            angle: ang,
            members: vec![i],
        });
    }
    // The first and last groups can be the same direction across the seam.
    if groups.len() > 1 {
        let (f, l) = (groups[0].members[0], groups[groups.len() - 1].members[0]);
        let (gf, gl) = (guards[f], guards[l]);
        if orient(apex, gf, gl) == 0.0 && (gf - apex).dot(gl - apex) > 0.0 {
            let last = groups.pop().unwrap();
            groups[0].members.extend(last.members);
        }
    }
    for g in &mut groups {
        g.members
            .sort_by(|&a, &b| guards[a].dist(apex).total_cmp(&guards[b].dist(apex)));
    }
    groups
}

/// One circular gap between consecutive direction groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    /// Index of the clockwise bounding group.
    pub from: usize,
    /// Index of the counterclockwise bounding group.
    pub to: usize,
    pub start: f64,
    pub extent: f64,
}

pub fn gaps(groups: &[DirectionGroup]) -> Vec<Gap> {
    let k = groups.len();
    match k {
        0 => vec![],
        1 => vec![Gap {
            from: 0,
            to: 0,
            start: groups[0].angle,
            extent: TAU,
        }],
        _ => (0..k)
            .map(|i| {
                let j = (i + 1) % k;
                Gap {
                    from: i,
                    to: j,
                    start: groups[i].angle,
                    extent: ccw_delta(groups[i].angle, groups[j].angle),
                }
            })
            .collect(),
    }
}

/// `f(p)` together with a widest empty cone.
pub fn max_empty_cone(p: Point, gs: &GuardSet) -> ConeWitness {
    let guards = gs.guards();
    let groups = direction_groups(p, guards);
    if groups.is_empty() {
        return ConeWitness {
            apex: p,
            start: 0.0,
            extent: TAU,
            g_min: None,
            g_max: None,
        };
    }
    let best = gaps(&groups)
        .into_iter()
        .max_by(|a, b| a.extent.total_cmp(&b.extent))
        .expect("non-empty");
    ConeWitness {
        apex: p,
        start: best.start,
        extent: best.extent,
        g_min: Some(guards[groups[best.to].members[0]]),
        g_max: Some(guards[groups[best.from].members[0]]),
    }
}

pub fn max_empty_cone_angle(p: Point, gs: &GuardSet) -> f64 {
    max_empty_cone(p, gs).extent
}

pub fn is_theta_guarded(p: Point, gs: &GuardSet, theta: f64) -> bool {
    max_empty_cone_angle(p, gs) < theta
}

/// All locally maximal empty cones at guard `g` of extent at least `theta`.
pub fn maximal_empty_cones(g: Point, gs: &GuardSet, theta: f64) -> Vec<ConeWitness> {
    let guards = gs.guards();
    let groups = direction_groups(g, guards);
    gaps(&groups)
        .into_iter()
        .filter(|gap| gap.extent >= theta)
        .map(|gap| ConeWitness {
            apex: g,
            start: gap.start,
            extent: gap.extent,
            g_min: Some(guards[groups[gap.to].members[0]]),
            g_max: Some(guards[groups[gap.from].members[0]]),
        })
        .collect()
}

/// Reference path for [`batch_unguarded`]: one direction sort per point.
pub fn batch_unguarded_naive(
    points: &[Point],
    gs: &GuardSet,
    theta: f64,
) -> Vec<(usize, ConeWitness)> {
    points
        .par_iter()
        .enumerate()
        .filter_map(|(i, &p)| {
            let w = max_empty_cone(p, gs);
            (w.extent >= theta).then_some((i, w))
        })
        .collect()
}

/// Θ-unguarded points of `points`, each with a maximal empty cone.
///
/// Rotational sweep: for `k = ⌈2π/Θ⌉ + 1` directions `ψ` (spacing below Θ,
/// so every gap of extent ≥ Θ strictly contains one), all points are swept
/// across the line orthogonal to `ψ` while an upper hull of the guards
/// already passed is maintained. The tangent from a query point to that
/// hull is the guard whose direction lies clockwise-closest to `ψ`; a
/// second sweep in the opposite order gives the counterclockwise-closest
/// one. Together they bound the gap containing `ψ`.
pub fn batch_unguarded(
    points: &[Point],
    gs: &GuardSet,
    theta: f64,
) -> Result<Vec<(usize, ConeWitness)>> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::WrongRegime {
            theta,
            expected: "(0, π)",
        });
    }
    let guards = gs.guards();
    if guards.is_empty() {
        return Ok(points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, max_empty_cone(p, gs)))
            .collect());
    }
    let k = (TAU / theta).ceil() as usize + 1;
    let step = TAU / k as f64;
    // An irrational phase keeps sweep directions off lattice directions.
    let phase = 0.381_966_011_250_105_1 * step;

    let per_dir: Vec<Vec<Option<Sighting>>> = (0..k)
        .into_par_iter()
        .map(|m| sweep_direction(points, guards, phase + m as f64 * step, theta))
        .collect();

    let mut out = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let hit = per_dir.iter().find_map(|v| v[i]);
        match hit {
            None => {}
            Some(Sighting::HalfPlane) => out.push((i, max_empty_cone(p, gs))),
            Some(Sighting::Gap { cw, ccw }) => {
                let (a, b) = (guards[cw], guards[ccw]);
                let start = (a - p).angle();
                out.push((
                    i,
                    ConeWitness {
                        apex: p,
                        start,
                        extent: ccw_delta(start, (b - p).angle()),
                        g_min: Some(b),
                        g_max: Some(a),
                    },
                ));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
enum Sighting {
    /// An open half-plane of directions is free of guards.
    HalfPlane,
    Gap {
        cw: usize,
        ccw: usize,
    },
}

fn sweep_direction(
    points: &[Point],
    guards: &[Point],
    psi: f64,
    theta: f64,
) -> Vec<Option<Sighting>> {
    let u = Point::polar(psi);
    let nrm = u.perp();
    // Guards on the query's own line, ahead of it along ψ, block the gap.
    let mut line_max: HashMap<u64, f64> = HashMap::new();
    for g in guards {
        let s = g.dot(nrm) + 0.0;
        let t = g.dot(u);
        line_max
            .entry(s.to_bits())
            .and_modify(|m| *m = m.max(t))
            .or_insert(t);
    }
    // Guards strictly right of the line through p along ψ have smaller s.
    let behind = tangents(points, guards, u, nrm, 1.0);
    let ahead = tangents(points, guards, u, nrm, -1.0);
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let s = p.dot(nrm) + 0.0;
            if let Some(&tmax) = line_max.get(&s.to_bits()) {
                if tmax > p.dot(u) {
                    return None;
                }
            }
            match (behind[i], ahead[i]) {
                (Some(a), Some(b)) => {
                    let da = (guards[a] - *p).angle();
                    let db = (guards[b] - *p).angle();
                    (ccw_delta(da, db) >= theta).then_some(Sighting::Gap { cw: a, ccw: b })
                }
                _ => Some(Sighting::HalfPlane),
            }
        })
        .collect()
}

/// For each query, the guard among those with strictly smaller sweep key
/// (`sign * dot(q, nrm)`) whose direction from the query is closest to `u`.
fn tangents(
    points: &[Point],
    guards: &[Point],
    u: Point,
    nrm: Point,
    sign: f64,
) -> Vec<Option<usize>> {
    // (x, y, is_query, index); at equal x queries come first so that only
    // strictly smaller keys are on the hull when they are answered.
    let mut events: Vec<(f64, f64, bool, usize)> = Vec::with_capacity(points.len() + guards.len());
    for (i, g) in guards.iter().enumerate() {
        events.push((sign * g.dot(nrm), g.dot(u), false, i));
    }
    for (i, p) in points.iter().enumerate() {
        events.push((sign * p.dot(nrm), p.dot(u), true, i));
    }
    events.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| b.2.cmp(&a.2))
            .then_with(|| a.1.total_cmp(&b.1))
    });
    let mut hull: Vec<(f64, f64, usize)> = Vec::new();
    let mut out = vec![None; points.len()];
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    for &(x, y, is_query, idx) in &events {
        if is_query {
            if hull.is_empty() {
                continue;
            }
            // Elevation of hull vertex j as seen from the query, looking back.
            let elev = |j: usize| {
                let (hx, hy, _) = hull[j];
                (hy - y).atan2(x - hx)
            };
            let (mut lo, mut hi) = (0usize, hull.len() - 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if elev(mid + 1) > elev(mid) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            out[idx] = Some(hull[lo].2);
        } else {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if cross((a.0, a.1), (b.0, b.1), (x, y)) >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, y, idx));
        }
    }
    out
}

/// Grid evaluation of `f` at cell centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub bbox: BBox,
    pub cols: usize,
    pub rows: usize,
    pub theta: f64,
    /// Row-major from the bottom row (`min.y`) upwards.
    pub f: Vec<f64>,
    pub guarded: Vec<bool>,
}

impl Raster {
    pub fn cell_center(bbox: &BBox, cols: usize, rows: usize, c: usize, r: usize) -> Point {
        Point::new(
            bbox.min.x + (c as f64 + 0.5) * bbox.width() / cols as f64,
            bbox.min.y + (r as f64 + 0.5) * bbox.height() / rows as f64,
        )
    }

    pub fn center(&self, c: usize, r: usize) -> Point {
        Raster::cell_center(&self.bbox, self.cols, self.rows, c, r)
    }

    pub fn cell_diagonal(&self) -> f64 {
        (self.bbox.width() / self.cols as f64).hypot(self.bbox.height() / self.rows as f64)
    }

    pub fn guarded_count(&self) -> usize {
        self.guarded.iter().filter(|&&g| g).count()
    }

    /// Connected components of guarded cells (4-neighbourhood).
    pub fn guarded_components(&self) -> usize {
        let mut seen = vec![false; self.guarded.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.guarded.len() {
            if !self.guarded[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (c, r) = (i % self.cols, i / self.cols);
                let mut push = |j: usize| {
                    if self.guarded[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                };
                if c > 0 {
                    push(i - 1);
                }
                if c + 1 < self.cols {
                    push(i + 1);
                }
                if r > 0 {
                    push(i - self.cols);
                }
                if r + 1 < self.rows {
                    push(i + self.cols);
                }
            }
        }
        count
    }

    /// ASCII PGM (P2), top row first; gray level = f / 2π scaled to 0..255.
    pub fn to_pgm(&self) -> String {
        let mut s = format!("P2\n{} {}\n255\n", self.cols, self.rows);
        for r in (0..self.rows).rev() {
            let line: Vec<String> = (0..self.cols)
                .map(|c| gray(self.f[r * self.cols + c]).to_string())
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// ASCII PGM (P2) of the guarded mask: guarded cells white.
    pub fn mask_pgm(&self) -> String {
        let mut s = format!("P2\n{} {}\n255\n", self.cols, self.rows);
        for r in (0..self.rows).rev() {
            let line: Vec<&str> = (0..self.cols)
                .map(|c| {
                    if self.guarded[r * self.cols + c] {
                        "255"
                    } else {
                        "0"
                    }
                })
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Heat map of `f` with guarded cells outlined in a separate layer.
    pub fn to_svg(&self) -> String {
        let px = (400 / self.cols.max(self.rows)).max(1);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\" shape-rendering=\"crispEdges\">\n",
            self.cols,
            self.rows,
            self.cols * px,
            self.rows * px
        );
        for r in 0..self.rows {
            let y = self.rows - 1 - r;
            let mut c = 0;
            while c < self.cols {
                let g = gray(self.f[r * self.cols + c]);
                let mut e = c + 1;
                while e < self.cols && gray(self.f[r * self.cols + e]) == g {
                    e += 1;
                }
                s.push_str(&format!(
                    "<rect x=\"{c}\" y=\"{y}\" width=\"{}\" height=\"1\" fill=\"rgb({g},{g},{g})\"/>\n",
                    e - c
                ));
                c = e;
            }
        }
        s.push_str("<g fill=\"#d62728\" fill-opacity=\"0.45\">\n");
        for r in 0..self.rows {
            let y = self.rows - 1 - r;
            let mut c = 0;
            while c < self.cols {
                if !self.guarded[r * self.cols + c] {
                    c += 1;
                    continue;
                }
                let mut e = c + 1;
                while e < self.cols && self.guarded[r * self.cols + e] {
                    e += 1;
                }
                s.push_str(&format!(
                    "<rect x=\"{c}\" y=\"{y}\" width=\"{}\" height=\"1\"/>\n",
                    e - c
                ));
                c = e;
            }
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn gray(f: f64) -> u8 {
    (255.0 * (f / TAU).clamp(0.0, 1.0)).round() as u8
}

pub fn rasterize(
    gs: &GuardSet,
    theta: f64,
    bbox: BBox,
    cols: usize,
    rows: usize,
) -> Result<Raster> {
    if cols < 2 || rows < 2 {
        return Err(Error::InvalidParameter(format!(
            "resolution {cols}x{rows} below 2x2"
        )));
    }
    let f: Vec<f64> = (0..cols * rows)
        .into_par_iter()
        .map(|i| {
            max_empty_cone_angle(
                Raster::cell_center(&bbox, cols, rows, i % cols, i / cols),
                gs,
            )
        })
        .collect();
    let guarded = f.iter().map(|&v| v < theta).collect();
    Ok(Raster {
        bbox,
        cols,
        rows,
        theta,
        f,
        guarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square() -> GuardSet {
        GuardSet::new([p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn f_examples() {
        let one = GuardSet::new([p(1.0, 0.0)]).unwrap();
        assert_eq!(max_empty_cone_angle(p(0.0, 0.0), &one), TAU);
        let tri =
            GuardSet::new([90.0f64, 210.0, 330.0].map(|d| Point::polar(d.to_radians()))).unwrap();
        assert!((max_empty_cone_angle(p(0.0, 0.0), &tri) - TAU / 3.0).abs() < 1e-12);
        let three = GuardSet::new([p(1.0, 0.0), p(0.0, 1.0), p(-1.0, 0.0)]).unwrap();
        let w = max_empty_cone(p(0.0, 0.0), &three);
        assert!((w.extent - PI).abs() < 1e-12);
        assert_eq!(w.g_max, Some(p(-1.0, 0.0)));
        assert_eq!(w.g_min, Some(p(1.0, 0.0)));
        assert_eq!(
            max_empty_cone_angle(p(0.0, 0.0), &GuardSet::new([]).unwrap()),
            TAU
        );
    }

    #[test]
    fn duplicates_removed() {
        let g = GuardSet::new([p(1.0, 1.0), p(1.0, 1.0), p(0.0, 0.0), p(-0.0, 0.0)]).unwrap();
        assert_eq!(g.len(), 2);
        assert!(GuardSet::new([p(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn square_center_open_boundary() {
        let g = square();
        let c = p(0.5, 0.5);
        assert!(!is_theta_guarded(c, &g, FRAC_PI_2));
        assert!(is_theta_guarded(c, &g, FRAC_PI_2 + 0.01));
    }

    #[test]
    fn query_at_guard_ignores_itself() {
        let g = square();
        let w = max_empty_cone(p(0.0, 0.0), &g);
        assert!((w.extent - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn corner_maximal_cone() {
        let g = square();
        let cones = maximal_empty_cones(p(0.0, 0.0), &g, FRAC_PI_2);
        assert_eq!(cones.len(), 1);
        assert!((cones[0].extent - 1.5 * PI).abs() < 1e-12);
        assert_eq!(cones[0].g_max, Some(p(0.0, 1.0)));
        assert_eq!(cones[0].g_min, Some(p(1.0, 0.0)));
        let surrounded = GuardSet::new(
            (0..12)
                .map(|k| Point::polar(k as f64 * TAU / 12.0))
                .chain([p(0.0, 0.0)]),
        )
        .unwrap();
        assert!(maximal_empty_cones(p(0.0, 0.0), &surrounded, 1.0).is_empty());
    }

    #[test]
    fn maximal_cone_count_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let pts: Vec<Point> = (0..30).map(|_| p(rng.gen(), rng.gen())).collect();
            let g = GuardSet::new(pts.clone()).unwrap();
            let theta = rng.gen_range(0.05..3.0);
            for &q in &pts {
                let n = maximal_empty_cones(q, &g, theta).len();
                assert!(n <= (TAU / theta).floor() as usize);
            }
        }
    }

    #[test]
    fn collinear_groups_merge_across_seam() {
        let guards = [p(1.0, 0.0), p(2.0, 0.0), p(0.0, 1.0), p(1.0, -1e-300)];
        let groups = direction_groups(p(0.0, 0.0), &guards);
        assert_eq!(groups[0].members, vec![0, 1]);
    }

    #[test]
    fn batch_examples() {
        let g = square();
        let corners = g.guards().to_vec();
        let b = batch_unguarded(&corners, &g, PI / 3.0).unwrap();
        assert_eq!(b.len(), 4);
        let c = batch_unguarded(&[p(0.5, 0.5)], &g, PI / 3.0).unwrap();
        let naive = batch_unguarded_naive(&[p(0.5, 0.5)], &g, PI / 3.0);
        assert_eq!(c.len(), naive.len());
        assert_eq!(c.len(), 1);
        let line = GuardSet::new((0..5).map(|i| p(i as f64, 0.5 * i as f64))).unwrap();
        let probes: Vec<Point> = (0..50)
            .map(|i| p(i as f64 * 0.1, (i as f64 * 0.7).sin()))
            .collect();
        assert_eq!(
            batch_unguarded(&probes, &line, 3.0).unwrap().len(),
            probes.len()
        );
        assert!(batch_unguarded(&probes, &line, PI).is_err());
    }

    #[test]
    fn batch_matches_naive_with_valid_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(3..80);
            let g = GuardSet::new((0..n).map(|_| p(rng.gen(), rng.gen()))).unwrap();
            let probes: Vec<Point> = (0..200)
                .map(|_| p(rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2)))
                .chain(g.guards().iter().copied())
                .collect();
            let theta = rng.gen_range(0.05..3.1);
            let fast = batch_unguarded(&probes, &g, theta).unwrap();
            let slow = batch_unguarded_naive(&probes, &g, theta);
            let a: Vec<usize> = fast.iter().map(|x| x.0).collect();
            let b: Vec<usize> = slow.iter().map(|x| x.0).collect();
            assert_eq!(a, b);
            for (_, w) in fast {
                assert!(w.extent >= theta);
                assert!(w.is_empty_for(g.guards(), g.eps()));
            }
        }
    }

    #[test]
    fn raster_examples() {
        let line = GuardSet::new([p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]).unwrap();
        let r = rasterize(
            &line,
            FRAC_PI_2,
            BBox::new(p(-1.0, -1.0), p(3.0, 1.0)),
            20,
            10,
        )
        .unwrap();
        assert_eq!(r.guarded_count(), 0);
        let sq = square();
        let bb = BBox::new(p(0.0, 0.0), p(1.0, 1.0));
        let lo = rasterize(&sq, 0.9 * FRAC_PI_2, bb, 3, 3).unwrap();
        assert!(!lo.guarded[4]);
        let hi = rasterize(&sq, 1.1 * FRAC_PI_2, bb, 3, 3).unwrap();
        assert!(hi.guarded[4]);
        assert_eq!(lo.f.len(), 9);
        assert!(rasterize(&sq, 1.0, bb, 1, 5).is_err());
        assert!(hi.to_pgm().starts_with("P2\n3 3\n255\n"));
    }
}
