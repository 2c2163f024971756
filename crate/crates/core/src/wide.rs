//! The region for Θ ≥ π.
//!
//! For Θ = π it is the convex hull. For Θ > π a point outside the hull is
//! guarded iff it sees the hull under an angle greater than α = 2π − Θ, so
//! the boundary is traced by a point that keeps seeing the hull under
//! exactly α: it follows the inscribed-angle arc over the current pair of
//! tangent vertices and switches pairs where it crosses a hull edge line.

use std::f64::consts::{PI, TAU};

use crate::arc::{inscribed_arc, CircularArc};
use crate::error::{Error, Result};
use crate::geom::{angle_at, Point, Side};
use crate::hull::convex_hull;
use crate::oracle::{max_empty_cone_angle, GuardSet};
use crate::region::{polygon_region, Component, Edge, Region};

const PARAM_TOL: f64 = 1e-10;

pub fn region_theta_ge_pi(gs: &GuardSet, theta: f64) -> Result<Region> {
    if gs.len() < 2 {
        return Err(Error::TooFewGuards {
            needed: 2,
            got: gs.len(),
        });
    }
    if !(PI..TAU).contains(&theta) {
        return Err(Error::WrongRegime {
            theta,
            expected: "[π, 2π)",
        });
    }
    let hull = convex_hull(gs.guards())?;
    if theta == PI {
        return Ok(polygon_region(theta, &hull.vertices));
    }
    let alpha = TAU - theta;
    let v = &hull.vertices;
    let boundary = if v.len() == 2 {
        vec![
            Edge::Arc(inscribed_arc(v[1], v[0], alpha, Side::Left)?),
            Edge::Arc(inscribed_arc(v[0], v[1], alpha, Side::Left)?),
        ]
    } else {
        trace(v, alpha, gs)?
    };
    Ok(Region {
        theta,
        whole_plane: false,
        components: vec![Component {
            boundary,
            holes: vec![],
        }],
    })
}

/// Number of boundary arcs for a hull with `k ≥ 3` vertices: one per
/// vertex as the clockwise tangent, plus one more at every vertex whose
/// interior angle exceeds α (the boundary then passes around the vertex
/// instead of through it).
pub fn expected_arc_count(hull: &[Point], alpha: f64) -> usize {
    let k = hull.len();
    k + (0..k)
        .filter(|&i| {
            let g = angle_at(hull[i], hull[(i + k - 1) % k], hull[(i + 1) % k]).unwrap_or(PI);
            g > alpha
        })
        .count()
}

/// Second intersection of the circle of `arc` with the line through the
/// circle point `v` in direction `d`.
fn second_hit(arc: &CircularArc, v: Point, d: Point) -> Point {
    let d = d * (1.0 / d.norm());
    let s = -2.0 * (v - arc.center).dot(d);
    v + d * s
}

fn param(arc: &CircularArc, p: Point) -> f64 {
    let t = arc.param_of(p);
    if t > arc.sweep + PARAM_TOL && t > TAU - PARAM_TOL {
        0.0
    } else {
        t
    }
}

fn trace(v: &[Point], alpha: f64, gs: &GuardSet) -> Result<Vec<Edge>> {
    let k = v.len();
    let next = |i: usize| (i + 1) % k;
    let arc_of = |i: usize, j: usize| inscribed_arc(v[i], v[j], alpha, Side::Left);

    // Starting state: the clockwise tangent vertex has just become v[1].
    let gamma0 = angle_at(v[0], v[k - 1], v[1])?;
    let (mut i, mut j, mut t_in) = if gamma0 <= alpha {
        // The boundary passes through v[0].
        (1, 0, 0.0)
    } else {
        let j = start_left_tangent(v, alpha, gs);
        let arc = arc_of(1, j)?;
        let q = second_hit(&arc, v[1], v[1] - v[0]);
        (1, j, param(&arc, q))
    };
    let start = (i, j);
    let mut edges = Vec::new();
    for _ in 0..(4 * k + 8) {
        let arc = arc_of(i, j)?;
        let qa = second_hit(&arc, v[i], v[next(i)] - v[i]);
        let qb = second_hit(&arc, v[j], v[next(j)] - v[j]);
        let ta = param(&arc, qa);
        let tb = if next(j) == i {
            arc.sweep
        } else {
            param(&arc, qb)
        };
        let ok = |t: f64| t > t_in + PARAM_TOL && t <= arc.sweep + PARAM_TOL;
        let (adv_r, adv_l, t_out) = match (ok(ta), ok(tb)) {
            (true, true) if (ta - tb).abs() <= PARAM_TOL => (true, true, ta.min(tb)),
            (true, true) if ta < tb => (true, false, ta),
            (true, true) => (false, true, tb),
            (true, false) => (true, false, ta),
            (false, true) => (false, true, tb),
            (false, false) => {
                return Err(Error::Degeneracy {
                    at: arc.point_at(t_in),
                    what: "boundary trace found no pair transition".into(),
                })
            }
        };
        let t_out = t_out.min(arc.sweep);
        if t_out - t_in > PARAM_TOL {
            edges.push(Edge::Arc(arc.sub_arc(t_in, t_out)));
        }
        let exit = arc.point_at(t_out);
        let (ni, nj) = match (adv_r, adv_l) {
            (_, true) if next(j) == i => (next(i), i),
            (true, true) => (next(i), next(j)),
            (true, false) => (next(i), j),
            _ => (i, next(j)),
        };
        i = ni;
        j = nj;
        t_in = if next(j) == i && exit.dist(v[j]) <= PARAM_TOL * (1.0 + exit.norm()) {
            0.0
        } else {
            param(&arc_of(i, j)?, exit)
        };
        if (i, j) == start {
            return Ok(edges);
        }
    }
    Err(Error::Degeneracy {
        at: v[0],
        what: "boundary trace did not close".into(),
    })
}

/// Counterclockwise tangent vertex seen from the boundary point on the
/// extension of edge `(v[1], v[0])` beyond `v[0]`.
fn start_left_tangent(v: &[Point], alpha: f64, gs: &GuardSet) -> usize {
    let k = v.len();
    let e = v[0] - v[1];
    let e = e * (1.0 / e.norm());
    let seen = |s: f64| TAU - max_empty_cone_angle(v[0] + e * s, gs);
    let mut hi = gs.bbox().diameter();
    while seen(hi) >= alpha {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if seen(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = v[0] + e * (0.5 * (lo + hi));
    // The counterclockwise tangent is the vertex with the largest turn from
    // the direction back to v[0].
    let base = (v[0] - p).angle();
    (2..k)
        .max_by(|&a, &b| {
            let da = crate::geom::ccw_delta(base, (v[a] - p).angle());
            let db = crate::geom::ccw_delta(base, (v[b] - p).angle());
            // Angles past π wrap to the far side and count as smallest.
            let fa = if da > PI { -1.0 } else { da };
            let fb = if db > PI { -1.0 } else { db };
            fa.total_cmp(&fb).then(b.cmp(&a))
        })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BBox;
    use crate::hull::ConvexHull;
    use crate::oracle::is_theta_guarded;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square() -> GuardSet {
        GuardSet::new([p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap()
    }

    fn assert_closed(r: &Region) {
        for c in &r.components {
            let n = c.boundary.len();
            for w in 0..n {
                let a = c.boundary[w].target();
                let b = c.boundary[(w + 1) % n].source();
                assert!(a.dist(b) < 1e-7, "gap {a:?} -> {b:?}");
            }
            assert!(c.area() > 0.0);
        }
    }

    fn oracle_agreement(gs: &GuardSet, theta: f64, r: &Region, rng: &mut ChaCha8Rng) {
        let bb = gs.bbox().scaled(3.0);
        let margin = 1e-6 * gs.bbox().diameter();
        for _ in 0..3000 {
            let q = p(
                rng.gen_range(bb.min.x..bb.max.x),
                rng.gen_range(bb.min.y..bb.max.y),
            );
            if r.boundary_distance(q) <= margin {
                continue;
            }
            assert_eq!(r.contains(q), is_theta_guarded(q, gs, theta), "at {q:?}");
        }
    }

    #[test]
    fn pi_gives_hull() {
        let r = region_theta_ge_pi(&square(), PI).unwrap();
        assert_eq!(r.complexity(), 4);
        assert!((r.area() - 1.0).abs() < 1e-12);
        let line = GuardSet::new([p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)]).unwrap();
        assert!(region_theta_ge_pi(&line, PI).unwrap().is_empty());
    }

    #[test]
    fn two_guards_three_half_pi_is_disk() {
        let g = GuardSet::new([p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        let r = region_theta_ge_pi(&g, 1.5 * PI).unwrap();
        assert_eq!(r.arc_count(), 2);
        assert!((r.area() - PI * 0.25).abs() < 1e-12);
        for e in r.edges() {
            for q in e.polyline(0.05) {
                assert!((q.dist(p(0.5, 0.0)) - 0.5).abs() < 1e-12);
            }
        }
        assert_closed(&r);
    }

    #[test]
    fn square_three_half_pi() {
        let g = square();
        let r = region_theta_ge_pi(&g, 1.5 * PI).unwrap();
        assert_eq!(r.arc_count(), 4);
        assert_closed(&r);
        assert!((r.area() - (1.0 + PI / 2.0)).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        oracle_agreement(&g, 1.5 * PI, &r, &mut rng);
        // Raster check: every mismatching cell lies within a cell of the boundary.
        let bb = BBox::new(p(-1.0, -1.0), p(2.0, 2.0));
        let ras = crate::oracle::rasterize(&g, 1.5 * PI, bb, 400, 400).unwrap();
        for rr in 0..400 {
            for cc in 0..400 {
                let q = ras.center(cc, rr);
                if r.contains(q) != ras.guarded[rr * 400 + cc] {
                    assert!(r.boundary_distance(q) <= ras.cell_diagonal());
                }
            }
        }
    }

    #[test]
    fn random_sets_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(2..30);
            let g = GuardSet::new((0..n).map(|_| p(rng.gen(), rng.gen()))).unwrap();
            let theta = rng.gen_range(PI..TAU);
            let r = region_theta_ge_pi(&g, theta).unwrap();
            assert_closed(&r);
            let hull: ConvexHull = convex_hull(g.guards()).unwrap();
            if hull.len() >= 3 {
                assert_eq!(
                    r.arc_count(),
                    expected_arc_count(&hull.vertices, TAU - theta)
                );
                assert!(hull
                    .vertices
                    .iter()
                    .all(|&h| r.boundary_distance(h) < 1e-9 || r.contains(h)));
            }
            for e in r.edges() {
                if let Edge::Arc(a) = e {
                    let pr = a.provenance.unwrap();
                    assert!((pr.inscribed - (TAU - theta)).abs() < 1e-15);
                }
            }
            oracle_agreement(&g, theta, &r, &mut rng);
        }
    }

    #[test]
    fn errors() {
        let one = GuardSet::new([p(0.0, 0.0)]).unwrap();
        assert!(region_theta_ge_pi(&one, PI).is_err());
        assert!(region_theta_ge_pi(&square(), 1.0).is_err());
        assert!(region_theta_ge_pi(&square(), TAU).is_err());
    }
}
