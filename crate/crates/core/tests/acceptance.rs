//! End-to-end acceptance checks. One line per criterion; the process exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use theta_region::arcgen::{generate_candidate_arcs, TangentBackend};
use theta_region::lowerbound::{generate, verify_fragmentation, VerifyMethod};
use theta_region::oracle::max_empty_cone;
use theta_region::ptree::{naive_extreme, PartitionTree};
use theta_region::{
    batch_unguarded, compute_region, convex_hull, is_theta_guarded, rasterize, GuardSet, Point,
    RegionOptions, Side,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn uniform_set(rng: &mut ChaCha8Rng, n: usize) -> GuardSet {
    GuardSet::new((0..n).map(|_| p(rng.gen(), rng.gen()))).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || {
        format!("{what} took {:.1}s, limit {limit}s", elapsed.as_secs_f64())
    })
}

/// Least-squares slope of log(y) against log(x).
fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn c1_pi_region_is_hull() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(3..=40);
        let gs = uniform_set(&mut rng, n);
        let hull = convex_hull(gs.guards()).map_err(|e| e.to_string())?;
        let region =
            compute_region(&gs, PI, &RegionOptions::default()).map_err(|e| e.to_string())?;
        let bb = gs.bbox().scaled(1.5);
        let samples = 100_000;
        let mut srng = ChaCha8Rng::seed_from_u64(rng.gen());
        let mismatches = (0..samples)
            .filter(|_| {
                let q = p(
                    srng.gen_range(bb.min.x..bb.max.x),
                    srng.gen_range(bb.min.y..bb.max.y),
                );
                region.contains(q) != hull.contains_strict(q)
            })
            .count();
        let sym_diff = mismatches as f64 / samples as f64 * bb.width() * bb.height();
        let rel = sym_diff / hull.area();
        worst = worst.max(rel);
        ensure(rel < 1e-6, || {
            format!("n = {n}: symmetric difference {rel:.3e} of hull area")
        })?;
    }
    within(start.elapsed(), 10.0, "20 instances")?;
    Ok(format!("worst relative symmetric difference {worst:.1e}"))
}

fn c2_two_guards_disk() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (l, r) = (
            p(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
            p(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
        );
        let gs = GuardSet::new([l, r]).unwrap();
        let region =
            compute_region(&gs, 1.5 * PI, &RegionOptions::default()).map_err(|e| e.to_string())?;
        let (c, rad) = (l.midpoint(r), 0.5 * l.dist(r));
        let step = 1e-3 * rad;
        // Region boundary to circle.
        let d1 = region
            .edges()
            .flat_map(|e| e.polyline(step))
            .map(|q| (q.dist(c) - rad).abs())
            .fold(0.0, f64::max);
        // Circle to region boundary.
        let d2 = (0..2000)
            .map(|k| c + Point::polar(TAU * k as f64 / 2000.0) * rad)
            .map(|q| region.boundary_distance(q))
            .fold(0.0, f64::max);
        let h = d1.max(d2) / l.dist(r);
        worst = worst.max(h);
        ensure(region.components.len() == 1 && h < 1e-6, || {
            format!(
                "{} components, Hausdorff distance {h:.3e} x |lr|",
                region.components.len()
            )
        })?;
    }
    Ok(format!("worst Hausdorff distance {worst:.1e} x |lr|"))
}

fn c3_empty_below_two_pi_over_n() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut probes = 0;
    for _ in 0..50 {
        let n = rng.gen_range(3..=100);
        let gs = uniform_set(&mut rng, n);
        let theta = TAU / n as f64;
        let region =
            compute_region(&gs, theta, &RegionOptions::default()).map_err(|e| e.to_string())?;
        ensure(region.is_empty(), || {
            format!("n = {n}: {} components", region.components.len())
        })?;
        let bb = gs.bbox().scaled(1.2);
        for _ in 0..10_000 {
            let q = p(
                rng.gen_range(bb.min.x..bb.max.x),
                rng.gen_range(bb.min.y..bb.max.y),
            );
            ensure(!is_theta_guarded(q, &gs, theta), || {
                format!("n = {n}: {q:?} guarded")
            })?;
            probes += 1;
        }
    }
    Ok(format!("50 empty regions, {probes} unguarded probes"))
}

fn c4_oracle_agreement() -> Outcome {
    let start = Instant::now();
    let thetas = [
        PI / 6.0,
        PI / 3.0,
        FRAC_PI_2,
        2.0 * PI / 3.0,
        5.0 * PI / 6.0,
        7.0 * PI / 6.0,
        1.5 * PI,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let instances: Vec<GuardSet> = (0..30)
        .map(|_| {
            let n = rng.gen_range(3..=60);
            uniform_set(&mut rng, n)
        })
        .collect();
    let res = 200;
    let mut cells = 0usize;
    let mut excused = 0usize;
    for (k, gs) in instances.iter().enumerate() {
        for &theta in &thetas {
            let region = compute_region(gs, theta, &RegionOptions::default())
                .map_err(|e| format!("instance {k}: {e}"))?;
            let bb = gs.bbox().scaled(2.0);
            let diag = (bb.width() / res as f64).hypot(bb.height() / res as f64);
            let rows: Vec<(usize, usize)> = (0..res)
                .into_par_iter()
                .map(|r| {
                    let centers: Vec<Point> = (0..res)
                        .map(|c| theta_region::oracle::Raster::cell_center(&bb, res, res, c, r))
                        .collect();
                    let xs: Vec<f64> = centers.iter().map(|q| q.x).collect();
                    let inside = region.contains_row(centers[0].y, &xs);
                    let (mut bad, mut near) = (0, 0);
                    for (q, &ins) in centers.iter().zip(&inside) {
                        if ins != is_theta_guarded(*q, gs, theta) {
                            if region.boundary_distance(*q) <= diag {
                                near += 1;
                            } else {
                                bad += 1;
                            }
                        }
                    }
                    (bad, near)
                })
                .collect();
            let bad: usize = rows.iter().map(|r| r.0).sum();
            excused += rows.iter().map(|r| r.1).sum::<usize>();
            cells += res * res;
            ensure(bad == 0, || {
                format!(
                    "instance {k} (n = {}), theta = {theta:.4}: {bad} cells disagree",
                    gs.len()
                )
            })?;
        }
    }
    within(start.elapsed(), 300.0, "oracle agreement")?;
    Ok(format!(
        "{cells} cells, 0 disagreements ({excused} within one cell diagonal of the boundary), {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn candidate_count(n: usize, theta: f64, seeds: u64) -> Result<(f64, bool), String> {
    let mut total = 0usize;
    let mut budget_ok = true;
    for s in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + s);
        let gs = uniform_set(&mut rng, n);
        let set = generate_candidate_arcs(&gs, theta, TangentBackend::Naive)
            .map_err(|e| e.to_string())?;
        let cap = 2 * (TAU / theta).floor() as usize;
        budget_ok &= set.slides_per_guard.iter().all(|&k| k <= cap);
        total += set.len();
    }
    Ok((total as f64 / seeds as f64, budget_ok))
}

fn c5_candidate_growth() -> Outcome {
    let seeds = 3;
    let ns = [100.0, 200.0, 400.0, 800.0];
    let theta = PI / 4.0;
    let mut by_n = Vec::new();
    let mut budget = true;
    for &n in &ns {
        let (c, ok) = candidate_count(n as usize, theta, seeds)?;
        by_n.push(c);
        budget &= ok;
    }
    let slope = loglog_slope(&ns, &by_n);
    let thetas = [FRAC_PI_2, PI / 4.0, PI / 8.0, PI / 16.0];
    let mut scaled = Vec::new();
    for &t in &thetas {
        let (c, ok) = candidate_count(200, t, seeds)?;
        scaled.push(c * t);
        budget &= ok;
    }
    let band = scaled.iter().cloned().fold(0.0, f64::max)
        / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let detail = format!(
        "|C'| over n {:?} slope {slope:.3}; |C'|*theta over theta {:?} band {band:.2}",
        by_n.iter().map(|c| c.round()).collect::<Vec<_>>(),
        scaled
            .iter()
            .map(|c| (c * 10.0).round() / 10.0)
            .collect::<Vec<_>>()
    );
    ensure(budget, || {
        format!("per-guard endpoint budget exceeded; {detail}")
    })?;
    ensure(slope <= 1.1 && band <= 3.0, || detail.clone())?;
    Ok(detail)
}

fn c6_fragmentation() -> Outcome {
    let mut parts = Vec::new();
    for i in 1..=2usize {
        let start = Instant::now();
        let inst = generate(i).map_err(|e| e.to_string())?;
        ensure(inst.guards.len() == 96 * i - 4, || {
            format!("i = {i}: {} guards", inst.guards.len())
        })?;
        let raster =
            verify_fragmentation(&inst, VerifyMethod::Raster).map_err(|e| e.to_string())?;
        let arr =
            verify_fragmentation(&inst, VerifyMethod::Arrangement).map_err(|e| e.to_string())?;
        let want = (2 * i + 1) * (2 * i + 1);
        ensure(raster == want && arr == want, || {
            format!("i = {i}: raster {raster}, arrangement {arr}, expected {want}")
        })?;
        within(start.elapsed(), 300.0, &format!("i = {i}"))?;
        parts.push(format!(
            "i = {i}: n = {} -> {raster} components ({:.1}s)",
            inst.guards.len(),
            start.elapsed().as_secs_f64()
        ));
    }
    Ok(parts.join("; "))
}

fn c7_partition_tree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let pts: Vec<Point> = (0..100_000).map(|_| p(rng.gen(), rng.gen())).collect();
    let tree = PartitionTree::build(&pts, 8).map_err(|e| e.to_string())?;
    let queries: Vec<(Point, Point, Side, Point)> = (0..10_000)
        .map(|_| {
            let a = p(rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2));
            let b = p(rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2));
            let side = if rng.gen() { Side::Left } else { Side::Right };
            (a, b, side, Point::polar(rng.gen_range(0.0..TAU)))
        })
        .collect();
    let mismatches = queries
        .par_iter()
        .filter(|&&(a, b, side, dir)| {
            tree.extreme_in_halfplane(a, b, side, dir) != naive_extreme(&pts, a, b, side, dir)
        })
        .count();
    ensure(mismatches == 0, || {
        format!("{mismatches} of 10000 queries differ")
    })?;
    for k in 0..20 {
        let n = rng.gen_range(5..120);
        let gs = uniform_set(&mut rng, n);
        let theta = rng.gen_range(0.2..3.0);
        let a = generate_candidate_arcs(&gs, theta, TangentBackend::Naive)
            .map_err(|e| e.to_string())?;
        let b = generate_candidate_arcs(&gs, theta, TangentBackend::PartitionTree)
            .map_err(|e| e.to_string())?;
        ensure(a == b, || {
            format!("instance {k}: candidate arcs differ between backends")
        })?;
    }
    Ok("10000 queries on 1e5 points identical; 20 candidate sets identical".into())
}

fn c8_batch_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut reported = 0;
    for k in 0..20 {
        let n = rng.gen_range(3..=200);
        let gs = uniform_set(&mut rng, n);
        let theta = rng.gen_range(0.05..3.1);
        let bb = gs.bbox().scaled(1.5);
        let m = rng.gen_range(1..=500);
        let pts: Vec<Point> = (0..m)
            .map(|_| {
                p(
                    rng.gen_range(bb.min.x..bb.max.x),
                    rng.gen_range(bb.min.y..bb.max.y),
                )
            })
            .collect();
        let batch = batch_unguarded(&pts, &gs, theta).map_err(|e| e.to_string())?;
        let want: Vec<usize> = (0..m)
            .filter(|&j| !is_theta_guarded(pts[j], &gs, theta))
            .collect();
        let got: Vec<usize> = batch.iter().map(|(j, _)| *j).collect();
        ensure(got == want, || {
            format!(
                "instance {k}: {} reported, {} expected",
                got.len(),
                want.len()
            )
        })?;
        for (j, w) in &batch {
            ensure(
                w.apex == pts[*j] && w.extent >= theta && w.is_empty_for(gs.guards(), gs.eps()),
                || format!("instance {k}: witness at point {j} invalid"),
            )?;
            let f = max_empty_cone(pts[*j], &gs).extent;
            ensure(w.extent <= f + 1e-9, || {
                format!("instance {k}: witness wider than f")
            })?;
        }
        reported += batch.len();
    }
    Ok(format!(
        "20 instances, {reported} unguarded points with valid witnesses"
    ))
}

fn c9_wide_linear() -> Outcome {
    let ns = [50.0, 100.0, 200.0, 400.0];
    let seeds = 5;
    let mut sizes = Vec::new();
    for &n in &ns {
        let mut total = 0usize;
        for s in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + 10 * n as u64 + s);
            let gs = uniform_set(&mut rng, n as usize);
            let region =
                compute_region(&gs, 2.0, &RegionOptions::default()).map_err(|e| e.to_string())?;
            total += region.complexity();
        }
        sizes.push(total as f64 / seeds as f64);
    }
    let slope = loglog_slope(&ns, &sizes);
    let detail = format!("complexity {:?}, slope {slope:.3}", sizes);
    ensure(slope <= 1.15, || detail.clone())?;
    Ok(detail)
}

fn c10_disconnected() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let gs = uniform_set(&mut rng, 50);
    let mut found = None;
    for k in 1..60 {
        let theta = PI * k as f64 / 60.0;
        let region =
            compute_region(&gs, theta, &RegionOptions::default()).map_err(|e| e.to_string())?;
        if region.components.len() >= 2 {
            found = Some((theta, region));
            break;
        }
    }
    let (theta, region) = found.ok_or("no theta below pi disconnects the region")?;
    let svg = region.to_svg(gs.guards(), &[]);
    let raster =
        rasterize(&gs, theta, gs.bbox().scaled(1.2), 200, 200).map_err(|e| e.to_string())?;
    let (pgm, rsvg) = (raster.to_pgm(), raster.to_svg());
    ensure(
        svg.contains("<svg") && rsvg.contains("<svg") && pgm.starts_with("P"),
        || "export malformed".into(),
    )?;
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("disconnected_region.svg"), svg).map_err(|e| e.to_string())?;
    std::fs::write(dir.join("disconnected_f.pgm"), pgm).map_err(|e| e.to_string())?;
    Ok(format!(
        "theta = {theta:.4}: {} components; SVG and f-raster written",
        region.components.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("pi-region equals convex hull", c1_pi_region_is_hull),
        (
            "two-guard 3pi/2-region is the Thales disk",
            c2_two_guards_disk,
        ),
        ("theta = 2pi/n gives the empty region", c3_empty_below_two_pi_over_n),
        ("oracle agreement on 200x200 grids", c4_oracle_agreement),
        ("candidate arc growth", c5_candidate_growth),
        ("lower-bound fragmentation", c6_fragmentation),
        ("partition-tree exactness", c7_partition_tree),
        ("batched classification equivalence", c8_batch_equivalence),
        ("linear complexity at theta = 2", c9_wide_linear),
        ("disconnected region below pi", c10_disconnected),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = (k + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
