mod input;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use theta_region::arcgen::{generate_candidate_arcs, TangentBackend};
use theta_region::arrangement::region_theta_lt_pi_detailed;
use theta_region::lowerbound::{self, VerifyMethod};
use theta_region::oracle::max_empty_cone;
use theta_region::{
    batch_unguarded, compute_region, rasterize, BBox, ClassifyBackend, ConeWitness, GuardSet,
    Point, Region, RegionOptions,
};

use input::{load_guards, parse_bbox, parse_point, parse_theta, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "theta-region",
    version,
    about = "Θ-guarded regions of planar guard sets"
)]
struct Cli {
    /// Worker threads for rasterization and classification (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Θ-region and write it as JSON (and optionally SVG).
    Region(RegionArgs),
    /// Report guardedness, f and a witness cone for query points.
    Query(QueryArgs),
    /// Evaluate f on a grid and write PGM or SVG.
    Rasterize(RasterArgs),
    /// Generate a lower-bound instance.
    Lowerbound(LowerboundArgs),
    /// Check a computed region against the per-point oracle.
    Verify(VerifyArgs),
    /// Candidate-arc and arrangement statistics over random workloads.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GuardArgs {
    /// Guard file: CSV (`x,y` per line) or JSON (`{"guards": [[x, y], ...]}`).
    #[arg(short, long)]
    input: PathBuf,
    /// Aperture in radians, or degrees with a `deg` suffix. Defaults to the
    /// `theta` stored in a JSON input.
    #[arg(short, long, value_parser = parse_theta)]
    theta: Option<f64>,
}

impl GuardArgs {
    fn load(&self) -> CliResult<(GuardSet, f64)> {
        let inp = load_guards(&self.input)?;
        let theta = match (self.theta, inp.theta) {
            (Some(t), _) => t,
            (None, Some(t)) => parse_theta(&t.to_string()).map_err(CliError::Input)?,
            (None, None) => {
                return Err(CliError::Input(
                    "no --theta given and none stored in the input".into(),
                ))
            }
        };
        Ok((GuardSet::new(inp.guards)?, theta))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Tangent {
    Naive,
    PartitionTree,
}

impl From<Tangent> for TangentBackend {
    fn from(t: Tangent) -> Self {
        match t {
            Tangent::Naive => TangentBackend::Naive,
            Tangent::PartitionTree => TangentBackend::PartitionTree,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Classify {
    Batch,
    Oracle,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    guards: GuardArgs,
    /// Region JSON output (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also draw the region, guards and candidate arcs as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Clip the region to xmin,ymin,xmax,ymax (Θ < π).
    #[arg(long, value_parser = parse_bbox)]
    window: Option<BBox>,
    /// Tangent-guard search structure.
    #[arg(long, value_enum, default_value = "naive")]
    tangent: Tangent,
    /// Face classification backend.
    #[arg(long, value_enum, default_value = "batch")]
    classify: Classify,
    /// Write the trimmed candidate arcs as JSON (Θ < π).
    #[arg(long)]
    dump_arcs: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    guards: GuardArgs,
    /// Query point `x,y`; repeatable.
    #[arg(short, long, value_parser = parse_point)]
    point: Vec<Point>,
    /// File of query points, same formats as the guard file.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Per-point oracle instead of the batched sweep.
    #[arg(long)]
    naive: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RasterFormat {
    Pgm,
    Svg,
}

#[derive(Args)]
struct RasterArgs {
    #[command(flatten)]
    guards: GuardArgs,
    #[arg(short, long)]
    out: PathBuf,
    /// Output format (default: from the file extension, else PGM).
    #[arg(long, value_enum)]
    format: Option<RasterFormat>,
    /// Cells per side.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
    resolution: u32,
    /// Raster extent xmin,ymin,xmax,ymax (default: guard box scaled by 1.5).
    #[arg(long, value_parser = parse_bbox)]
    bbox: Option<BBox>,
    /// PGM of the guarded mask instead of f.
    #[arg(long)]
    mask: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyChoice {
    Raster,
    Arrangement,
    Both,
}

#[derive(Args)]
struct LowerboundArgs {
    /// Instance index i ≥ 1.
    #[arg(long = "i", value_parser = clap::value_parser!(u32).range(1..))]
    i: u32,
    /// Instance JSON output (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Count the region components inside B_i.
    #[arg(long, value_enum)]
    verify: Option<VerifyChoice>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Guard file; omit to use a random instance.
    #[arg(short, long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Random instance of this many guards in the unit square.
    #[arg(long, required_unless_present = "input")]
    random: Option<usize>,
    #[arg(short, long, value_parser = parse_theta)]
    theta: Option<f64>,
    /// Random probe points.
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probes closer than 2·eps to the boundary are skipped (default: 1e-9 × guard diameter).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value = "naive")]
    tangent: Tangent,
}

#[derive(Args)]
struct BenchArgs {
    /// Guard counts.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
    n: Vec<usize>,
    #[arg(short, long, value_parser = parse_theta, default_value = "1.5707963267948966")]
    theta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "naive")]
    tangent: Tangent,
    /// CSV instead of an aligned table.
    #[arg(long)]
    csv: bool,
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            let res = out.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    out.write_all(b"\n")
                }
            });
            // A closed pipe (`| head`) is not an error.
            match res {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn random_guards(n: usize, seed: u64) -> CliResult<GuardSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(GuardSet::new(
        (0..n).map(|_| Point::new(rng.gen(), rng.gen())),
    )?)
}

fn cmd_region(a: &RegionArgs) -> CliResult<()> {
    let (gs, theta) = a.guards.load()?;
    let opts = RegionOptions {
        tangent: a.tangent.into(),
        classify: match a.classify {
            Classify::Batch => ClassifyBackend::Batch,
            Classify::Oracle => ClassifyBackend::Oracle,
        },
        window: a.window,
    };
    let (region, arcs) = if theta < PI && gs.len() >= 2 {
        let out = region_theta_lt_pi_detailed(&gs, theta, &opts)?;
        (out.region, out.arcs)
    } else {
        (compute_region(&gs, theta, &opts)?, Vec::new())
    };
    write_out(a.out.as_deref(), &region.to_json())?;
    if let Some(p) = &a.svg {
        write_out(Some(p), &region.to_svg(gs.guards(), &arcs))?;
    }
    if let Some(p) = &a.dump_arcs {
        let json = serde_json::to_string_pretty(&arcs).expect("arcs serialize");
        write_out(Some(p), &json)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct QueryRecord {
    point: Point,
    guarded: bool,
    f: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<ConeWitness>,
}

fn cmd_query(a: &QueryArgs) -> CliResult<()> {
    let (gs, theta) = a.guards.load()?;
    let mut pts = a.point.clone();
    if let Some(p) = &a.points {
        pts.extend(load_guards(p)?.guards);
    }
    if pts.is_empty() {
        return Err(CliError::Input(
            "no query points (use --point or --points)".into(),
        ));
    }
    let cones: Vec<ConeWitness> = pts.iter().map(|&p| max_empty_cone(p, &gs)).collect();
    let mut witness: Vec<Option<ConeWitness>> = cones
        .iter()
        .map(|c| (c.extent >= theta).then_some(*c))
        .collect();
    if !a.naive && theta < PI && !gs.is_empty() {
        witness = vec![None; pts.len()];
        for (j, w) in batch_unguarded(&pts, &gs, theta)? {
            witness[j] = Some(w);
        }
    }
    let mut text = String::new();
    for ((p, c), w) in pts.iter().zip(&cones).zip(witness) {
        let rec = QueryRecord {
            point: *p,
            guarded: w.is_none(),
            f: c.extent,
            witness: w,
        };
        text.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        text.push('\n');
    }
    write_out(None, &text)
}

fn cmd_rasterize(a: &RasterArgs) -> CliResult<()> {
    let (gs, theta) = a.guards.load()?;
    let bbox = a.bbox.unwrap_or_else(|| {
        let b = gs.bbox().scaled(1.5);
        if b.width() > 0.0 && b.height() > 0.0 {
            b
        } else {
            b.expand(1.0)
        }
    });
    let n = a.resolution as usize;
    let raster = rasterize(&gs, theta, bbox, n, n)?;
    let svg_ext = a
        .out
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    let format = a.format.unwrap_or(if svg_ext {
        RasterFormat::Svg
    } else {
        RasterFormat::Pgm
    });
    let text = match (format, a.mask) {
        (RasterFormat::Svg, _) => raster.to_svg(),
        (RasterFormat::Pgm, true) => raster.mask_pgm(),
        (RasterFormat::Pgm, false) => raster.to_pgm(),
    };
    write_out(Some(&a.out), &text)
}

fn cmd_lowerbound(a: &LowerboundArgs) -> CliResult<()> {
    let inst = lowerbound::generate(a.i as usize)?;
    write_out(a.out.as_deref(), &inst.to_json())?;
    let Some(v) = a.verify else {
        return Ok(());
    };
    let count = match v {
        VerifyChoice::Raster => lowerbound::verify_fragmentation(&inst, VerifyMethod::Raster)?,
        VerifyChoice::Arrangement => {
            lowerbound::verify_fragmentation(&inst, VerifyMethod::Arrangement)?
        }
        VerifyChoice::Both => lowerbound::verify_fragmentation_both(&inst)?,
    };
    eprintln!(
        "i = {}: n = {}, {count} components in B_i (expected {})",
        inst.i,
        inst.guards.len(),
        inst.expected_components
    );
    if count != inst.expected_components {
        return Err(CliError::Verification(format!(
            "{count} components, expected {}",
            inst.expected_components
        )));
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let (gs, theta) = match (&a.input, a.random) {
        (Some(path), _) => GuardArgs {
            input: path.clone(),
            theta: a.theta,
        }
        .load()?,
        (None, Some(n)) => {
            let theta = a
                .theta
                .ok_or_else(|| CliError::Input("--random needs --theta".into()))?;
            (random_guards(n, a.seed)?, theta)
        }
        (None, None) => unreachable!("clap requires one of --input, --random"),
    };
    let opts = RegionOptions {
        tangent: a.tangent.into(),
        ..RegionOptions::default()
    };
    let region = compute_region(&gs, theta, &opts)?;
    let eps = a.eps.unwrap_or_else(|| gs.eps());
    let mut bb = gs.bbox().scaled(2.0);
    if !(bb.width() > 0.0 && bb.height() > 0.0) {
        bb = bb.expand(1.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ 0x5eed);
    let probes: Vec<Point> = (0..a.probes)
        .map(|_| {
            Point::new(
                rng.gen_range(bb.min.x..=bb.max.x),
                rng.gen_range(bb.min.y..=bb.max.y),
            )
        })
        .collect();
    let checked: Vec<(Point, bool, bool)> = {
        use rayon::prelude::*;
        probes
            .par_iter()
            .filter(|&&p| region.whole_plane || region.boundary_distance(p) > 2.0 * eps)
            .map(|&p| {
                (
                    p,
                    region.contains(p),
                    theta_region::is_theta_guarded(p, &gs, theta),
                )
            })
            .collect()
    };
    let bad: Vec<&(Point, bool, bool)> = checked.iter().filter(|c| c.1 != c.2).collect();
    println!(
        "n = {}, theta = {theta}: {} components, complexity {}, {} probes checked, {} disagreements",
        gs.len(),
        region.components.len(),
        region.complexity(),
        checked.len(),
        bad.len()
    );
    if let Some((p, inside, guarded)) = bad.first() {
        return Err(CliError::Verification(format!(
            "{} probes disagree; first at ({}, {}): region {inside}, oracle {guarded}",
            bad.len(),
            p.x,
            p.y
        )));
    }
    println!("PASS");
    Ok(())
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    theta: f64,
    candidates: usize,
    candidates_per_n_over_theta: f64,
    vertices: usize,
    edges: usize,
    faces: usize,
    mu: usize,
    sqrt_psi_n_over_theta: f64,
    complexity: usize,
    components: usize,
    arcs_ms: f64,
    region_ms: f64,
}

fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let theta = a.theta;
    let mut rows = Vec::new();
    for (k, &n) in a.n.iter().enumerate() {
        let gs = random_guards(n, a.seed.wrapping_add(k as u64))?;
        let t0 = Instant::now();
        let candidates = if theta < PI {
            generate_candidate_arcs(&gs, theta, a.tangent.into())?.len()
        } else {
            0
        };
        let arcs_ms = t0.elapsed().as_secs_f64() * 1e3;
        let opts = RegionOptions {
            tangent: a.tangent.into(),
            ..RegionOptions::default()
        };
        let t1 = Instant::now();
        let (region, arr): (Region, _) = if theta < PI {
            let out = region_theta_lt_pi_detailed(&gs, theta, &opts)?;
            (out.region, out.arrangement)
        } else {
            (compute_region(&gs, theta, &opts)?, None)
        };
        let region_ms = t1.elapsed().as_secs_f64() * 1e3;
        let (v, e, f) = arr
            .as_ref()
            .map(|x| (x.vertices.len(), x.edges.len(), x.face_count()))
            .unwrap_or((0, 0, 0));
        rows.push(BenchRow {
            n,
            theta,
            candidates,
            candidates_per_n_over_theta: candidates as f64 / (n as f64 / theta),
            vertices: v,
            edges: e,
            faces: f,
            mu: v + e + f,
            sqrt_psi_n_over_theta: (f as f64).sqrt() * n as f64 / theta,
            complexity: region.complexity(),
            components: region.components.len(),
            arcs_ms,
            region_ms,
        });
    }
    if a.csv {
        let mut w = csv::Writer::from_writer(std::io::stdout().lock());
        for r in &rows {
            w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
        }
        w.flush()?;
        return Ok(());
    }
    println!(
        "{:>6} {:>8} {:>10} {:>8} {:>8} {:>8} {:>9} {:>14} {:>10} {:>5} {:>10} {:>10}",
        "n",
        "|C'|",
        "|C'|θ/n",
        "V",
        "E",
        "ψ",
        "μ",
        "√ψ·n/θ",
        "boundary",
        "comp",
        "arcs ms",
        "region ms"
    );
    for r in &rows {
        println!(
            "{:>6} {:>8} {:>10.4} {:>8} {:>8} {:>8} {:>9} {:>14.1} {:>10} {:>5} {:>10.1} {:>10.1}",
            r.n,
            r.candidates,
            r.candidates_per_n_over_theta,
            r.vertices,
            r.edges,
            r.faces,
            r.mu,
            r.sqrt_psi_n_over_theta,
            r.complexity,
            r.components,
            r.arcs_ms,
            r.region_ms
        );
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Region(a) => cmd_region(a),
        Command::Query(a) => cmd_query(a),
        Command::Rasterize(a) => cmd_rasterize(a),
        Command::Lowerbound(a) => cmd_lowerbound(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(&cli) {
        eprintln!("theta-region: {e}");
        std::process::exit(e.exit_code());
    }
}
