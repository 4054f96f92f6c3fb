mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gazecut::energy::CostVolume;
use gazecut::eval::{comparison_csv, compare_methods, error_count, histogram_csv, sweep_csv, sweep_penalty, MethodConfig};
use gazecut::geometry::CuboidSpec;
use gazecut::graphcut::{build_graph, CutResult, StopReason};
use gazecut::imaging::{
    ground_truth_to_depth, load_pgm, load_ppm, write_disparity_image, write_pgm, GrayImage, GroundTruthDepth,
    StereoPair,
};
use gazecut::selftest::{self, SelftestConfig};
use gazecut::synth::synthetic_scene;
use gazecut::{Error, Result};

use config::{parse_size, InputArgs, ModelArgs, RunConfig, SolverArgs};

#[derive(Debug, Parser)]
#[command(name = "gazecut", version, about = "Stereo depth by minimum cuts over gaze lines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one stereo pair and write the depth map.
    Solve(SolveArgs),
    /// Error against ground truth for a range of penalties.
    Sweep(SweepArgs),
    /// Error, energy and time of several methods.
    Compare(CompareArgs),
    /// Run the built-in oracle suites.
    Selftest(SelftestArgs),
    /// Convert a ground-truth disparity map into per-site depth numbers.
    ConvertGt(ConvertArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// 0 = exact, 1 = coarse-to-fine, 2 = coarse-to-fine with block-confined
    /// discharging.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    level: u8,
    #[arg(long, default_value_t = 2)]
    block_size: usize,
    /// Disparity map (PGM, `dis * gt-scale`).
    #[arg(long)]
    out_disparity: Option<PathBuf>,
    /// Per-site depth numbers as text.
    #[arg(long)]
    out_labels: Option<PathBuf>,
    /// Solver statistics as `key=value` lines.
    #[arg(long)]
    out_stats: Option<PathBuf>,
    /// The flow network in DIMACS max-flow format (exact level only).
    #[arg(long)]
    dump_graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Penalties as `start..end:step` (inclusive) or a comma list.
    #[arg(long, default_value = "2..30:2")]
    penalties: String,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Methods as `level:block` pairs.
    #[arg(long, default_value = "0:1,1:2,1:3,2:3")]
    methods: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = SelftestConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = SelftestConfig::default().networks)]
    networks: usize,
    #[arg(long, default_value_t = SelftestConfig::default().instances)]
    instances: usize,
    #[arg(long, default_value_t = SelftestConfig::default().max_width)]
    max_width: i64,
    /// Add a suite that always fails.
    #[arg(long, hide = true)]
    force_failure: bool,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = 8)]
    gt_scale: u32,
    #[command(flatten)]
    model: ModelArgs,
    /// Depth-number map (PGM, label + 1, 0 = no ground truth).
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Geometry(_) => 2,
        Error::Io { .. } | Error::Format(_) => 3,
        Error::SolverCap(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Compare(a) => compare(a),
        Command::Selftest(a) => return run_selftest(a),
        Command::ConvertGt(a) => convert_gt(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gazecut: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct Problem {
    pair: StereoPair,
    cuboid: CuboidSpec,
    volume: CostVolume,
    gt: Option<GroundTruthDepth>,
    /// Disparity scale for rendered maps.
    scale: u32,
    run: RunConfig,
}

fn init_threads(threads: usize) -> Result<()> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn load_problem(command: &str, input: &InputArgs, model: &ModelArgs, solver: &SolverArgs) -> Result<Problem> {
    init_threads(solver.threads)?;
    model.params()?;
    let (pair, synthetic_gt) = match &input.synthetic {
        Some(size) => {
            let (w, h) = parse_size(size)?;
            let s = synthetic_scene(w, h, model.dis_min.max(0), model.dis_max.max(model.dis_min), input.seed);
            (s.pair, Some((s.ground_truth, s.scale)))
        }
        None => {
            let left = load_ppm(input.left.as_ref().expect("required by clap"))?;
            let right = load_ppm(input.right.as_ref().expect("required by clap"))?;
            (StereoPair::new(left, right)?, None)
        }
    };
    let cuboid = model.cuboid(pair.width(), pair.height())?;
    let volume = CostVolume::from_stereo(&cuboid, &pair, model.border()?)?;
    let mut scale = input.gt_scale;
    let gt = match (&input.gt, synthetic_gt) {
        (Some(path), _) => Some(ground_truth_to_depth(&load_pgm(path)?, input.gt_scale, &cuboid)?),
        (None, Some((img, s))) => {
            scale = s;
            Some(ground_truth_to_depth(&img, s, &cuboid)?)
        }
        (None, None) => None,
    };
    let run = RunConfig::from_args(command, input, model, solver, &cuboid);
    Ok(Problem {
        pair,
        cuboid,
        volume,
        gt,
        scale,
        run,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn stats_text(run: &RunConfig, r: &CutResult, timings: bool, skin_nodes: Option<usize>) -> String {
    let s = &r.stats;
    let mut out = run.to_text();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    kv("nodes", s.nodes.to_string());
    kv("edges", s.edges.to_string());
    if let Some(n) = skin_nodes {
        kv("skin_nodes", n.to_string());
    }
    kv("flow", r.flow_value.to_string());
    kv("offset", r.offset.to_string());
    kv("energy", r.energy.to_string());
    kv("chain_flow", s.chain_flow.to_string());
    kv("sweeps", s.sweeps.to_string());
    kv("rounds", s.rounds.to_string());
    kv("pushes", s.pushes.to_string());
    kv("relabels", s.relabels.to_string());
    kv("augmentations", s.augmentations.to_string());
    kv("stop", format!("{:?}", s.stop));
    if timings {
        kv("build_ms", format!("{:.3}", s.build_time.as_secs_f64() * 1e3));
        kv("flow_ms", format!("{:.3}", s.flow_time.as_secs_f64() * 1e3));
        kv("extract_ms", format!("{:.3}", s.extract_time.as_secs_f64() * 1e3));
    }
    out
}

fn labels_text(run: &RunConfig, r: &CutResult) -> String {
    let mut out = run.to_text();
    let l = &r.labeling;
    let _ = writeln!(out, "{} {}", l.g_extent(), l.y_extent());
    for row in l.as_slice().chunks(l.g_extent()) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn solve(a: SolveArgs) -> Result<()> {
    if a.block_size == 0 {
        return Err(Error::Config("--block-size must be at least 1".into()));
    }
    let mut p = load_problem("solve", &a.input, &a.model, &a.solver)?;
    p.run.push("level", a.level);
    p.run.push("block_size", a.block_size);
    let params = a.model.params()?;
    let solver = a.solver.config();

    if let Some(path) = &a.dump_graph {
        let graph = build_graph(&p.volume, &params, None)?;
        let mut text: String = p.run.comments().iter().map(|c| format!("c {c}\n")).collect();
        text.push_str(&graph.network.to_dimacs());
        write_text(path, &text)?;
    }

    let method = MethodConfig {
        level: a.level,
        block: if a.level == 0 { 1 } else { a.block_size },
    };
    let (result, skin_nodes) = match a.level {
        0 => (gazecut::graphcut::solve_exact(&p.volume, &params, &solver)?, None),
        level => {
            let cfg = gazecut::hierarchy::HierarchyConfig {
                block: a.block_size,
                skin_radius: a.solver.skin_radius,
                solver,
            };
            let h = if level == 1 {
                gazecut::hierarchy::solve_level1(&p.volume, &params, &cfg)?
            } else {
                gazecut::hierarchy::solve_level2(&p.volume, &params, &cfg)?
            };
            (h.fine, Some(h.skin_nodes))
        }
    };
    let comments = p.run.comments();
    if let Some(path) = &a.out_disparity {
        write_disparity_image(&result.labeling, &p.cuboid, p.scale, path, &comments)?;
    }
    if let Some(path) = &a.out_labels {
        write_text(path, &labels_text(&p.run, &result))?;
    }
    let stats = stats_text(&p.run, &result, a.solver.timings, skin_nodes);
    if let Some(path) = &a.out_stats {
        write_text(path, &stats)?;
    }
    println!("method={} images={}x{}", method.id(), p.pair.width(), p.pair.height());
    for line in stats.lines().filter(|l| !l.starts_with('#')) {
        println!("{line}");
    }
    if let Some(gt) = &p.gt {
        let report = error_count(&result.labeling, gt)?;
        println!("{}", report.summary());
        let d = gt.diagnostics;
        println!(
            "gt_unknown_pixels={} gt_outside_cuboid={} gt_collisions={}",
            d.unknown_pixels, d.outside_cuboid, d.collisions
        );
        print!("{}", histogram_csv(&report));
    }
    if result.stats.stop == StopReason::SweepCap {
        return Err(Error::SolverCap(format!(
            "level {} stopped after {} sweeps; outputs hold the partial cut",
            a.level, result.stats.sweeps
        )));
    }
    Ok(())
}

fn parse_penalties(text: &str) -> Result<Vec<i64>> {
    let bad = || Error::Config(format!("--penalties: cannot parse '{text}'"));
    let list: Vec<i64> = if let Some((range, step)) = text.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        let step: i64 = step.trim().parse().map_err(|_| bad())?;
        if step <= 0 {
            return Err(bad());
        }
        (lo..=hi).step_by(step as usize).collect()
    } else {
        text.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if list.is_empty() {
        return Err(Error::Config("--penalties selects no values".into()));
    }
    Ok(list)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_gt(p: &Problem) -> Result<&GroundTruthDepth> {
    p.gt.as_ref()
        .ok_or_else(|| Error::Config("this command needs ground truth (--gt or --synthetic)".into()))
}

fn sweep(a: SweepArgs) -> Result<()> {
    let penalties = parse_penalties(&a.penalties)?;
    let mut p = load_problem("sweep", &a.input, &a.model, &a.solver)?;
    p.run.push("penalties", &a.penalties);
    let gt = require_gt(&p)?;
    let records = sweep_penalty(&p.volume, gt, &penalties, &a.model.params()?, &a.solver.config())?;
    emit(&a.out, &sweep_csv(&records, &p.run.comments(), a.solver.timings))
}

fn parse_methods(text: &str) -> Result<Vec<MethodConfig>> {
    let bad = |t: &str| Error::Config(format!("--methods: '{t}' is not level:block"));
    let methods: Vec<MethodConfig> = text
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (l, b) = t.trim().split_once(':').ok_or_else(|| bad(t))?;
            let level: u8 = l.parse().map_err(|_| bad(t))?;
            let block: usize = b.parse().map_err(|_| bad(t))?;
            if level > 2 || block == 0 {
                return Err(bad(t));
            }
            Ok(MethodConfig { level, block })
        })
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(Error::Config("--methods selects nothing".into()));
    }
    Ok(methods)
}

fn compare(a: CompareArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let mut p = load_problem("compare", &a.input, &a.model, &a.solver)?;
    p.run.push("methods", &a.methods);
    let gt = require_gt(&p)?;
    let rows = compare_methods(
        &p.volume,
        gt,
        &a.model.params()?,
        &methods,
        a.solver.skin_radius,
        &a.solver.config(),
    )?;
    emit(&a.out, &comparison_csv(&rows, &p.run.comments(), a.solver.timings))
}

fn run_selftest(a: SelftestArgs) -> ExitCode {
    let cfg = SelftestConfig {
        seed: a.seed,
        networks: a.networks,
        instances: a.instances,
        max_width: a.max_width,
        force_failure: a.force_failure,
    };
    let report = selftest::run(&cfg);
    print!("{}", report.to_text());
    let failed = report.suites.iter().filter(|s| s.failed > 0).count();
    println!("suites={} failed={} seed={}", report.suites.len(), failed, cfg.seed);
    if report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn convert_gt(a: ConvertArgs) -> Result<()> {
    let img = load_pgm(&a.gt)?;
    let cuboid = a.model.cuboid(img.width(), img.height())?;
    let gt = ground_truth_to_depth(&img, a.gt_scale, &cuboid)?;
    if cuboid.d_extent > 255 {
        return Err(Error::Config(format!("{} labels do not fit an 8-bit map", cuboid.d_extent)));
    }
    let pixels = gt.labels.iter().map(|l| l.map_or(0, |s| s as u8 + 1)).collect();
    let map = GrayImage::new(gt.g_extent, gt.y_extent, pixels)?;
    let mut run = RunConfig::default();
    run.push("command", "convert-gt");
    run.push("gt", a.gt.display());
    run.push("gt_scale", a.gt_scale);
    run.push(
        "cuboid",
        format!(
            "{},{},{},{},{},{}",
            cuboid.g_min, cuboid.g_extent, cuboid.y_min, cuboid.y_extent, cuboid.d_min, cuboid.d_extent
        ),
    );
    write_pgm(&map, &a.out, &run.comments())?;
    let d = gt.diagnostics;
    println!(
        "sites={} valid={} unknown_pixels={} outside_cuboid={} collisions={}",
        cuboid.sites(),
        gt.valid_sites(),
        d.unknown_pixels,
        d.outside_cuboid,
        d.collisions
    );
    Ok(())
}
