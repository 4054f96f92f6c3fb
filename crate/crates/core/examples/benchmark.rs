//! Times the exact solver and the hierarchy on a synthetic 384x288 scene.
//!
//! `cargo run --release -p gazecut --example benchmark -- [B] [A] [seed]`

use std::time::Instant;

use gazecut::energy::{BorderPolicy, CostVolume, EnergyParams};
use gazecut::eval::error_count;
use gazecut::geometry::{cuboid_from_disparity_range, GazeWindow};
use gazecut::graphcut::{solve_exact, PushRelabelConfig, SolverConfig, SolverKind};
use gazecut::hierarchy::{solve_level1, solve_level2, HierarchyConfig};
use gazecut::imaging::ground_truth_to_depth;
use gazecut::synth::synthetic_scene;

fn main() -> gazecut::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let b = args.first().copied().unwrap_or(64);
    let a = args.get(1).copied().unwrap_or(8);
    let seed = args.get(2).copied().unwrap_or(1) as u64;

    let scene = synthetic_scene(384, 288, 10, 28, seed);
    let cuboid = cuboid_from_disparity_range(384, 288, 10, 28, 7, GazeWindow::Centered)?;
    let t = Instant::now();
    let volume = CostVolume::from_stereo(&cuboid, &scene.pair, BorderPolicy::Clamp)?;
    println!("cost volume {:?} in {:?}", (volume.g_extent(), volume.y_extent(), volume.labels()), t.elapsed());
    let gt = ground_truth_to_depth(&scene.ground_truth, scene.scale, &cuboid)?;
    let params = EnergyParams::default();
    let solver = SolverConfig {
        push_relabel: PushRelabelConfig {
            rounds_per_sweep: b,
            wave_rounds: a,
            ..Default::default()
        },
        ..Default::default()
    };

    let run = |name: &str, f: &dyn Fn() -> gazecut::Result<gazecut::graphcut::CutResult>| -> gazecut::Result<()> {
        let t = Instant::now();
        let r = f()?;
        let report = error_count(&r.labeling, &gt)?;
        println!(
            "{name:<14} {:>8.3}s energy={} {} sweeps={} pushes={} relabels={} stop={:?}",
            t.elapsed().as_secs_f64(),
            r.energy,
            report.summary(),
            r.stats.sweeps,
            r.stats.pushes,
            r.stats.relabels,
            r.stats.stop
        );
        Ok(())
    };
    if std::env::var_os("WITH_REFERENCE").is_some() {
        let reference = SolverConfig {
            kind: SolverKind::Reference,
            ..solver
        };
        run("reference", &|| solve_exact(&volume, &params, &reference))?;
    }
    if std::env::var_os("SKIP_EXACT").is_none() {
        run("exact", &|| solve_exact(&volume, &params, &solver))?;
    }
    for (level, block) in [(1, 2), (1, 3), (2, 3)] {
        let cfg = HierarchyConfig {
            block,
            skin_radius: 1,
            solver,
        };
        let name = format!("l={level} b={block}");
        if level == 1 {
            run(&name, &|| Ok(solve_level1(&volume, &params, &cfg)?.fine))?;
        } else {
            run(&name, &|| Ok(solve_level2(&volume, &params, &cfg)?.fine))?;
        }
    }
    Ok(())
}
