//! Built-in oracle suites: exhaustive transform round trips, solver
//! cross-checks on random networks, and brute-force optimality on tiny
//! labeling problems.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{volume_energy, CostVolume, EnergyParams, Labeling};
use crate::geometry::{
    cross_from_pixels, disparity_from_whs, pixels_from_gaze_depth, whs_from_disparity, CuboidSpec, Whs,
};
use crate::graphcut::{
    augment_to_max, maxflow_push_relabel, solve_exact, PushRelabelConfig, SolverConfig, SolverKind, SOURCE,
};
use crate::hierarchy::{solve_level1, solve_level2, HierarchyConfig};
use crate::synth::{random_network, random_volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Widest image for the exhaustive transform suite.
    pub max_width: i64,
    pub networks: usize,
    pub instances: usize,
    /// Adds a suite that always fails (exercises the failure path).
    pub force_failure: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 2011,
            max_width: 64,
            networks: 200,
            instances: 60,
            force_failure: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            passed: 0,
            failed: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub suites: Vec<SuiteReport>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let status = if s.failed == 0 { "PASS" } else { "FAIL" };
            let _ = write!(out, "{status} {} passed={} failed={}", s.name, s.passed, s.failed);
            if let Some(f) = &s.first_failure {
                let _ = write!(out, " first_failure=\"{f}\"");
            }
            out.push('\n');
        }
        out
    }
}

pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut suites = vec![
        transforms(cfg.max_width),
        solver_equivalence(&mut rng, cfg.networks),
        optimality(&mut rng, cfg.instances),
        hierarchy(&mut rng, cfg.instances),
        hard_inhibit(&mut rng, cfg.instances),
    ];
    if cfg.force_failure {
        let mut s = SuiteReport::new("forced-failure");
        s.check(false, || "forced by configuration".into());
        suites.push(s);
    }
    SelftestReport { suites }
}

fn transforms(max_width: i64) -> SuiteReport {
    let mut s = SuiteReport::new("transform-round-trip");
    for w in 1..=max_width {
        for x_l in 0..w {
            for x_r in 0..=x_l {
                if let Some(gd) = cross_from_pixels(x_l, x_r, 0, w) {
                    let back = pixels_from_gaze_depth(gd, w);
                    s.check(matches!(back, Ok(c) if c.x_l == x_l && c.x_r == x_r), || {
                        format!("w={w} ({x_l},{x_r}) -> {gd:?} -> {back:?}")
                    });
                }
            }
        }
        // Disparity transforms over a cuboid spanning every depth number.
        let valid = (w + 1) / 2;
        let Ok(c) = CuboidSpec::new(w, 1, (-(valid - 1), 2 * valid - 1), (0, 1), (0, valid)) else {
            continue;
        };
        for ws in 0..c.g_extent {
            for ss in 0..c.d_extent {
                let whs = Whs { w: ws, h: 0, s: ss };
                if let Ok(p) = disparity_from_whs(whs, &c) {
                    let back = whs_from_disparity(p.x, p.y, p.dis, &c);
                    s.check(back == whs, || format!("w={w} {whs:?} -> {p:?} -> {back:?}"));
                }
            }
        }
    }
    s
}

fn solver_equivalence(rng: &mut ChaCha8Rng, count: usize) -> SuiteReport {
    let mut s = SuiteReport::new("solver-equivalence");
    for i in 0..count {
        let nodes = rng.gen_range(2..=200);
        let degree = rng.gen_range(1..=5);
        let net = random_network(rng, nodes, degree, 50);
        let mut a = net.clone();
        let mut b = net;
        let (fa, _) = augment_to_max(&mut a);
        let cfg = PushRelabelConfig {
            rounds_per_sweep: rng.gen_range(1..=8),
            ..Default::default()
        };
        maxflow_push_relabel(&mut b, &cfg);
        let fb = b.flow_value();
        let same_cut = a.reachable_from(SOURCE) == b.reachable_from(SOURCE);
        s.check(fa == fb && b.check_flow().is_ok() && same_cut, || {
            format!("network {i}: reference {fa}, push-relabel {fb}, same cut {same_cut}")
        });
    }
    s
}

fn tiny_volume(rng: &mut ChaCha8Rng) -> CostVolume {
    let g = rng.gen_range(1..=3);
    let y = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=5);
    random_volume(rng, g, y, m, 40)
}

fn tiny_params(rng: &mut ChaCha8Rng) -> EnergyParams {
    EnergyParams::new(rng.gen_range(0..=15), rng.gen_range(0..=60))
}

/// Minimum of `E` over every labeling, by odometer enumeration.
pub fn brute_force_minimum(volume: &CostVolume, params: &EnergyParams) -> Option<(i64, Labeling)> {
    let (g, y, m) = (volume.g_extent(), volume.y_extent(), volume.labels() as u32);
    let mut labels = vec![0u32; g * y];
    let mut best: Option<(i64, Labeling)> = None;
    loop {
        let lab = Labeling::new(g, y, labels.clone()).expect("sizes match");
        if let Ok(e) = volume_energy(&lab, volume, params) {
            if best.as_ref().is_none_or(|(b, _)| e < *b) {
                best = Some((e, lab));
            }
        }
        let mut i = 0;
        loop {
            if i == labels.len() {
                return best;
            }
            labels[i] += 1;
            if labels[i] < m {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

fn optimality(rng: &mut ChaCha8Rng, count: usize) -> SuiteReport {
    let mut s = SuiteReport::new("exact-optimality");
    for i in 0..count {
        let v = tiny_volume(rng);
        let p = tiny_params(rng);
        let (best, _) = brute_force_minimum(&v, &p).expect("soft energies are finite");
        for kind in [SolverKind::Reference, SolverKind::PushRelabel] {
            let cfg = SolverConfig {
                kind,
                ..Default::default()
            };
            let r = solve_exact(&v, &p, &cfg);
            s.check(matches!(&r, Ok(r) if r.energy == best && r.flow_value + r.offset == r.energy), || {
                format!("instance {i} ({kind:?}): brute force {best}, solver {:?}", r.map(|r| r.energy))
            });
        }
    }
    s
}

fn hierarchy(rng: &mut ChaCha8Rng, count: usize) -> SuiteReport {
    let mut s = SuiteReport::new("hierarchy");
    for i in 0..count {
        let g = rng.gen_range(1..=6);
        let y = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=8);
        let v = random_volume(rng, g, y, m, 40);
        let p = tiny_params(rng);
        let solver = SolverConfig::default();
        let exact = match solve_exact(&v, &p, &solver) {
            Ok(r) => r,
            Err(e) => {
                s.check(false, || format!("instance {i}: exact failed: {e}"));
                continue;
            }
        };
        let one = HierarchyConfig {
            block: 1,
            skin_radius: 1,
            solver,
        };
        let l1b1 = solve_level1(&v, &p, &one);
        s.check(matches!(&l1b1, Ok(r) if r.fine.labeling == exact.labeling), || {
            format!("instance {i}: level 1 with b=1 differs from exact")
        });
        let two = HierarchyConfig { block: 2, ..one };
        let l1 = solve_level1(&v, &p, &two);
        let l2 = solve_level2(&v, &p, &two);
        let ok = match (&l1, &l2) {
            (Ok(a), Ok(b)) => exact.energy <= a.fine.energy && a.fine.energy <= b.fine.energy,
            _ => false,
        };
        s.check(ok, || format!("instance {i}: exact <= level 1 <= level 2 violated"));
    }
    s
}

fn hard_inhibit(rng: &mut ChaCha8Rng, count: usize) -> SuiteReport {
    let mut s = SuiteReport::new("hard-inhibit");
    for i in 0..count {
        let (g, y, m) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=8));
        let v = random_volume(rng, g, y, m, 80);
        let p = EnergyParams {
            hard_inhibit: true,
            ..tiny_params(rng)
        };
        let cfg = HierarchyConfig {
            block: 2,
            skin_radius: 1,
            solver: SolverConfig::default(),
        };
        let results = [
            solve_exact(&v, &p, &cfg.solver).map(|r| r.labeling),
            solve_level1(&v, &p, &cfg).map(|r| r.fine.labeling),
            solve_level2(&v, &p, &cfg).map(|r| r.fine.labeling),
        ];
        for r in results {
            s.check(matches!(&r, Ok(l) if l.max_neighbor_step() <= 1), || {
                format!("instance {i}: {:?}", r.map(|l| l.max_neighbor_step()))
            });
        }
    }
    s
}
