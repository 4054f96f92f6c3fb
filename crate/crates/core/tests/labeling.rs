mod common;

use gazecut::energy::{volume_energy, CostVolume, EnergyParams, Labeling};
use gazecut::graphcut::{build_graph, solve_exact, solve_graph, SolverConfig, SolverKind};
use gazecut::hierarchy::{solve_level1, solve_level2, HierarchyConfig};
use gazecut::synth::random_volume;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn solvers() -> [SolverConfig; 3] {
    [
        SolverConfig {
            kind: SolverKind::Reference,
            chain_init: false,
            ..Default::default()
        },
        SolverConfig::default(),
        SolverConfig {
            chain_init: false,
            ..Default::default()
        },
    ]
}

/// Brute-force minima of seeded 3x3x4 instances, frozen from the oracle in
/// `common`: (seed, penalty, inhibit, hard, energy, minimal labeling).
type Frozen = (u64, i64, i64, bool, i64, [u32; 9]);

const FROZEN: &[Frozen] = &[
    (1, 14, 1023, false, 141, [3, 3, 3, 3, 3, 3, 3, 3, 3]),
    (1, 5, 3, false, 124, [3, 3, 2, 3, 3, 2, 2, 2, 3]),
    (1, 2, 0, true, 106, [3, 3, 2, 3, 3, 2, 2, 2, 3]),
    (2, 14, 1023, false, 171, [1, 0, 0, 1, 1, 1, 1, 1, 1]),
    (2, 5, 3, false, 115, [1, 0, 0, 1, 2, 1, 1, 1, 1]),
    (2, 2, 0, true, 117, [1, 1, 0, 1, 2, 1, 1, 1, 1]),
    (3, 14, 1023, false, 203, [2, 3, 3, 3, 3, 3, 3, 3, 3]),
    (4, 5, 3, false, 187, [1, 2, 3, 2, 3, 3, 0, 2, 1]),
    (4, 2, 0, true, 171, [1, 2, 3, 2, 3, 2, 1, 2, 1]),
    (5, 14, 1023, false, 248, [0; 9]),
    (5, 2, 0, true, 181, [0, 1, 2, 0, 1, 1, 1, 1, 0]),
    (6, 5, 3, false, 149, [2, 2, 1, 1, 1, 0, 0, 0, 0]),
    (6, 2, 0, true, 122, [2, 2, 1, 1, 1, 0, 0, 0, 1]),
];

#[test]
fn frozen_minima() {
    for &(seed, penalty, inhibit, hard_inhibit, energy, labels) in FROZEN {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_volume(&mut rng, 3, 3, 4, 60);
        let p = EnergyParams {
            penalty,
            inhibit,
            hard_inhibit,
        };
        for cfg in solvers() {
            let r = solve_exact(&v, &p, &cfg).unwrap();
            assert_eq!(r.energy, energy, "seed {seed} {p:?}");
            assert_eq!(r.labeling.as_slice(), &labels, "seed {seed} {p:?}");
        }
    }
}

#[test]
fn two_sites_two_labels_enumerated() {
    let v = CostVolume::new(2, 1, 2, vec![4, 1, 0, 6]).unwrap();
    let p = EnergyParams::new(2, 10);
    let mut all: Vec<i64> = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            all.push(common::energy(&v, &p, &[a, b]).unwrap());
        }
    }
    let r = solve_exact(&v, &p, &SolverConfig::default()).unwrap();
    assert_eq!(r.energy, *all.iter().min().unwrap());
}

#[test]
fn exact_matches_brute_force_with_minimal_labeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let (g, y) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let m = rng.gen_range(1..=5);
        let v = random_volume(&mut rng, g, y, m, 50);
        let p = EnergyParams {
            penalty: rng.gen_range(0..=20),
            inhibit: rng.gen_range(0..=80),
            hard_inhibit: rng.gen_bool(0.25),
        };
        let best = common::brute_force(&v, &p, None).expect("constant labelings are always feasible");
        for cfg in solvers() {
            let r = solve_exact(&v, &p, &cfg).unwrap();
            assert_eq!(r.energy, best.energy, "instance {i}");
            assert_eq!(r.labeling.as_slice(), best.lowest.as_slice(), "instance {i}");
            assert_eq!(r.flow_value + r.offset, r.energy);
            assert_eq!(Some(r.energy), common::energy(&v, &p, r.labeling.as_slice()));
        }
    }
}

#[test]
fn restricted_graphs_are_optimal_over_their_intervals() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..150 {
        let (g, y) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let m = rng.gen_range(2..=6);
        let v = random_volume(&mut rng, g, y, m, 50);
        let p = EnergyParams::new(rng.gen_range(0..=20), rng.gen_range(0..=80));
        let intervals: Vec<(u32, u32)> = (0..g * y)
            .map(|_| {
                let a = rng.gen_range(0..m as u32);
                let b = rng.gen_range(0..m as u32);
                (a.min(b), a.max(b))
            })
            .collect();
        let best = common::brute_force(&v, &p, Some(&intervals)).unwrap();
        let mut graph = build_graph(&v, &p, Some(&intervals)).unwrap();
        let r = solve_graph(&mut graph, &v, &p, &SolverConfig::default()).unwrap();
        assert_eq!(r.energy, best.energy, "instance {i}");
        assert_eq!(r.labeling.as_slice(), best.lowest.as_slice(), "instance {i}");
        for (l, iv) in r.labeling.as_slice().iter().zip(&intervals) {
            assert!((iv.0..=iv.1).contains(l));
        }
    }
}

#[test]
fn hierarchy_ladder_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..80 {
        let (g, y, m) = (rng.gen_range(1..=10), rng.gen_range(1..=10), rng.gen_range(1..=12));
        let v = random_volume(&mut rng, g, y, m, 60);
        let p = EnergyParams {
            penalty: rng.gen_range(0..=20),
            inhibit: rng.gen_range(0..=200),
            hard_inhibit: rng.gen_bool(0.3),
        };
        let solver = SolverConfig::default();
        let exact = solve_exact(&v, &p, &solver).unwrap();
        let b1 = HierarchyConfig {
            block: 1,
            skin_radius: 1,
            solver,
        };
        let l1 = solve_level1(&v, &p, &b1).unwrap();
        assert_eq!(l1.fine.labeling, exact.labeling, "instance {i}");
        assert_eq!(l1.fine.energy, exact.energy);
        let l2 = solve_level2(&v, &p, &b1).unwrap();
        assert_eq!(l2.fine.labeling, exact.labeling, "instance {i}");
        for block in [2, 3] {
            let cfg = HierarchyConfig { block, ..b1 };
            let l1 = solve_level1(&v, &p, &cfg).unwrap();
            let l2 = solve_level2(&v, &p, &cfg).unwrap();
            assert!(exact.energy <= l1.fine.energy, "instance {i} b={block}");
            assert!(l1.fine.energy <= l2.fine.energy, "instance {i} b={block}");
            for r in [&l1.fine, &l2.fine] {
                assert_eq!(Some(r.energy), common::energy(&v, &p, r.labeling.as_slice()));
                assert!(r.labeling.max_label() < m as u32);
                if p.hard_inhibit {
                    assert!(r.labeling.max_neighbor_step() <= 1);
                }
            }
        }
    }
}

#[test]
fn constant_images_are_solved_by_any_constant_labeling() {
    let v = CostVolume::new(4, 3, 5, vec![0; 60]).unwrap();
    let r = solve_exact(&v, &EnergyParams::default(), &SolverConfig::default()).unwrap();
    assert_eq!(r.energy, 0);
    let c = Labeling::uniform(4, 3, 3);
    assert_eq!(volume_energy(&c, &v, &EnergyParams::default()).unwrap(), 0);
}

#[test]
fn only_label_zero_is_expensive() {
    // Positive data terms only on the label-0 chain arcs.
    let mut costs = vec![0; 2 * 2 * 4];
    for s in 0..4 {
        costs[s * 4] = 9;
    }
    let v = CostVolume::new(2, 2, 4, costs).unwrap();
    let r = solve_exact(&v, &EnergyParams::default(), &SolverConfig::default()).unwrap();
    assert_eq!(r.energy, 0);
    assert!(r.labeling.as_slice().iter().all(|&l| l == 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_identity_and_hard_constraint(
        seed in any::<u64>(),
        g in 1usize..7,
        y in 1usize..7,
        m in 1usize..9,
        penalty in 0i64..30,
        inhibit in 0i64..300,
        hard in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_volume(&mut rng, g, y, m, 100);
        let p = EnergyParams { penalty, inhibit, hard_inhibit: hard };
        let r = solve_exact(&v, &p, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.flow_value + r.offset, r.energy);
        prop_assert_eq!(Some(r.energy), common::energy(&v, &p, r.labeling.as_slice()));
        if hard {
            prop_assert!(r.labeling.max_neighbor_step() <= 1);
        }
        let reference = solve_exact(&v, &p, &SolverConfig { kind: SolverKind::Reference, ..Default::default() }).unwrap();
        prop_assert_eq!(reference.labeling, r.labeling);
    }
}
