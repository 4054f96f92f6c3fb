//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the library's own energy and cut code.

#![allow(dead_code)]

use gazecut::energy::{CostVolume, EnergyParams};
use gazecut::graphcut::{FlowNetwork, SINK, SOURCE};

/// `E(X)` from first principles; `None` when a hard constraint is violated.
pub fn energy(volume: &CostVolume, params: &EnergyParams, labels: &[u32]) -> Option<i64> {
    let (g, y) = (volume.g_extent(), volume.y_extent());
    let mut e = 0i64;
    for (site, &l) in labels.iter().enumerate() {
        e += volume.cost(site, l as usize);
    }
    let pair = |a: u32, b: u32| -> Option<i64> {
        let d = (a as i64 - b as i64).abs();
        if d > 1 && params.hard_inhibit {
            return None;
        }
        Some(params.penalty * d + if d > 1 { params.inhibit * (d - 1) } else { 0 })
    };
    for h in 0..y {
        for w in 0..g {
            let s = h * g + w;
            if w + 1 < g {
                e += pair(labels[s], labels[s + 1])?;
            }
            if h + 1 < y {
                e += pair(labels[s], labels[s + g])?;
            }
        }
    }
    Some(e)
}

/// Every labeling within `intervals` (or all labels), in odometer order.
pub fn for_each_labeling(sites: usize, intervals: &[(u32, u32)], mut f: impl FnMut(&[u32])) {
    let mut labels: Vec<u32> = intervals.iter().map(|iv| iv.0).collect();
    assert_eq!(labels.len(), sites);
    loop {
        f(&labels);
        let mut i = 0;
        loop {
            if i == sites {
                return;
            }
            if labels[i] < intervals[i].1 {
                labels[i] += 1;
                break;
            }
            labels[i] = intervals[i].0;
            i += 1;
        }
    }
}

pub struct Minimum {
    pub energy: i64,
    /// Componentwise minimum over all minimizers; minimizers of a convex
    /// prior form a lattice, so this is itself a minimizer.
    pub lowest: Vec<u32>,
    pub count: usize,
}

pub fn brute_force(volume: &CostVolume, params: &EnergyParams, intervals: Option<&[(u32, u32)]>) -> Option<Minimum> {
    let sites = volume.sites();
    let full: Vec<(u32, u32)> = vec![(0, volume.labels() as u32 - 1); sites];
    let iv = intervals.unwrap_or(&full);
    let mut best: Option<Minimum> = None;
    for_each_labeling(sites, iv, |labels| {
        let Some(e) = energy(volume, params, labels) else {
            return;
        };
        match &mut best {
            Some(b) if e > b.energy => {}
            Some(b) if e == b.energy => {
                b.count += 1;
                for (lo, &l) in b.lowest.iter_mut().zip(labels) {
                    *lo = (*lo).min(l);
                }
            }
            _ => {
                best = Some(Minimum {
                    energy: e,
                    lowest: labels.to_vec(),
                    count: 1,
                })
            }
        }
    });
    best
}

/// Minimum s-t cut capacity by enumerating every node subset; only for
/// networks with at most ~16 inner nodes.
pub fn min_cut(net: &FlowNetwork) -> i64 {
    let n = net.node_count();
    let inner = n - 2;
    assert!(inner <= 16, "too many nodes for enumeration");
    let mut best = i64::MAX;
    let mut side = vec![false; n];
    for mask in 0u32..(1 << inner) {
        side[SOURCE as usize] = true;
        side[SINK as usize] = false;
        for i in 0..inner {
            side[i + 2] = mask >> i & 1 == 1;
        }
        let mut cap = 0i64;
        for u in 0..n as u32 {
            if !side[u as usize] {
                continue;
            }
            for a in net.arcs(u) {
                if !side[net.head(a) as usize] {
                    cap += net.capacity(a);
                }
            }
        }
        best = best.min(cap);
    }
    best
}
