//! Shortest-augmenting-path max-flow (Dinic's blocking flows).
//!
//! Single-threaded and independent of the push-relabel code; used as the
//! cross-check for it. Works on top of whatever flow the network already
//! carries.

use std::collections::VecDeque;

use super::network::{FlowNetwork, SINK, SOURCE};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AugmentStats {
    pub phases: usize,
    pub augmentations: usize,
}

/// Augments `net` to a maximum flow and returns the flow added.
pub fn augment_to_max(net: &mut FlowNetwork) -> (i64, AugmentStats) {
    let n = net.node_count();
    let mut level = vec![u32::MAX; n];
    let mut cur = vec![0usize; n];
    let mut queue = VecDeque::new();
    let mut stats = AugmentStats::default();
    let mut total = 0i64;
    // Path stack of arcs for the iterative DFS.
    let mut path: Vec<usize> = Vec::new();

    loop {
        level.fill(u32::MAX);
        level[SOURCE as usize] = 0;
        queue.clear();
        queue.push_back(SOURCE);
        while let Some(v) = queue.pop_front() {
            for a in net.arcs(v) {
                let w = net.head(a) as usize;
                if net.residual(a) > 0 && level[w] == u32::MAX {
                    level[w] = level[v as usize] + 1;
                    queue.push_back(w as u32);
                }
            }
        }
        if level[SINK as usize] == u32::MAX {
            break;
        }
        stats.phases += 1;
        for (v, c) in cur.iter_mut().enumerate() {
            *c = net.arcs(v as u32).start;
        }

        path.clear();
        let mut v = SOURCE;
        loop {
            if v == SINK {
                let delta = path.iter().map(|&a| net.residual(a)).min().unwrap_or(0);
                for &a in &path {
                    net.push(a, delta);
                }
                total += delta;
                stats.augmentations += 1;
                // Retreat to the tail of the first saturated arc.
                let k = path.iter().position(|&a| net.residual(a) == 0).unwrap_or(0);
                path.truncate(k);
                v = match path.last() {
                    Some(&a) => net.head(a),
                    None => SOURCE,
                };
                continue;
            }
            let end = net.arcs(v).end;
            let mut advanced = false;
            while cur[v as usize] < end {
                let a = cur[v as usize];
                let w = net.head(a);
                if net.residual(a) > 0 && level[w as usize] == level[v as usize] + 1 {
                    path.push(a);
                    v = w;
                    advanced = true;
                    break;
                }
                cur[v as usize] += 1;
            }
            if advanced {
                continue;
            }
            // Dead end: prune v from this phase and retreat.
            level[v as usize] = u32::MAX;
            match path.pop() {
                Some(a) => {
                    v = net.head(net.mate(a));
                    cur[v as usize] += 1;
                }
                None => break,
            }
        }
    }
    (total, stats)
}
