//! FIFO push-relabel with periodic global relabeling.
//!
//! The main loop alternates a breadth-first distance sweep from the sink
//! with `rounds_per_sweep` discharge rounds over the active nodes, and stops
//! when the sweep finds no active node that can still reach the sink. A
//! second phase then returns stranded excess to the source so that the
//! network ends up carrying a maximum flow.
//!
//! Discharging can optionally be confined to node blocks: a node may then
//! only push to nodes of its own block or to the sink. Distance sweeps always
//! span the whole network.

use super::network::{FlowNetwork, SINK, SOURCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PushRelabelConfig {
    /// Discharge rounds between two global relabel sweeps.
    pub rounds_per_sweep: usize,
    /// Unconfined discharge rounds (split into sweeps of at most
    /// `rounds_per_sweep`) run before block confinement takes effect.
    pub wave_rounds: usize,
    /// Upper bound on global relabel sweeps.
    pub max_sweeps: usize,
}

impl Default for PushRelabelConfig {
    fn default() -> Self {
        PushRelabelConfig {
            rounds_per_sweep: 32,
            wave_rounds: 256,
            max_sweeps: 1_000_000,
        }
    }
}

/// Node partition for confined discharging.
#[derive(Debug, Clone, Copy)]
pub struct Blocks<'a> {
    /// Block id per node; ignored for the source and sink.
    pub block_of: &'a [u32],
    /// Largest number of nodes in one block.
    pub max_block_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopReason {
    /// No active node can reach the sink: the preflow is maximum.
    #[default]
    Converged,
    /// A confined sweep delivered no new flow to the sink.
    Stalled,
    /// The sweep cap was hit.
    SweepCap,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PushRelabelStats {
    pub sweeps: usize,
    pub rounds: usize,
    pub pushes: u64,
    pub relabels: u64,
    /// Pushes spent returning excess to the source.
    pub return_pushes: u64,
    pub stop: StopReason,
}

struct Engine<'a> {
    net: &'a mut FlowNetwork,
    n: u32,
    excess: Vec<i64>,
    height: Vec<u32>,
    cur: Vec<u32>,
    queued: Vec<bool>,
    bfs: Vec<u32>,
    stats: PushRelabelStats,
}

impl<'a> Engine<'a> {
    fn new(net: &'a mut FlowNetwork) -> Self {
        let n = net.node_count();
        let excess = net.excesses();
        let cur = (0..n as u32).map(|v| net.arcs(v).start as u32).collect();
        Engine {
            net,
            n: n as u32,
            excess,
            height: vec![0; n],
            cur,
            queued: vec![false; n],
            bfs: Vec::with_capacity(n),
            stats: PushRelabelStats::default(),
        }
    }

    fn saturate_source(&mut self) {
        for a in self.net.arcs(SOURCE) {
            let r = self.net.residual(a);
            if r > 0 {
                let w = self.net.head(a) as usize;
                self.net.push(a, r);
                self.excess[w] += r;
                self.excess[SOURCE as usize] -= r;
            }
        }
    }

    /// Exact residual distances to `target`; nodes that cannot reach it get
    /// height `n`. `blocked` is never entered.
    fn global_relabel(&mut self, target: u32, blocked: u32) {
        let n = self.n;
        self.height.fill(n);
        self.height[target as usize] = 0;
        self.height[blocked as usize] = 2 * n;
        self.bfs.clear();
        self.bfs.push(target);
        let mut i = 0;
        while i < self.bfs.len() {
            let v = self.bfs[i];
            i += 1;
            let hv = self.height[v as usize] + 1;
            for a in self.net.arcs(v) {
                let u = self.net.head(a);
                if self.height[u as usize] == n && self.net.residual(self.net.mate(a)) > 0 {
                    self.height[u as usize] = hv;
                    self.bfs.push(u);
                }
            }
        }
        for v in 0..n {
            self.cur[v as usize] = self.net.arcs(v).start as u32;
        }
        self.stats.sweeps += 1;
    }

    fn active_nodes(&self) -> Vec<u32> {
        (2..self.n)
            .filter(|&v| self.excess[v as usize] > 0 && self.height[v as usize] < self.n)
            .collect()
    }

    /// Pushes `v`'s excess along admissible arcs, relabeling as needed, until
    /// the excess is gone or `v` reaches `limit`. Newly active nodes are
    /// appended to `next`.
    #[inline]
    fn discharge(&mut self, v: u32, limit: u32, blocks: Option<&Blocks>, next: &mut Vec<u32>) {
        let vi = v as usize;
        let range = self.net.arcs(v);
        let home = blocks.map(|b| b.block_of[vi]);
        let allowed = |w: u32| match (blocks, home) {
            (Some(b), Some(h)) => w == SINK || b.block_of[w as usize] == h,
            _ => true,
        };
        loop {
            let hv = self.height[vi];
            let mut a = self.cur[vi] as usize;
            while a < range.end {
                let r = self.net.residual(a);
                if r > 0 {
                    let w = self.net.head(a);
                    if self.height[w as usize] + 1 == hv && allowed(w) {
                        let delta = r.min(self.excess[vi]);
                        self.net.push(a, delta);
                        self.excess[vi] -= delta;
                        self.excess[w as usize] += delta;
                        self.stats.pushes += 1;
                        if w > SINK && !self.queued[w as usize] {
                            self.queued[w as usize] = true;
                            next.push(w);
                        }
                        if self.excess[vi] == 0 {
                            self.cur[vi] = a as u32;
                            return;
                        }
                    }
                }
                a += 1;
            }
            let mut lowest = u32::MAX;
            for a in range.clone() {
                if self.net.residual(a) > 0 {
                    let w = self.net.head(a);
                    if allowed(w) {
                        lowest = lowest.min(self.height[w as usize]);
                    }
                }
            }
            self.stats.relabels += 1;
            if lowest == u32::MAX || lowest + 1 >= limit {
                self.height[vi] = self.n;
                return;
            }
            self.height[vi] = lowest + 1;
            self.cur[vi] = range.start as u32;
        }
    }

    /// Up to `rounds` FIFO passes starting from `active`.
    fn run_rounds(&mut self, mut active: Vec<u32>, rounds: usize, limit: u32) -> Vec<u32> {
        let mut next = Vec::new();
        for &v in &active {
            self.queued[v as usize] = true;
        }
        for _ in 0..rounds {
            if active.is_empty() {
                break;
            }
            self.stats.rounds += 1;
            for &v in &active {
                self.queued[v as usize] = false;
                if self.height[v as usize] < limit && self.excess[v as usize] > 0 {
                    self.discharge(v, limit, None, &mut next);
                }
            }
            std::mem::swap(&mut active, &mut next);
            next.clear();
        }
        for &v in &active {
            self.queued[v as usize] = false;
        }
        active
    }

    /// One confined pass: blocks in ascending id order, each discharged
    /// locally for up to `rounds` rounds.
    fn run_blocks(&mut self, mut active: Vec<u32>, rounds: usize, blocks: &Blocks) {
        active.sort_unstable_by_key(|&v| (blocks.block_of[v as usize], v));
        let mut start = 0;
        let mut queue = Vec::new();
        let mut next = Vec::new();
        while start < active.len() {
            let block = blocks.block_of[active[start] as usize];
            let mut end = start;
            while end < active.len() && blocks.block_of[active[end] as usize] == block {
                end += 1;
            }
            queue.clear();
            queue.extend_from_slice(&active[start..end]);
            let top = queue.iter().map(|&v| self.height[v as usize]).max().unwrap_or(0);
            let limit = (top as usize + blocks.max_block_nodes + 1).min(self.n as usize) as u32;
            for &v in &queue {
                self.queued[v as usize] = true;
            }
            for _ in 0..rounds {
                if queue.is_empty() {
                    break;
                }
                self.stats.rounds += 1;
                for &v in &queue {
                    self.queued[v as usize] = false;
                    if self.height[v as usize] < limit && self.excess[v as usize] > 0 {
                        self.discharge(v, limit, Some(blocks), &mut next);
                    }
                }
                std::mem::swap(&mut queue, &mut next);
                next.clear();
            }
            for &v in &queue {
                self.queued[v as usize] = false;
            }
            start = end;
        }
    }

    fn max_preflow(&mut self, cfg: &PushRelabelConfig, blocks: Option<&Blocks>) {
        self.saturate_source();
        let n = self.n;
        let rounds = cfg.rounds_per_sweep.max(1);
        let mut wave_left = if blocks.is_some() { cfg.wave_rounds } else { 0 };
        loop {
            if self.stats.sweeps >= cfg.max_sweeps {
                self.stats.stop = StopReason::SweepCap;
                return;
            }
            self.global_relabel(SINK, SOURCE);
            let active = self.active_nodes();
            if active.is_empty() {
                self.stats.stop = StopReason::Converged;
                return;
            }
            match blocks {
                Some(b) if wave_left == 0 => {
                    let before = self.excess[SINK as usize];
                    self.run_blocks(active, rounds, b);
                    if self.excess[SINK as usize] == before {
                        self.stats.stop = StopReason::Stalled;
                        return;
                    }
                }
                Some(_) => {
                    let r = rounds.min(wave_left);
                    self.run_rounds(active, r, n);
                    wave_left -= r;
                }
                None => {
                    self.run_rounds(active, rounds, n);
                }
            }
        }
    }

    /// Sends every unit of stranded excess back to the source.
    fn return_excess(&mut self) {
        let pushes_before = self.stats.pushes;
        let sweeps_before = self.stats.sweeps;
        loop {
            self.global_relabel(SOURCE, SINK);
            let active: Vec<u32> = (2..self.n)
                .filter(|&v| self.excess[v as usize] > 0)
                .collect();
            if active.is_empty() {
                break;
            }
            self.run_rounds(active, usize::MAX, 2 * self.n);
        }
        self.stats.return_pushes = self.stats.pushes - pushes_before;
        self.stats.pushes = pushes_before;
        self.stats.sweeps = sweeps_before;
    }
}

/// Runs push-relabel to a maximum flow.
pub fn maxflow(net: &mut FlowNetwork, cfg: &PushRelabelConfig) -> PushRelabelStats {
    let mut engine = Engine::new(net);
    engine.max_preflow(cfg, None);
    engine.return_excess();
    engine.stats
}

/// Runs push-relabel with discharging confined to `blocks` after the
/// unconfined wave rounds. The result is a preflow; excess that cannot
/// leave its block stays where it is.
pub fn confined_preflow(net: &mut FlowNetwork, cfg: &PushRelabelConfig, blocks: &Blocks) -> PushRelabelStats {
    let mut engine = Engine::new(net);
    engine.max_preflow(cfg, Some(blocks));
    engine.stats
}
