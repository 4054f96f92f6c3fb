//! Layered graph for convex-prior labeling.
//!
//! Each site owns a chain of `m - 1` nodes; node `i` of a site lies on the
//! source side exactly when the site's label is at least `i`. Chain arcs carry
//! the data costs and uncuttable reverse arcs keep every minimum cut
//! monotone along the chain. Neighboring chains are tied together by
//! same-level arcs (the linear part of the prior) and by diagonal arcs one
//! level apart (the surcharge for jumps beyond one).
//!
//! A site may be restricted to a label interval `[lo, hi]`. Nodes at or
//! below `lo` are then fixed to the source and nodes above `hi` to the sink;
//! arcs touching fixed nodes fold into terminal capacities or a constant.

use super::network::{FlowNetwork, NetworkBuilder, SINK, SOURCE};
use crate::energy::{CostVolume, EnergyParams, UNCUTTABLE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    Source,
    Sink,
    Free(u32),
}

/// A built network together with the bookkeeping to read labels back.
#[derive(Debug, Clone)]
pub struct GridGraph {
    pub network: FlowNetwork,
    g_extent: usize,
    y_extent: usize,
    labels: usize,
    lo: Vec<u32>,
    hi: Vec<u32>,
    site_first: Vec<u32>,
    /// Energy charged by arcs whose side is fixed by the intervals.
    pub offset: i64,
}

impl GridGraph {
    pub fn g_extent(&self) -> usize {
        self.g_extent
    }

    pub fn y_extent(&self) -> usize {
        self.y_extent
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn sites(&self) -> usize {
        self.lo.len()
    }

    /// The label interval of `site`.
    pub fn interval(&self, site: usize) -> (u32, u32) {
        (self.lo[site], self.hi[site])
    }

    /// Node ids of the free chain nodes of `site`, lowest level first.
    pub fn chain_nodes(&self, site: usize) -> std::ops::Range<u32> {
        let first = self.site_first[site];
        first..first + (self.hi[site] - self.lo[site])
    }

    /// Site and level of a free node.
    pub fn locate(&self, node: u32) -> Option<(usize, u32)> {
        if node <= SINK {
            return None;
        }
        let site = self.site_first.partition_point(|&f| f <= node).checked_sub(1)?;
        if !self.chain_nodes(site).contains(&node) {
            return None;
        }
        Some((site, self.lo[site] + 1 + (node - self.site_first[site])))
    }

    /// Reads labels off a node partition. Fails if some chain is not a
    /// source-side prefix.
    pub fn labels_from_cut(&self, source_side: &[bool]) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.sites());
        for site in 0..self.sites() {
            let mut label = self.lo[site];
            let mut ended = false;
            for node in self.chain_nodes(site) {
                if source_side[node as usize] {
                    if ended {
                        return Err(Error::Graph(format!("cut is not monotone along the chain of site {site}")));
                    }
                    label += 1;
                } else {
                    ended = true;
                }
            }
            out.push(label);
        }
        Ok(out)
    }

    /// Pushes the bottleneck flow along every site chain from source to sink.
    /// Returns the total flow sent.
    pub fn saturate_chains(&mut self) -> i64 {
        let mut total = 0;
        let mut path = Vec::new();
        for site in 0..self.sites() {
            let nodes = self.chain_nodes(site);
            if nodes.is_empty() {
                continue;
            }
            path.clear();
            let mut prev = SOURCE;
            for v in nodes.clone().chain(std::iter::once(SINK)) {
                let a = self.arc_between(prev, v);
                path.push(a);
                prev = v;
            }
            let delta = path.iter().map(|&a| self.network.residual(a)).min().unwrap_or(0);
            if delta > 0 {
                for &a in &path {
                    self.network.push(a, delta);
                }
                total += delta;
            }
        }
        total
    }

    fn arc_between(&self, u: u32, v: u32) -> usize {
        // Terminals have huge degree; search from the other end.
        if u == SOURCE {
            let back = self.network.arcs(v).find(|&a| self.network.head(a) == u).expect("chain arc");
            return self.network.mate(back);
        }
        self.network.arcs(u).find(|&a| self.network.head(a) == v).expect("chain arc")
    }
}

#[inline]
fn state_of(lo: u32, hi: u32, first: u32, level: u32) -> NodeState {
    if level <= lo {
        NodeState::Source
    } else if level > hi {
        NodeState::Sink
    } else {
        NodeState::Free(first + level - lo - 1)
    }
}

/// Number of edges of the unrestricted graph: `S m + P (m - 1) + 2 P (m - 2)`.
pub fn full_edge_count(sites: usize, pairs: usize, labels: usize) -> usize {
    if labels < 2 {
        return sites;
    }
    sites * labels + pairs * (labels - 1) + 2 * pairs * (labels - 2)
}

struct Emitter {
    builder: NetworkBuilder,
    src_cap: Vec<i64>,
    snk_cap: Vec<i64>,
    offset: i64,
    hard: bool,
}

impl Emitter {
    /// Adds a directed arc of capacity `cap` between two node states.
    fn arc(&mut self, from: NodeState, to: NodeState, cap: i64) -> Result<()> {
        if cap == 0 {
            return Ok(());
        }
        use NodeState::*;
        match (from, to) {
            (Source, Sink) => {
                if cap >= UNCUTTABLE {
                    return Err(Error::Graph("label intervals force an uncuttable arc into the cut".into()));
                }
                self.offset += cap;
            }
            (Source, Free(v)) => self.terminal(v, cap, true)?,
            (Free(u), Sink) => self.terminal(u, cap, false)?,
            (Free(u), Free(v)) => self.builder.add_edge(u, v, cap, 0),
            _ => {}
        }
        Ok(())
    }

    fn terminal(&mut self, v: u32, cap: i64, source: bool) -> Result<()> {
        if self.hard && cap >= UNCUTTABLE {
            return Err(Error::Graph(format!("node {v} would get an uncuttable terminal arc")));
        }
        let slot = if source {
            &mut self.src_cap[v as usize]
        } else {
            &mut self.snk_cap[v as usize]
        };
        *slot = slot.saturating_add(cap).min(UNCUTTABLE);
        Ok(())
    }
}

/// Builds the network for `volume` under `params`. With `intervals`, site
/// `i` is restricted to labels `intervals[i].0 ..= intervals[i].1`.
pub fn build_graph(volume: &CostVolume, params: &EnergyParams, intervals: Option<&[(u32, u32)]>) -> Result<GridGraph> {
    params.validate()?;
    let sites = volume.sites();
    let m = volume.labels();
    let (lo, hi): (Vec<u32>, Vec<u32>) = match intervals {
        Some(iv) => {
            if iv.len() != sites {
                return Err(Error::Graph(format!("{} intervals for {sites} sites", iv.len())));
            }
            if let Some(&(l, h)) = iv.iter().find(|&&(l, h)| l > h || h as usize >= m) {
                return Err(Error::Graph(format!("bad label interval [{l}, {h}] for {m} labels")));
            }
            iv.iter().copied().unzip()
        }
        None => (vec![0; sites], vec![m as u32 - 1; sites]),
    };

    let mut site_first = Vec::with_capacity(sites);
    let mut next = 2u64;
    for s in 0..sites {
        site_first.push(next as u32);
        next += (hi[s] - lo[s]) as u64;
    }
    if next >= u32::MAX as u64 {
        return Err(Error::Graph(format!("{next} nodes exceed 32-bit indexing")));
    }
    let nodes = next as usize;
    let neighbors = volume.neighbors();
    let estimate = if intervals.is_none() {
        full_edge_count(sites, neighbors.len(), m)
    } else {
        nodes * 4
    };
    let mut em = Emitter {
        builder: NetworkBuilder::with_capacity(nodes, estimate),
        src_cap: vec![0; nodes],
        snk_cap: vec![0; nodes],
        offset: 0,
        hard: params.hard_inhibit,
    };

    // Chains: arc k runs from level k to level k + 1 (level 0 is the
    // source, level m the sink) and is cut when the label is k.
    for s in 0..sites {
        let costs = volume.site_costs(s);
        let (l, h, f) = (lo[s], hi[s], site_first[s]);
        let st = |k: u32| match k {
            0 => NodeState::Source,
            k if k as usize == m => NodeState::Sink,
            k => state_of(l, h, f, k),
        };
        for k in l..=h {
            match (st(k), st(k + 1)) {
                // The uncuttable reverse arc keeps the cut monotone.
                (NodeState::Free(u), NodeState::Free(v)) => em.builder.add_edge(u, v, costs[k as usize], UNCUTTABLE),
                (a, b) => em.arc(a, b, costs[k as usize])?,
            }
        }
    }

    let p = params.penalty;
    let q = params.inhibit_capacity();
    for (u, v) in neighbors.pairs() {
        let (lu, hu, fu) = (lo[u], hi[u], site_first[u]);
        let (lv, hv, fv) = (lo[v], hi[v], site_first[v]);
        let su = |i: u32| state_of(lu, hu, fu, i);
        let sv = |i: u32| state_of(lv, hv, fv, i);
        for i in 1..m as u32 {
            match (su(i), sv(i)) {
                (NodeState::Free(a), NodeState::Free(b)) => {
                    if p > 0 {
                        em.builder.add_edge(a, b, p, p);
                    }
                }
                (a, b) => {
                    em.arc(a, b, p)?;
                    em.arc(b, a, p)?;
                }
            }
        }
        for i in 2..m as u32 {
            em.arc(su(i), sv(i - 1), q)?;
            em.arc(sv(i), su(i - 1), q)?;
        }
    }

    for s in 0..sites {
        let chain = site_first[s]..site_first[s] + (hi[s] - lo[s]);
        if chain.is_empty() {
            continue;
        }
        for v in chain.clone() {
            let (sc, tc) = (em.src_cap[v as usize], em.snk_cap[v as usize]);
            if sc > 0 || v == chain.start {
                em.builder.add_edge(SOURCE, v, sc, 0);
            }
            if tc > 0 || v == chain.end - 1 {
                em.builder.add_edge(v, SINK, tc, 0);
            }
        }
    }

    let g_extent = volume.g_extent();
    let y_extent = volume.y_extent();
    Ok(GridGraph {
        network: em.builder.finish()?,
        g_extent,
        y_extent,
        labels: m,
        lo,
        hi,
        site_first,
        offset: em.offset,
    })
}
