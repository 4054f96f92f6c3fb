//! Two-stage approximation: an exact cut over `b x b x b` delegate blocks,
//! then a cut of the fine problem restricted to a thin band of labels around
//! the upsampled coarse surface.
//!
//! Level 1 solves the restricted fine problem exactly. Level 2 solves it
//! with push-relabel whose discharges are confined to node blocks between
//! global relabel sweeps, which approximates the cut itself.

use std::time::Instant;

use crate::energy::{volume_energy, CostVolume, EnergyParams, Labeling};
use crate::error::{Error, Result};
use crate::graphcut::{
    build_graph, confined_preflow, extract_labeling_sink_side, solve_exact, solve_graph, Blocks, CutResult,
    GridGraph, SolverConfig, SolverStats, SINK,
};

/// Partition of a `G x Y x M` volume into `b`-cubes; boundary blocks may be
/// partial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub block: usize,
    pub fine: (usize, usize, usize),
    pub coarse: (usize, usize, usize),
}

impl BlockSpec {
    pub fn new(block: usize, g_extent: usize, y_extent: usize, labels: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::Config("block size must be at least 1".into()));
        }
        let up = |n: usize| n.div_ceil(block);
        Ok(BlockSpec {
            block,
            fine: (g_extent, y_extent, labels),
            coarse: (up(g_extent), up(y_extent), up(labels)),
        })
    }

    pub fn for_volume(block: usize, volume: &CostVolume) -> Result<Self> {
        Self::new(block, volume.g_extent(), volume.y_extent(), volume.labels())
    }

    /// Coarse `(W, H, S)` of a fine cross point.
    pub fn coarse_of(&self, w: usize, h: usize, s: usize) -> (usize, usize, usize) {
        (w / self.block, h / self.block, s / self.block)
    }
}

/// The delegate problem: summed data terms and a penalty scaled by `b`.
pub fn coarsen(volume: &CostVolume, params: &EnergyParams, spec: &BlockSpec) -> Result<(CostVolume, EnergyParams)> {
    let b = spec.block;
    let (g, y, m) = spec.fine;
    let (cg, cy, cm) = spec.coarse;
    if (volume.g_extent(), volume.y_extent(), volume.labels()) != (g, y, m) {
        return Err(Error::Config("block spec does not match the volume".into()));
    }
    let mut costs = vec![0i64; cg * cy * cm];
    for h in 0..y {
        for w in 0..g {
            let site = h * g + w;
            let base = ((h / b) * cg + w / b) * cm;
            for (s, &c) in volume.site_costs(site).iter().enumerate() {
                costs[base + s / b] += c;
            }
        }
    }
    let coarse_params = EnergyParams {
        penalty: params.penalty * b as i64,
        ..*params
    };
    Ok((CostVolume::new(cg, cy, cm, costs)?, coarse_params))
}

/// Per fine site, the labels whose block lies within `radius` blocks of the
/// coarse label: `[b (D - r), b (D + r + 1) - 1]` clamped to `[0, M)`.
pub fn thin_skin(coarse: &Labeling, spec: &BlockSpec, radius: usize) -> Result<Vec<(u32, u32)>> {
    let (g, y, m) = spec.fine;
    if (coarse.g_extent(), coarse.y_extent()) != (spec.coarse.0, spec.coarse.1) {
        return Err(Error::Config("coarse labeling does not match the block spec".into()));
    }
    let b = spec.block as i64;
    let r = radius as i64;
    let mut out = Vec::with_capacity(g * y);
    for h in 0..y {
        for w in 0..g {
            let d = coarse.get(w / spec.block, h / spec.block) as i64;
            let lo = (b * (d - r)).clamp(0, m as i64 - 1);
            let hi = (b * (d + r + 1) - 1).clamp(0, m as i64 - 1);
            out.push((lo as u32, hi as u32));
        }
    }
    Ok(out)
}

/// Shrinks intervals until every neighbor pair admits a step of at most one
/// from each of its labels (needed in hard-inhibit mode so no uncuttable arc
/// folds into a terminal).
pub fn tighten_for_hard_inhibit(intervals: &mut [(u32, u32)], g_extent: usize, y_extent: usize) -> Result<()> {
    let neighbors = crate::energy::NeighborSystem::new(g_extent, y_extent);
    let pairs: Vec<(usize, usize)> = neighbors.pairs().collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v) in &pairs {
            for (a, b) in [(u, v), (v, u)] {
                let (la, ha) = intervals[a];
                let (lb, hb) = intervals[b];
                let nl = lb.max(la.saturating_sub(1));
                let nh = hb.min(ha + 1);
                if nl > nh {
                    return Err(Error::Graph(format!("label band empties at site {b} under the hard inhibit")));
                }
                if (nl, nh) != (lb, hb) {
                    intervals[b] = (nl, nh);
                    changed = true;
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyConfig {
    pub block: usize,
    pub skin_radius: usize,
    pub solver: SolverConfig,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        HierarchyConfig {
            block: 2,
            skin_radius: 1,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HierarchyResult {
    /// The fine-stage result; its stats cover both stages.
    pub fine: CutResult,
    pub coarse: CutResult,
    pub intervals: Vec<(u32, u32)>,
    /// Free nodes of the restricted fine graph.
    pub skin_nodes: usize,
}

/// Fine graph over the skin, the coarse result and the per-site intervals.
type Restricted = (GridGraph, CutResult, Vec<(u32, u32)>);

fn restricted_graph(
    volume: &CostVolume,
    params: &EnergyParams,
    cfg: &HierarchyConfig,
) -> Result<Restricted> {
    let spec = BlockSpec::for_volume(cfg.block, volume)?;
    let t = Instant::now();
    let (coarse_volume, coarse_params) = coarsen(volume, params, &spec)?;
    let coarse_build = t.elapsed();
    let mut coarse = solve_exact(&coarse_volume, &coarse_params, &cfg.solver)?;
    coarse.stats.build_time += coarse_build;

    let t = Instant::now();
    let mut intervals = thin_skin(&coarse.labeling, &spec, cfg.skin_radius)?;
    if params.hard_inhibit {
        tighten_for_hard_inhibit(&mut intervals, volume.g_extent(), volume.y_extent())?;
    }
    let graph = build_graph(volume, params, Some(&intervals))?;
    coarse.stats.build_time += t.elapsed();
    Ok((graph, coarse, intervals))
}

fn merge(fine: &mut SolverStats, coarse: &SolverStats) {
    fine.build_time += coarse.build_time;
    fine.flow_time += coarse.flow_time;
    fine.extract_time += coarse.extract_time;
    fine.sweeps += coarse.sweeps;
    fine.rounds += coarse.rounds;
    fine.pushes += coarse.pushes;
    fine.relabels += coarse.relabels;
    fine.augmentations += coarse.augmentations;
}

/// Coarse exact cut, thin skin, exact cut of the restricted fine graph.
pub fn solve_level1(volume: &CostVolume, params: &EnergyParams, cfg: &HierarchyConfig) -> Result<HierarchyResult> {
    let (mut graph, coarse, intervals) = restricted_graph(volume, params, cfg)?;
    let skin_nodes = graph.network.node_count() - 2;
    let mut fine = solve_graph(&mut graph, volume, params, &cfg.solver)?;
    merge(&mut fine.stats, &coarse.stats);
    Ok(HierarchyResult {
        fine,
        coarse,
        intervals,
        skin_nodes,
    })
}

/// Block id of every node of a restricted graph: nodes are grouped by
/// `(W / b, H / b, level / b)`.
pub fn node_blocks(graph: &GridGraph, block: usize) -> Vec<u32> {
    let g = graph.g_extent();
    let cg = g.div_ceil(block);
    let cl = graph.labels().div_ceil(block);
    let mut out = vec![u32::MAX; graph.network.node_count()];
    for site in 0..graph.sites() {
        let (w, h) = (site % g, site / g);
        let (lo, _) = graph.interval(site);
        for (k, node) in graph.chain_nodes(site).enumerate() {
            let level = lo as usize + 1 + k;
            out[node as usize] = (((h / block) * cg + w / block) * cl + level / block) as u32;
        }
    }
    out
}

/// As level 1, but the fine cut is found by push-relabel with discharging
/// confined to `b x b x b` node blocks. Stops when no active node can reach
/// the sink, when a sweep moves no flow into the sink, or at the sweep cap;
/// `stats.stop` says which.
///
/// With `b = 1` blocks do not bind and this is level 1.
pub fn solve_level2(volume: &CostVolume, params: &EnergyParams, cfg: &HierarchyConfig) -> Result<HierarchyResult> {
    if cfg.block == 1 {
        return solve_level1(volume, params, cfg);
    }
    let (mut graph, coarse, intervals) = restricted_graph(volume, params, cfg)?;
    let skin_nodes = graph.network.node_count() - 2;
    let mut stats = SolverStats {
        nodes: graph.network.node_count(),
        edges: graph.network.edge_count(),
        ..Default::default()
    };
    let t = Instant::now();
    if cfg.solver.chain_init {
        stats.chain_flow = graph.saturate_chains();
    }
    let block_of = node_blocks(&graph, cfg.block);
    let blocks = Blocks {
        block_of: &block_of,
        max_block_nodes: cfg.block.pow(3),
    };
    let pr = confined_preflow(&mut graph.network, &cfg.solver.push_relabel, &blocks);
    stats.sweeps = pr.sweeps;
    stats.rounds = pr.rounds;
    stats.pushes = pr.pushes;
    stats.relabels = pr.relabels;
    stats.stop = pr.stop;
    stats.flow_time = t.elapsed();

    let t = Instant::now();
    let flow_value = graph.network.arcs(SINK).map(|a| -graph.network.flow(a)).sum();
    let (labeling, source_side) = extract_labeling_sink_side(&graph)?;
    let energy = volume_energy(&labeling, volume, params)?;
    stats.extract_time = t.elapsed();
    merge(&mut stats, &coarse.stats);
    Ok(HierarchyResult {
        fine: CutResult {
            flow_value,
            offset: graph.offset,
            energy,
            labeling,
            source_side,
            stats,
        },
        coarse,
        intervals,
        skin_nodes,
    })
}
