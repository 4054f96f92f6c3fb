//! Exact labeling by a single minimum cut.

mod build;
mod network;
mod push_relabel;
mod reference;

use std::time::{Duration, Instant};

pub use build::{build_graph, full_edge_count, GridGraph};
pub use network::{FlowNetwork, NetworkBuilder, SINK, SOURCE};
pub use push_relabel::{confined_preflow, Blocks, PushRelabelConfig, PushRelabelStats, StopReason};
pub use reference::{augment_to_max, AugmentStats};

use crate::energy::{volume_energy, CostVolume, EnergyParams, Labeling};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Shortest augmenting paths.
    Reference,
    #[default]
    PushRelabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub push_relabel: PushRelabelConfig,
    /// Pre-push the bottleneck flow of every chain before solving.
    pub chain_init: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kind: SolverKind::default(),
            push_relabel: PushRelabelConfig::default(),
            chain_init: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub nodes: usize,
    pub edges: usize,
    pub sweeps: usize,
    pub rounds: usize,
    pub pushes: u64,
    pub relabels: u64,
    pub augmentations: usize,
    /// Flow sent by chain saturation before the solver proper ran.
    pub chain_flow: i64,
    pub stop: StopReason,
    pub build_time: Duration,
    pub flow_time: Duration,
    pub extract_time: Duration,
}

impl SolverStats {
    fn absorb(&mut self, pr: &PushRelabelStats) {
        self.sweeps += pr.sweeps;
        self.rounds += pr.rounds;
        self.pushes += pr.pushes + pr.return_pushes;
        self.relabels += pr.relabels;
        self.stop = pr.stop;
    }

    pub fn total_time(&self) -> Duration {
        self.build_time + self.flow_time + self.extract_time
    }
}

#[derive(Debug, Clone)]
pub struct CutResult {
    /// Flow delivered to the sink.
    pub flow_value: i64,
    /// Constant energy folded out of the network by label restrictions.
    pub offset: i64,
    /// `E` of the extracted labeling.
    pub energy: i64,
    pub labeling: Labeling,
    pub source_side: Vec<bool>,
    pub stats: SolverStats,
}

/// Maximum flow by shortest augmenting paths.
pub fn maxflow_reference(net: &mut FlowNetwork) -> AugmentStats {
    reference::augment_to_max(net).1
}

/// Maximum flow by push-relabel; the network ends up carrying a valid flow.
pub fn maxflow_push_relabel(net: &mut FlowNetwork, cfg: &PushRelabelConfig) -> PushRelabelStats {
    push_relabel::maxflow(net, cfg)
}

/// Labels from the minimal source side of a solved network.
pub fn extract_labeling(graph: &GridGraph) -> Result<(Labeling, Vec<bool>)> {
    let side = graph.network.reachable_from(SOURCE);
    labeling_from_side(graph, side)
}

/// Labels from the source side `V \ {v : v reaches the sink}`, which is a
/// valid cut for a preflow as well as for a flow.
pub fn extract_labeling_sink_side(graph: &GridGraph) -> Result<(Labeling, Vec<bool>)> {
    let side: Vec<bool> = graph.network.reaching(SINK).into_iter().map(|r| !r).collect();
    labeling_from_side(graph, side)
}

fn labeling_from_side(graph: &GridGraph, side: Vec<bool>) -> Result<(Labeling, Vec<bool>)> {
    let labels = graph.labels_from_cut(&side)?;
    Ok((Labeling::new(graph.g_extent(), graph.y_extent(), labels)?, side))
}

/// Runs the configured solver to a maximum flow on `graph` and extracts the
/// minimal cut. Checks `flow + offset = E(labeling)`.
pub fn solve_graph(
    graph: &mut GridGraph,
    volume: &CostVolume,
    params: &EnergyParams,
    cfg: &SolverConfig,
) -> Result<CutResult> {
    let mut stats = SolverStats {
        nodes: graph.network.node_count(),
        edges: graph.network.edge_count(),
        ..Default::default()
    };
    let t = Instant::now();
    if cfg.chain_init {
        stats.chain_flow = graph.saturate_chains();
    }
    match cfg.kind {
        SolverKind::Reference => {
            let (_, s) = reference::augment_to_max(&mut graph.network);
            stats.augmentations = s.augmentations;
            stats.sweeps = s.phases;
        }
        SolverKind::PushRelabel => {
            let s = push_relabel::maxflow(&mut graph.network, &cfg.push_relabel);
            stats.absorb(&s);
            if s.stop == StopReason::SweepCap {
                return Err(Error::SolverCap(format!("{} sweeps without convergence", s.sweeps)));
            }
        }
    }
    stats.flow_time = t.elapsed();

    let t = Instant::now();
    let flow_value = graph.network.flow_value();
    let (labeling, source_side) = extract_labeling(graph)?;
    let energy = volume_energy(&labeling, volume, params)?;
    stats.extract_time = t.elapsed();
    if flow_value + graph.offset != energy {
        return Err(Error::Graph(format!(
            "cut identity violated: flow {flow_value} + offset {} != energy {energy}",
            graph.offset
        )));
    }
    Ok(CutResult {
        flow_value,
        offset: graph.offset,
        energy,
        labeling,
        source_side,
        stats,
    })
}

/// Globally minimal labeling of `volume`.
pub fn solve_exact(volume: &CostVolume, params: &EnergyParams, cfg: &SolverConfig) -> Result<CutResult> {
    let t = Instant::now();
    let mut graph = build_graph(volume, params, None)?;
    let build_time = t.elapsed();
    let mut result = solve_graph(&mut graph, volume, params, cfg)?;
    result.stats.build_time = build_time;
    Ok(result)
}
