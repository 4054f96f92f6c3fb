//! Flat residual network in compressed sparse row form.
//!
//! Node 0 is the source and node 1 the sink. Every edge is stored as two
//! paired half-arcs; `mate[a]` is the reverse of arc `a`. Residual
//! capacities live in one flat array so solvers can update them in place.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const SOURCE: u32 = 0;
pub const SINK: u32 = 1;

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    first: Vec<u32>,
    head: Vec<u32>,
    mate: Vec<u32>,
    capacity: Vec<i64>,
    pub(crate) residual: Vec<i64>,
    edges: usize,
}

/// Collects edges, then lays them out in CSR order.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    nodes: usize,
    tail: Vec<u32>,
    head: Vec<u32>,
    cap: Vec<i64>,
    rev_cap: Vec<i64>,
}

impl NetworkBuilder {
    /// `nodes` includes the source and sink.
    pub fn new(nodes: usize) -> Self {
        assert!(nodes >= 2, "a network needs a source and a sink");
        NetworkBuilder {
            nodes,
            ..Default::default()
        }
    }

    pub fn with_capacity(nodes: usize, edges: usize) -> Self {
        let mut b = Self::new(nodes);
        b.tail.reserve(edges);
        b.head.reserve(edges);
        b.cap.reserve(edges);
        b.rev_cap.reserve(edges);
        b
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> usize {
        self.tail.len()
    }

    /// Adds `u -> v` with capacity `cap`; its paired reverse arc `v -> u`
    /// gets `rev_cap`.
    pub fn add_edge(&mut self, u: u32, v: u32, cap: i64, rev_cap: i64) {
        debug_assert!((u as usize) < self.nodes && (v as usize) < self.nodes);
        debug_assert!(cap >= 0 && rev_cap >= 0);
        self.tail.push(u);
        self.head.push(v);
        self.cap.push(cap);
        self.rev_cap.push(rev_cap);
    }

    pub fn finish(self) -> Result<FlowNetwork> {
        let n = self.nodes;
        let e = self.tail.len();
        let arcs = 2 * e;
        if arcs >= u32::MAX as usize || n >= u32::MAX as usize {
            return Err(Error::Graph(format!("{n} nodes / {arcs} arcs exceed 32-bit indexing")));
        }
        let mut first = vec![0u32; n + 1];
        for i in 0..e {
            first[self.tail[i] as usize + 1] += 1;
            first[self.head[i] as usize + 1] += 1;
        }
        for v in 0..n {
            first[v + 1] += first[v];
        }
        let mut fill: Vec<u32> = first[..n].to_vec();
        let mut head = vec![0u32; arcs];
        let mut mate = vec![0u32; arcs];
        let mut capacity = vec![0i64; arcs];
        for i in 0..e {
            let (u, v) = (self.tail[i] as usize, self.head[i] as usize);
            let a = fill[u];
            fill[u] += 1;
            let b = fill[v];
            fill[v] += 1;
            head[a as usize] = v as u32;
            head[b as usize] = u as u32;
            mate[a as usize] = b;
            mate[b as usize] = a;
            capacity[a as usize] = self.cap[i];
            capacity[b as usize] = self.rev_cap[i];
        }
        let residual = capacity.clone();
        Ok(FlowNetwork {
            first,
            head,
            mate,
            capacity,
            residual,
            edges: e,
        })
    }
}

impl FlowNetwork {
    pub fn node_count(&self) -> usize {
        self.first.len() - 1
    }

    /// Number of edges (paired half-arcs count once).
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn arc_count(&self) -> usize {
        self.head.len()
    }

    #[inline]
    pub fn arcs(&self, v: u32) -> std::ops::Range<usize> {
        self.first[v as usize] as usize..self.first[v as usize + 1] as usize
    }

    #[inline]
    pub fn head(&self, a: usize) -> u32 {
        self.head[a]
    }

    #[inline]
    pub fn mate(&self, a: usize) -> usize {
        self.mate[a] as usize
    }

    #[inline]
    pub fn capacity(&self, a: usize) -> i64 {
        self.capacity[a]
    }

    #[inline]
    pub fn residual(&self, a: usize) -> i64 {
        self.residual[a]
    }

    /// Net flow on arc `a` (negative when flow runs along its mate).
    #[inline]
    pub fn flow(&self, a: usize) -> i64 {
        self.capacity[a] - self.residual[a]
    }

    /// Moves `delta` units along arc `a`.
    #[inline]
    pub fn push(&mut self, a: usize, delta: i64) {
        self.residual[a] -= delta;
        let m = self.mate[a] as usize;
        self.residual[m] += delta;
    }

    /// Discards all flow.
    pub fn reset(&mut self) {
        self.residual.copy_from_slice(&self.capacity);
    }

    /// Net flow into the sink.
    pub fn flow_value(&self) -> i64 {
        self.arcs(SINK).map(|a| -self.flow(a)).sum()
    }

    /// Net inflow minus outflow at every node.
    pub fn excesses(&self) -> Vec<i64> {
        let n = self.node_count();
        let mut ex = vec![0i64; n];
        for v in 0..n as u32 {
            for a in self.arcs(v) {
                ex[v as usize] -= self.flow(a);
            }
        }
        ex
    }

    /// Checks capacity constraints and conservation at every inner node.
    pub fn check_flow(&self) -> Result<()> {
        for a in 0..self.arc_count() {
            let r = self.residual[a];
            if r < 0 {
                return Err(Error::Graph(format!("arc {a} has negative residual {r}")));
            }
            if self.flow(a) != -self.flow(self.mate(a)) {
                return Err(Error::Graph(format!("arc {a} and its mate disagree on flow")));
            }
        }
        for (v, &e) in self.excesses().iter().enumerate().skip(2) {
            if e != 0 {
                return Err(Error::Graph(format!("node {v} violates conservation by {e}")));
            }
        }
        Ok(())
    }

    /// Nodes reachable from `from` along arcs with positive residual.
    pub fn reachable_from(&self, from: u32) -> Vec<bool> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from as usize] = true;
        while let Some(v) = stack.pop() {
            for a in self.arcs(v) {
                let w = self.head[a];
                if self.residual[a] > 0 && !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Nodes with a positive-residual path into `to`.
    pub fn reaching(&self, to: u32) -> Vec<bool> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![to];
        seen[to as usize] = true;
        while let Some(v) = stack.pop() {
            for a in self.arcs(v) {
                let w = self.head[a];
                if self.residual[self.mate[a] as usize] > 0 && !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Total capacity of arcs leaving `source_side`.
    pub fn cut_capacity(&self, source_side: &[bool]) -> i64 {
        let mut total = 0i64;
        for v in 0..self.node_count() as u32 {
            if !source_side[v as usize] {
                continue;
            }
            for a in self.arcs(v) {
                if !source_side[self.head[a] as usize] {
                    total = total.saturating_add(self.capacity[a]);
                }
            }
        }
        total
    }

    /// DIMACS max-flow text: `p max N E`, source/sink lines, then one
    /// `a u v cap` line per half-arc with positive capacity (1-based ids).
    pub fn to_dimacs(&self) -> String {
        let arcs: Vec<(u32, u32, i64)> = (0..self.node_count() as u32)
            .flat_map(|v| self.arcs(v).map(move |a| (v, a)))
            .filter(|&(_, a)| self.capacity[a] > 0)
            .map(|(v, a)| (v, self.head[a], self.capacity[a]))
            .collect();
        let mut out = String::new();
        let _ = writeln!(out, "c gazecut flow network");
        let _ = writeln!(out, "p max {} {}", self.node_count(), arcs.len());
        let _ = writeln!(out, "n {} s", SOURCE + 1);
        let _ = writeln!(out, "n {} t", SINK + 1);
        for (u, v, c) in arcs {
            let _ = writeln!(out, "a {} {} {}", u + 1, v + 1, c);
        }
        out
    }

    /// Parses the subset of DIMACS written by [`FlowNetwork::to_dimacs`];
    /// the source and sink must be nodes 1 and 2.
    pub fn from_dimacs(text: &str) -> Result<FlowNetwork> {
        let bad = |line: &str| Error::Graph(format!("bad DIMACS line '{line}'"));
        let mut builder: Option<NetworkBuilder> = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("c") => {}
                Some("p") => {
                    let nodes: usize = it.nth(1).and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
                    builder = Some(NetworkBuilder::new(nodes.max(2)));
                }
                Some("n") => {
                    let id: u32 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
                    let expected = match it.next() {
                        Some("s") => SOURCE + 1,
                        Some("t") => SINK + 1,
                        _ => return Err(bad(line)),
                    };
                    if id != expected {
                        return Err(Error::Graph(format!("terminal '{line}' must be node {expected}")));
                    }
                }
                Some("a") => {
                    let b = builder.as_mut().ok_or_else(|| bad(line))?;
                    let nums: Vec<i64> = it.map(|t| t.parse().map_err(|_| bad(line))).collect::<Result<_>>()?;
                    if nums.len() != 3 || nums[0] < 1 || nums[1] < 1 || nums[2] < 0 {
                        return Err(bad(line));
                    }
                    let (u, v) = (nums[0] as u32 - 1, nums[1] as u32 - 1);
                    if u as usize >= b.nodes() || v as usize >= b.nodes() {
                        return Err(bad(line));
                    }
                    b.add_edge(u, v, nums[2], 0);
                }
                _ => return Err(bad(line)),
            }
        }
        builder.ok_or_else(|| Error::Graph("missing problem line".into()))?.finish()
    }
}
