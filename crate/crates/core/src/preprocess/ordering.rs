//! Static node ordering: simulated contraction on scalarized weights.

use std::collections::{BTreeMap, BTreeSet};

use crate::search::queue::QuadHeap;
use crate::tdgraph::{NodeId, NodeOrder, TdGraph};

/// How travel-time functions are turned into scalars for ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderingKind {
    /// Time-averaged travel time of each edge.
    AverageWeight,
    /// Travel times at `k` evenly spaced departures; priorities are averaged
    /// over the samples.
    DepartureSamples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingStrategy {
    pub kind: OrderingKind,
    pub edge_difference_weight: f64,
    pub deleted_neighbors_weight: f64,
}

impl Default for OrderingStrategy {
    fn default() -> Self {
        OrderingStrategy { kind: OrderingKind::AverageWeight, edge_difference_weight: 1.0, deleted_neighbors_weight: 1.0 }
    }
}

impl OrderingStrategy {
    pub fn samples(k: usize) -> Self {
        OrderingStrategy { kind: OrderingKind::DepartureSamples(k.max(1)), ..Default::default() }
    }
}

const WITNESS_SETTLE_LIMIT: usize = 64;

struct StaticOverlay {
    samples: usize,
    out: Vec<BTreeMap<NodeId, Vec<f64>>>,
    inc: Vec<BTreeSet<NodeId>>,
}

impl StaticOverlay {
    fn new(graph: &TdGraph, kind: OrderingKind) -> Self {
        let n = graph.node_count();
        let samples = match kind {
            OrderingKind::AverageWeight => 1,
            OrderingKind::DepartureSamples(k) => k.max(1),
        };
        let mut out: Vec<BTreeMap<NodeId, Vec<f64>>> = vec![BTreeMap::new(); n];
        let mut inc = vec![BTreeSet::new(); n];
        for e in graph.edges() {
            let w: Vec<f64> = match kind {
                OrderingKind::AverageWeight => vec![e.ttf.mean()],
                OrderingKind::DepartureSamples(_) => {
                    (0..samples).map(|j| e.ttf.eval(j as f64 * graph.period() / samples as f64)).collect()
                }
            };
            merge_min(out[e.tail as usize].entry(e.head).or_insert_with(|| vec![f64::INFINITY; samples]), &w);
            inc[e.head as usize].insert(e.tail);
        }
        StaticOverlay { samples, out, inc }
    }

    /// Distances from `source` avoiding `skip`, per sample, bounded by
    /// `limit` and the settle cap.
    fn witness(&self, source: NodeId, skip: NodeId, sample: usize, limit: f64, dist: &mut BTreeMap<NodeId, f64>) {
        dist.clear();
        let mut settled = BTreeSet::new();
        let mut queue = QuadHeap::new();
        dist.insert(source, 0.0);
        queue.push(0.0, source, 0);
        while let Some(e) = queue.pop() {
            if e.key > limit || settled.len() >= WITNESS_SETTLE_LIMIT {
                break;
            }
            if !settled.insert(e.node) {
                continue;
            }
            for (&x, w) in &self.out[e.node as usize] {
                if x == skip {
                    continue;
                }
                let d = e.key + w[sample];
                if dist.get(&x).is_none_or(|&old| d < old) {
                    dist.insert(x, d);
                    queue.push(d, x, 0);
                }
            }
        }
    }

    /// Shortcuts contracting `v` would need: `(u, w, weights, needed per sample)`.
    fn simulate(&self, v: NodeId) -> Vec<(NodeId, NodeId, Vec<f64>, Vec<bool>)> {
        let mut shortcuts = Vec::new();
        let mut dist = BTreeMap::new();
        for &u in &self.inc[v as usize] {
            let w_uv = &self.out[u as usize][&v];
            let targets: Vec<(NodeId, Vec<f64>)> = self.out[v as usize]
                .iter()
                .filter(|(&w, _)| w != u)
                .map(|(&w, w_vw)| (w, w_uv.iter().zip(w_vw).map(|(a, b)| a + b).collect()))
                .collect();
            if targets.is_empty() {
                continue;
            }
            let mut needed = vec![vec![false; self.samples]; targets.len()];
            for s in 0..self.samples {
                let limit = targets.iter().map(|t| t.1[s]).fold(0.0, f64::max);
                self.witness(u, v, s, limit, &mut dist);
                for (i, (w, via)) in targets.iter().enumerate() {
                    let d = dist.get(w).copied().unwrap_or(f64::INFINITY);
                    needed[i][s] = d > via[s] * (1.0 + 1e-12);
                }
            }
            for ((w, via), need) in targets.into_iter().zip(needed) {
                if need.iter().any(|&b| b) {
                    shortcuts.push((u, w, via, need));
                }
            }
        }
        shortcuts
    }

    fn degree(&self, v: NodeId) -> usize {
        self.out[v as usize].len() + self.inc[v as usize].len()
    }

    fn contract(&mut self, v: NodeId) -> BTreeSet<NodeId> {
        for (u, w, via, _) in self.simulate(v) {
            merge_min(self.out[u as usize].entry(w).or_insert_with(|| vec![f64::INFINITY; self.samples]), &via);
            self.inc[w as usize].insert(u);
        }
        let ins = std::mem::take(&mut self.inc[v as usize]);
        let outs = std::mem::take(&mut self.out[v as usize]);
        for &u in &ins {
            self.out[u as usize].remove(&v);
        }
        for &w in outs.keys() {
            self.inc[w as usize].remove(&v);
        }
        ins.into_iter().chain(outs.into_keys()).collect()
    }
}

fn merge_min(target: &mut [f64], w: &[f64]) {
    for (t, &x) in target.iter_mut().zip(w) {
        *t = t.min(x);
    }
}

/// Orders nodes by repeatedly contracting the one with the smallest priority
/// `edge_difference + deleted_neighbors` (weighted), with lazy priority
/// updates and ties broken by node id.
pub fn order_nodes(graph: &TdGraph, strategy: &OrderingStrategy) -> NodeOrder {
    let n = graph.node_count();
    let mut overlay = StaticOverlay::new(graph, strategy.kind);
    let mut deleted = vec![0usize; n];

    let priority = |overlay: &StaticOverlay, deleted: &[usize], v: NodeId| -> f64 {
        let shortcuts = overlay.simulate(v);
        let added: usize = shortcuts.iter().map(|s| s.3.iter().filter(|&&b| b).count()).sum();
        let edge_difference = added as f64 / overlay.samples as f64 - overlay.degree(v) as f64;
        strategy.edge_difference_weight * edge_difference + strategy.deleted_neighbors_weight * deleted[v as usize] as f64
    };

    let mut queue = QuadHeap::new();
    for v in 0..n as NodeId {
        queue.push(priority(&overlay, &deleted, v), v, 0);
    }
    let mut sequence = Vec::with_capacity(n);
    while let Some(top) = queue.pop() {
        let v = top.node;
        let p = priority(&overlay, &deleted, v);
        if let Some(next) = queue.peek() {
            if p.total_cmp(&next.key).then(v.cmp(&next.node)).is_gt() {
                queue.push(p, v, 0);
                continue;
            }
        }
        sequence.push(v);
        for x in overlay.contract(v) {
            deleted[x as usize] += 1;
        }
    }
    NodeOrder::from_sequence(&sequence).expect("every node contracted once")
}
