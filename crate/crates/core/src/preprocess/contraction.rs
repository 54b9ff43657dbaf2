//! The shrinking overlay graph used while contracting nodes.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::ContractionConfig;
use crate::search::{profile_dijkstra, Coarsening, GraphView, ProfileOptions};
use crate::tdgraph::{EdgeId, EdgeWeight, HierarchyEdge, HierarchyEdgeId, Mode, NodeId, TdGraph};
use crate::ttf::{BoundPair, TimeInterval, Ttf};

/// Remaining nodes with at most one edge per ordered pair: the envelope of
/// every original edge and shortcut between them. Collects the hierarchy edges
/// produced so far.
#[derive(Debug, Clone)]
pub struct Overlay {
    period: f64,
    mode: Mode,
    out: Vec<BTreeMap<NodeId, EdgeWeight>>,
    inc: Vec<BTreeSet<NodeId>>,
    alive: Vec<bool>,
    edges: Vec<HierarchyEdge>,
}

/// A shortcut accepted while contracting one node.
#[derive(Debug, Clone)]
struct Accepted {
    tail: NodeId,
    head: NodeId,
    weight: EdgeWeight,
    validity: Vec<TimeInterval>,
}

impl Overlay {
    pub fn new(graph: &TdGraph, mode: Mode) -> Overlay {
        let n = graph.node_count();
        let mut out: Vec<BTreeMap<NodeId, EdgeWeight>> = vec![BTreeMap::new(); n];
        let mut inc = vec![BTreeSet::new(); n];
        let mut edges = Vec::with_capacity(graph.edge_count());
        for (i, e) in graph.edges().iter().enumerate() {
            edges.push(HierarchyEdge::original(i as EdgeId, e.tail, e.head, e.ttf.clone()));
            let slot = out[e.tail as usize].entry(e.head);
            match slot {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(EdgeWeight::Exact(e.ttf.clone()));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let merged = merge(o.get(), &EdgeWeight::Exact(e.ttf.clone()));
                    o.insert(merged);
                }
            }
            inc[e.head as usize].insert(e.tail);
        }
        Overlay { period: graph.period(), mode, out, inc, alive: vec![true; n], edges }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_alive(&self, v: NodeId) -> bool {
        self.alive[v as usize]
    }

    pub fn alive_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(v, _)| v as NodeId)
    }

    /// The merged weight of the overlay edge `tail -> head`, if any.
    pub fn weight(&self, tail: NodeId, head: NodeId) -> Option<&EdgeWeight> {
        self.out[tail as usize].get(&head)
    }

    pub fn out_neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, &EdgeWeight)> + '_ {
        self.out[v as usize].iter().map(|(&w, weight)| (w, weight))
    }

    pub fn in_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.inc[v as usize].iter().copied()
    }

    /// Hierarchy edges collected so far: all original edges, then shortcuts in
    /// creation order.
    pub fn hierarchy_edges(&self) -> &[HierarchyEdge] {
        &self.edges
    }

    pub fn into_hierarchy_edges(self) -> Vec<HierarchyEdge> {
        self.edges
    }

    /// Search view over the remaining nodes. Exact weights in exact mode,
    /// upper bounds otherwise.
    pub fn view(&self) -> OverlayView<'_> {
        OverlayView { overlay: self, skip: None }
    }

    /// Contracts `v`: inserts a shortcut `(u, w)` for every pair of neighbours
    /// for which the path through `v` may be faster than every witness path
    /// avoiding `v`, then removes `v`. Returns the ids of the new shortcuts.
    pub fn contract_node(&mut self, v: NodeId, config: &ContractionConfig) -> Vec<HierarchyEdgeId> {
        assert!(self.alive[v as usize], "node {v} already contracted");
        let ins: Vec<NodeId> = self.inc[v as usize].iter().copied().collect();
        let accepted: Vec<Vec<Accepted>> = if ins.len() > 1 {
            ins.par_iter().map(|&u| self.shortcuts_from(u, v, config)).collect()
        } else {
            ins.iter().map(|&u| self.shortcuts_from(u, v, config)).collect()
        };

        let mut ids = Vec::new();
        for a in accepted.into_iter().flatten() {
            ids.push(self.edges.len() as HierarchyEdgeId);
            self.edges.push(HierarchyEdge {
                tail: a.tail,
                head: a.head,
                weight: a.weight.clone(),
                middle: Some(v),
                original: None,
                validity: Some(a.validity),
            });
            let merged = match self.out[a.tail as usize].get(&a.head) {
                Some(old) => merge(old, &a.weight),
                None => a.weight,
            };
            self.out[a.tail as usize].insert(a.head, merged);
            self.inc[a.head as usize].insert(a.tail);
        }

        let ins = std::mem::take(&mut self.inc[v as usize]);
        let outs = std::mem::take(&mut self.out[v as usize]);
        for u in ins {
            self.out[u as usize].remove(&v);
        }
        for w in outs.into_keys() {
            self.inc[w as usize].remove(&v);
        }
        self.alive[v as usize] = false;
        ids
    }

    fn shortcuts_from(&self, u: NodeId, v: NodeId, config: &ContractionConfig) -> Vec<Accepted> {
        let first = &self.out[u as usize][&v];
        let mut candidates: Vec<(NodeId, EdgeWeight)> = Vec::new();
        for (&w, second) in &self.out[v as usize] {
            if w == u {
                continue;
            }
            candidates.push((w, self.chain(first, second, config)));
        }
        if candidates.is_empty() {
            return Vec::new();
        }

        let targets: Vec<NodeId> = candidates.iter().map(|c| c.0).collect();
        let stop_above = candidates.iter().map(|c| c.1.lower().global_max()).fold(0.0, f64::max);
        let coarsening = match self.mode {
            Mode::Exact => None,
            Mode::Approx(epsilon) => Some(Coarsening { epsilon, max_points: config.reapprox_points }),
        };
        let opts = ProfileOptions {
            targets: Some(&targets),
            settle_limit: Some(config.settle_limit),
            hop_limit: Some(config.hop_limit),
            stop_above: Some(stop_above),
            coarsening,
        };
        let view = OverlayView { overlay: self, skip: Some(v) };
        let witness = profile_dijkstra(&view, u, &opts);

        let full = vec![TimeInterval::new(0.0, self.period)];
        candidates
            .into_iter()
            .filter_map(|(w, weight)| {
                // Labels of a truncated search are still upper bounds formed by
                // real paths avoiding `v`, so they can rule candidates out.
                let validity = match witness.label(w) {
                    None => full.clone(),
                    Some(d) => {
                        let iv = weight.lower().undercut_unchecked(d);
                        if iv.is_empty() {
                            return None;
                        }
                        iv
                    }
                };
                Some(Accepted { tail: u, head: w, weight, validity })
            })
            .collect()
    }

    /// Weight of the path `first` then `second`. Exact in exact mode; in
    /// approximate mode pairs of original edges are linked exactly and then
    /// approximated, anything involving a shortcut is combined bound-wise.
    fn chain(&self, first: &EdgeWeight, second: &EdgeWeight, config: &ContractionConfig) -> EdgeWeight {
        match (self.mode, first, second) {
            (Mode::Exact, EdgeWeight::Exact(a), EdgeWeight::Exact(b)) => EdgeWeight::Exact(a.link_unchecked(b)),
            (Mode::Exact, _, _) => unreachable!("bounds in an exact overlay"),
            (Mode::Approx(eps), EdgeWeight::Exact(a), EdgeWeight::Exact(b)) => {
                let exact = a.link_unchecked(b);
                if eps == 0.0 {
                    return EdgeWeight::Bounds(BoundPair::exact(exact));
                }
                EdgeWeight::Bounds(exact.approximate(eps).expect("non-negative epsilon"))
            }
            (Mode::Approx(eps), a, b) => {
                let linked = a.to_bounds().link(&b.to_bounds());
                if linked.lower.len() > config.reapprox_points || linked.upper.len() > config.reapprox_points {
                    EdgeWeight::Bounds(linked.coarsen(eps))
                } else {
                    EdgeWeight::Bounds(linked)
                }
            }
        }
    }
}

fn merge(old: &EdgeWeight, new: &EdgeWeight) -> EdgeWeight {
    match (old, new) {
        (EdgeWeight::Exact(a), EdgeWeight::Exact(b)) => EdgeWeight::Exact(a.minimum_unchecked(b)),
        (a, b) => EdgeWeight::Bounds(a.to_bounds().minimum(&b.to_bounds())),
    }
}

/// Overlay as a [`GraphView`], optionally hiding one node.
pub struct OverlayView<'a> {
    overlay: &'a Overlay,
    skip: Option<NodeId>,
}

impl GraphView for OverlayView<'_> {
    fn node_count(&self) -> usize {
        self.overlay.alive.len()
    }

    fn period(&self) -> f64 {
        self.overlay.period
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, mut visit: F) {
        if Some(node) == self.skip {
            return;
        }
        for (&w, weight) in &self.overlay.out[node as usize] {
            if Some(w) != self.skip {
                visit(0, w, weight.upper());
            }
        }
    }
}
