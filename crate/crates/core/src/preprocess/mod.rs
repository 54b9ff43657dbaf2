//! Node ordering and contraction.

mod contraction;
mod ordering;

use std::collections::HashMap;

use crate::tdgraph::{EdgeWeight, Hierarchy, Mode, NodeId, NodeOrder, TdGraph};
use crate::ttf::Ttf;

pub use contraction::{Overlay, OverlayView};
pub use ordering::{order_nodes, OrderingKind, OrderingStrategy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionConfig {
    pub mode: Mode,
    /// Queue pops per witness search before giving up (and keeping the shortcut).
    pub settle_limit: usize,
    /// Witness paths longer than this many edges are not explored.
    pub hop_limit: u32,
    /// Labels and composed bounds with more breakpoints get re-approximated
    /// (approximate mode only).
    pub reapprox_points: usize,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig { mode: Mode::Exact, settle_limit: 50, hop_limit: 16, reapprox_points: 64 }
    }
}

impl ContractionConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn approx(epsilon: f64) -> Self {
        assert!(epsilon >= 0.0, "epsilon must be non-negative");
        ContractionConfig { mode: Mode::Approx(epsilon), ..Self::default() }
    }
}

/// Contracts all nodes in ascending rank.
pub fn build_hierarchy(graph: &TdGraph, order: &NodeOrder, config: &ContractionConfig) -> Hierarchy {
    build_hierarchy_with(graph, order, config, |_, _| {})
}

/// Like [`build_hierarchy`], calling `after_step(overlay, v)` after each
/// contraction of `v`.
pub fn build_hierarchy_with(
    graph: &TdGraph,
    order: &NodeOrder,
    config: &ContractionConfig,
    mut after_step: impl FnMut(&Overlay, NodeId),
) -> Hierarchy {
    assert_eq!(order.len(), graph.node_count(), "order does not match graph");
    let mut overlay = Overlay::new(graph, config.mode);
    for v in order.sequence() {
        overlay.contract_node(v, config);
        after_step(&overlay, v);
    }
    Hierarchy::new(graph.clone(), order.clone(), config.mode, overlay.into_hierarchy_edges())
        .expect("contraction yields a consistent hierarchy")
}

/// Orders the nodes and contracts them.
pub fn preprocess(graph: &TdGraph, strategy: &OrderingStrategy, config: &ContractionConfig) -> Hierarchy {
    let order = order_nodes(graph, strategy);
    build_hierarchy(graph, &order, config)
}

/// Replaces every shortcut's bounds by its exact travel-time function, linked
/// from the envelopes of its constituents. Shortcuts are processed by the rank
/// of their middle node, so constituents are always exact already.
pub fn condense(hierarchy: &Hierarchy) -> Hierarchy {
    let order = hierarchy.order();
    let mut exact: Vec<Option<Ttf>> = hierarchy.edges().iter().map(|e| e.weight.exact().cloned()).collect();
    let mut pending: Vec<usize> = (0..hierarchy.edges().len()).filter(|&i| hierarchy.edges()[i].is_shortcut()).collect();
    pending.sort_by_key(|&i| (order.rank(hierarchy.edges()[i].middle.unwrap()), i));

    let mut envelopes: HashMap<(NodeId, NodeId), Ttf> = HashMap::new();
    for i in pending {
        let e = &hierarchy.edges()[i];
        let m = e.middle.unwrap();
        let mut envelope = |a: NodeId, b: NodeId| -> Ttf {
            envelopes
                .entry((a, b))
                .or_insert_with(|| {
                    hierarchy
                        .between(a, b)
                        .iter()
                        .map(|&id| exact[id as usize].as_ref().expect("constituent condensed before use"))
                        .fold(None::<Ttf>, |acc, f| Some(acc.map_or_else(|| f.clone(), |g| g.minimum_unchecked(f))))
                        .expect("constituent pair exists")
                })
                .clone()
        };
        let first = envelope(e.tail, m);
        let second = envelope(m, e.head);
        exact[i] = Some(first.link_unchecked(&second));
    }

    let edges = hierarchy
        .edges()
        .iter()
        .zip(exact)
        .map(|(e, f)| {
            let mut e = e.clone();
            e.weight = EdgeWeight::Exact(f.expect("every edge condensed"));
            e
        })
        .collect();
    Hierarchy::new(hierarchy.graph().clone(), order.clone(), Mode::Exact, edges).expect("condensed hierarchy is consistent")
}
