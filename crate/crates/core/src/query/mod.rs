//! Earliest-arrival and profile queries on a hierarchy.
//!
//! Every query first explores the nodes that can reach the target through
//! downward edges ([`backward_mark`]) and then searches forward from the source
//! over upward edges plus the downward edges found that way.

mod atch;
mod backward;
mod tch;

use thiserror::Error;

use crate::search::GraphView;
use crate::tdgraph::{EdgeId, Hierarchy, HierarchyEdgeId, NodeId, PathResult};
use crate::ttf::Ttf;

pub use atch::atch_query;
pub use backward::{backward_mark, BackwardMethod, BackwardSpace};
pub use tch::{profile_query, profile_query_graph, profile_query_with_stats, pruned_tch_query, tch_query, Pruning};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("{algorithm} needs a{} hierarchy", if *.needs_exact { "n exact" } else { "n approximate" })]
    WrongMode { algorithm: &'static str, needs_exact: bool },
    #[error("hierarchy edges {index} and {} are not connected", .index + 1)]
    Disconnected { index: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Nodes settled by the forward search(es).
    pub settled: usize,
    pub relaxed: usize,
    /// Nodes that can reach the target in the downward graph.
    pub reached: usize,
    pub marked_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub source: NodeId,
    pub target: NodeId,
    pub departure: f64,
    /// `None` if the target cannot be reached.
    pub arrival: Option<f64>,
    pub path: Option<PathResult>,
    pub stats: QueryStats,
}

impl QueryResult {
    pub(crate) fn trivial(node: NodeId, departure: f64) -> Self {
        QueryResult {
            source: node,
            target: node,
            departure,
            arrival: Some(departure),
            path: Some(PathResult { departure, edges: vec![], departures: vec![], travel_time: 0.0 }),
            stats: QueryStats::default(),
        }
    }

    pub(crate) fn unreachable(source: NodeId, target: NodeId, departure: f64, stats: QueryStats) -> Self {
        QueryResult { source, target, departure, arrival: None, path: None, stats }
    }

    pub fn travel_time(&self) -> Option<f64> {
        self.arrival.map(|a| a - self.departure)
    }

    pub fn is_reachable(&self) -> bool {
        self.arrival.is_some()
    }
}

pub(crate) fn check_nodes(node_count: usize, nodes: &[NodeId]) -> Result<(), QueryError> {
    match nodes.iter().find(|&&v| v as usize >= node_count) {
        Some(&node) => Err(QueryError::NodeOutOfRange { node, node_count }),
        None => Ok(()),
    }
}

/// Expands a connected walk of hierarchy edges entered at `departure` into
/// original edges with per-edge departure times.
pub fn unpack_path(h: &Hierarchy, edges: &[HierarchyEdgeId], departure: f64) -> Result<PathResult, QueryError> {
    for (index, pair) in edges.windows(2).enumerate() {
        if h.edge(pair[0]).head != h.edge(pair[1]).tail {
            return Err(QueryError::Disconnected { index });
        }
    }
    let mut original: Vec<EdgeId> = Vec::new();
    let mut t = departure;
    for &id in edges {
        t = h.unpack_into(id, t, &mut original);
    }
    Ok(PathResult::evaluate(h.graph(), original, departure))
}

/// Upward edges plus downward edges into reached nodes, in travel direction.
/// Edges carry their exact weight, or the lower bound in approximate mode.
pub(crate) struct UpMarkedView<'a> {
    pub h: &'a Hierarchy,
    pub reached: &'a [bool],
}

impl GraphView for UpMarkedView<'_> {
    fn node_count(&self) -> usize {
        self.h.node_count()
    }

    fn period(&self) -> f64 {
        self.h.period()
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, mut visit: F) {
        let weight = |id: HierarchyEdgeId| self.h.edge(id).weight.lower();
        for &id in self.h.up_out(node) {
            visit(id, self.h.edge(id).head, weight(id));
        }
        for &id in self.h.down_out(node) {
            let head = self.h.edge(id).head;
            if self.reached[head as usize] {
                visit(id, head, weight(id));
            }
        }
    }
}

/// Downward edges reversed: leaving `y` towards `x` for every `(x, y)`, with
/// lower-bound weights.
pub(crate) struct ReverseDownView<'a> {
    pub h: &'a Hierarchy,
}

impl GraphView for ReverseDownView<'_> {
    fn node_count(&self) -> usize {
        self.h.node_count()
    }

    fn period(&self) -> f64 {
        self.h.period()
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, mut visit: F) {
        for &id in self.h.down_in(node) {
            let e = self.h.edge(id);
            visit(id, e.tail, e.weight.lower());
        }
    }
}
