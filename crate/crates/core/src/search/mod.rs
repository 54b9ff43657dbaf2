//! Dijkstra variants over any edge set with travel-time-function weights.

mod interval;
mod profile;
pub mod queue;
mod scalar;
mod static_bounds;

use crate::tdgraph::{EdgeId, NodeId, TdGraph};
use crate::ttf::Ttf;

pub use interval::{interval_dijkstra, reverse_interval_dijkstra, IntervalLabels};
pub use profile::{profile_dijkstra, Coarsening, ProfileLabels, ProfileOptions};
pub use scalar::{td_dijkstra, ScalarLabels, ScalarOptions, SearchStats};
pub use static_bounds::{static_dijkstra, StaticLabels, StaticWeight};

/// Read-only access to outgoing edges. Implemented for the input graph and for
/// the various filtered views over hierarchies and contraction overlays.
pub trait GraphView {
    fn node_count(&self) -> usize;

    fn period(&self) -> f64;

    /// Calls `visit(edge, head, weight)` for every edge leaving `node`.
    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, visit: F);
}

impl GraphView for TdGraph {
    fn node_count(&self) -> usize {
        TdGraph::node_count(self)
    }

    fn period(&self) -> f64 {
        TdGraph::period(self)
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, mut visit: F) {
        for &id in self.out_edges(node) {
            let e = self.edge(id);
            visit(id, e.head, &e.ttf);
        }
    }
}

impl<G: GraphView> GraphView for &G {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }

    fn period(&self) -> f64 {
        (**self).period()
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, visit: F) {
        (**self).for_each_out(node, visit)
    }
}

/// The input graph with edges reversed.
pub struct ReversedGraph<'a>(pub &'a TdGraph);

impl GraphView for ReversedGraph<'_> {
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    fn period(&self) -> f64 {
        self.0.period()
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, mut visit: F) {
        for &id in self.0.in_edges(node) {
            let e = self.0.edge(id);
            visit(id, e.tail, &e.ttf);
        }
    }
}

/// The input graph restricted to the edges flagged in `mask`.
pub struct EdgeSubset<'a> {
    pub graph: &'a TdGraph,
    pub mask: &'a [bool],
}

impl GraphView for EdgeSubset<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn period(&self) -> f64 {
        self.graph.period()
    }

    fn for_each_out<F: FnMut(EdgeId, NodeId, &Ttf)>(&self, node: NodeId, mut visit: F) {
        for &id in self.graph.out_edges(node) {
            if self.mask[id as usize] {
                let e = self.graph.edge(id);
                visit(id, e.head, &e.ttf);
            }
        }
    }
}
