use super::{check_nodes, QueryError, ReverseDownView};
use crate::search::{reverse_interval_dijkstra, static_dijkstra, StaticWeight};
use crate::tdgraph::{Hierarchy, NodeId};
use crate::ttf::TimeInterval;

/// How lower bounds on the remaining travel time are attached to the nodes
/// of the backward search space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackwardMethod {
    /// No bounds (all zero).
    ReachabilityOnly,
    /// Static Dijkstra on minimum weights of the reversed downward graph.
    StaticMin,
    /// Minimum travel times for routes running within the given window.
    Interval(TimeInterval),
}

/// Nodes that can reach the target through downward edges.
#[derive(Debug, Clone)]
pub struct BackwardSpace {
    pub target: NodeId,
    pub method: BackwardMethod,
    reached: Vec<bool>,
    lower: Vec<f64>,
    pub reached_count: usize,
    /// Downward edges connecting reached nodes.
    pub marked_edges: usize,
}

impl BackwardSpace {
    pub fn is_reached(&self, v: NodeId) -> bool {
        self.reached[v as usize]
    }

    pub fn reached(&self) -> &[bool] {
        &self.reached
    }

    /// Lower bound on the travel time from `v` to the target; 0 outside the
    /// backward space.
    pub fn lower_bound(&self, v: NodeId) -> f64 {
        self.lower[v as usize]
    }

    pub(crate) fn tighten(&mut self, other: &[f64]) {
        for (l, &o) in self.lower.iter_mut().zip(other) {
            if o.is_finite() {
                *l = l.max(o);
            }
        }
    }
}

/// Explores every node that can reach `target` in the downward graph, marks the
/// downward edges between them and attaches lower bounds per `method`.
pub fn backward_mark(h: &Hierarchy, target: NodeId, method: BackwardMethod) -> Result<BackwardSpace, QueryError> {
    check_nodes(h.node_count(), &[target])?;
    let n = h.node_count();
    let mut reached = vec![false; n];
    let mut stack = vec![target];
    reached[target as usize] = true;
    let mut reached_count = 1;
    let mut marked_edges = 0;
    while let Some(y) = stack.pop() {
        for &id in h.down_in(y) {
            marked_edges += 1;
            let x = h.edge(id).tail;
            if !reached[x as usize] {
                reached[x as usize] = true;
                reached_count += 1;
                stack.push(x);
            }
        }
    }

    let view = ReverseDownView { h };
    let bounds: Vec<f64> = match method {
        BackwardMethod::ReachabilityOnly => vec![0.0; n],
        BackwardMethod::StaticMin => static_dijkstra(&view, target, StaticWeight::Min, None).distances().to_vec(),
        BackwardMethod::Interval(window) => reverse_interval_dijkstra(&view, target, window).lower_bounds().to_vec(),
    };
    let lower = bounds.into_iter().map(|l| if l.is_finite() { l } else { 0.0 }).collect();
    Ok(BackwardSpace { target, method, reached, lower, reached_count, marked_edges })
}
