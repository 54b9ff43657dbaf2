//! The input network and the contracted hierarchy built from it.

mod hierarchy;

use thiserror::Error;

use crate::ttf::{Ttf, TtfError};

pub use hierarchy::{EdgeWeight, Hierarchy, HierarchyEdge, HierarchyEdgeId, Mode, PathResult};

pub type NodeId = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge}: node {node} out of range (graph has {node_count} nodes)")]
    InvalidNode { edge: usize, node: NodeId, node_count: usize },
    #[error("edge {edge}: self-loop at node {node}")]
    SelfLoop { edge: usize, node: NodeId },
    #[error("edge {edge}: travel-time function violates FIFO")]
    NotFifo { edge: usize },
    #[error("edge {edge}: {source}")]
    Ttf { edge: usize, source: TtfError },
    #[error("node order is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub ttf: Ttf,
}

impl Edge {
    pub fn new(tail: NodeId, head: NodeId, ttf: Ttf) -> Self {
        Edge { tail, head, ttf }
    }
}

/// Directed multigraph with one travel-time function per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TdGraph {
    node_count: usize,
    period: f64,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
}

impl TdGraph {
    pub fn new(node_count: usize, edges: Vec<Edge>, period: f64) -> Result<TdGraph, GraphError> {
        let mut out = vec![Vec::new(); node_count];
        let mut inc = vec![Vec::new(); node_count];
        for (i, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node as usize >= node_count {
                    return Err(GraphError::InvalidNode { edge: i, node, node_count });
                }
            }
            if e.tail == e.head {
                return Err(GraphError::SelfLoop { edge: i, node: e.tail });
            }
            if e.ttf.period() != period {
                return Err(GraphError::Ttf { edge: i, source: TtfError::PeriodMismatch(e.ttf.period(), period) });
            }
            if !e.ttf.is_fifo() {
                return Err(GraphError::NotFifo { edge: i });
            }
            out[e.tail as usize].push(i as EdgeId);
            inc[e.head as usize].push(i as EdgeId);
        }
        Ok(TdGraph { node_count, period, edges, out, inc })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out[node as usize]
    }

    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.inc[node as usize]
    }

    /// Total number of breakpoints over all edges.
    pub fn total_points(&self) -> usize {
        self.edges.iter().map(|e| e.ttf.len()).sum()
    }

    /// Partitions the edges into those leading to a more important node and
    /// the rest.
    pub fn split_by_order(&self, order: &NodeOrder) -> Result<(Vec<EdgeId>, Vec<EdgeId>), GraphError> {
        if order.len() != self.node_count {
            return Err(GraphError::NotAPermutation(self.node_count));
        }
        Ok((0..self.edges.len() as EdgeId).partition(|&id| {
            let e = self.edge(id);
            order.rank(e.tail) < order.rank(e.head)
        }))
    }
}

/// Contraction order: `rank[v]` is the position at which `v` is contracted.
/// Higher rank means more important.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeOrder {
    rank: Vec<u32>,
}

impl NodeOrder {
    /// From the nodes listed in contraction order (least important first).
    pub fn from_sequence(sequence: &[NodeId]) -> Result<NodeOrder, GraphError> {
        let n = sequence.len();
        let mut rank = vec![u32::MAX; n];
        for (i, &v) in sequence.iter().enumerate() {
            if v as usize >= n || rank[v as usize] != u32::MAX {
                return Err(GraphError::NotAPermutation(n));
            }
            rank[v as usize] = i as u32;
        }
        Ok(NodeOrder { rank })
    }

    pub fn from_ranks(rank: Vec<u32>) -> Result<NodeOrder, GraphError> {
        let n = rank.len();
        let mut seen = vec![false; n];
        for &r in &rank {
            if r as usize >= n || seen[r as usize] {
                return Err(GraphError::NotAPermutation(n));
            }
            seen[r as usize] = true;
        }
        Ok(NodeOrder { rank })
    }

    pub fn identity(n: usize) -> NodeOrder {
        NodeOrder { rank: (0..n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, node: NodeId) -> u32 {
        self.rank[node as usize]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// Nodes in contraction order.
    pub fn sequence(&self) -> Vec<NodeId> {
        let mut seq = vec![0; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            seq[r as usize] = v as NodeId;
        }
        seq
    }
}
