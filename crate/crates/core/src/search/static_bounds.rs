use super::queue::QuadHeap;
use super::GraphView;
use crate::tdgraph::{EdgeId, NodeId};
use crate::ttf::Ttf;

/// Which scalar stands in for an edge's travel-time function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaticWeight {
    /// Global minimum: distances are lower bounds on any travel time.
    Min,
    /// Global maximum: distances are upper bounds on any travel time.
    Max,
}

impl StaticWeight {
    #[inline]
    pub fn of(self, ttf: &Ttf) -> f64 {
        match self {
            StaticWeight::Min => ttf.global_min(),
            StaticWeight::Max => ttf.global_max(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StaticLabels {
    pub source: NodeId,
    dist: Vec<f64>,
    parent: Vec<Option<(NodeId, EdgeId)>>,
}

impl StaticLabels {
    pub fn distance(&self, node: NodeId) -> f64 {
        self.dist[node as usize]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn path_to(&self, node: NodeId) -> Option<Vec<EdgeId>> {
        if !self.dist[node as usize].is_finite() {
            return None;
        }
        let mut edges = Vec::new();
        let mut v = node;
        while let Some((p, e)) = self.parent[v as usize] {
            edges.push(e);
            v = p;
        }
        edges.reverse();
        Some(edges)
    }
}

/// Plain Dijkstra on scalarized weights, optionally stopping at `target`.
pub fn static_dijkstra<G: GraphView>(graph: &G, source: NodeId, weight: StaticWeight, target: Option<NodeId>) -> StaticLabels {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut settled = vec![false; n];
    let mut queue = QuadHeap::new();
    dist[source as usize] = 0.0;
    queue.push(0.0, source, 0);

    while let Some(entry) = queue.pop() {
        let u = entry.node;
        if std::mem::replace(&mut settled[u as usize], true) {
            continue;
        }
        if target == Some(u) {
            break;
        }
        let d = dist[u as usize];
        graph.for_each_out(u, |edge, head, ttf| {
            let h = head as usize;
            let cand = d + weight.of(ttf);
            if !settled[h] && cand < dist[h] {
                dist[h] = cand;
                parent[h] = Some((u, edge));
                queue.push(cand, head, 0);
            }
        });
    }
    StaticLabels { source, dist, parent }
}
