use super::queue::QuadHeap;
use super::GraphView;
use crate::tdgraph::{EdgeId, NodeId};

/// Optional knobs of [`td_dijkstra`].
#[derive(Default, Clone, Copy)]
pub struct ScalarOptions<'a> {
    /// Stop as soon as this node is settled.
    pub target: Option<NodeId>,
    /// Edges for which this returns `false` are ignored.
    pub edge_filter: Option<&'a dyn Fn(EdgeId) -> bool>,
    /// Called with `(edge, head, tentative arrival)` before a label is
    /// queued; returning `true` drops the label.
    pub prune: Option<&'a dyn Fn(EdgeId, NodeId, f64) -> bool>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub settled: usize,
    pub relaxed: usize,
}

/// Earliest arrival times from one source at one departure time.
#[derive(Debug, Clone)]
pub struct ScalarLabels {
    pub source: NodeId,
    pub departure: f64,
    arrival: Vec<f64>,
    parent: Vec<Option<(NodeId, EdgeId)>>,
    settled: Vec<bool>,
    /// Nodes in the order they were settled.
    pub settle_order: Vec<NodeId>,
    pub stats: SearchStats,
}

impl ScalarLabels {
    /// Earliest arrival, `f64::INFINITY` if not reached.
    pub fn arrival(&self, node: NodeId) -> f64 {
        self.arrival[node as usize]
    }

    pub fn travel_time(&self, node: NodeId) -> Option<f64> {
        let a = self.arrival(node);
        a.is_finite().then_some(a - self.departure)
    }

    pub fn is_settled(&self, node: NodeId) -> bool {
        self.settled[node as usize]
    }

    pub fn parent(&self, node: NodeId) -> Option<(NodeId, EdgeId)> {
        self.parent[node as usize]
    }

    /// Edges of the search tree path from the source to `node`.
    pub fn path_to(&self, node: NodeId) -> Option<Vec<EdgeId>> {
        if !self.arrival(node).is_finite() {
            return None;
        }
        let mut edges = Vec::new();
        let mut v = node;
        while let Some((p, e)) = self.parent(v) {
            edges.push(e);
            v = p;
        }
        edges.reverse();
        Some(edges)
    }
}

/// Time-dependent Dijkstra: relaxing edge `e` out of `u` yields arrival
/// `arrival[u] + ttf_e(arrival[u])`. Label-setting under FIFO weights.
pub fn td_dijkstra<G: GraphView>(graph: &G, source: NodeId, departure: f64, opts: &ScalarOptions<'_>) -> ScalarLabels {
    let n = graph.node_count();
    let mut labels = ScalarLabels {
        source,
        departure,
        arrival: vec![f64::INFINITY; n],
        parent: vec![None; n],
        settled: vec![false; n],
        settle_order: Vec::new(),
        stats: SearchStats::default(),
    };
    let mut queue = QuadHeap::new();
    labels.arrival[source as usize] = departure;
    queue.push(departure, source, 0);

    while let Some(entry) = queue.pop() {
        let u = entry.node;
        if labels.settled[u as usize] {
            continue;
        }
        labels.settled[u as usize] = true;
        labels.settle_order.push(u);
        labels.stats.settled += 1;
        if opts.target == Some(u) {
            break;
        }
        let t_u = labels.arrival[u as usize];
        graph.for_each_out(u, |edge, head, ttf| {
            if let Some(filter) = opts.edge_filter {
                if !filter(edge) {
                    return;
                }
            }
            labels.stats.relaxed += 1;
            let h = head as usize;
            if labels.settled[h] {
                return;
            }
            let a = ttf.arrival(t_u);
            if a < labels.arrival[h] {
                if let Some(prune) = opts.prune {
                    if prune(edge, head, a) {
                        return;
                    }
                }
                labels.arrival[h] = a;
                labels.parent[h] = Some((u, edge));
                queue.push(a, head, 0);
            }
        });
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tdgraph::{Edge, TdGraph};
    use crate::ttf::Ttf;

    fn c(v: f64) -> Ttf {
        Ttf::constant(v, 100.0)
    }

    #[test]
    fn single_edge() {
        let g = TdGraph::new(2, vec![Edge::new(0, 1, c(5.0))], 100.0).unwrap();
        let l = td_dijkstra(&g, 0, 0.0, &ScalarOptions::default());
        assert_eq!(l.arrival(1), 5.0);
        assert_eq!(l.path_to(1), Some(vec![0]));
    }

    #[test]
    fn parallel_edges_take_cheaper() {
        let g = TdGraph::new(2, vec![Edge::new(0, 1, c(5.0)), Edge::new(0, 1, c(3.0))], 100.0).unwrap();
        let l = td_dijkstra(&g, 0, 0.0, &ScalarOptions::default());
        assert_eq!(l.travel_time(1), Some(3.0));
        assert_eq!(l.path_to(1), Some(vec![1]));
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = TdGraph::new(3, vec![Edge::new(0, 1, c(5.0))], 100.0).unwrap();
        let l = td_dijkstra(&g, 0, 0.0, &ScalarOptions { target: Some(2), ..Default::default() });
        assert_eq!(l.arrival(2), f64::INFINITY);
        assert_eq!(l.travel_time(2), None);
        assert_eq!(l.path_to(2), None);
    }

    #[test]
    fn time_dependent_detour() {
        // direct edge is slow around departure 0, detour is constant
        let slow = Ttf::from_pairs(&[(0.0, 50.0), (50.0, 1.0)], 100.0).unwrap();
        let g = TdGraph::new(3, vec![Edge::new(0, 2, slow), Edge::new(0, 1, c(2.0)), Edge::new(1, 2, c(2.0))], 100.0)
            .unwrap();
        let l = td_dijkstra(&g, 0, 0.0, &ScalarOptions::default());
        assert_eq!(l.travel_time(2), Some(4.0));
        let l = td_dijkstra(&g, 0, 50.0, &ScalarOptions::default());
        assert_eq!(l.travel_time(2), Some(1.0));
    }

    #[test]
    fn filter_and_prune() {
        let g = TdGraph::new(3, vec![Edge::new(0, 1, c(1.0)), Edge::new(1, 2, c(1.0))], 100.0).unwrap();
        let no_second = |e: EdgeId| e != 1;
        let l = td_dijkstra(&g, 0, 0.0, &ScalarOptions { edge_filter: Some(&no_second), ..Default::default() });
        assert!(l.arrival(2).is_infinite());
        let prune_one = |_e: EdgeId, v: NodeId, _a: f64| v == 1;
        let l = td_dijkstra(&g, 0, 0.0, &ScalarOptions { prune: Some(&prune_one), ..Default::default() });
        assert!(l.arrival(1).is_infinite() && l.arrival(2).is_infinite());
        assert_eq!(l.stats.settled, 1);
    }
}
