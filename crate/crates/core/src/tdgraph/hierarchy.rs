use std::collections::HashMap;

use super::{EdgeId, GraphError, NodeId, NodeOrder, TdGraph};
use crate::ttf::{BoundPair, TimeInterval, Ttf};

/// How shortcut weights are stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Exact,
    /// Shortcuts carry lower/upper bounds within a factor `1 + epsilon`.
    Approx(f64),
}

impl Mode {
    pub fn epsilon(&self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Approx(eps) => *eps,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::Exact)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeWeight {
    Exact(Ttf),
    Bounds(BoundPair),
}

impl EdgeWeight {
    pub fn lower(&self) -> &Ttf {
        match self {
            EdgeWeight::Exact(f) => f,
            EdgeWeight::Bounds(b) => &b.lower,
        }
    }

    pub fn upper(&self) -> &Ttf {
        match self {
            EdgeWeight::Exact(f) => f,
            EdgeWeight::Bounds(b) => &b.upper,
        }
    }

    pub fn exact(&self) -> Option<&Ttf> {
        match self {
            EdgeWeight::Exact(f) => Some(f),
            EdgeWeight::Bounds(_) => None,
        }
    }

    pub fn to_bounds(&self) -> BoundPair {
        match self {
            EdgeWeight::Exact(f) => BoundPair::exact(f.clone()),
            EdgeWeight::Bounds(b) => b.clone(),
        }
    }

    /// Stored breakpoints (both sides for bounds).
    pub fn points(&self) -> usize {
        match self {
            EdgeWeight::Exact(f) => f.len(),
            EdgeWeight::Bounds(b) => b.len(),
        }
    }
}

pub type HierarchyEdgeId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyEdge {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: EdgeWeight,
    /// The contracted node this shortcut bypasses; `None` for original edges.
    pub middle: Option<NodeId>,
    /// Id of the input edge, for original edges.
    pub original: Option<EdgeId>,
    /// Departure windows during which the shortcut may be part of a shortest
    /// path. Informational; searches do not depend on it.
    pub validity: Option<Vec<TimeInterval>>,
}

impl HierarchyEdge {
    pub fn original(id: EdgeId, tail: NodeId, head: NodeId, ttf: Ttf) -> Self {
        HierarchyEdge { tail, head, weight: EdgeWeight::Exact(ttf), middle: None, original: Some(id), validity: None }
    }

    pub fn is_shortcut(&self) -> bool {
        self.middle.is_some()
    }
}

/// An original-edge path with the departure time at every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub departure: f64,
    pub edges: Vec<EdgeId>,
    pub departures: Vec<f64>,
    pub travel_time: f64,
}

impl PathResult {
    /// Evaluates `edges` one after another starting at `departure`.
    pub fn evaluate(graph: &TdGraph, edges: Vec<EdgeId>, departure: f64) -> PathResult {
        let mut departures = Vec::with_capacity(edges.len());
        let mut t = departure;
        for &e in &edges {
            departures.push(t);
            t = graph.edge(e).ttf.arrival(t);
        }
        PathResult { departure, edges, departures, travel_time: t - departure }
    }

    pub fn arrival(&self) -> f64 {
        self.departure + self.travel_time
    }

    /// Consecutive edges connect and the timestamps follow the edge functions.
    pub fn is_consistent(&self, graph: &TdGraph, tol: f64) -> bool {
        if self.edges.len() != self.departures.len() {
            return false;
        }
        let mut t = self.departure;
        for (i, &e) in self.edges.iter().enumerate() {
            if i > 0 && graph.edge(self.edges[i - 1]).head != graph.edge(e).tail {
                return false;
            }
            if (self.departures[i] - t).abs() > tol {
                return false;
            }
            t = graph.edge(e).ttf.arrival(t);
        }
        (t - self.arrival()).abs() <= tol
    }
}

/// Node order plus all original edges and shortcuts, split into edges
/// leading upward (to a higher rank) and downward.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    graph: TdGraph,
    order: NodeOrder,
    mode: Mode,
    edges: Vec<HierarchyEdge>,
    up_out: Vec<Vec<HierarchyEdgeId>>,
    down_out: Vec<Vec<HierarchyEdgeId>>,
    down_in: Vec<Vec<HierarchyEdgeId>>,
    pairs: HashMap<(NodeId, NodeId), Vec<HierarchyEdgeId>>,
}

impl PartialEq for Hierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.order == other.order && self.mode == other.mode && self.edges == other.edges
    }
}

impl Hierarchy {
    pub fn new(graph: TdGraph, order: NodeOrder, mode: Mode, edges: Vec<HierarchyEdge>) -> Result<Hierarchy, GraphError> {
        let n = graph.node_count();
        if order.len() != n {
            return Err(GraphError::NotAPermutation(n));
        }
        let bad = |msg: String| Err(GraphError::InvalidHierarchy(msg));
        let mut up_out = vec![Vec::new(); n];
        let mut down_out = vec![Vec::new(); n];
        let mut down_in = vec![Vec::new(); n];
        let mut pairs: HashMap<(NodeId, NodeId), Vec<HierarchyEdgeId>> = HashMap::new();
        let mut seen = vec![false; graph.edge_count()];

        for (i, e) in edges.iter().enumerate() {
            if e.tail as usize >= n || e.head as usize >= n || e.tail == e.head {
                return bad(format!("edge {i}: invalid endpoints {} -> {}", e.tail, e.head));
            }
            if e.weight.lower().period() != graph.period() {
                return bad(format!("edge {i}: period mismatch"));
            }
            match (e.middle, e.original) {
                (None, Some(id)) => {
                    let Some(orig) = graph.edges().get(id as usize) else {
                        return bad(format!("edge {i}: unknown original edge {id}"));
                    };
                    if seen[id as usize] {
                        return bad(format!("original edge {id} appears twice"));
                    }
                    seen[id as usize] = true;
                    if orig.tail != e.tail || orig.head != e.head || e.weight.exact() != Some(&orig.ttf) {
                        return bad(format!("edge {i}: does not match original edge {id}"));
                    }
                }
                (Some(m), None) => {
                    if m as usize >= n || order.rank(m) >= order.rank(e.tail) || order.rank(m) >= order.rank(e.head) {
                        return bad(format!("edge {i}: middle node {m} must rank below both endpoints"));
                    }
                    if mode.is_exact() && e.weight.exact().is_none() {
                        return bad(format!("edge {i}: exact hierarchy with bound weights"));
                    }
                }
                _ => return bad(format!("edge {i}: must be either original or shortcut")),
            }
            let id = i as HierarchyEdgeId;
            if order.rank(e.tail) < order.rank(e.head) {
                up_out[e.tail as usize].push(id);
            } else {
                down_out[e.tail as usize].push(id);
                down_in[e.head as usize].push(id);
            }
            pairs.entry((e.tail, e.head)).or_default().push(id);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return bad(format!("original edge {missing} missing"));
        }
        for (i, e) in edges.iter().enumerate() {
            if let Some(m) = e.middle {
                if !pairs.contains_key(&(e.tail, m)) || !pairs.contains_key(&(m, e.head)) {
                    return bad(format!("edge {i}: constituents via {m} missing"));
                }
            }
        }
        Ok(Hierarchy { graph, order, mode, edges, up_out, down_out, down_in, pairs })
    }

    pub fn graph(&self) -> &TdGraph {
        &self.graph
    }

    pub fn order(&self) -> &NodeOrder {
        &self.order
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn period(&self) -> f64 {
        self.graph.period()
    }

    pub fn edges(&self) -> &[HierarchyEdge] {
        &self.edges
    }

    pub fn edge(&self, id: HierarchyEdgeId) -> &HierarchyEdge {
        &self.edges[id as usize]
    }

    pub fn is_up(&self, id: HierarchyEdgeId) -> bool {
        let e = self.edge(id);
        self.order.rank(e.tail) < self.order.rank(e.head)
    }

    pub fn up_out(&self, node: NodeId) -> &[HierarchyEdgeId] {
        &self.up_out[node as usize]
    }

    pub fn down_out(&self, node: NodeId) -> &[HierarchyEdgeId] {
        &self.down_out[node as usize]
    }

    pub fn down_in(&self, node: NodeId) -> &[HierarchyEdgeId] {
        &self.down_in[node as usize]
    }

    pub fn up_edges(&self) -> impl Iterator<Item = HierarchyEdgeId> + '_ {
        self.up_out.iter().flatten().copied()
    }

    pub fn down_edges(&self) -> impl Iterator<Item = HierarchyEdgeId> + '_ {
        self.down_out.iter().flatten().copied()
    }

    /// All hierarchy edges from `tail` to `head`.
    pub fn between(&self, tail: NodeId, head: NodeId) -> &[HierarchyEdgeId] {
        self.pairs.get(&(tail, head)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn shortcut_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_shortcut()).count()
    }

    /// Breakpoints stored for shortcuts (both bounds in approximate mode).
    pub fn shortcut_points(&self) -> usize {
        self.edges.iter().filter(|e| e.is_shortcut()).map(|e| e.weight.points()).sum()
    }

    /// Exact travel time along hierarchy edge `id` when entering it at `tau`.
    /// Shortcuts with bound weights are evaluated through their constituents.
    pub fn eval_edge(&self, id: HierarchyEdgeId, tau: f64) -> f64 {
        let e = self.edge(id);
        match (&e.weight, e.middle) {
            (EdgeWeight::Exact(f), _) => f.eval(tau),
            (EdgeWeight::Bounds(_), Some(m)) => {
                let first = self.eval_pair(e.tail, m, tau);
                first + self.eval_pair(m, e.head, tau + first)
            }
            (EdgeWeight::Bounds(_), None) => unreachable!("original edges carry exact weights"),
        }
    }

    fn eval_pair(&self, tail: NodeId, head: NodeId, tau: f64) -> f64 {
        self.best_between(tail, head, tau).1
    }

    fn best_between(&self, tail: NodeId, head: NodeId, tau: f64) -> (HierarchyEdgeId, f64) {
        let mut best = (HierarchyEdgeId::MAX, f64::INFINITY);
        for &id in self.between(tail, head) {
            let v = self.eval_edge(id, tau);
            if v < best.1 {
                best = (id, v);
            }
        }
        debug_assert!(best.0 != HierarchyEdgeId::MAX, "no edge {tail} -> {head}");
        best
    }

    /// Original edges of the route that hierarchy edge `id` stands for when
    /// entered at `tau`. Where parallel edges compete, the one that is best
    /// at the relevant time is expanded.
    pub fn unpack_edge(&self, id: HierarchyEdgeId, tau: f64) -> Vec<EdgeId> {
        let mut out = Vec::new();
        self.unpack_into(id, tau, &mut out);
        out
    }

    /// Appends the unpacked original edges and returns the arrival time.
    pub(crate) fn unpack_into(&self, id: HierarchyEdgeId, tau: f64, out: &mut Vec<EdgeId>) -> f64 {
        let e = self.edge(id);
        match (e.original, e.middle) {
            (Some(orig), _) => {
                out.push(orig);
                self.graph.edge(orig).ttf.arrival(tau)
            }
            (None, Some(m)) => {
                let (first, _) = self.best_between(e.tail, m, tau);
                let t = self.unpack_into(first, tau, out);
                let (second, _) = self.best_between(m, e.head, t);
                self.unpack_into(second, t, out)
            }
            (None, None) => unreachable!(),
        }
    }

    /// Marks every original edge reachable by expanding `ids` through all
    /// constituents, regardless of departure time.
    pub fn expand_all(&self, ids: impl IntoIterator<Item = HierarchyEdgeId>) -> Vec<bool> {
        let mut visited = vec![false; self.edges.len()];
        let mut originals = vec![false; self.graph.edge_count()];
        let mut stack: Vec<HierarchyEdgeId> = ids.into_iter().collect();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut visited[id as usize], true) {
                continue;
            }
            let e = self.edge(id);
            match (e.original, e.middle) {
                (Some(orig), _) => originals[orig as usize] = true,
                (None, Some(m)) => {
                    stack.extend_from_slice(self.between(e.tail, m));
                    stack.extend_from_slice(self.between(m, e.head));
                }
                (None, None) => {}
            }
        }
        originals
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tdgraph::Edge;

    fn c(v: f64) -> Ttf {
        Ttf::constant(v, 100.0)
    }

    /// 0 -> 1 -> 2 with node 1 contracted first.
    fn tiny() -> Hierarchy {
        let g = TdGraph::new(3, vec![Edge::new(0, 1, c(2.0)), Edge::new(1, 2, c(3.0))], 100.0).unwrap();
        let order = NodeOrder::from_sequence(&[1, 0, 2]).unwrap();
        let mut edges: Vec<HierarchyEdge> =
            g.edges().iter().enumerate().map(|(i, e)| HierarchyEdge::original(i as u32, e.tail, e.head, e.ttf.clone())).collect();
        edges.push(HierarchyEdge {
            tail: 0,
            head: 2,
            weight: EdgeWeight::Exact(c(5.0)),
            middle: Some(1),
            original: None,
            validity: None,
        });
        Hierarchy::new(g, order, Mode::Exact, edges).unwrap()
    }

    #[test]
    fn unpack_original_and_shortcut() {
        let h = tiny();
        assert_eq!(h.unpack_edge(0, 0.0), vec![0]);
        assert_eq!(h.unpack_edge(2, 0.0), vec![0, 1]);
        assert_eq!(h.eval_edge(2, 10.0), 5.0);
        let mask = h.expand_all([2]);
        assert_eq!(mask, vec![true, true]);
    }

    #[test]
    fn up_down_split() {
        let h = tiny();
        // ranks: 1 -> 0, 0 -> 1, 2 -> 2
        assert!(!h.is_up(0));
        assert!(h.is_up(1));
        assert!(h.is_up(2));
        assert_eq!(h.up_edges().count() + h.down_edges().count(), h.edges().len());
    }

    #[test]
    fn rejects_bad_middle() {
        let h = tiny();
        let mut edges = h.edges().to_vec();
        edges[2].middle = Some(2);
        let err = Hierarchy::new(h.graph().clone(), h.order().clone(), Mode::Exact, edges).unwrap_err();
        assert!(matches!(err, GraphError::InvalidHierarchy(_)));
    }

    #[test]
    fn rejects_missing_original() {
        let h = tiny();
        let edges = h.edges()[1..].to_vec();
        assert!(Hierarchy::new(h.graph().clone(), h.order().clone(), Mode::Exact, edges).is_err());
    }

    #[test]
    fn path_result_consistency() {
        let h = tiny();
        let p = PathResult::evaluate(h.graph(), vec![0, 1], 7.0);
        assert_eq!(p.departures, vec![7.0, 9.0]);
        assert_eq!(p.travel_time, 5.0);
        assert!(p.is_consistent(h.graph(), 1e-9));
    }
}
