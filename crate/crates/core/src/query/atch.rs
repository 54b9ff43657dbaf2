use super::{backward_mark, check_nodes, BackwardMethod, BackwardSpace, QueryError, QueryResult, QueryStats};
use crate::search::queue::QuadHeap;
use crate::search::{td_dijkstra, EdgeSubset, ScalarOptions};
use crate::tdgraph::{Hierarchy, HierarchyEdgeId, NodeId, PathResult};

/// Earliest arrival on an approximate hierarchy. A bound-based forward search
/// collects the hierarchy edges that may lie on an optimal route; these are
/// expanded to original edges and searched exactly. The result equals plain
/// time-dependent Dijkstra.
pub fn atch_query(h: &Hierarchy, source: NodeId, target: NodeId, departure: f64) -> Result<QueryResult, QueryError> {
    if h.mode().is_exact() {
        return Err(QueryError::WrongMode { algorithm: "atch query", needs_exact: false });
    }
    check_nodes(h.node_count(), &[source, target])?;
    if source == target {
        return Ok(QueryResult::trivial(source, departure));
    }
    let space = backward_mark(h, target, BackwardMethod::StaticMin)?;
    let corridor = corridor(h, source, target, departure, &space);
    let mut stats = QueryStats {
        settled: corridor.settled,
        relaxed: corridor.relaxed,
        reached: space.reached_count,
        marked_edges: space.marked_edges,
    };
    if corridor.edges.is_empty() {
        return Ok(QueryResult::unreachable(source, target, departure, stats));
    }

    let mask = h.expand_all(corridor.edges.iter().copied());
    let subset = EdgeSubset { graph: h.graph(), mask: &mask };
    let opts = ScalarOptions { target: Some(target), ..Default::default() };
    let labels = td_dijkstra(&subset, source, departure, &opts);
    stats.settled += labels.stats.settled;
    stats.relaxed += labels.stats.relaxed;
    let Some(edges) = labels.path_to(target) else {
        return Ok(QueryResult::unreachable(source, target, departure, stats));
    };
    Ok(QueryResult {
        source,
        target,
        departure,
        arrival: Some(labels.arrival(target)),
        path: Some(PathResult::evaluate(h.graph(), edges, departure)),
        stats,
    })
}

struct Corridor {
    edges: Vec<HierarchyEdgeId>,
    settled: usize,
    relaxed: usize,
}

/// Forward search keeping lower and upper bounds on the travel time to every
/// node. Returns the relaxed hierarchy edges that can still be part of a route
/// no slower than the best upper bound found for the target.
fn corridor(h: &Hierarchy, source: NodeId, target: NodeId, departure: f64, space: &BackwardSpace) -> Corridor {
    let n = h.node_count();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = QuadHeap::new();
    let mut relaxed_edges: Vec<(f64, HierarchyEdgeId)> = Vec::new();
    let mut best = f64::INFINITY;
    let slack = |b: f64| b * (1.0 + 1e-9) + 1e-9;
    let mut settled_count = 0;
    // Bounds of the backward space only hold for downward continuations.
    let rest = |id: HierarchyEdgeId| if h.is_up(id) { 0.0 } else { space.lower_bound(h.edge(id).head) };

    lo[source as usize] = 0.0;
    hi[source as usize] = 0.0;
    heap.push(0.0, source, 0);
    while let Some(entry) = heap.pop() {
        let u = entry.node;
        if settled[u as usize] || entry.key > lo[u as usize] {
            continue;
        }
        if entry.key > slack(best) {
            break;
        }
        settled[u as usize] = true;
        settled_count += 1;
        let (lo_u, hi_u) = (lo[u as usize], hi[u as usize]);
        let marked = h.down_out(u).iter().filter(|&&id| space.is_reached(h.edge(id).head));
        for &id in h.up_out(u).iter().chain(marked) {
            let e = h.edge(id);
            let w = e.head as usize;
            relaxed_edges.push((lo_u, id));
            let lo_w = lo_u + e.weight.lower().eval(departure + lo_u);
            let hi_w = hi_u + e.weight.upper().eval(departure + hi_u);
            if hi_w < hi[w] {
                hi[w] = hi_w;
                if e.head == target {
                    best = best.min(hi_w);
                }
            }
            if lo_w + rest(id) > slack(best) {
                continue;
            }
            if lo_w < lo[w] {
                lo[w] = lo_w;
                heap.push(lo_w, e.head, 0);
            }
        }
    }

    if !best.is_finite() {
        return Corridor { edges: Vec::new(), settled: settled_count, relaxed: relaxed_edges.len() };
    }
    let relaxed = relaxed_edges.len();
    let edges = relaxed_edges
        .into_iter()
        .filter(|&(lo_u, id)| {
            let e = h.edge(id);
            lo_u + e.weight.lower().eval(departure + lo_u) + rest(id) <= slack(best)
        })
        .map(|(_, id)| id)
        .collect();
    Corridor { edges, settled: settled_count, relaxed }
}
