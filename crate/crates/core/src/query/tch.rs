use super::{backward_mark, check_nodes, unpack_path, BackwardMethod, QueryError, QueryResult, QueryStats, UpMarkedView};
use crate::search::queue::QuadHeap;
use crate::search::{profile_dijkstra, static_dijkstra, ProfileOptions, StaticWeight};
use crate::tdgraph::{Hierarchy, HierarchyEdgeId, NodeId, TdGraph};
use crate::ttf::{TimeInterval, Ttf};

/// Lower bounds used by [`pruned_tch_query`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    /// Static minimum distances to the target.
    Static,
    /// Interval bounds for the window `[departure, departure + U]`.
    Interval,
}

fn require_exact(h: &Hierarchy, algorithm: &'static str) -> Result<(), QueryError> {
    if h.mode().is_exact() {
        Ok(())
    } else {
        Err(QueryError::WrongMode { algorithm, needs_exact: true })
    }
}

/// Earliest arrival from `source` departing at `departure`, on an exact hierarchy.
pub fn tch_query(h: &Hierarchy, source: NodeId, target: NodeId, departure: f64) -> Result<QueryResult, QueryError> {
    require_exact(h, "tch query")?;
    check_nodes(h.node_count(), &[source, target])?;
    if source == target {
        return Ok(QueryResult::trivial(source, departure));
    }
    let space = backward_mark(h, target, BackwardMethod::ReachabilityOnly)?;
    forward(h, source, target, departure, &space, None)
}

/// Like [`tch_query`], but drops forward labels that provably cannot beat the
/// travel time of an initial upper-bound path.
pub fn pruned_tch_query(
    h: &Hierarchy,
    source: NodeId,
    target: NodeId,
    departure: f64,
    pruning: Pruning,
) -> Result<QueryResult, QueryError> {
    require_exact(h, "pruned tch query")?;
    check_nodes(h.node_count(), &[source, target])?;
    if source == target {
        return Ok(QueryResult::trivial(source, departure));
    }
    let mut space = backward_mark(h, target, BackwardMethod::StaticMin)?;
    let stats = QueryStats { reached: space.reached_count, marked_edges: space.marked_edges, ..Default::default() };

    let view = UpMarkedView { h, reached: space.reached() };
    let Some(initial) = static_dijkstra(&view, source, StaticWeight::Min, Some(target)).path_to(target) else {
        return Ok(QueryResult::unreachable(source, target, departure, stats));
    };
    let bound = unpack_path(h, &initial, departure)?.travel_time;

    if pruning == Pruning::Interval {
        let window = TimeInterval::new(departure, departure + bound);
        let refined = backward_mark(h, target, BackwardMethod::Interval(window))?;
        let refined: Vec<f64> = (0..h.node_count() as NodeId).map(|v| refined.lower_bound(v)).collect();
        space.tighten(&refined);
    }
    let limit = bound * (1.0 + 1e-9) + 1e-9;
    forward(h, source, target, departure, &space, Some(limit))
}

/// Earliest-arrival search over upward edges and marked downward edges with
/// separate labels for the upward and the downward part of a route: once a
/// route goes down it only goes down. With a `limit`, labels whose travel time
/// plus remaining lower bound exceed it are dropped; the bounds hold for
/// downward continuations, so upward labels only use their travel time.
fn forward(
    h: &Hierarchy,
    source: NodeId,
    target: NodeId,
    departure: f64,
    space: &super::BackwardSpace,
    limit: Option<f64>,
) -> Result<QueryResult, QueryError> {
    const UP: usize = 0;
    const DOWN: usize = 1;
    let n = h.node_count();
    let mut arrival = vec![f64::INFINITY; 2 * n];
    let mut parent: Vec<Option<(usize, HierarchyEdgeId)>> = vec![None; 2 * n];
    let mut settled = vec![false; 2 * n];
    let mut queue = QuadHeap::new();
    let mut stats = QueryStats { reached: space.reached_count, marked_edges: space.marked_edges, ..Default::default() };
    let start = 2 * source as usize + UP;
    arrival[start] = departure;
    queue.push(departure, start as u32, 0);

    let mut found = None;
    while let Some(entry) = queue.pop() {
        let state = entry.node as usize;
        if settled[state] {
            continue;
        }
        settled[state] = true;
        stats.settled += 1;
        let (u, phase) = ((state / 2) as NodeId, state % 2);
        if u == target {
            found = Some(state);
            break;
        }
        let t_u = arrival[state];
        let mut relax = |id: HierarchyEdgeId, next: usize| {
            stats.relaxed += 1;
            let e = h.edge(id);
            let to = 2 * e.head as usize + next;
            if settled[to] {
                return;
            }
            let a = t_u + e.weight.lower().eval(t_u);
            if a >= arrival[to] {
                return;
            }
            if let Some(limit) = limit {
                let rest = if next == DOWN { space.lower_bound(e.head) } else { 0.0 };
                if a - departure + rest > limit {
                    return;
                }
            }
            arrival[to] = a;
            parent[to] = Some((state, id));
            queue.push(a, to as u32, 0);
        };
        if phase == UP {
            for &id in h.up_out(u) {
                relax(id, UP);
            }
        }
        for &id in h.down_out(u) {
            if space.is_reached(h.edge(id).head) {
                relax(id, DOWN);
            }
        }
    }

    let Some(end) = found else {
        return Ok(QueryResult::unreachable(source, target, departure, stats));
    };
    let mut edges = Vec::new();
    let mut state = end;
    while let Some((prev, id)) = parent[state] {
        edges.push(id);
        state = prev;
    }
    edges.reverse();
    let path = unpack_path(h, &edges, departure)?;
    Ok(QueryResult { source, target, departure, arrival: Some(arrival[end]), path: Some(path), stats })
}

/// Travel time profile from `source` to `target` over an exact hierarchy.
/// `None` if the target cannot be reached.
pub fn profile_query(h: &Hierarchy, source: NodeId, target: NodeId) -> Result<Option<Ttf>, QueryError> {
    profile_query_with_stats(h, source, target).map(|(profile, _)| profile)
}

/// [`profile_query`] also reporting search effort; `settled` counts queue pops.
pub fn profile_query_with_stats(
    h: &Hierarchy,
    source: NodeId,
    target: NodeId,
) -> Result<(Option<Ttf>, QueryStats), QueryError> {
    require_exact(h, "profile query")?;
    check_nodes(h.node_count(), &[source, target])?;
    if source == target {
        return Ok((Some(Ttf::zero(h.period())), QueryStats::default()));
    }
    let space = backward_mark(h, target, BackwardMethod::ReachabilityOnly)?;
    let view = UpMarkedView { h, reached: space.reached() };
    let targets = [target];
    let opts = ProfileOptions { targets: Some(&targets), ..Default::default() };
    let labels = profile_dijkstra(&view, source, &opts);
    let stats = QueryStats {
        settled: labels.pops,
        relaxed: 0,
        reached: space.reached_count,
        marked_edges: space.marked_edges,
    };
    Ok((labels.into_label(target), stats))
}

/// Travel time profile computed directly on the input graph.
pub fn profile_query_graph(graph: &TdGraph, source: NodeId, target: NodeId) -> Result<Option<Ttf>, QueryError> {
    check_nodes(graph.node_count(), &[source, target])?;
    if source == target {
        return Ok(Some(Ttf::zero(graph.period())));
    }
    let targets = [target];
    let opts = ProfileOptions { targets: Some(&targets), ..Default::default() };
    Ok(profile_dijkstra(graph, source, &opts).into_label(target))
}
