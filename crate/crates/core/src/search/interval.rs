use super::queue::QuadHeap;
use super::GraphView;
use crate::tdgraph::NodeId;
use crate::ttf::TimeInterval;

/// Travel-time bounds valid for every departure in a window.
#[derive(Debug, Clone)]
pub struct IntervalLabels {
    pub source: NodeId,
    pub window: TimeInterval,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalLabels {
    /// Lower bound on the travel time; `f64::INFINITY` if unreached.
    pub fn lower(&self, node: NodeId) -> f64 {
        self.lower[node as usize]
    }

    /// Upper bound on the earliest-arrival travel time, for forward searches.
    pub fn upper(&self, node: NodeId) -> f64 {
        self.upper[node as usize]
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }
}

/// Minimum travel times over all departures from `source` within `window`.
///
/// Each node carries a lower bound `lo` and an upper bound `hi` on its travel
/// time, so the departure at a settled node `u` lies in
/// `[begin + lo(u), end + hi(u)]`; edges are relaxed with their minimum (and
/// maximum) over that window. Windows of a period or more fall back to the
/// global extrema.
pub fn interval_dijkstra<G: GraphView>(graph: &G, source: NodeId, window: TimeInterval) -> IntervalLabels {
    let n = graph.node_count();
    let mut lower = vec![f64::INFINITY; n];
    let mut upper = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut queue = QuadHeap::new();
    lower[source as usize] = 0.0;
    upper[source as usize] = 0.0;
    queue.push(0.0, source, 0);

    while let Some(entry) = queue.pop() {
        let u = entry.node as usize;
        if settled[u] {
            continue;
        }
        settled[u] = true;
        let (lo, hi) = (lower[u], upper[u]);
        let (from, to) = (window.begin + lo, window.end + hi);
        graph.for_each_out(entry.node, |_, head, ttf| {
            let h = head as usize;
            let cand_hi = hi + ttf.max_over(from, to);
            if cand_hi < upper[h] {
                upper[h] = cand_hi;
            }
            if settled[h] {
                return;
            }
            let cand = lo + ttf.min_over(from, to);
            if cand < lower[h] {
                lower[h] = cand;
                queue.push(cand, head, 0);
            }
        });
    }
    IntervalLabels { source, window, lower, upper }
}

/// Backward counterpart: lower bounds on the travel time from every node to
/// `target`, for routes that depart and arrive within `window`. `reversed`
/// must yield each edge `(x, y)` as leaving `y` towards `x`.
///
/// A node `x` preceding `y` on such a route is left no later than
/// `window.end - lower(y)`, so the edge is relaxed with its minimum over
/// `[window.begin, window.end - lower(y)]`.
pub fn reverse_interval_dijkstra<G: GraphView>(reversed: &G, target: NodeId, window: TimeInterval) -> IntervalLabels {
    let n = reversed.node_count();
    let mut lower = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut queue = QuadHeap::new();
    lower[target as usize] = 0.0;
    queue.push(0.0, target, 0);

    while let Some(entry) = queue.pop() {
        let y = entry.node as usize;
        if settled[y] {
            continue;
        }
        settled[y] = true;
        let lo = lower[y];
        let latest = (window.end - lo).max(window.begin);
        reversed.for_each_out(entry.node, |_, tail, ttf| {
            let x = tail as usize;
            if settled[x] {
                return;
            }
            let cand = lo + ttf.min_over(window.begin, latest);
            if cand < lower[x] {
                lower[x] = cand;
                queue.push(cand, tail, 0);
            }
        });
    }
    IntervalLabels { source: target, window, upper: vec![f64::INFINITY; n], lower }
}
