//! Synthetic networks with random FIFO travel-time functions.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rng::{stream, Stream};
use crate::tdgraph::{Edge, GraphError, NodeId, TdGraph};
use crate::ttf::{Point, Ttf, DEFAULT_PERIOD};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    /// `width x height` lattice, 4-neighbour, both directions.
    Grid { width: usize, height: usize },
    /// Points scattered in the unit square, joined by a Euclidean spanning
    /// tree plus the shortest remaining nearest-neighbour links until the
    /// requested average out-degree is reached. Every link is bidirected.
    Random { nodes: usize, avg_degree: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtfModel {
    /// Inclusive range of breakpoints per edge.
    pub points: (usize, usize),
    /// Range of the free-flow travel time in seconds.
    pub base_weight: (f64, f64),
    /// Peak travel time is at most `base * (1 + peak_amplitude)`.
    pub peak_amplitude: f64,
}

impl Default for TtfModel {
    fn default() -> Self {
        TtfModel { points: (2, 8), base_weight: (10.0, 100.0), peak_amplitude: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub topology: Topology,
    pub ttf: TtfModel,
    pub period: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn grid(width: usize, height: usize, seed: u64) -> Self {
        GeneratorSpec { topology: Topology::Grid { width, height }, ttf: TtfModel::default(), period: DEFAULT_PERIOD, seed }
    }

    pub fn random(nodes: usize, avg_degree: f64, seed: u64) -> Self {
        GeneratorSpec {
            topology: Topology::Random { nodes, avg_degree },
            ttf: TtfModel::default(),
            period: DEFAULT_PERIOD,
            seed,
        }
    }

    pub fn with_ttf(mut self, ttf: TtfModel) -> Self {
        self.ttf = ttf;
        self
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<TdGraph, GenError> {
    let model = spec.ttf;
    if model.points.0 == 0 || model.points.0 > model.points.1 {
        return Err(GenError::Degenerate(format!("points per edge {:?}", model.points)));
    }
    if !(model.base_weight.0 > 0.0 && model.base_weight.0 <= model.base_weight.1) || model.peak_amplitude < 0.0 {
        return Err(GenError::Degenerate("travel-time model".into()));
    }
    let links = match spec.topology {
        Topology::Grid { width, height } => grid_links(width, height)?,
        Topology::Random { nodes, avg_degree } => random_links(nodes, avg_degree, spec.seed)?,
    };
    let node_count = match spec.topology {
        Topology::Grid { width, height } => width * height,
        Topology::Random { nodes, .. } => nodes,
    };
    let mut rng = stream(spec.seed, Stream::Weights);
    let mut edges = Vec::with_capacity(links.len() * 2);
    for (a, b) in links {
        edges.push(Edge::new(a, b, random_ttf(&mut rng, &model, spec.period)));
        edges.push(Edge::new(b, a, random_ttf(&mut rng, &model, spec.period)));
    }
    Ok(TdGraph::new(node_count, edges, spec.period)?)
}

fn grid_links(width: usize, height: usize) -> Result<Vec<(NodeId, NodeId)>, GenError> {
    if width == 0 || height == 0 {
        return Err(GenError::Degenerate(format!("grid {width}x{height}")));
    }
    let id = |x: usize, y: usize| (y * width + x) as NodeId;
    let mut links = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if x + 1 < width {
                links.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < height {
                links.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    Ok(links)
}

fn random_links(nodes: usize, avg_degree: f64, seed: u64) -> Result<Vec<(NodeId, NodeId)>, GenError> {
    if nodes == 0 || !(avg_degree >= 0.0) {
        return Err(GenError::Degenerate(format!("random({nodes}, {avg_degree})")));
    }
    let mut rng = stream(seed, Stream::Topology);
    let pos: Vec<(f64, f64)> = (0..nodes).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let dist = |a: usize, b: usize| {
        let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
        dx * dx + dy * dy
    };

    // Prim's spanning tree on the complete Euclidean graph
    let mut links: Vec<(NodeId, NodeId)> = Vec::with_capacity(nodes * 2);
    let mut in_tree = vec![false; nodes];
    let mut best = vec![(f64::INFINITY, 0usize); nodes];
    in_tree[0] = true;
    for v in 1..nodes {
        best[v] = (dist(0, v), 0);
    }
    for _ in 1..nodes {
        let (v, _) = (0..nodes)
            .filter(|&v| !in_tree[v])
            .map(|v| (v, best[v].0))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        in_tree[v] = true;
        let p = best[v].1;
        links.push((p.min(v) as NodeId, p.max(v) as NodeId));
        for w in 0..nodes {
            if !in_tree[w] {
                let d = dist(v, w);
                if d < best[w].0 {
                    best[w] = (d, v);
                }
            }
        }
    }

    let wanted = ((nodes as f64 * avg_degree / 2.0).round() as usize).max(links.len());
    let k = (avg_degree.ceil() as usize + 3).min(nodes.saturating_sub(1));
    let mut candidates: Vec<(f64, NodeId, NodeId)> = Vec::with_capacity(nodes * k);
    for a in 0..nodes {
        let mut near: Vec<(f64, usize)> = (0..nodes).filter(|&b| b != a).map(|b| (dist(a, b), b)).collect();
        if near.len() > k {
            near.select_nth_unstable_by(k, |x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            near.truncate(k);
        }
        for (d, b) in near {
            if a < b {
                candidates.push((d, a as NodeId, b as NodeId));
            } else {
                candidates.push((d, b as NodeId, a as NodeId));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut present: std::collections::HashSet<(NodeId, NodeId)> = links.iter().copied().collect();
    for (_, a, b) in candidates {
        if links.len() >= wanted {
            break;
        }
        if present.insert((a, b)) {
            links.push((a, b));
        }
    }
    Ok(links)
}

const MIN_SLOPE: f64 = -1.0 + 1e-6;

/// Breakpoints at distinct whole seconds, values in
/// `[base, base * (1 + amplitude)]`, then raised where needed so that no
/// segment (including the wrap-around one) falls steeper than `MIN_SLOPE`.
pub fn random_ttf(rng: &mut ChaCha8Rng, model: &TtfModel, period: f64) -> Ttf {
    let k = rng.gen_range(model.points.0..=model.points.1);
    let slots = (period.floor() as usize).max(1);
    let k = k.min(slots);
    let base = rng.gen_range(model.base_weight.0..=model.base_weight.1);
    let mut times: Vec<usize> = sample(rng, slots, k).into_vec();
    times.sort_unstable();
    let mut points: Vec<Point> = times
        .into_iter()
        .map(|t| {
            let val = base * (1.0 + model.peak_amplitude * rng.gen::<f64>());
            Point::new(t as f64, (val * 1000.0).round() / 1000.0)
        })
        .collect();
    enforce_fifo(&mut points, period);
    Ttf::new(points, period).expect("generated breakpoints are valid")
}

fn enforce_fifo(points: &mut [Point], period: f64) {
    let n = points.len();
    if n < 2 {
        return;
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            let j = (i + 1) % n;
            let dt = if j == 0 { points[0].at + period - points[i].at } else { points[j].at - points[i].at };
            let floor = points[i].val + MIN_SLOPE * dt;
            if points[j].val < floor {
                points[j].val = floor;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let g = generate(&GeneratorSpec::grid(1, 1, 1)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let g = generate(&GeneratorSpec::grid(2, 2, 1)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 8));
        let g = generate(&GeneratorSpec::grid(20, 20, 1)).unwrap();
        assert_eq!(g.edge_count(), 2 * (2 * 19 * 20));
        assert!(generate(&GeneratorSpec::grid(0, 3, 1)).is_err());
    }

    #[test]
    fn random_graph_degree_and_connectivity() {
        let g = generate(&GeneratorSpec::random(300, 3.0, 7)).unwrap();
        assert_eq!(g.node_count(), 300);
        assert_eq!(g.edge_count(), 900);
        let mut seen = vec![false; 300];
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v as usize], true) {
                continue;
            }
            stack.extend(g.out_edges(v).iter().map(|&e| g.edge(e).head));
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn generated_ttfs_are_fifo() {
        let model = TtfModel { points: (2, 8), base_weight: (1.0, 50.0), peak_amplitude: 3.0 };
        let mut rng = stream(3, Stream::Weights);
        for _ in 0..500 {
            let f = random_ttf(&mut rng, &model, 100.0);
            assert!(f.is_fifo());
            assert!((2..=8).contains(&f.len()));
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate(&GeneratorSpec::random(50, 3.0, 11)).unwrap();
        let b = generate(&GeneratorSpec::random(50, 3.0, 11)).unwrap();
        let c = generate(&GeneratorSpec::random(50, 3.0, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
