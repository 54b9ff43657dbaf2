#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdch::generator::{random_ttf, TtfModel};
use tdch::tdgraph::{Edge, TdGraph};

pub const PERIOD: f64 = 1000.0;

/// Random digraph on `n` nodes: every ordered pair gets an edge with
/// probability `p`, some pairs two parallel ones.
pub fn small_graph(n: usize, p: f64, seed: u64) -> TdGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = TtfModel { points: (1, 6), base_weight: (10.0, 100.0), peak_amplitude: 1.0 };
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u == v || !rng.gen_bool(p) {
                continue;
            }
            edges.push(Edge::new(u, v, random_ttf(&mut rng, &model, PERIOD)));
            if rng.gen_bool(0.1) {
                edges.push(Edge::new(u, v, random_ttf(&mut rng, &model, PERIOD)));
            }
        }
    }
    TdGraph::new(n, edges, PERIOD).unwrap()
}

/// Earliest arrival by trying every simple path; `INFINITY` if none.
pub fn brute_force_arrival(g: &TdGraph, s: u32, t: u32, tau: f64) -> f64 {
    fn go(g: &TdGraph, v: u32, t: u32, time: f64, on_path: &mut Vec<bool>, best: &mut f64) {
        if v == t {
            *best = best.min(time);
            return;
        }
        on_path[v as usize] = true;
        for &id in g.out_edges(v) {
            let e = g.edge(id);
            if !on_path[e.head as usize] {
                go(g, e.head, t, time + e.ttf.eval(time), on_path, best);
            }
        }
        on_path[v as usize] = false;
    }
    let mut best = f64::INFINITY;
    go(g, s, t, tau, &mut vec![false; g.node_count()], &mut best);
    best
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * b.abs().max(1.0)
}
