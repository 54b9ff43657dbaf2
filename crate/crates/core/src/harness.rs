//! Batch verification against plain time-dependent Dijkstra, and benchmarks.

use std::fmt::{self, Write as _};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::io::Query;
use crate::preprocess::condense;
use crate::query::{
    atch_query, profile_query_with_stats, pruned_tch_query, tch_query, Pruning, QueryError, QueryResult, QueryStats,
};
use crate::rng::{stream, Stream};
use crate::search::{td_dijkstra, ScalarOptions};
use crate::tdgraph::{Hierarchy, Mode, PathResult, TdGraph};
use crate::ttf::TimeInterval;

/// Relative error above which a verified answer counts as wrong.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Dijkstra,
    Tch,
    Pruned(Pruning),
    Atch,
    Profile,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dijkstra => "dijkstra",
            Algorithm::Tch => "tch",
            Algorithm::Pruned(Pruning::Static) => "pruned-static",
            Algorithm::Pruned(Pruning::Interval) => "pruned-interval",
            Algorithm::Atch => "atch",
            Algorithm::Profile => "profile",
        }
    }

    /// Algorithms that can run on a hierarchy of the given mode.
    pub fn defaults_for(mode: Mode) -> Vec<Algorithm> {
        match mode {
            Mode::Exact => vec![
                Algorithm::Tch,
                Algorithm::Pruned(Pruning::Static),
                Algorithm::Pruned(Pruning::Interval),
                Algorithm::Profile,
            ],
            Mode::Approx(_) => vec![Algorithm::Atch],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn dijkstra_query(graph: &TdGraph, q: &Query) -> Result<QueryResult, QueryError> {
    crate::query::check_nodes(graph.node_count(), &[q.source, q.target])?;
    let opts = ScalarOptions { target: Some(q.target), ..Default::default() };
    let labels = td_dijkstra(graph, q.source, q.departure, &opts);
    let stats = QueryStats { settled: labels.stats.settled, relaxed: labels.stats.relaxed, ..Default::default() };
    let Some(edges) = labels.path_to(q.target) else {
        return Ok(QueryResult::unreachable(q.source, q.target, q.departure, stats));
    };
    Ok(QueryResult {
        source: q.source,
        target: q.target,
        departure: q.departure,
        arrival: Some(labels.arrival(q.target)),
        path: Some(PathResult::evaluate(graph, edges, q.departure)),
        stats,
    })
}

/// Answers one query with `algorithm`. Profile queries are evaluated at the
/// departure time and carry no path.
pub fn run_query(h: &Hierarchy, algorithm: Algorithm, q: &Query) -> Result<QueryResult, QueryError> {
    match algorithm {
        Algorithm::Dijkstra => dijkstra_query(h.graph(), q),
        Algorithm::Tch => tch_query(h, q.source, q.target, q.departure),
        Algorithm::Pruned(p) => pruned_tch_query(h, q.source, q.target, q.departure, p),
        Algorithm::Atch => atch_query(h, q.source, q.target, q.departure),
        Algorithm::Profile => {
            let (profile, stats) = profile_query_with_stats(h, q.source, q.target)?;
            Ok(QueryResult {
                source: q.source,
                target: q.target,
                departure: q.departure,
                arrival: profile.map(|f| q.departure + f.eval(q.departure)),
                path: None,
                stats,
            })
        }
    }
}

/// `n` uniformly random queries with departures drawn from `window`
/// (default: the whole period).
pub fn sample_queries(graph: &TdGraph, n: usize, seed: u64, window: Option<TimeInterval>) -> Vec<Query> {
    let mut rng = stream(seed, Stream::Queries);
    let nodes = graph.node_count() as u32;
    if nodes == 0 {
        return Vec::new();
    }
    let window = window.unwrap_or(TimeInterval::new(0.0, graph.period()));
    (0..n)
        .map(|_| {
            let source = rng.gen_range(0..nodes);
            let target = rng.gen_range(0..nodes);
            let departure = if window.len() > 0.0 { rng.gen_range(window.begin..window.end) } else { window.begin };
            Query { source, target, departure }
        })
        .collect()
}

fn relative_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmCheck {
    pub name: String,
    pub queries: usize,
    pub failures: usize,
    pub max_relative_error: f64,
    pub total_settled: usize,
    /// Up to ten failing queries with a description.
    pub examples: Vec<(Query, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub mode: Mode,
    pub shortcuts: usize,
    pub oracle_settled: usize,
    pub checks: Vec<AlgorithmCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            Mode::Exact => "exact".to_string(),
            Mode::Approx(eps) => format!("approx {eps}"),
        };
        let queries = self.checks.first().map_or(0, |c| c.queries);
        writeln!(f, "graph: {} nodes, {} edges", self.nodes, self.edges)?;
        writeln!(f, "hierarchy: {mode}, {} shortcuts", self.shortcuts)?;
        writeln!(f, "queries: {queries} (seed {})", self.seed)?;
        let per_query = |total: usize| if queries == 0 { 0.0 } else { total as f64 / queries as f64 };
        writeln!(f, "{:<16} settled {:>10.2}", "dijkstra", per_query(self.oracle_settled))?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<16} settled {:>10.2}  failures {:>5}  max-rel-error {:.3e}",
                c.name,
                per_query(c.total_settled),
                c.failures,
                c.max_relative_error
            )?;
            for (q, why) in &c.examples {
                writeln!(f, "  {} {} {}: {why}", q.source, q.target, q.departure)?;
            }
        }
        writeln!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// One comparison of an answer with the oracle. Returns the relative error,
/// or a description of what went wrong.
fn compare(graph: &TdGraph, oracle: &QueryResult, got: &Result<QueryResult, QueryError>) -> Result<f64, String> {
    let got = got.as_ref().map_err(|e| e.to_string())?;
    match (oracle.travel_time(), got.travel_time()) {
        (None, None) => Ok(0.0),
        (Some(_), None) => Err("target not reached".into()),
        (None, Some(_)) => Err("reached an unreachable target".into()),
        (Some(want), Some(have)) => {
            let err = relative_error(have, want);
            if err > TOLERANCE {
                return Err(format!("travel time {have} instead of {want}"));
            }
            if let Some(path) = &got.path {
                if !path.is_consistent(graph, 1e-6) {
                    return Err("path is not a connected walk".into());
                }
                let path_err = relative_error(path.travel_time, want);
                if path_err > TOLERANCE {
                    return Err(format!("path travel time {} instead of {want}", path.travel_time));
                }
                return Ok(err.max(path_err));
            }
            Ok(err)
        }
    }
}

/// Answers every query with each algorithm and compares with plain
/// time-dependent Dijkstra on the input graph. Queries run in parallel; the
/// report does not depend on scheduling.
pub fn verify(h: &Hierarchy, queries: &[Query], algorithms: &[Algorithm], seed: u64) -> VerifyReport {
    let graph = h.graph();
    let oracle: Vec<QueryResult> =
        queries.par_iter().map(|q| dijkstra_query(graph, q).expect("queries reference valid nodes")).collect();
    let oracle_settled = oracle.iter().map(|r| r.stats.settled).sum();
    let condensed = (!h.mode().is_exact() && algorithms.contains(&Algorithm::Tch)).then(|| condense(h));

    let checks = algorithms
        .iter()
        .map(|&algorithm| {
            // On an approximate hierarchy "tch" runs on its condensed form.
            let target = match (&condensed, algorithm) {
                (Some(c), Algorithm::Tch) => c,
                _ => h,
            };
            let outcomes: Vec<(Result<f64, String>, usize)> = queries
                .par_iter()
                .zip(&oracle)
                .map(|(q, want)| {
                    let got = run_query(target, algorithm, q);
                    let settled = got.as_ref().map_or(0, |r| r.stats.settled);
                    (compare(graph, want, &got), settled)
                })
                .collect();
            let mut check = AlgorithmCheck {
                name: match (&condensed, algorithm) {
                    (Some(_), Algorithm::Tch) => "condensed-tch".to_string(),
                    _ => algorithm.name().to_string(),
                },
                queries: queries.len(),
                failures: 0,
                max_relative_error: 0.0,
                total_settled: 0,
                examples: Vec::new(),
            };
            for (q, (outcome, settled)) in queries.iter().zip(outcomes) {
                check.total_settled += settled;
                match outcome {
                    Ok(err) => check.max_relative_error = check.max_relative_error.max(err),
                    Err(why) => {
                        check.failures += 1;
                        if check.examples.len() < 10 {
                            check.examples.push((*q, why));
                        }
                    }
                }
            }
            check
        })
        .collect();

    VerifyReport {
        seed,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        mode: h.mode(),
        shortcuts: h.shortcut_count(),
        oracle_settled,
        checks,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub mean_settled: f64,
    /// Oracle mean time divided by this algorithm's mean time.
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub queries: usize,
    pub preprocessing_seconds: Option<f64>,
    pub shortcuts: usize,
    pub mean_points_per_shortcut: f64,
    pub rows: Vec<BenchRow>,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "queries: {}", self.queries)?;
        match self.preprocessing_seconds {
            Some(s) => writeln!(f, "preprocessing: {s:.3} s")?,
            None => writeln!(f, "preprocessing: not measured")?,
        }
        writeln!(f, "shortcuts: {} ({:.2} points each)", self.shortcuts, self.mean_points_per_shortcut)?;
        writeln!(f, "{:<16} {:>10} {:>10} {:>10} {:>8}", "algorithm", "mean-ms", "median-ms", "settled", "speedup")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<16} {:>10.4} {:>10.4} {:>10.2} {:>8.2}",
                r.name, r.mean_ms, r.median_ms, r.mean_settled, r.speedup
            )?;
        }
        Ok(())
    }
}

fn time_queries(h: &Hierarchy, algorithm: Algorithm, queries: &[Query]) -> (Vec<f64>, usize) {
    let mut times = Vec::with_capacity(queries.len());
    let mut settled = 0;
    for q in queries {
        let start = Instant::now();
        let r = run_query(h, algorithm, q);
        times.push(start.elapsed().as_secs_f64() * 1e3);
        settled += r.map_or(0, |r| r.stats.settled);
    }
    (times, settled)
}

/// Times each algorithm sequentially on the same queries, with plain
/// Dijkstra as the baseline.
pub fn bench(h: &Hierarchy, queries: &[Query], algorithms: &[Algorithm], preprocessing_seconds: Option<f64>) -> BenchReport {
    let mut rows = Vec::new();
    let mut baseline = None;
    let all = std::iter::once(Algorithm::Dijkstra).chain(algorithms.iter().copied().filter(|&a| a != Algorithm::Dijkstra));
    for algorithm in all {
        let (mut times, settled) = time_queries(h, algorithm, queries);
        let count = times.len().max(1) as f64;
        let mean = times.iter().sum::<f64>() / count;
        times.sort_by(f64::total_cmp);
        let median = if times.is_empty() { 0.0 } else { times[times.len() / 2] };
        let base = *baseline.get_or_insert(mean);
        rows.push(BenchRow {
            name: algorithm.name().to_string(),
            mean_ms: mean,
            median_ms: median,
            mean_settled: settled as f64 / count,
            speedup: if mean > 0.0 { base / mean } else { f64::INFINITY },
        });
    }
    let shortcuts = h.shortcut_count();
    BenchReport {
        queries: queries.len(),
        preprocessing_seconds,
        shortcuts,
        mean_points_per_shortcut: if shortcuts == 0 { 0.0 } else { h.shortcut_points() as f64 / shortcuts as f64 },
        rows,
    }
}

/// Writes one result line per query, in query order.
pub fn format_results(results: &[QueryResult]) -> String {
    let mut out = String::new();
    for r in results {
        writeln!(out, "{}", crate::io::format_result(r)).unwrap();
    }
    out
}

/// Answers all queries in parallel; results are in query order.
pub fn run_batch(h: &Hierarchy, algorithm: Algorithm, queries: &[Query]) -> Result<Vec<QueryResult>, QueryError> {
    queries.par_iter().map(|q| run_query(h, algorithm, q)).collect()
}
