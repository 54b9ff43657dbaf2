use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tdch::generator::{generate, GeneratorSpec, Topology, TtfModel};
use tdch::harness::{self, Algorithm};
use tdch::io::{self, Query};
use tdch::preprocess::{preprocess, ContractionConfig, OrderingStrategy};
use tdch::query::{profile_query_graph, Pruning};
use tdch::tdgraph::{Hierarchy, Mode, TdGraph};
use tdch::ttf::{TimeInterval, DEFAULT_PERIOD};

#[derive(Parser)]
#[command(name = "tdch", version, about = "Time-dependent contraction hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph file.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Build a hierarchy file from a graph file.
    Preprocess {
        graph: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Answer the queries of a query file (`<s> <t> <tau>` per line).
    Query {
        /// Hierarchy file, or a graph file for `dijkstra` and `profile`.
        input: PathBuf,
        queries: PathBuf,
        #[command(flatten)]
        algo: AlgoArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare hierarchy queries with Dijkstra on random queries.
    Verify {
        graph: PathBuf,
        hierarchy: PathBuf,
        #[command(flatten)]
        sample: SampleArgs,
        #[command(flatten)]
        algo: OptionalAlgoArgs,
    },
    /// Time queries; preprocesses the graph first if no hierarchy is given.
    Bench {
        graph: PathBuf,
        hierarchy: Option<PathBuf>,
        #[command(flatten)]
        sample: SampleArgs,
        #[command(flatten)]
        build: BuildArgs,
        #[command(flatten)]
        algo: OptionalAlgoArgs,
    },
}

#[derive(Subcommand)]
enum GenModel {
    /// 4-neighbour lattice, both directions.
    Grid {
        width: usize,
        height: usize,
        #[command(flatten)]
        common: GenArgs,
    },
    /// Random geometric graph.
    Random {
        nodes: usize,
        avg_degree: f64,
        #[command(flatten)]
        common: GenArgs,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Breakpoints per edge: MIN MAX.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [2, 8])]
    points: Vec<usize>,
    /// Free-flow travel time in seconds: MIN MAX.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [10.0, 100.0])]
    base: Vec<f64>,
    /// Peak travel time is at most base * (1 + amplitude).
    #[arg(long, default_value_t = 0.5)]
    amplitude: f64,
    #[arg(long, default_value_t = DEFAULT_PERIOD)]
    period: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Approximation factor for `--mode approx`.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Order nodes by K sampled departure times instead of mean travel times.
    #[arg(long, value_name = "K")]
    ordering_samples: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Dijkstra,
    Tch,
    Pruned,
    Atch,
    Profile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PruningArg {
    None,
    Static,
    Interval,
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, value_enum, default_value_t = AlgoArg::Tch)]
    algo: AlgoArg,
    /// Lower bounds for `--algo pruned` (default: static).
    #[arg(long, value_enum)]
    pruning: Option<PruningArg>,
}

#[derive(Args)]
struct OptionalAlgoArgs {
    /// Check only this algorithm (default: all that fit the hierarchy).
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    #[arg(long, value_enum)]
    pruning: Option<PruningArg>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Draw departure times from [BEGIN, END) instead of the whole period.
    #[arg(long, num_args = 2, value_names = ["BEGIN", "END"])]
    window: Option<Vec<f64>>,
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_path<T, E: fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<TdGraph, Failure> {
    with_path(path, io::parse_graph(&read(path)?))
}

fn load_hierarchy(path: &Path) -> Result<Hierarchy, Failure> {
    with_path(path, io::parse_hierarchy(&read(path)?))
}

fn algorithm(algo: AlgoArg, pruning: Option<PruningArg>) -> Algorithm {
    match (algo, pruning) {
        (AlgoArg::Dijkstra, _) => Algorithm::Dijkstra,
        (AlgoArg::Atch, _) => Algorithm::Atch,
        (AlgoArg::Profile, _) => Algorithm::Profile,
        (AlgoArg::Tch, None | Some(PruningArg::None)) | (AlgoArg::Pruned, Some(PruningArg::None)) => Algorithm::Tch,
        (AlgoArg::Tch | AlgoArg::Pruned, Some(PruningArg::Interval)) => Algorithm::Pruned(Pruning::Interval),
        (AlgoArg::Tch, Some(PruningArg::Static)) | (AlgoArg::Pruned, None | Some(PruningArg::Static)) => {
            Algorithm::Pruned(Pruning::Static)
        }
    }
}

/// Rejects algorithms that cannot run on a hierarchy of this mode.
fn check_mode(algorithm: Algorithm, mode: Mode) -> Result<(), Failure> {
    let ok = match algorithm {
        Algorithm::Dijkstra => true,
        Algorithm::Atch => !mode.is_exact(),
        Algorithm::Tch | Algorithm::Pruned(_) | Algorithm::Profile => mode.is_exact(),
    };
    if ok {
        Ok(())
    } else {
        let kind = if mode.is_exact() { "an exact" } else { "an approximate" };
        Err(Failure::Usage(format!("algorithm {algorithm} cannot run on {kind} hierarchy")))
    }
}

fn window(args: &SampleArgs) -> Result<Option<TimeInterval>, Failure> {
    match args.window.as_deref() {
        None => Ok(None),
        Some(&[begin, end]) if begin.is_finite() && end.is_finite() && begin <= end => {
            Ok(Some(TimeInterval::new(begin, end)))
        }
        Some(w) => Err(Failure::Usage(format!("invalid window {w:?}"))),
    }
}

fn config(build: &BuildArgs) -> (OrderingStrategy, ContractionConfig) {
    let strategy = match build.ordering_samples {
        Some(k) => OrderingStrategy::samples(k),
        None => OrderingStrategy::default(),
    };
    let config = match build.mode {
        ModeArg::Exact => ContractionConfig::exact(),
        ModeArg::Approx => ContractionConfig::approx(build.epsilon),
    };
    (strategy, config)
}

fn algorithms_for(h: &Hierarchy, algo: &OptionalAlgoArgs) -> Result<Vec<Algorithm>, Failure> {
    match algo.algo {
        Some(a) => {
            let a = algorithm(a, algo.pruning);
            if !(a == Algorithm::Tch && !h.mode().is_exact()) {
                check_mode(a, h.mode())?;
            }
            Ok(vec![a])
        }
        None => Ok(Algorithm::defaults_for(h.mode())),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { model } => {
            let (topology, common) = match model {
                GenModel::Grid { width, height, common } => (Topology::Grid { width, height }, common),
                GenModel::Random { nodes, avg_degree, common } => (Topology::Random { nodes, avg_degree }, common),
            };
            let ttf = TtfModel {
                points: (common.points[0], common.points[1]),
                base_weight: (common.base[0], common.base[1]),
                peak_amplitude: common.amplitude,
            };
            let spec = GeneratorSpec { topology, ttf, period: common.period, seed: common.seed };
            let graph = generate(&spec)?;
            emit(common.output.as_deref(), &io::write_graph(&graph))
        }
        Command::Preprocess { graph, build, output } => {
            let g = load_graph(&graph)?;
            if let ModeArg::Approx = build.mode {
                if !(build.epsilon.is_finite() && build.epsilon >= 0.0) {
                    return Err(Failure::Usage(format!("invalid epsilon {}", build.epsilon)));
                }
            }
            let (strategy, config) = config(&build);
            let start = Instant::now();
            let h = preprocess(&g, &strategy, &config);
            eprintln!(
                "preprocessed {} nodes in {:.3} s: {} shortcuts, {} shortcut points",
                g.node_count(),
                start.elapsed().as_secs_f64(),
                h.shortcut_count(),
                h.shortcut_points()
            );
            emit(output.as_deref(), &io::write_hierarchy(&h))
        }
        Command::Query { input, queries, algo, output } => {
            let text = read(&input)?;
            let qs: Vec<Query> = with_path(&queries, io::parse_queries(&read(&queries)?))?;
            let algorithm = algorithm(algo.algo, algo.pruning);
            let results = if text.trim_start().starts_with("tdg") {
                let g = with_path(&input, io::parse_graph(&text))?;
                graph_queries(&g, algorithm, &qs)?
            } else {
                let h = with_path(&input, io::parse_hierarchy(&text))?;
                check_mode(algorithm, h.mode())?;
                harness::run_batch(&h, algorithm, &qs)?
            };
            emit(output.as_deref(), &harness::format_results(&results))
        }
        Command::Verify { graph, hierarchy, sample, algo } => {
            let g = load_graph(&graph)?;
            let h = load_hierarchy(&hierarchy)?;
            if h.graph().edges() != g.edges() || h.node_count() != g.node_count() || h.period() != g.period() {
                return Err(Failure::Usage("hierarchy was not built from this graph".into()));
            }
            let algorithms = algorithms_for(&h, &algo)?;
            let qs = harness::sample_queries(&g, sample.queries, sample.seed, window(&sample)?);
            let report = harness::verify(&h, &qs, &algorithms, sample.seed);
            print!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Bench { graph, hierarchy, sample, build, algo } => {
            let g = load_graph(&graph)?;
            let (h, seconds) = match hierarchy {
                Some(path) => (load_hierarchy(&path)?, None),
                None => {
                    let (strategy, config) = config(&build);
                    let start = Instant::now();
                    let h = preprocess(&g, &strategy, &config);
                    (h, Some(start.elapsed().as_secs_f64()))
                }
            };
            let algorithms = algorithms_for(&h, &algo)?;
            let qs = harness::sample_queries(&g, sample.queries, sample.seed, window(&sample)?);
            print!("{}", harness::bench(&h, &qs, &algorithms, seconds));
            Ok(())
        }
    }
}

fn graph_queries(g: &TdGraph, algorithm: Algorithm, qs: &[Query]) -> Result<Vec<tdch::query::QueryResult>, Failure> {
    qs.iter()
        .map(|q| match algorithm {
            Algorithm::Dijkstra => Ok(harness::dijkstra_query(g, q)?),
            Algorithm::Profile => {
                let profile = profile_query_graph(g, q.source, q.target)?;
                Ok(tdch::query::QueryResult {
                    source: q.source,
                    target: q.target,
                    departure: q.departure,
                    arrival: profile.map(|f| q.departure + f.eval(q.departure)),
                    path: None,
                    stats: Default::default(),
                })
            }
            other => Err(Failure::Usage(format!("algorithm {other} needs a hierarchy file"))),
        })
        .collect()
}
