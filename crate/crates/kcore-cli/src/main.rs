use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kcore::bench::{run_bench, write_csv};
use kcore::gen;
use kcore::graph::{load_edge_list_path, parse_edge_stream, parse_events, read_to_string};
use kcore::mrsim::{run_mr_sketch, ClusterConfig};
use kcore::report::{emit_exact_labels, emit_labels, emit_stats};
use kcore::stream::StreamSketch;
use kcore::turnstile::{Profile, TurnstileSketch};
use kcore::{peel_coreness, run_sketch, Graph, SketchParams};

#[derive(Parser)]
#[command(name = "kcore", version, about = "k-core decomposition toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact coreness of an edge-list file by peeling.
    Exact(ExactArgs),
    /// Approximate coreness with the multi-level sampling sketch.
    Sketch(SketchArgs),
    /// One-pass insertion-stream version of the sketch.
    Stream(SketchArgs),
    /// Insert/delete event stream with recovery stashes.
    Turnstile(TurnstileArgs),
    /// Simulated cluster run of the sketch, with a round/load trace.
    Mrsim(MrsimArgs),
    /// Repeated sketch runs summarized as CSV.
    Bench(BenchArgs),
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge-list file: `u v` per line, `#` comments.
    input: PathBuf,
    /// Vertex count override (ids up to nodes-1; default 1 + max id).
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args)]
struct SketchOpts {
    /// Accuracy parameter in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Threshold mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
    mode: ModeArg,
    /// Promotion threshold for practical mode.
    #[arg(short = 't', long, default_value_t = 2)]
    threshold: usize,
    /// Level growth factor for practical mode.
    #[arg(short = 'm', long, default_value_t = 2.0)]
    growth: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Theory,
    Practical,
}

impl SketchOpts {
    fn params(&self) -> SketchParams {
        match self.mode {
            ModeArg::Theory => SketchParams::theory(self.epsilon, self.seed),
            ModeArg::Practical => {
                SketchParams::practical(self.epsilon, self.threshold, self.growth, self.seed)
            }
        }
    }
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Labels file (default stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SketchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    opts: SketchOpts,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Space/meter report file.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct TurnstileArgs {
    /// Event file: `+ u v` and `- u v` lines, `#` comments.
    events: PathBuf,
    #[arg(long)]
    nodes: Option<usize>,
    #[command(flatten)]
    opts: SketchOpts,
    /// Which threshold constants to run with.
    #[arg(long, value_enum, default_value_t = ProfileArg::Native)]
    profile: ProfileArg,
    /// Override the per-stash recovery capacity.
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Native,
    Batch,
}

#[derive(Args)]
struct MrsimArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    opts: SketchOpts,
    #[arg(long, default_value_t = 4)]
    machines: usize,
    /// Per-round edge budget per machine; excesses are reported.
    #[arg(long)]
    budget: Option<usize>,
    /// Peel everything outside the 3-core first.
    #[arg(long)]
    prune3: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    opts: SketchOpts,
    /// Runs per configuration, seeds counting up from --seed.
    #[arg(long, default_value_t = 3)]
    runs: usize,
    /// Ignore vertices below this exact coreness in error percentiles.
    #[arg(long, default_value_t = 5)]
    min_core: usize,
    /// Row label (default: input file stem).
    #[arg(long)]
    label: Option<String>,
    /// CSV file (default stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// Layered construction that keeps threshold peeling busy.
    Hard {
        /// Vertex count; must be a positive multiple of 5, at least 10.
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Erdos-Renyi G(n, p).
    Gnp {
        n: usize,
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random graph with n*d/2 distinct edges.
    Regularish {
        n: usize,
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cliques joined in a path by single edges.
    Cliquechain {
        cliques: usize,
        size: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn write_to(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = fs::File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = io::BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn load_graph(args: &InputArgs) -> Result<Graph> {
    let (graph, report) = load_edge_list_path(&args.input, args.nodes)
        .with_context(|| format!("loading {}", args.input.display()))?;
    if report.self_loops + report.duplicates > 0 {
        eprintln!(
            "note: dropped {} self-loops and {} duplicate edges",
            report.self_loops, report.duplicates
        );
    }
    Ok(graph)
}

fn emit_graph(g: &Graph, path: Option<&Path>) -> Result<()> {
    write_to(path, |w| {
        for &(u, v) in g.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    })
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Exact(args) => {
            let g = load_graph(&args.input)?;
            let labels = peel_coreness(&g);
            write_to(args.output.as_deref(), |w| emit_exact_labels(w, &labels))
        }
        Cmd::Sketch(args) => {
            let g = load_graph(&args.input)?;
            let params = args.opts.params();
            let start = Instant::now();
            let (labels, stats) = run_sketch(&g, &params)?;
            let runtime = start.elapsed().as_secs_f64() * 1e3;
            write_to(args.output.as_deref(), |w| emit_labels(w, &labels))?;
            if let Some(stats_path) = args.stats.as_deref() {
                let extras = [("runtime_ms", format!("{runtime:.3}"))];
                write_to(Some(stats_path), |w| emit_stats(w, &stats, &extras))?;
            }
            Ok(())
        }
        Cmd::Stream(args) => {
            // Arrival order matters here, so bypass the graph loader.
            let text = read_to_string(&args.input.input)
                .with_context(|| format!("loading {}", args.input.input.display()))?;
            let (edges, report) = parse_edge_stream(&text)?;
            let n = args.input.nodes.unwrap_or(report.min_vertex_count).max(report.min_vertex_count);
            let params = args.opts.params();
            let mut sketch = StreamSketch::new(n, &params)?;
            let start = Instant::now();
            let mut repeats = 0usize;
            for (u, v) in edges {
                if !sketch.insert(u, v)? {
                    repeats += 1;
                }
            }
            let (labels, stats) = sketch.finalize();
            let runtime = start.elapsed().as_secs_f64() * 1e3;
            if report.self_loops + repeats > 0 {
                eprintln!(
                    "note: ignored {} self-loops and {} repeated edges",
                    report.self_loops, repeats
                );
            }
            write_to(args.output.as_deref(), |w| emit_labels(w, &labels))?;
            if let Some(stats_path) = args.stats.as_deref() {
                let extras = [("runtime_ms", format!("{runtime:.3}"))];
                write_to(Some(stats_path), |w| emit_stats(w, &stats, &extras))?;
            }
            Ok(())
        }
        Cmd::Turnstile(args) => {
            let text = read_to_string(&args.events)
                .with_context(|| format!("loading {}", args.events.display()))?;
            let events = parse_events(&text)?;
            let max_id = events
                .iter()
                .map(|e| match *e {
                    kcore::graph::Event::Insert(u, v) | kcore::graph::Event::Delete(u, v) => {
                        u.max(v)
                    }
                })
                .max();
            let required = max_id.map_or(0, |id| id + 1);
            let n = args.nodes.unwrap_or(required).max(required);
            if n < 2 {
                bail!("need at least two vertices; got {n}");
            }
            let params = args.opts.params();
            let profile = match args.profile {
                ProfileArg::Native => Profile::Native,
                ProfileArg::Batch => Profile::BatchMatched,
            };
            let mut sketch = TurnstileSketch::with_profile(n, &params, profile)?;
            if let Some(cap) = args.capacity {
                sketch.set_recovery_capacity(cap);
            }
            let start = Instant::now();
            for (k, &ev) in events.iter().enumerate() {
                sketch
                    .apply(ev)
                    .with_context(|| format!("event {} of {}", k + 1, events.len()))?;
            }
            let (labels, stats) = sketch.finalize();
            let runtime = start.elapsed().as_secs_f64() * 1e3;
            write_to(args.output.as_deref(), |w| emit_labels(w, &labels))?;
            if let Some(stats_path) = args.stats.as_deref() {
                let extras = [("runtime_ms", format!("{runtime:.3}"))];
                write_to(Some(stats_path), |w| emit_stats(w, &stats, &extras))?;
            }
            Ok(())
        }
        Cmd::Mrsim(args) => {
            let g = load_graph(&args.input)?;
            let params = args.opts.params();
            let cluster = ClusterConfig {
                machines: args.machines,
                budget: args.budget,
                prune3: args.prune3,
            };
            let start = Instant::now();
            let (labels, stats, trace) = run_mr_sketch(&g, &params, &cluster)?;
            let runtime = start.elapsed().as_secs_f64() * 1e3;
            write_to(args.output.as_deref(), |w| emit_labels(w, &labels))?;
            if let Some(stats_path) = args.stats.as_deref() {
                let mut extras = vec![
                    ("rounds", trace.rounds.to_string()),
                    ("prune_rounds", trace.prune_rounds.to_string()),
                    ("max_machine_load", trace.max_machine_load.to_string()),
                    ("density_exponent", format!("{:.4}", trace.density_exponent)),
                    ("budget_violations", trace.budget_violations.len().to_string()),
                    (
                        "broadcast_sizes",
                        trace
                            .broadcast_sizes
                            .iter()
                            .map(|s| s.to_string())
                            .collect::<Vec<_>>()
                            .join(","),
                    ),
                ];
                for (k, loads) in trace.machine_loads.iter().enumerate() {
                    extras.push((
                        "level_machine_loads",
                        format!(
                            "{k}:{}",
                            loads.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
                        ),
                    ));
                }
                extras.push(("runtime_ms", format!("{runtime:.3}")));
                write_to(Some(stats_path), |w| emit_stats(w, &stats, &extras))?;
            }
            Ok(())
        }
        Cmd::Bench(args) => {
            let g = load_graph(&args.input)?;
            let label = args.label.clone().unwrap_or_else(|| {
                args.input
                    .input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "graph".into())
            });
            let rows = run_bench(&g, &label, &args.opts.params(), args.runs, args.min_core)?;
            write_to(args.output.as_deref(), |w| write_csv(w, &rows))
        }
        Cmd::Gen(args) => match args.kind {
            GenKind::Hard { n, output } => emit_graph(&gen::hard_instance(n)?, output.as_deref()),
            GenKind::Gnp { n, p, seed, output } => {
                emit_graph(&gen::gnp(n, p, seed)?, output.as_deref())
            }
            GenKind::Regularish { n, d, seed, output } => {
                emit_graph(&gen::regularish(n, d, seed)?, output.as_deref())
            }
            GenKind::Cliquechain { cliques, size, output } => {
                emit_graph(&gen::clique_chain(cliques, size)?, output.as_deref())
            }
        },
    }
}
