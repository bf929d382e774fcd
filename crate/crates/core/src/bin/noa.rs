use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use noa_cluster::analysis::{merge_signals, overlay};
use noa_cluster::encoding::{InitParams, Scheme};
use noa_cluster::error::{Error, Result};
use noa_cluster::fitness::FitnessParams;
use noa_cluster::ga::{run_with_progress, GaConfig, Progress, RunOutcome};
use noa_cluster::graph::{Aggregation, AttributeView, NodeId, UpdateEvent};
use noa_cluster::io::dot::{format_dot, Highlight};
use noa_cluster::io::events::{format_events, parse_events, resolve_events};
use noa_cluster::io::output::{format_checkpoint_log, format_noa_log, read_jsonl, NoaLine, PartitionJson, Provenance};
use noa_cluster::io::tsv::{
    assign_random_weights, parse_edge_list_str, random_edge_list, table1_tsv, WeightDistribution,
};
use noa_cluster::io::{read_to_string, sha256_hex, sha256_hex_all, write_atomic};
use noa_cluster::oracle::optimal_partition;
use noa_cluster::partition::Partition;

#[derive(Parser)]
#[command(name = "noa", version, about = "GA community detection with node-of-attraction tracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in dataset.
    Gen(GenArgs),
    /// Attach random weights to a bare edge list.
    AssignWeights(AssignArgs),
    /// Cluster a static graph.
    Cluster(ClusterArgs),
    /// Cluster while replaying an event stream.
    Stream(StreamArgs),
    /// Exact optimum by enumeration (at most 10 nodes).
    Oracle(OracleArgs),
    /// Compare two partition files.
    Overlay(OverlayArgs),
    /// Print the NoA timeline of a node from a NoA log.
    NoaLog(NoaLogArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum Preset {
    /// The 15-node, 28-edge interaction table.
    Table1,
    /// The add-X / add-Y event stream for table1.
    Table2Events,
    /// Uniform random simple graph as a bare edge list.
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 6301)]
    nodes: u32,
    #[arg(long, default_value_t = 20777)]
    edges: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AssignArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    arity: usize,
    #[arg(long, default_value_t = 1)]
    min: u64,
    #[arg(long, default_value_t = 5)]
    max: u64,
    #[arg(long)]
    seed: u64,
    /// Drop self-loops and repeated undirected pairs.
    #[arg(long)]
    dedupe: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum AggArg {
    Sum,
    Max,
}

#[derive(Args)]
struct ViewArgs {
    /// Weighted edge list.
    #[arg(short, long)]
    input: PathBuf,
    /// Attributes to cluster on (repeat or comma-separate); all when omitted.
    #[arg(long = "attr", value_delimiter = ',')]
    attrs: Vec<String>,
    #[arg(long, value_enum, default_value = "sum")]
    aggregation: AggArg,
}

#[derive(Args)]
struct FitnessArgs {
    #[arg(long, default_value_t = FitnessParams::default().lambda_cut)]
    lambda_cut: f64,
    #[arg(long, default_value_t = FitnessParams::default().mu_small)]
    mu_small: f64,
    #[arg(long, default_value_t = FitnessParams::default().sigma_small)]
    sigma_small: usize,
}

impl FitnessArgs {
    fn params(&self) -> FitnessParams {
        FitnessParams { lambda_cut: self.lambda_cut, mu_small: self.mu_small, sigma_small: self.sigma_small }
    }
}

#[derive(Args)]
struct GaArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = GaConfig::default().population_size)]
    population: usize,
    #[arg(long, default_value_t = GaConfig::default().max_evaluations)]
    max_evaluations: usize,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long, default_value_t = GaConfig::default().crossover_rate)]
    crossover_rate: f64,
    #[arg(long, default_value_t = GaConfig::default().mutation_rate)]
    mutation_rate: f64,
    /// `edge-removal` (1) or `separator` (2).
    #[arg(long, default_value = "edge-removal")]
    scheme: Scheme,
    #[arg(long, default_value_t = GaConfig::default().checkpoint_every)]
    checkpoint_every: usize,
    #[arg(long, default_value_t = InitParams::default().p_init)]
    p_init: f64,
    #[arg(long, default_value_t = InitParams::default().k_max)]
    k_max: usize,
    #[command(flatten)]
    fitness: FitnessArgs,
}

impl GaArgs {
    fn config(&self) -> GaConfig {
        GaConfig {
            population_size: self.population,
            max_evaluations: self.max_evaluations,
            max_iterations: self.max_iterations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            scheme: self.scheme,
            checkpoint_every: self.checkpoint_every,
            seed: self.seed,
            fitness: self.fitness.params(),
            init: InitParams { p_init: self.p_init, k_max: self.k_max },
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Partition JSON.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    checkpoint_log: Option<PathBuf>,
    #[arg(long)]
    noa_log: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    view: ViewArgs,
    #[command(flatten)]
    ga: GaArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    view: ViewArgs,
    /// Event stream, one JSON object per line.
    #[arg(long)]
    events: PathBuf,
    #[command(flatten)]
    ga: GaArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Merge signals found at the end of the run.
    #[arg(long)]
    signals: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    merge_theta: usize,
    #[arg(long, default_value_t = 1000)]
    merge_window: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    view: ViewArgs,
    #[command(flatten)]
    fitness: FitnessArgs,
    /// Also write the partition JSON here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OverlayArgs {
    /// First partition JSON.
    a: PathBuf,
    /// Second partition JSON.
    b: PathBuf,
}

#[derive(Args)]
struct NoaLogArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Node label to follow; every record is printed when omitted.
    #[arg(long)]
    node: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => gen(a),
        Command::AssignWeights(a) => assign(a),
        Command::Cluster(a) => cluster(a),
        Command::Stream(a) => stream(a),
        Command::Oracle(a) => oracle(a),
        Command::Overlay(a) => overlay_cmd(a),
        Command::NoaLog(a) => noa_log(a),
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let text = match a.preset {
        Preset::Table1 => table1_tsv(Some(&Provenance::new("gen table1", None, sha256_hex(b"")).comment())),
        Preset::Table2Events => format_events(&noa_cluster::fixtures::table2_events()),
        Preset::Random => {
            let meta = Provenance::new(
                &format!("gen random nodes={} edges={}", a.nodes, a.edges),
                Some(a.seed),
                sha256_hex(b""),
            );
            random_edge_list(a.nodes, a.edges, a.seed, Some(&meta.comment()))?
        }
    };
    write_atomic(&a.output, text.as_bytes())
}

fn assign(a: AssignArgs) -> Result<()> {
    let raw = read_to_string(&a.input)?;
    let meta = Provenance::new(
        &format!("assign-weights arity={} uniform={}..{}", a.arity, a.min, a.max),
        Some(a.seed),
        sha256_hex(raw.as_bytes()),
    );
    let dist = WeightDistribution::Uniform { min: a.min, max: a.max };
    let out = assign_random_weights(&raw, &a.input, a.arity, dist, a.seed, a.dedupe, Some(&meta.comment()))?;
    write_atomic(&a.output, out.text.as_bytes())?;
    eprintln!("{} rows weighted, {} dropped", out.rows, out.dropped);
    Ok(())
}

fn load_view(v: &ViewArgs) -> Result<(AttributeView, String)> {
    let raw = read_to_string(&v.input)?;
    let graph = parse_edge_list_str(&raw, &v.input)?;
    let aggregation = match v.aggregation {
        AggArg::Sum => Aggregation::Sum,
        AggArg::Max => Aggregation::Max,
    };
    let names: Vec<String> = if v.attrs.is_empty() { graph.schema().names().to_vec() } else { v.attrs.clone() };
    let view = AttributeView::by_names(Arc::new(graph), &names, aggregation)?;
    Ok((view, raw))
}

fn execute(
    view: AttributeView,
    ga: &GaArgs,
    out: &OutputArgs,
    events: &[UpdateEvent],
    meta: &Provenance,
) -> Result<RunOutcome> {
    let quiet = out.quiet;
    let outcome = run_with_progress(view.clone(), ga.config(), events, |p| {
        if quiet {
            return;
        }
        match p {
            Progress::Checkpoint(cp) => eprintln!(
                "iter {:>6}  evals {:>6}  best {:.6}  clusters {}",
                cp.iteration, cp.evaluations, cp.best_total, cp.clusters
            ),
            Progress::EventBatch { tick, events, version } => {
                eprintln!("tick {tick:>6}  applied {events} event(s), snapshot version {version}")
            }
        }
    })?;

    let doc = PartitionJson::build(meta.clone(), &outcome.best, &outcome.view, outcome.best_fitness)?;
    write_atomic(&out.output, doc.to_pretty().as_bytes())?;
    if let Some(path) = &out.checkpoint_log {
        write_atomic(path, format_checkpoint_log(meta, &outcome.checkpoints).as_bytes())?;
    }
    if let Some(path) = &out.noa_log {
        write_atomic(path, format_noa_log(meta, outcome.history.records(), &outcome.view).as_bytes())?;
    }
    if let Some(path) = &out.dot {
        let new_nodes: BTreeSet<NodeId> =
            outcome.view.nodes().iter().filter(|n| !view.base().contains_node(**n)).copied().collect();
        let highlight = Highlight { noa: doc.clusters.iter().map(|c| c.noa).collect(), new_nodes };
        write_atomic(path, format_dot(&outcome.best, &outcome.view, &highlight, &[meta.comment()]).as_bytes())?;
    }
    if !quiet {
        eprintln!(
            "{} clusters, fitness {:.6}, {} evaluations over {} iterations",
            outcome.best.len(),
            outcome.best_fitness.total,
            outcome.evaluations_used,
            outcome.iterations
        );
    }
    Ok(outcome)
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let (view, raw) = load_view(&a.view)?;
    let meta = Provenance::new("cluster", Some(a.ga.seed), sha256_hex(raw.as_bytes()));
    execute(view, &a.ga, &a.out, &[], &meta).map(drop)
}

fn stream(a: StreamArgs) -> Result<()> {
    let (view, raw) = load_view(&a.view)?;
    let events_raw = read_to_string(&a.events)?;
    let labelled = parse_events(&a.events)?;
    let events = resolve_events(&labelled, view.base())?;
    let meta = Provenance::new("stream", Some(a.ga.seed), sha256_hex_all([raw.as_bytes(), events_raw.as_bytes()]));
    let outcome = execute(view, &a.ga, &a.out, &events, &meta)?;
    if let Some(path) = &a.signals {
        let signals = merge_signals(&outcome.changes, &outcome.best, &outcome.view, a.merge_theta, a.merge_window)?;
        write_atomic(path, (serde_json::to_string_pretty(&signals)? + "\n").as_bytes())?;
    }
    Ok(())
}

fn oracle(a: OracleArgs) -> Result<()> {
    let (view, raw) = load_view(&a.view)?;
    let (partition, value) = optimal_partition(&view, &a.fitness.params())?;
    let meta = Provenance::new("oracle", None, sha256_hex(raw.as_bytes()));
    let text = PartitionJson::build(meta, &partition, &view, value)?.to_pretty();
    if let Some(path) = &a.output {
        write_atomic(path, text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

fn read_partition(path: &Path) -> Result<Partition> {
    let doc: PartitionJson = serde_json::from_str(&read_to_string(path)?)?;
    Ok(Partition::new(doc.clusters.into_iter().map(|c| c.members).collect(), doc.attrs, doc.version))
}

fn overlay_cmd(a: OverlayArgs) -> Result<()> {
    let report = overlay(&read_partition(&a.a)?, &read_partition(&a.b)?);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn noa_log(a: NoaLogArgs) -> Result<()> {
    let (meta, lines): (Provenance, Vec<NoaLine>) = read_jsonl(&a.input)?;
    eprintln!("{}", meta.comment());
    let node = match &a.node {
        None => None,
        Some(label) => Some(label_to_id(label, &lines).ok_or_else(|| Error::UnknownLabel(label.clone()))?),
    };
    println!("tick\tnoa\tedges\tweight\tsize");
    for line in lines.iter().filter(|l| node.is_none_or(|n| l.record.members.contains(&n))) {
        let r = &line.record;
        println!("{}\t{}\t{}\t{}\t{}", r.tick, line.noa_label, r.edges, r.weight, r.members.len());
    }
    Ok(())
}

fn label_to_id(label: &str, lines: &[NoaLine]) -> Option<NodeId> {
    lines.iter().find(|l| l.noa_label == label).map(|l| l.record.noa).or_else(|| label.parse().ok().map(NodeId))
}
