use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dancar::analytic::{embed_tree, import_poincare, transform_to_bipartite};
use dancar::eval::{embedding_map, link_prediction_report, radius_degree_spearman, reconstruction_report};
use dancar::graph::{largest_weakly_connected_component, parse_edge_list, split_edges, transitive_closure};
use dancar::io::{loss_log_csv, read_embedding, read_poincare_points, write_embedding};
use dancar::params::{hyperparams_from_map, parse_config};
use dancar::viz::{render_svg, RenderOptions};
use dancar::{DirectedGraph, Direction, Error, EvalReport, Hyperparams, Model, NegativeMode, Result};

const DEFAULT_DIM: usize = 2;

#[derive(Parser)]
#[command(name = "dancar", version, about = "Disk-anchor embeddings of directed graphs")]
struct Cli {
    /// Cap on worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an embedding on an edge list and report its reconstruction.
    Train(TrainArgs),
    /// Score an embedding against an edge list.
    Eval(EvalArgs),
    /// Closed-form planar embedding of a rooted tree.
    TreeEmbed(TreeEmbedArgs),
    /// Convert Poincaré-ball points into an embedding of their threshold graph.
    ImportPoincare(ImportArgs),
    /// Double every node so that the graph becomes bipartite and acyclic.
    TransformBipartite(InOut),
    /// Transitive closure of a DAG.
    Closure(InOut),
    /// Largest weakly connected component.
    LargestComponent(InOut),
    /// Split edges into training and held-out lists.
    Split(SplitArgs),
    /// Draw a 2-dimensional embedding as SVG.
    Render(RenderArgs),
    /// Print the default hyperparameter config.
    DefaultConfig,
}

#[derive(Args, Default)]
struct HyperparamFlags {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    lambda_neg: Option<f64>,
    #[arg(long)]
    lambda_anc: Option<f64>,
    #[arg(long)]
    b1: Option<usize>,
    #[arg(long)]
    b2: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum)]
    negative_mode: Option<NegativeModeArg>,
    #[arg(long, value_enum)]
    baseline: Option<ModelArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NegativeModeArg {
    Exact,
    Approximate,
}

impl From<NegativeModeArg> for NegativeMode {
    fn from(m: NegativeModeArg) -> Self {
        match m {
            NegativeModeArg::Exact => NegativeMode::Exact,
            NegativeModeArg::Approximate => NegativeMode::Approximate,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum ModelArg {
    #[default]
    Dancar,
    Disk,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Dancar => Model::Dancar,
            ModelArg::Disk => Model::Disk,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum DirectionArg {
    #[default]
    Out,
    In,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Out => Direction::Out,
            DirectionArg::In => Direction::In,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Edge list, one `head tail` pair per line.
    edges: PathBuf,
    /// Hyperparameter file; every key must be present.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the embedding.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the per-iteration loss CSV.
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    hp: HyperparamFlags,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum EvalMode {
    #[default]
    Reconstruct,
    Linkpred,
}

#[derive(Args)]
struct EvalArgs {
    /// Edge list the embedding is judged against (the training edges in linkpred mode).
    edges: PathBuf,
    embedding: PathBuf,
    #[arg(long, value_enum, default_value = "reconstruct")]
    mode: EvalMode,
    /// Full edge list; required in linkpred mode.
    #[arg(long)]
    full: Option<PathBuf>,
    /// Also report mean average precision.
    #[arg(long)]
    map: bool,
    #[arg(long, value_enum, default_value = "out")]
    direction: DirectionArg,
    /// Also report the radius/out-degree rank correlation.
    #[arg(long)]
    spearman: bool,
    #[arg(long, value_enum, default_value = "dancar")]
    baseline: ModelArg,
    /// Print the report on one line.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct TreeEmbedArgs {
    edges: PathBuf,
    /// Label of the root node.
    #[arg(long)]
    root: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportArgs {
    /// Lines of `label x_1 .. x_k` with every point inside the unit ball.
    points: PathBuf,
    /// Hyperbolic distance threshold.
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InOut {
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    input: PathBuf,
    #[arg(long)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    held_out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    embedding: PathBuf,
    /// Edge list used for arrows; node labels must match the embedding.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    show_edges: bool,
    /// Comma-separated labels drawn in a distinct color.
    #[arg(long, value_delimiter = ',')]
    highlight: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    stroke_width: f64,
    #[arg(long, default_value_t = 800.0)]
    canvas_px: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<DirectedGraph> {
    let parsed = parse_edge_list(&read(path)?)?;
    if parsed.stats.duplicates > 0 {
        eprintln!(
            "warning: {}: dropped {} duplicate edge(s)",
            path.display(),
            parsed.stats.duplicates
        );
    }
    if parsed.stats.self_loops > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loop(s)",
            path.display(),
            parsed.stats.self_loops
        );
    }
    Ok(parsed.graph)
}

/// Config file (or defaults) overlaid with command-line flags.
fn resolve_hyperparams(config: Option<&Path>, flags: &HyperparamFlags) -> Result<(Hyperparams, usize)> {
    let mut map = match config {
        Some(path) => parse_config(&read(path)?)?,
        None => parse_config(&Hyperparams::default().to_config_text())?,
    };
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            map.insert(key.to_owned(), v);
        }
    };
    set("dim", flags.dim.map(|v| v.to_string()));
    set("seed", flags.seed.map(|v| v.to_string()));
    set("iterations", flags.iterations.map(|v| v.to_string()));
    set("margin", flags.margin.map(|v| v.to_string()));
    set("lambda_neg", flags.lambda_neg.map(|v| v.to_string()));
    set("lambda_anc", flags.lambda_anc.map(|v| v.to_string()));
    set("b1", flags.b1.map(|v| v.to_string()));
    set("b2", flags.b2.map(|v| v.to_string()));
    set("adam_alpha", flags.alpha.map(|v| v.to_string()));
    set("adam_beta1", flags.beta1.map(|v| v.to_string()));
    set("adam_beta2", flags.beta2.map(|v| v.to_string()));
    set("adam_eps", flags.eps.map(|v| v.to_string()));
    set(
        "negative_mode",
        flags.negative_mode.map(|m| NegativeMode::from(m).to_string()),
    );
    set("model", flags.baseline.map(|m| Model::from(m).to_string()));

    let hp = hyperparams_from_map(&map)?;
    let dim = match map.get("dim") {
        Some(v) => v.parse().map_err(|_| Error::Config {
            key: "dim".into(),
            message: format!("cannot parse `{v}`"),
        })?,
        None => DEFAULT_DIM,
    };
    if dim == 0 {
        return Err(Error::Config {
            key: "dim".into(),
            message: "must be >= 1".into(),
        });
    }
    Ok((hp, dim))
}

fn print_report(report: &EvalReport, summary: bool) {
    if summary {
        println!("{}", report.to_line());
    } else {
        print!("{}", report.to_kv());
    }
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let (hp, dim) = resolve_hyperparams(args.config.as_deref(), &args.hp)?;
    let g = load_graph(&args.edges)?;
    let report = dancar::train(&g, &hp, dim)?;
    write(&args.out, &write_embedding(&report.embedding, &g.label_table())?)?;
    if let Some(log) = &args.log {
        write(log, &loss_log_csv(&report.history))?;
    }
    print_report(&reconstruction_report(&g, &report.embedding, hp.model)?, false);
    Ok(())
}

/// Re-expresses `g` in the node ids of `reference`, matching by label.
fn reindex(g: &DirectedGraph, reference: &DirectedGraph) -> Result<DirectedGraph> {
    let ids: HashMap<String, usize> = reference
        .label_table()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let lookup = |v: usize| {
        let label = g.label(v);
        ids.get(label.as_ref())
            .copied()
            .ok_or_else(|| Error::NodeMismatch(format!("node `{label}` is not in the full graph")))
    };
    let edges = g
        .edges()
        .map(|(v, w)| Ok((lookup(v)?, lookup(w)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(reference.with_edges(edges))
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let model = Model::from(args.baseline);
    let labeled = read_embedding(&read(&args.embedding)?)?;
    let graph = load_graph(&args.edges)?;
    let (judge, emb, mut report) = match args.mode {
        EvalMode::Reconstruct => {
            let (g, emb) = labeled.align(&graph)?;
            let report = reconstruction_report(&g, &emb, model)?;
            (g, emb, report)
        }
        EvalMode::Linkpred => {
            let full_path = args
                .full
                .as_deref()
                .ok_or_else(|| Error::Contract("linkpred mode requires --full <edge list>".into()))?;
            let full = load_graph(full_path)?;
            let (full, emb) = labeled.align(&full)?;
            let train = reindex(&graph, &full)?;
            let report = link_prediction_report(&full, &train, &emb, model)?;
            (full, emb, report)
        }
    };
    if args.map {
        report.map = Some(embedding_map(&judge, &emb, model, args.direction.into())?);
    }
    if args.spearman {
        report.spearman = Some(radius_degree_spearman(&judge, &emb)?);
    }
    print_report(&report, args.summary);
    Ok(())
}

fn cmd_tree_embed(args: &TreeEmbedArgs) -> Result<()> {
    let g = load_graph(&args.edges)?;
    let labels = g.label_table();
    let root = labels
        .iter()
        .position(|l| *l == args.root)
        .ok_or_else(|| Error::NotATree(format!("root `{}` does not occur in the edge list", args.root)))?;
    let emb = embed_tree(&g, root)?;
    emit(args.out.as_deref(), &write_embedding(&emb, &labels)?)
}

fn cmd_import(args: &ImportArgs) -> Result<()> {
    let (labels, points) = read_poincare_points(&read(&args.points)?)?;
    let emb = import_poincare(&points, args.eps)?;
    emit(args.out.as_deref(), &write_embedding(&emb, &labels)?)
}

fn cmd_graph_op(args: &InOut, op: impl Fn(&DirectedGraph) -> Result<DirectedGraph>) -> Result<()> {
    let g = load_graph(&args.input)?;
    emit(args.out.as_deref(), &op(&g)?.to_edge_list())
}

fn cmd_split(args: &SplitArgs) -> Result<()> {
    let g = load_graph(&args.input)?;
    let split = split_edges(&g, args.train_fraction, args.seed)?;
    write(&args.train_out, &split.train.to_edge_list())?;
    let held = g.with_edges(split.held_out);
    write(&args.held_out, &held.to_edge_list())
}

fn cmd_render(args: &RenderArgs) -> Result<()> {
    let labeled = read_embedding(&read(&args.embedding)?)?;
    let (graph, emb) = match &args.edges {
        Some(path) => {
            let (g, emb) = labeled.align(&load_graph(path)?)?;
            (Some(g), emb)
        }
        None => (None, labeled.embedding.clone()),
    };
    let labels = match &graph {
        Some(g) => g.label_table(),
        None => labeled.labels.clone(),
    };
    let highlight =
        args.highlight
            .iter()
            .map(|h| {
                labels.iter().position(|l| l == h).ok_or_else(|| {
                    Error::NodeMismatch(format!("highlighted node `{h}` is not in the embedding"))
                })
            })
            .collect::<Result<BTreeSet<_>>>()?;
    let opts = RenderOptions {
        show_edges: args.show_edges,
        highlight,
        stroke_width: args.stroke_width,
        canvas_px: args.canvas_px,
    };
    emit(args.out.as_deref(), &render_svg(&emb, graph.as_ref(), &opts)?)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Contract(format!("cannot configure thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::TreeEmbed(args) => cmd_tree_embed(args),
        Command::ImportPoincare(args) => cmd_import(args),
        Command::TransformBipartite(args) => cmd_graph_op(args, |g| Ok(transform_to_bipartite(g))),
        Command::Closure(args) => cmd_graph_op(args, transitive_closure),
        Command::LargestComponent(args) => cmd_graph_op(args, |g| Ok(largest_weakly_connected_component(g))),
        Command::Split(args) => cmd_split(args),
        Command::Render(args) => cmd_render(args),
        Command::DefaultConfig => {
            print!("dim = {DEFAULT_DIM}\n{}", Hyperparams::default().to_config_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
