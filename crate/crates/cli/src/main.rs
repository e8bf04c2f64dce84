//! `forcepath` command line.
//!
//! Results go to stdout as JSON (or a table for `experiment`). Failures print
//! `{"error": {"category": ..., "message": ...}}` to stderr and exit nonzero.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use forcepath::attack::pathattack_with_paths;
use forcepath::harness::{
    format_edge_list, load_edge_list, select_p_star, LoadedGraph, TerminalMode, DEFAULT_RANKS,
};
use forcepath::lp::write_lp;
use forcepath::reduction::{
    brute_force_3tc, brute_force_force_path_cut, brute_force_fpc_decision, solve_3tc_via_fpc,
    TerminalCutInstance, BRUTE_FORCE_LIMIT,
};
use forcepath::{
    assign_weights, generate, run, AttackConfig, CutPlan, ExperimentConfig, Family, GeneratorSpec,
    HarnessError, Method, NodeId, Path, RelaxedCutLP, WeightKind, WeightScheme,
};

#[derive(Parser)]
#[command(
    name = "forcepath",
    version,
    about = "Force a chosen path to be the unique shortest path by removing edges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph as an edge list
    Generate(GenerateArgs),
    /// Attack one target path in an edge-list graph
    Attack(AttackArgs),
    /// Run a batch of seeded experiments
    Experiment(ExperimentArgs),
    /// Check that 3-Terminal Cut agrees with its Force Path Cut reduction
    ReduceCheck(ReduceArgs),
    /// Exact minimum-cost cut by exhaustive search
    BruteForce(BruteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Er,
    Ba,
    Kronecker,
    Lattice,
    Complete,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightName {
    Poisson,
    Uniform,
    Equal,
}

impl WeightName {
    fn kind(self) -> WeightKind {
        match self {
            WeightName::Poisson => WeightKind::poisson(),
            WeightName::Uniform => WeightKind::uniform(),
            WeightName::Equal => WeightKind::equal(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TerminalName {
    Uniform,
    Hops,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Graph family
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    /// Node count (er, ba, complete)
    #[arg(long)]
    nodes: Option<usize>,
    /// Edge probability (er)
    #[arg(long)]
    prob: Option<f64>,
    /// Edges per arriving node (ba)
    #[arg(long)]
    attach: Option<usize>,
    /// Kronecker iterations; the graph has 2^iterations nodes
    #[arg(long)]
    iterations: Option<u32>,
    /// Kronecker expected edge density
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
}

impl FamilyArgs {
    fn family(&self) -> Result<Option<Family>, HarnessError> {
        let Some(name) = self.family else {
            return Ok(None);
        };
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| HarnessError::Config(format!("--{flag} is required for this family")))
        };
        Ok(Some(match name {
            FamilyName::Er => Family::Er {
                n: need(self.nodes, "nodes")?,
                p: self
                    .prob
                    .ok_or_else(|| HarnessError::Config("--prob is required for er".into()))?,
            },
            FamilyName::Ba => Family::Ba {
                n: need(self.nodes, "nodes")?,
                m: need(self.attach, "attach")?,
            },
            FamilyName::Kronecker => Family::Kronecker {
                iterations: self.iterations.ok_or_else(|| {
                    HarnessError::Config("--iterations is required for kronecker".into())
                })?,
                density: self.density.ok_or_else(|| {
                    HarnessError::Config("--density is required for kronecker".into())
                })?,
                initiator: forcepath::generators::KRONECKER_INITIATOR,
            },
            FamilyName::Lattice => Family::Lattice {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
            },
            FamilyName::Complete => Family::Complete {
                n: need(self.nodes, "nodes")?,
            },
        }))
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight scheme; unit weights when absent
    #[arg(long, value_enum)]
    weights: Option<WeightName>,
    #[arg(long, default_value_t = 0)]
    weight_seed: u64,
    /// Output file; stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TargetArgs {
    /// Edge-list file
    #[arg(long)]
    graph: PathBuf,
    /// Target path as comma-separated node labels
    #[arg(long, conflicts_with_all = ["source", "target", "rank"])]
    path: Option<String>,
    /// Source label, used with --target and --rank
    #[arg(long, requires_all = ["target", "rank"])]
    source: Option<String>,
    #[arg(long)]
    target: Option<String>,
    /// 1-based rank of the target among simple source-target paths
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, default_value = "pathattack-lp")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    iteration_cap: Option<usize>,
    #[arg(long)]
    recompute_eigenscores: bool,
    /// Write the final relaxed LP (pathattack methods) in CPLEX-LP format
    #[arg(long)]
    lp_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML configuration; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, conflicts_with = "family")]
    edge_list: Option<PathBuf>,
    #[arg(long, value_enum)]
    weights: Option<WeightName>,
    #[arg(long, value_enum)]
    terminals: Option<TerminalName>,
    /// Hop distance between terminals in hops mode
    #[arg(long)]
    hops: Option<usize>,
    /// Neighborhood radius in hops mode
    #[arg(long)]
    neighborhood: Option<usize>,
    /// Comma-separated target path ranks [default: 5,20,50]
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Comma-separated methods
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// [default: 20]
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Run repetitions on one thread
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    iteration_cap: Option<usize>,
    #[arg(long)]
    recompute_eigenscores: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Edge-list file; weights double as costs
    #[arg(long)]
    graph: PathBuf,
    /// Three comma-separated terminal labels
    #[arg(long, value_delimiter = ',', num_args = 1)]
    terminals: Vec<String>,
    #[arg(long)]
    budget: f64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
}

#[derive(Args)]
struct BruteArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Largest number of cuttable edges to accept
    #[arg(long, default_value_t = BRUTE_FORCE_LIMIT)]
    limit: usize,
}

fn node(loaded: &LoadedGraph, label: &str) -> Result<NodeId, HarnessError> {
    loaded
        .id_of(label)
        .ok_or_else(|| HarnessError::Config(format!("no node labelled `{label}`")))
}

fn resolve_target(args: &TargetArgs) -> Result<(LoadedGraph, Path), HarnessError> {
    let loaded = load_edge_list(&args.graph)?;
    let p = match (&args.path, &args.source, &args.target, args.rank) {
        (Some(spec), _, _, _) => {
            let nodes = spec
                .split(',')
                .map(|l| node(&loaded, l.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            Path::new(&loaded.graph, nodes)?
        }
        (None, Some(s), Some(t), Some(k)) => {
            select_p_star(&loaded.graph, node(&loaded, s)?, node(&loaded, t)?, k)?
        }
        _ => {
            return Err(HarnessError::Config(
                "give --path, or --source, --target and --rank".into(),
            ))
        }
    };
    Ok((loaded, p))
}

fn labelled_plan(loaded: &LoadedGraph, plan: &CutPlan) -> serde_json::Value {
    let label = |v: NodeId| loaded.labels[v].clone();
    json!({
        "plan": plan,
        "removed_edge_labels": plan
            .removed_edges
            .iter()
            .map(|k| [label(k.lo), label(k.hi)])
            .collect::<Vec<_>>(),
        "protected_path_labels": plan
            .protected_path
            .nodes()
            .iter()
            .map(|&v| label(v))
            .collect::<Vec<_>>(),
    })
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<(), HarnessError> {
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(HarnessError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), HarnessError> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn cmd_generate(args: GenerateArgs) -> Result<(), HarnessError> {
    let family = args
        .family
        .family()?
        .ok_or_else(|| HarnessError::Config("--family is required".into()))?;
    let mut g = generate(&GeneratorSpec::new(family, args.seed))?;
    if let Some(w) = args.weights {
        g = assign_weights(&g, &WeightScheme::new(w.kind(), args.weight_seed))?;
    }
    let text = format_edge_list(&LoadedGraph::unlabeled(g));
    match args.output {
        Some(path) => fs::write(&path, text).map_err(|e| HarnessError::Io { path, source: e }),
        None => emit(&text),
    }
}

fn cmd_attack(args: AttackArgs) -> Result<(), HarnessError> {
    let (loaded, p_star) = resolve_target(&args.target)?;
    let cfg = AttackConfig {
        method: args.method,
        rng_seed: args.seed,
        budget: args.budget,
        iteration_cap: args.iteration_cap,
        recompute_eigenscores: args.recompute_eigenscores,
    };
    let plan = match (args.method, &args.lp_out) {
        (Method::PathattackLp | Method::PathattackGreedy, Some(lp_path)) => {
            let (mut plan, paths) = pathattack_with_paths(&loaded.graph, &p_star, &cfg)?;
            plan.within_budget = cfg
                .budget
                .map(|b| plan.total_cost <= b + forcepath::LENGTH_TOL);
            let lp = RelaxedCutLP::for_paths(&loaded.graph, &p_star, &paths)
                .map_err(forcepath::AttackError::from)?;
            fs::write(lp_path, write_lp(&lp)).map_err(|e| HarnessError::Io {
                path: lp_path.clone(),
                source: e,
            })?;
            plan
        }
        (_, Some(_)) => {
            return Err(HarnessError::Config(
                "--lp-out needs a pathattack method".into(),
            ))
        }
        (_, None) => run(&loaded.graph, &p_star, &cfg)?,
    };
    print_json(&labelled_plan(&loaded, &plan))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), HarnessError> {
    let mut cfg: ExperimentConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
                path: path.clone(),
                source: e,
            })?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig {
            generator: None,
            ..ExperimentConfig::new(Family::Complete { n: 1 }, DEFAULT_RANKS.to_vec())
        },
    };
    if let Some(family) = args.family.family()? {
        cfg.generator = Some(family);
        cfg.edge_list = None;
    }
    if let Some(path) = args.edge_list {
        cfg.edge_list = Some(path);
        cfg.generator = None;
    }
    if let Some(w) = args.weights {
        cfg.weights = Some(w.kind());
    }
    let (hops, neighborhood) = match cfg.terminals {
        TerminalMode::Hops { hops, neighborhood } => (hops, neighborhood),
        TerminalMode::Uniform => match TerminalMode::hops() {
            TerminalMode::Hops { hops, neighborhood } => (hops, neighborhood),
            TerminalMode::Uniform => unreachable!(),
        },
    };
    let hop_mode = match args.terminals {
        Some(TerminalName::Hops) => true,
        Some(TerminalName::Uniform) => false,
        None => matches!(cfg.terminals, TerminalMode::Hops { .. }),
    };
    cfg.terminals = if hop_mode {
        TerminalMode::Hops {
            hops: args.hops.unwrap_or(hops),
            neighborhood: args.neighborhood.unwrap_or(neighborhood),
        }
    } else {
        TerminalMode::Uniform
    };
    if let Some(ranks) = args.ranks {
        cfg.ranks = ranks;
    }
    if let Some(methods) = args.methods {
        cfg.methods = methods;
    }
    if let Some(r) = args.repetitions {
        cfg.repetitions = r;
    }
    if let Some(seed) = args.master_seed {
        cfg.master_seed = seed;
    }
    if let Some(dir) = args.output_dir {
        cfg.output_dir = Some(dir);
    }
    if args.serial {
        cfg.parallel = false;
    }
    if args.budget.is_some() {
        cfg.budget = args.budget;
    }
    if args.iteration_cap.is_some() {
        cfg.iteration_cap = args.iteration_cap;
    }
    cfg.recompute_eigenscores |= args.recompute_eigenscores;
    let out = forcepath::run_experiments(&cfg)?;
    emit(&out.summary.render_table(&out.timings))
}

fn cmd_reduce_check(args: ReduceArgs) -> Result<bool, HarnessError> {
    let loaded = load_edge_list(&args.graph)?;
    let ids = args
        .terminals
        .iter()
        .map(|l| node(&loaded, l.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let terminals: [NodeId; 3] = ids
        .try_into()
        .map_err(|_| HarnessError::Config("--terminals needs exactly three labels".into()))?;
    let inst = TerminalCutInstance::new(loaded.graph, args.budget, terminals)?;
    let direct = brute_force_3tc(&inst)?;
    let reduced = solve_3tc_via_fpc(&inst, args.eps, brute_force_fpc_decision)?;
    print_json(&json!({
        "three_terminal_cut": direct,
        "via_force_path_cut": reduced,
        "agree": direct == reduced,
    }))?;
    Ok(direct == reduced)
}

fn cmd_brute_force(args: BruteArgs) -> Result<(), HarnessError> {
    let (loaded, p_star) = resolve_target(&args.target)?;
    let plan = brute_force_force_path_cut(&loaded.graph, &p_star, args.limit)?;
    print_json(&labelled_plan(&loaded, &plan))
}

fn fail(category: &str, message: String) -> ExitCode {
    eprintln!(
        "{}",
        json!({ "error": { "category": category, "message": message } })
    );
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::BruteForce(a) => cmd_brute_force(a),
        Command::ReduceCheck(a) => match cmd_reduce_check(a) {
            Ok(true) => Ok(()),
            Ok(false) => {
                return fail(
                    "mismatch",
                    "reduction disagrees with the direct solver".into(),
                )
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.category(), e.to_string()),
    }
}
