//! Batch experiments: seeded instances, every requested method per instance,
//! one JSON record per run.
//!
//! Output directory layout:
//!
//! - `records.jsonl`: one [`ExperimentRecord`] per line, deterministic per
//!   master seed
//! - `summary.json`: [`Summary`] computed from the records alone
//! - `timings.jsonl`: wall time per run
//! - `summary.txt`: human-readable table including mean wall times

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{run, AttackConfig, Method};
use crate::generators::{
    assign_weights, generate, Family, GeneratorSpec, WeightKind, WeightScheme,
};
use crate::graph::{EdgeKey, Graph, NodeId, Path, LENGTH_TOL};
use crate::paths::hop_neighborhood;

use super::{
    attack_category, load_edge_list, select_p_star, select_terminals, HarnessError, SkipReason,
    TerminalMode,
};

/// Constraint budget, as a fraction of the edge count, for a run to count
/// as parsimonious.
pub const PARSIMONY_FRACTION: f64 = 0.05;

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

/// Desk-scale protocol defaults.
pub const DEFAULT_RANKS: [usize; 3] = [5, 20, 50];
pub const DEFAULT_REPETITIONS: usize = 20;

fn default_repetitions() -> usize {
    DEFAULT_REPETITIONS
}

fn default_ranks() -> Vec<usize> {
    DEFAULT_RANKS.to_vec()
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Synthetic graph family; exactly one of `generator` and `edge_list`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<PathBuf>,
    /// Weight scheme drawn per repetition; absent keeps the source weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightKind>,
    #[serde(default = "uniform_mode")]
    pub terminals: TerminalMode,
    /// Target path ranks, 1-based.
    #[serde(default = "default_ranks")]
    pub ranks: Vec<usize>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub parallel: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration_cap: Option<usize>,
    #[serde(default)]
    pub recompute_eigenscores: bool,
}

fn uniform_mode() -> TerminalMode {
    TerminalMode::Uniform
}

impl ExperimentConfig {
    pub fn new(generator: Family, ranks: Vec<usize>) -> Self {
        ExperimentConfig {
            generator: Some(generator),
            edge_list: None,
            weights: None,
            terminals: TerminalMode::Uniform,
            ranks,
            methods: default_methods(),
            repetitions: DEFAULT_REPETITIONS,
            master_seed: 0,
            output_dir: None,
            parallel: true,
            budget: None,
            iteration_cap: None,
            recompute_eigenscores: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        match (&self.generator, &self.edge_list) {
            (Some(_), Some(_)) => return bad("give either `generator` or `edge_list`, not both"),
            (None, None) => return bad("one of `generator` and `edge_list` is required"),
            _ => {}
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return bad("`ranks` must be a non-empty list of ranks >= 1");
        }
        if self.methods.is_empty() {
            return bad("`methods` must not be empty");
        }
        if self.repetitions == 0 {
            return bad("`repetitions` must be at least 1");
        }
        if self.budget.is_some_and(|b| !(b.is_finite() && b >= 0.0)) {
            return bad("`budget` must be finite and non-negative");
        }
        if let Some(family) = &self.generator {
            GeneratorSpec::new(family.clone(), 0).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphDescriptor {
    Generator(GeneratorSpec),
    EdgeList(PathBuf),
}

/// Everything needed to rebuild the attacked graph and target path.
///
/// `s` and `t` are ids in the source graph. `p_star`, and the removed edges
/// of the records, use ids of the attacked graph, which is the source graph
/// itself or, in hop mode, the subgraph induced by the `neighborhood`-hop
/// ball around `s` (renumbered in id order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub repetition: usize,
    pub instance_seed: u64,
    pub graph: GraphDescriptor,
    pub weights: Option<WeightScheme>,
    pub s: Option<NodeId>,
    pub t: Option<NodeId>,
    pub neighborhood: Option<usize>,
    pub rank: usize,
    pub nodes: usize,
    pub edges: usize,
    pub p_star: Option<Vec<NodeId>>,
    pub p_star_length: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub instance: InstanceDescriptor,
    pub method: Method,
    pub status: RunStatus,
    /// Skip reason or error message.
    pub reason: Option<String>,
    pub error_category: Option<String>,
    /// Attack RNG seed.
    pub seed: u64,
    pub total_cost: Option<f64>,
    pub removed_edges: Option<Vec<EdgeKey>>,
    pub iterations: Option<usize>,
    pub constraints_generated: Option<usize>,
    pub rounding_retries: Option<usize>,
    pub lp_integral: Option<bool>,
    pub lp_objective: Option<f64>,
    pub within_budget: Option<bool>,
    /// Cost over the greedy-cost cost on the same instance.
    pub cost_reduction_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub repetition: usize,
    pub rank: usize,
    pub method: Method,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub ok: usize,
    pub skipped: usize,
    pub failed: usize,
    pub mean_cost: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub mean_constraints: Option<f64>,
    /// Pathattack methods: share of runs with an integral final LP.
    pub lp_integral_fraction: Option<f64>,
    /// Share of successful runs with constraints at most 5% of the edges.
    pub parsimonious_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub methods: Vec<MethodSummary>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn fraction(flags: impl Iterator<Item = bool>) -> Option<f64> {
    mean(flags.map(|b| if b { 1.0 } else { 0.0 }))
}

pub(crate) fn is_parsimonious(r: &ExperimentRecord) -> Option<bool> {
    r.constraints_generated
        .map(|c| c as f64 <= PARSIMONY_FRACTION * r.instance.edges as f64)
}

impl Summary {
    /// Aggregates raw records; methods appear in first-seen order.
    pub fn from_records(records: &[ExperimentRecord]) -> Self {
        let mut order: Vec<Method> = Vec::new();
        for r in records {
            if !order.contains(&r.method) {
                order.push(r.method);
            }
        }
        let methods = order
            .into_iter()
            .map(|m| {
                let mine: Vec<&ExperimentRecord> =
                    records.iter().filter(|r| r.method == m).collect();
                let ok: Vec<&&ExperimentRecord> =
                    mine.iter().filter(|r| r.status == RunStatus::Ok).collect();
                let count = |s: RunStatus| mine.iter().filter(|r| r.status == s).count();
                MethodSummary {
                    method: m,
                    ok: ok.len(),
                    skipped: count(RunStatus::Skipped),
                    failed: count(RunStatus::Failed),
                    mean_cost: mean(ok.iter().filter_map(|r| r.total_cost)),
                    mean_ratio: mean(ok.iter().filter_map(|r| r.cost_reduction_ratio)),
                    mean_constraints: mean(
                        ok.iter()
                            .filter_map(|r| r.constraints_generated.map(|c| c as f64)),
                    ),
                    lp_integral_fraction: fraction(ok.iter().filter_map(|r| r.lp_integral)),
                    parsimonious_fraction: match m {
                        Method::PathattackLp | Method::PathattackGreedy => {
                            fraction(ok.iter().filter_map(|r| is_parsimonious(r)))
                        }
                        _ => None,
                    },
                }
            })
            .collect();
        Summary { methods }
    }

    /// Fixed-width table of cost ratio against mean wall time per method.
    pub fn render_table(&self, timings: &[RunTiming]) -> String {
        let opt = |x: Option<f64>, prec: usize| match x {
            Some(v) => format!("{v:.prec$}"),
            None => "-".to_string(),
        };
        let mut out = String::new();
        writeln!(
            out,
            "{:<18} {:>5} {:>7} {:>6} {:>10} {:>12} {:>11} {:>9} {:>9}",
            "method",
            "ok",
            "skipped",
            "failed",
            "mean ratio",
            "mean wall s",
            "constraints",
            "lp int",
            "<=5% M"
        )
        .unwrap();
        for m in &self.methods {
            let wall = mean(
                timings
                    .iter()
                    .filter(|t| t.method == m.method)
                    .map(|t| t.wall_seconds),
            );
            writeln!(
                out,
                "{:<18} {:>5} {:>7} {:>6} {:>10} {:>12} {:>11} {:>9} {:>9}",
                m.method.name(),
                m.ok,
                m.skipped,
                m.failed,
                opt(m.mean_ratio, 4),
                opt(wall, 6),
                opt(m.mean_constraints, 1),
                opt(m.lp_integral_fraction, 3),
                opt(m.parsimonious_fraction, 3),
            )
            .unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub timings: Vec<RunTiming>,
    pub summary: Summary,
}

impl ExperimentOutput {
    pub fn records_jsonl(&self) -> String {
        jsonl(&self.records)
    }
}

fn jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

struct Attacked {
    graph: Graph,
    /// Terminals in attacked-graph ids.
    s: NodeId,
    t: NodeId,
}

fn base_graph(
    desc: &GraphDescriptor,
    weights: Option<&WeightScheme>,
) -> Result<Graph, HarnessError> {
    let g = match desc {
        GraphDescriptor::Generator(spec) => generate(spec)?,
        GraphDescriptor::EdgeList(path) => load_edge_list(path)?.graph,
    };
    Ok(match weights {
        Some(scheme) => assign_weights(&g, scheme)?,
        None => g,
    })
}

fn restrict(g: Graph, s: NodeId, t: NodeId, neighborhood: Option<usize>) -> Attacked {
    match neighborhood {
        None => Attacked { graph: g, s, t },
        Some(radius) => {
            let keep = hop_neighborhood(&g, s, radius);
            let (sub, old) = g.induced(&keep);
            let pos = |v: NodeId| old.binary_search(&v).expect("terminal inside its ball");
            Attacked {
                s: pos(s),
                t: pos(t),
                graph: sub,
            }
        }
    }
}

/// Rebuilds the attacked graph and target path of a recorded instance.
pub fn replay_instance(desc: &InstanceDescriptor) -> Result<(Graph, Path), HarnessError> {
    let (Some(s), Some(t), Some(nodes)) = (desc.s, desc.t, &desc.p_star) else {
        return Err(HarnessError::Config(
            "instance was skipped; nothing to replay".into(),
        ));
    };
    let g = base_graph(&desc.graph, desc.weights.as_ref())?;
    let attacked = restrict(g, s, t, desc.neighborhood);
    let p = Path::new(&attacked.graph, nodes.clone())?;
    Ok((attacked.graph, p))
}

struct Seeds {
    graph: u64,
    weights: u64,
    attack: u64,
    terminals: ChaCha8Rng,
}

impl Seeds {
    fn from_instance(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Seeds {
            graph: rng.random(),
            weights: rng.random(),
            attack: rng.random(),
            terminals: ChaCha8Rng::seed_from_u64(rng.random()),
        }
    }
}

fn blank_record(desc: &InstanceDescriptor, method: Method, seed: u64) -> ExperimentRecord {
    ExperimentRecord {
        instance: desc.clone(),
        method,
        status: RunStatus::Failed,
        reason: None,
        error_category: None,
        seed,
        total_cost: None,
        removed_edges: None,
        iterations: None,
        constraints_generated: None,
        rounding_retries: None,
        lp_integral: None,
        lp_objective: None,
        within_budget: None,
        cost_reduction_ratio: None,
    }
}

fn skipped(
    desc: &InstanceDescriptor,
    method: Method,
    seed: u64,
    reason: SkipReason,
) -> ExperimentRecord {
    ExperimentRecord {
        status: RunStatus::Skipped,
        reason: Some(reason.to_string()),
        error_category: Some("skip".into()),
        ..blank_record(desc, method, seed)
    }
}

type RunOutput = Vec<(ExperimentRecord, Option<RunTiming>)>;

fn run_repetition(
    cfg: &ExperimentConfig,
    rep: usize,
    instance_seed: u64,
) -> Result<RunOutput, HarnessError> {
    let mut seeds = Seeds::from_instance(instance_seed);
    let graph_desc = match (&cfg.generator, &cfg.edge_list) {
        (Some(family), _) => {
            GraphDescriptor::Generator(GeneratorSpec::new(family.clone(), seeds.graph))
        }
        (None, Some(path)) => GraphDescriptor::EdgeList(path.clone()),
        (None, None) => unreachable!("validated"),
    };
    let weights = cfg
        .weights
        .map(|kind| WeightScheme::new(kind, seeds.weights));
    let g = base_graph(&graph_desc, weights.as_ref())?;
    let neighborhood = match cfg.terminals {
        TerminalMode::Uniform => None,
        TerminalMode::Hops { hops, neighborhood } => Some(neighborhood.max(hops)),
    };
    let mut desc = InstanceDescriptor {
        repetition: rep,
        instance_seed,
        graph: graph_desc,
        weights,
        s: None,
        t: None,
        neighborhood,
        rank: 0,
        nodes: g.node_count(),
        edges: g.edge_count(),
        p_star: None,
        p_star_length: None,
    };
    let mut out = Vec::new();
    let terminals = match select_terminals(&g, cfg.terminals, &mut seeds.terminals) {
        Ok(t) => t,
        Err(HarnessError::Skip(reason)) => {
            for &rank in &cfg.ranks {
                desc.rank = rank;
                for &m in &cfg.methods {
                    out.push((skipped(&desc, m, seeds.attack, reason), None));
                }
            }
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    desc.s = Some(terminals.s);
    desc.t = Some(terminals.t);
    let attacked = restrict(g, terminals.s, terminals.t, neighborhood);
    desc.nodes = attacked.graph.node_count();
    desc.edges = attacked.graph.edge_count();

    for &rank in &cfg.ranks {
        desc.rank = rank;
        let p_star = match select_p_star(&attacked.graph, attacked.s, attacked.t, rank) {
            Ok(p) => p,
            Err(HarnessError::Skip(reason)) => {
                desc.p_star = None;
                desc.p_star_length = None;
                for &m in &cfg.methods {
                    out.push((skipped(&desc, m, seeds.attack, reason), None));
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        desc.p_star = Some(p_star.nodes().to_vec());
        desc.p_star_length = Some(p_star.length());
        let first = out.len();
        for &method in &cfg.methods {
            let attack_cfg = AttackConfig {
                method,
                rng_seed: seeds.attack,
                budget: cfg.budget,
                iteration_cap: cfg.iteration_cap,
                recompute_eigenscores: cfg.recompute_eigenscores,
            };
            let started = Instant::now();
            let result = run(&attacked.graph, &p_star, &attack_cfg);
            let wall_seconds = started.elapsed().as_secs_f64();
            let mut record = blank_record(&desc, method, seeds.attack);
            match result {
                Ok(plan) => {
                    record.status = RunStatus::Ok;
                    record.total_cost = Some(plan.total_cost);
                    record.removed_edges = Some(plan.removed_edges);
                    record.iterations = Some(plan.iterations);
                    record.constraints_generated = Some(plan.constraints_generated);
                    record.within_budget = plan.within_budget;
                    if let Some(cert) = plan.final_lp {
                        record.rounding_retries = Some(plan.rounding_retries);
                        record.lp_integral = Some(cert.integral);
                        record.lp_objective = Some(cert.objective);
                    }
                }
                Err(e) => {
                    log::warn!("rep {rep} rank {rank} {method}: {e}");
                    record.status = RunStatus::Failed;
                    record.reason = Some(e.to_string());
                    record.error_category = Some(attack_category(&e).into());
                }
            }
            let timing = RunTiming {
                repetition: rep,
                rank,
                method,
                wall_seconds,
            };
            out.push((record, Some(timing)));
        }
        let baseline = out[first..]
            .iter()
            .find(|(r, _)| r.method == Method::GreedyCost && r.status == RunStatus::Ok)
            .and_then(|(r, _)| r.total_cost);
        if let Some(base) = baseline {
            for (r, _) in &mut out[first..] {
                r.cost_reduction_ratio = match r.total_cost {
                    _ if r.method == Method::GreedyCost => Some(1.0),
                    Some(c) if base > LENGTH_TOL => Some(c / base),
                    // nothing to cut for the baseline, so nothing for anyone
                    Some(c) if c <= LENGTH_TOL => Some(1.0),
                    _ => None,
                };
            }
        }
    }
    Ok(out)
}

/// Runs every (repetition, rank, method) combination of `cfg`.
///
/// Repetition `r` draws its instance seed as the `r`-th `u64` of a ChaCha8
/// stream seeded with the master seed, so results do not depend on thread
/// scheduling. Per-run failures and skips become records; only invalid
/// configurations or unreadable inputs abort.
pub fn run_experiments(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    let seeds: Vec<u64> = (0..cfg.repetitions).map(|_| master.random()).collect();
    let per_rep: Vec<Result<RunOutput, HarnessError>> = if cfg.parallel {
        seeds
            .par_iter()
            .enumerate()
            .map(|(rep, &seed)| run_repetition(cfg, rep, seed))
            .collect()
    } else {
        seeds
            .iter()
            .enumerate()
            .map(|(rep, &seed)| run_repetition(cfg, rep, seed))
            .collect()
    };
    let mut records = Vec::new();
    let mut timings = Vec::new();
    for rep in per_rep {
        for (record, timing) in rep? {
            records.push(record);
            timings.extend(timing);
        }
    }
    let summary = Summary::from_records(&records);
    let output = ExperimentOutput {
        records,
        timings,
        summary,
    };
    if let Some(dir) = &cfg.output_dir {
        write_outputs(&output, dir)?;
    }
    Ok(output)
}

fn write_outputs(output: &ExperimentOutput, dir: &std::path::Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let files = [
        ("records.jsonl", output.records_jsonl()),
        ("timings.jsonl", jsonl(&output.timings)),
        (
            "summary.json",
            serde_json::to_string_pretty(&output.summary)? + "\n",
        ),
        ("summary.txt", output.summary.render_table(&output.timings)),
    ];
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}
