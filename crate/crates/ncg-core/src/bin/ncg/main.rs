//! Command-line front door: generation, certification, dynamics runs and
//! replay, formula checks and canned experiments.
//!
//! Exit codes: 0 success / all requested concepts hold; 1 a certification or
//! replay failed (witness printed); 2 usage or input errors.

mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use ncg_core::constructions::{
    clique, clique_balanced, complete_binary_tree, directed_cycle, ds_reduction, gk_nontree,
    h_tree, kne_tree_instance, line, star, tree_star, PlainGraph,
};
use ncg_core::cost::{format_rational, parse_rational, CostMode, GameConfig};
use ncg_core::dynamics::{
    regime_equilibrium, run, trace_from_jsonl, trace_to_jsonl, verify_cycle, MoveRegime, Outcome,
    Scheduler, Trace,
};
use ncg_core::equilibrium::{certify, Concept, Verdict, WitnessChange};
use ncg_core::graph::AgentId;
use ncg_core::Network;

#[derive(Parser)]
#[command(name = "ncg", about = "network creation games with k-local strategy changes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named network family as JSON (and optionally DOT).
    Generate(GenerateArgs),
    /// Certify equilibrium concepts for a network file.
    Certify(CertifyArgs),
    /// Run sequential best-response dynamics, or replay and re-verify a trace.
    Dynamics(DynamicsArgs),
    /// Evaluate the closed-form table against the engine.
    Formulas(FormulasArgs),
    /// Run a canned experiment and emit CSV.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Line,
    Star,
    Clique,
    CliqueBalanced,
    Cycle,
    BinaryTree,
    HTree,
    TreeStar,
    GkNontree,
    DsReduction,
    KneTree,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Agent count (line, star, clique, clique-balanced, cycle).
    #[arg(long)]
    n: Option<u32>,
    /// Tree depth (binary-tree, h-tree, tree-star, kne-tree).
    #[arg(long)]
    d: Option<u32>,
    /// Star size or hang distance (tree-star, h-tree).
    #[arg(long)]
    l: Option<u32>,
    /// Locality radius (gk-nontree, kne-tree).
    #[arg(long)]
    k: Option<u32>,
    /// Plain-graph JSON input (ds-reduction).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Network JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional DOT rendering path.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Network JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Edge price as a decimal-free rational, e.g. 3/2 or 4.
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value = "sum")]
    mode: ModeArg,
    /// Concepts to certify (default: all).
    #[arg(long, value_delimiter = ',')]
    concepts: Option<Vec<ConceptArg>>,
    /// Report JSON output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sum,
    Max,
}

impl From<ModeArg> for CostMode {
    fn from(m: ModeArg) -> CostMode {
        match m {
            ModeArg::Sum => CostMode::Sum,
            ModeArg::Max => CostMode::Max,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Ne,
    KNe,
    Ge,
    KGe,
    Ase,
}

impl From<ConceptArg> for Concept {
    fn from(c: ConceptArg) -> Concept {
        match c {
            ConceptArg::Ne => Concept::Ne,
            ConceptArg::KNe => Concept::KNe,
            ConceptArg::Ge => Concept::Ge,
            ConceptArg::KGe => Concept::KGe,
            ConceptArg::Ase => Concept::Ase,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum RegimeArg {
    KSg,
    KAsg,
    KGbg,
    KBg,
}

impl From<RegimeArg> for MoveRegime {
    fn from(r: RegimeArg) -> MoveRegime {
        match r {
            RegimeArg::KSg => MoveRegime::KSg,
            RegimeArg::KAsg => MoveRegime::KAsg,
            RegimeArg::KGbg => MoveRegime::KGbg,
            RegimeArg::KBg => MoveRegime::KBg,
        }
    }
}

#[derive(Args)]
struct DynamicsArgs {
    /// Network JSON file (required unless --replay).
    #[arg(long, required_unless_present = "replay")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value = "sum")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "k-bg")]
    regime: RegimeArg,
    /// round-robin | random | max-gain | script:0,1,2
    #[arg(long, default_value = "round-robin")]
    scheduler: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum number of applied moves.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    /// Trace JSONL output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-verify a previously written trace instead of running.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct FormulasArgs {
    /// Evaluate every formula across the full grid.
    #[arg(long, default_value_t = true)]
    check_all: bool,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct ExperimentArgs {
    /// poa-line-scan | poa-binary-tree-scan | formula-grid | br-cycle-hunt |
    /// ball-lemma-scan
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 0)]
    pub(crate) seed: u64,
    /// State budget for searches.
    #[arg(long, default_value_t = 10_000_000)]
    pub(crate) budget: u64,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NCG_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .ok();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Dynamics(args) => cmd_dynamics(args),
        Command::Formulas(args) => {
            experiments::write_formula_grid(args.check_all, args.out.as_deref())
        }
        Command::Experiment(args) => experiments::cmd_experiment(&args.name, &args),
    }
}

fn need(value: Option<u32>, flag: &str) -> Result<u32, String> {
    value.ok_or_else(|| format!("missing required parameter --{flag}"))
}

pub(crate) fn write_or_print(path: Option<&std::path::Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode, String> {
    let mut meta = serde_json::Map::new();
    let net: Network = match args.family {
        Family::Line => line(need(args.n, "n")?),
        Family::Star => star(need(args.n, "n")?),
        Family::Clique => clique(need(args.n, "n")?),
        Family::CliqueBalanced => clique_balanced(need(args.n, "n")?),
        Family::Cycle => directed_cycle(need(args.n, "n")?),
        Family::BinaryTree => complete_binary_tree(need(args.d, "d")?),
        Family::HTree => {
            let h = h_tree(need(args.d, "d")?, need(args.l, "l")?);
            meta.insert("u".into(), h.u.0.into());
            meta.insert(
                "members".into(),
                h.members.iter().map(|m| m.0).collect::<Vec<u32>>().into(),
            );
            h.net
        }
        Family::TreeStar => tree_star(need(args.d, "d")?, need(args.l, "l")?),
        Family::GkNontree => {
            let inst = gk_nontree(need(args.k, "k")?).map_err(|e| e.to_string())?;
            meta.insert("u".into(), inst.u.0.into());
            meta.insert("alpha".into(), format_rational(inst.alpha).into());
            inst.net
        }
        Family::DsReduction => {
            let path = args
                .input
                .as_ref()
                .ok_or("ds-reduction needs --input with a plain graph")?;
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let graph = PlainGraph::from_json(&text).map_err(|e| e.to_string())?;
            let inst = ds_reduction(&graph);
            meta.insert("hub".into(), inst.hub.0.into());
            meta.insert("alpha".into(), format_rational(inst.alpha).into());
            inst.net
        }
        Family::KneTree => {
            let (net, cfg) = kne_tree_instance(need(args.d, "d")?, need(args.k, "k")?);
            meta.insert("alpha".into(), format_rational(cfg.alpha).into());
            meta.insert("k".into(), cfg.k.into());
            net
        }
    };
    meta.insert("n".into(), net.agent_count().into());
    write_or_print(args.out.as_deref(), &(net.to_json() + "\n"))?;
    if let Some(dot) = &args.dot {
        std::fs::write(dot, net.to_dot()).map_err(|e| format!("writing {}: {e}", dot.display()))?;
    }
    if args.out.is_some() {
        println!("{}", serde_json::Value::Object(meta));
    }
    Ok(ExitCode::SUCCESS)
}

pub(crate) fn load_network(path: &std::path::Path) -> Result<Network, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Network::from_json(&text).map_err(|e| e.to_string())
}

fn parse_alpha(text: &str) -> Result<Rational64, String> {
    let alpha = parse_rational(text).map_err(|e| e.to_string())?;
    if alpha <= Rational64::from_integer(0) {
        return Err("alpha must be positive".into());
    }
    Ok(alpha)
}

fn describe_witness(witness: &ncg_core::equilibrium::Witness) -> String {
    let change = match &witness.change {
        WitnessChange::Move(mv) => match mv.kind {
            ncg_core::moves::MoveKind::Buy { target } => format!("buy {target}"),
            ncg_core::moves::MoveKind::Delete { target } => format!("delete {target}"),
            ncg_core::moves::MoveKind::Swap { old, new } => format!("swap {old} -> {new}"),
        },
        WitnessChange::Strategy(s) => format!(
            "strategy {{{}}}",
            s.targets
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    };
    format!(
        "agent {} improves by {} (cost {} -> {})",
        witness.agent, change, witness.cost_before, witness.cost_after
    )
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode, String> {
    let net = load_network(&args.input)?;
    let alpha = parse_alpha(&args.alpha)?;
    if args.k < 1 {
        return Err("k must be at least 1".into());
    }
    let cfg = GameConfig::new(alpha, args.k, args.mode.into());
    let concepts: Vec<Concept> = match args.concepts {
        Some(list) => list.into_iter().map(Concept::from).collect(),
        None => Concept::ALL.to_vec(),
    };
    let report = certify(&net, &cfg, &concepts).map_err(|e| e.to_string())?;
    let mut all_hold = true;
    for (concept, verdict) in &report.verdicts {
        let name = serde_json::to_value(concept).unwrap();
        match verdict {
            Verdict::Holds => println!("{}: HOLDS", name.as_str().unwrap()),
            Verdict::Violated { witness } => {
                all_hold = false;
                println!(
                    "{}: VIOLATED ({})",
                    name.as_str().unwrap(),
                    describe_witness(witness)
                );
            }
        }
    }
    if let Some(beta) = &report.beta_local {
        println!("beta-local: {beta}");
    }
    if let Some(beta) = &report.beta_global {
        println!("beta-global: {beta}");
    }
    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        std::fs::write(out, json).map_err(|e| format!("writing {}: {e}", out.display()))?;
    }
    Ok(if all_hold {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_scheduler(text: &str, seed: u64) -> Result<Scheduler, String> {
    match text {
        "round-robin" => Ok(Scheduler::RoundRobin),
        "random" => Ok(Scheduler::Random { seed }),
        "max-gain" => Ok(Scheduler::MaxGain),
        other => match other.strip_prefix("script:") {
            Some(list) => {
                let agents = list
                    .split(',')
                    .map(|x| x.trim().parse::<u32>().map(AgentId))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| format!("bad script: {e}"))?;
                Ok(Scheduler::Script { agents })
            }
            None => Err(format!("unknown scheduler: {other}")),
        },
    }
}

fn cmd_dynamics(args: DynamicsArgs) -> Result<ExitCode, String> {
    if let Some(trace_path) = &args.replay {
        return replay_trace(trace_path);
    }
    let net = load_network(args.input.as_ref().unwrap())?;
    let alpha = parse_alpha(&args.alpha)?;
    let cfg = GameConfig::new(alpha, args.k, args.mode.into());
    let scheduler = parse_scheduler(&args.scheduler, args.seed)?;
    let regime: MoveRegime = args.regime.into();
    let trace = run(&net, &cfg, regime, &scheduler, args.budget).map_err(|e| e.to_string())?;
    match trace.outcome {
        Outcome::Converged { moves } => println!("converged after {moves} moves"),
        Outcome::Cycle {
            first_index,
            period,
        } => println!("cycle: first occurrence at move {first_index}, period {period}"),
        Outcome::BudgetExhausted => println!("budget exhausted"),
    }
    if let Some(out) = &args.out {
        std::fs::write(out, trace_to_jsonl(&trace))
            .map_err(|e| format!("writing {}: {e}", out.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn replay_trace(path: &std::path::Path) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let trace: Trace = trace_from_jsonl(&text).map_err(|e| e.to_string())?;
    if verify_trace(&trace) {
        println!("trace verified: {:?}", trace.outcome);
        Ok(ExitCode::SUCCESS)
    } else {
        println!("trace verification FAILED");
        Ok(ExitCode::from(1))
    }
}

fn verify_trace(trace: &Trace) -> bool {
    // structural replay: every step applies and every digest matches
    let states = match trace.states() {
        Ok(s) => s,
        Err(_) => return false,
    };
    match trace.outcome {
        Outcome::Cycle { .. } => verify_cycle(trace, &trace.cfg, trace.regime),
        Outcome::Converged { moves } => {
            moves as usize == trace.steps.len()
                && regime_equilibrium(states.last().unwrap(), &trace.cfg, trace.regime)
                    .unwrap_or(false)
        }
        Outcome::BudgetExhausted => true,
    }
}
