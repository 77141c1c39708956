//! Sequential best-response processes: single steps, scheduled runs with
//! convergence and cycle detection, and bounded search for best-response
//! cycles in the labeled-state improvement graph.
//!
//! States are compared label-wise through their canonical digests; a repeated
//! digest certifies a best-response cycle regardless of which scheduler
//! produced it, because the segment between the repeats is itself a
//! replayable sequence of best responses.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{
    agent_cost, agent_cost_with_strategy, distance_cost_with_neighbors, Cost, GameConfig,
};
use crate::enumerate::{random_connected_network, random_tree};
use crate::graph::{AgentId, Network, NetworkDigest};
use crate::moves::{candidate_pool, enumerate_greedy_moves, move_targets, MoveError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DynError {
    #[error("script exhausted before the run terminated")]
    ScriptExhausted,
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("trace format error: {0}")]
    Trace(String),
}

/// Which strategy changes the sequential process allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveRegime {
    /// Swap any incident edge within the k-neighborhood; improvement is
    /// measured on distance cost and the actor takes ownership of the new
    /// edge.
    KSg,
    /// Swap one own edge within the k-neighborhood.
    KAsg,
    /// One k-local greedy move (buy, delete or swap of an own edge).
    KGbg,
    /// Any k-local move: the full local strategy space.
    KBg,
}

impl std::fmt::Display for MoveRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MoveRegime::KSg => "k-sg",
            MoveRegime::KAsg => "k-asg",
            MoveRegime::KGbg => "k-gbg",
            MoveRegime::KBg => "k-bg",
        };
        write!(f, "{s}")
    }
}

/// Which agent is activated at each point of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum Scheduler {
    RoundRobin,
    Random { seed: u64 },
    Script { agents: Vec<AgentId> },
    MaxGain,
}

/// One applied move: either a rewrite of the actor's own strategy, or the
/// swap of an incident edge she does not own (swap game only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "change", rename_all = "kebab-case")]
pub enum StepChange {
    Strategy {
        before: BTreeSet<u32>,
        after: BTreeSet<u32>,
    },
    IncidentSwap {
        old_neighbor: u32,
        new_neighbor: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub agent: AgentId,
    #[serde(flatten)]
    pub change: StepChange,
    pub hash_after: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Converged { moves: u64 },
    Cycle { first_index: u64, period: u64 },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub start: Network,
    pub cfg: GameConfig,
    pub regime: MoveRegime,
    pub scheduler: Scheduler,
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
    pub activations: u64,
}

impl Trace {
    /// States along the trace: `states()[i]` is the network after `i` moves.
    pub fn states(&self) -> Result<Vec<Network>, DynError> {
        let mut states = vec![self.start.clone()];
        for step in &self.steps {
            let prev = states.last().unwrap();
            states.push(apply_step(prev, step)?);
        }
        Ok(states)
    }
}

fn apply_step(net: &Network, step: &TraceStep) -> Result<Network, DynError> {
    let u = step.agent;
    let next = match &step.change {
        StepChange::Strategy { before, after } => {
            if net.strategy(u) != before {
                return Err(DynError::Trace(format!(
                    "step for agent {u} does not match the current state"
                )));
            }
            net.with_strategy(u, after)
        }
        StepChange::IncidentSwap {
            old_neighbor,
            new_neighbor,
        } => {
            if !net.has_edge(u, AgentId(*old_neighbor)) || net.has_edge(u, AgentId(*new_neighbor))
            {
                return Err(DynError::Trace(format!(
                    "incident swap for agent {u} does not match the current state"
                )));
            }
            net.without_edge(u, AgentId(*old_neighbor))
                .with_edge(u, AgentId(*new_neighbor))
        }
    };
    if next.canonical_hash().to_hex() != step.hash_after {
        return Err(DynError::Trace("recorded digest mismatch".into()));
    }
    Ok(next)
}

/// A candidate change of one agent under a regime, with its post-move
/// evaluation for the actor.
#[derive(Debug, Clone)]
struct RegimeChange {
    change: StepChange,
    /// Actor's objective after the change: full cost for buy games, distance
    /// cost for swap games.
    objective: Cost,
}

fn swap_objective(net: &Network, cfg: &GameConfig, u: AgentId, neighbors: &[u32]) -> Cost {
    distance_cost_with_neighbors(net, cfg.mode, u, neighbors)
}

/// All strictly improving changes of `u` that achieve her best objective in
/// the regime, in deterministic tie order (best first).
fn best_changes(
    net: &Network,
    cfg: &GameConfig,
    regime: MoveRegime,
    u: AgentId,
    max_ties: usize,
) -> Result<Vec<RegimeChange>, MoveError> {
    match regime {
        MoveRegime::KBg => {
            let current = agent_cost(net, cfg, u);
            let before = net.strategy(u).clone();
            let pool = candidate_pool(net, u, Some(cfg.k));
            if pool.len() > cfg.space_budget as usize {
                return Err(MoveError::SpaceTooLarge {
                    size: pool.len(),
                    budget: cfg.space_budget as usize,
                });
            }
            let mut best = Cost::Infinite;
            let mut ties: Vec<(Vec<u32>, Cost)> = Vec::new();
            let mut scratch = Vec::with_capacity(pool.len());
            for mask in 0u64..(1 << pool.len() as u32) {
                scratch.clear();
                for (i, &t) in pool.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        scratch.push(t);
                    }
                }
                let cost = agent_cost_with_strategy(net, cfg, u, &scratch);
                if cost >= current {
                    continue;
                }
                if cost < best {
                    best = cost;
                    ties.clear();
                }
                if cost == best {
                    ties.push((scratch.clone(), cost));
                }
            }
            // tie order: fewest targets, then lexicographic
            ties.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
            ties.truncate(max_ties);
            Ok(ties
                .into_iter()
                .map(|(targets, cost)| RegimeChange {
                    change: StepChange::Strategy {
                        before: before.clone(),
                        after: targets.into_iter().collect(),
                    },
                    objective: cost,
                })
                .collect())
        }
        MoveRegime::KGbg => {
            let current = agent_cost(net, cfg, u);
            let before = net.strategy(u).clone();
            let mut best = Cost::Infinite;
            let mut ties = Vec::new();
            for mv in enumerate_greedy_moves(net, cfg, u) {
                let targets: Vec<u32> = move_targets(net, &mv).into_iter().collect();
                let cost = agent_cost_with_strategy(net, cfg, u, &targets);
                if cost >= current {
                    continue;
                }
                if cost < best {
                    best = cost;
                    ties.clear();
                }
                if cost == best {
                    ties.push(RegimeChange {
                        change: StepChange::Strategy {
                            before: before.clone(),
                            after: targets.into_iter().collect(),
                        },
                        objective: cost,
                    });
                }
            }
            ties.truncate(max_ties);
            Ok(ties)
        }
        MoveRegime::KAsg | MoveRegime::KSg => {
            let neighbors: Vec<u32> = net.neighbors(u).to_vec();
            let current = swap_objective(net, cfg, u, &neighbors);
            let hood = net.k_neighborhood(u, cfg.k);
            let new_targets: Vec<u32> = hood
                .iter()
                .filter(|&&w| w != u && !net.has_edge(u, w))
                .map(|w| w.0)
                .collect();
            let swappable: Vec<u32> = match regime {
                MoveRegime::KAsg => net.strategy(u).iter().copied().collect(),
                MoveRegime::KSg => neighbors.clone(),
                _ => unreachable!(),
            };
            let mut best = Cost::Infinite;
            let mut ties = Vec::new();
            for &old in &swappable {
                for &new in &new_targets {
                    let virtual_neighbors: Vec<u32> = neighbors
                        .iter()
                        .copied()
                        .filter(|&x| x != old)
                        .chain(std::iter::once(new))
                        .collect();
                    let objective = swap_objective(net, cfg, u, &virtual_neighbors);
                    if objective >= current {
                        continue;
                    }
                    if objective < best {
                        best = objective;
                        ties.clear();
                    }
                    if objective == best {
                        ties.push(RegimeChange {
                            change: StepChange::IncidentSwap {
                                old_neighbor: old,
                                new_neighbor: new,
                            },
                            objective,
                        });
                    }
                }
            }
            ties.truncate(max_ties);
            Ok(ties)
        }
    }
}

fn apply_change(net: &Network, agent: AgentId, change: &StepChange) -> Network {
    match change {
        StepChange::Strategy { after, .. } => net.with_strategy(agent, after),
        StepChange::IncidentSwap {
            old_neighbor,
            new_neighbor,
        } => net
            .without_edge(agent, AgentId(*old_neighbor))
            .with_edge(agent, AgentId(*new_neighbor)),
    }
}

/// Applies the regime-best improving change of `agent`, if one exists.
pub fn step(
    net: &Network,
    cfg: &GameConfig,
    regime: MoveRegime,
    agent: AgentId,
) -> Result<Option<Network>, MoveError> {
    let changes = best_changes(net, cfg, regime, agent, 1)?;
    Ok(changes
        .into_iter()
        .next()
        .map(|c| apply_change(net, agent, &c.change)))
}

/// `true` if no agent has an improving change under the regime.
pub fn regime_equilibrium(
    net: &Network,
    cfg: &GameConfig,
    regime: MoveRegime,
) -> Result<bool, MoveError> {
    for u in net.agents() {
        if !best_changes(net, cfg, regime, u, 1)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs the sequential process: activated agents play their tie-broken best
/// improving change until no agent can move (converged), a labeled state
/// repeats (cycle), or the budget runs out. `max_moves` bounds applied moves;
/// activations carry an internal guard derived from it.
pub fn run(
    start: &Network,
    cfg: &GameConfig,
    regime: MoveRegime,
    scheduler: &Scheduler,
    max_moves: u64,
) -> Result<Trace, DynError> {
    let n = start.agent_count();
    let mut net = start.clone();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut seen: HashMap<NetworkDigest, u64> = HashMap::new();
    seen.insert(net.canonical_hash(), 0);

    let mut rng = match scheduler {
        Scheduler::Random { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut script_pos = 0usize;
    let mut round_robin = 0u32;
    // agents verified stable since the last applied move
    let mut stable: HashSet<u32> = HashSet::new();
    let mut activations = 0u64;
    let activation_guard = (max_moves + 2).saturating_mul(2 * n as u64) + 64 * n as u64;

    let outcome = loop {
        if stable.len() as u32 == n {
            break Outcome::Converged {
                moves: steps.len() as u64,
            };
        }
        if activations >= activation_guard {
            break Outcome::BudgetExhausted;
        }

        let agent = match scheduler {
            Scheduler::RoundRobin => {
                let a = round_robin % n;
                round_robin += 1;
                AgentId(a)
            }
            Scheduler::Random { .. } => AgentId(rng.as_mut().unwrap().gen_range(0..n)),
            Scheduler::Script { agents } => {
                if script_pos >= agents.len() {
                    return Err(DynError::ScriptExhausted);
                }
                let a = agents[script_pos];
                script_pos += 1;
                a
            }
            Scheduler::MaxGain => {
                match max_gain_agent(&net, cfg, regime)? {
                    None => {
                        break Outcome::Converged {
                            moves: steps.len() as u64,
                        }
                    }
                    Some(a) => a,
                }
            }
        };
        activations += 1;

        let changes = best_changes(&net, cfg, regime, agent, 1)?;
        match changes.into_iter().next() {
            None => {
                stable.insert(agent.0);
            }
            Some(c) => {
                if steps.len() as u64 >= max_moves {
                    break Outcome::BudgetExhausted;
                }
                let next = apply_change(&net, agent, &c.change);
                let digest = next.canonical_hash();
                steps.push(TraceStep {
                    agent,
                    change: c.change,
                    hash_after: digest.to_hex(),
                });
                stable.clear();
                // the actor of a full best response is at her optimum
                if regime == MoveRegime::KBg {
                    stable.insert(agent.0);
                }
                net = next;
                let index = steps.len() as u64;
                if let Some(&first) = seen.get(&digest) {
                    break Outcome::Cycle {
                        first_index: first,
                        period: index - first,
                    };
                }
                seen.insert(digest, index);
            }
        }
    };

    Ok(Trace {
        start: start.clone(),
        cfg: cfg.clone(),
        regime,
        scheduler: scheduler.clone(),
        steps,
        outcome,
        activations,
    })
}

/// Agent with the largest strict objective gain, lowest id on ties.
fn max_gain_agent(
    net: &Network,
    cfg: &GameConfig,
    regime: MoveRegime,
) -> Result<Option<AgentId>, MoveError> {
    let mut best: Option<(Cost, AgentId)> = None;
    for u in net.agents() {
        let changes = best_changes(net, cfg, regime, u, 1)?;
        if let Some(c) = changes.into_iter().next() {
            let current = match regime {
                MoveRegime::KAsg | MoveRegime::KSg => {
                    swap_objective(net, cfg, u, net.neighbors(u))
                }
                _ => agent_cost(net, cfg, u),
            };
            let gain = match (current, c.objective) {
                (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a - b),
                (Cost::Infinite, Cost::Finite(_)) => Cost::Infinite,
                _ => continue,
            };
            let better = match &best {
                None => true,
                Some((bg, _)) => gain > *bg,
            };
            if better {
                best = Some((gain, u));
            }
        }
    }
    Ok(best.map(|(_, u)| u))
}

/// Replays a cycle-claiming trace and checks every step is a regime-valid
/// best response of its agent (any equal-cost best is accepted) and that the
/// cycle closes on the exact labeled state.
pub fn verify_cycle(trace: &Trace, cfg: &GameConfig, regime: MoveRegime) -> bool {
    let (first, period) = match trace.outcome {
        Outcome::Cycle {
            first_index,
            period,
        } => (first_index as usize, period as usize),
        _ => return false,
    };
    if period == 0 || first + period != trace.steps.len() {
        return false;
    }
    let states = match trace.states() {
        Ok(s) => s,
        Err(_) => return false,
    };
    if states[first] != states[first + period] {
        return false;
    }
    for (i, step) in trace.steps.iter().enumerate() {
        let net = &states[i];
        let u = step.agent;
        let played = match best_changes(net, cfg, regime, u, usize::MAX) {
            Ok(ties) => ties,
            Err(_) => return false,
        };
        if played.is_empty() {
            return false;
        }
        let best_objective = played[0].objective;
        // the applied move must itself achieve the best objective
        let applied_objective = match &step.change {
            StepChange::Strategy { after, .. } => {
                let targets: Vec<u32> = after.iter().copied().collect();
                match regime {
                    MoveRegime::KBg | MoveRegime::KGbg => {
                        agent_cost_with_strategy(net, cfg, u, &targets)
                    }
                    _ => return false,
                }
            }
            StepChange::IncidentSwap {
                old_neighbor,
                new_neighbor,
            } => {
                if !matches!(regime, MoveRegime::KAsg | MoveRegime::KSg) {
                    return false;
                }
                let virtual_neighbors: Vec<u32> = net
                    .neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&x| x != *old_neighbor)
                    .chain(std::iter::once(*new_neighbor))
                    .collect();
                swap_objective(net, cfg, u, &virtual_neighbors)
            }
        };
        if applied_objective != best_objective {
            return false;
        }
        // and must be a change the regime allows
        if !played.iter().any(|c| c.change == step.change) && !regime_admits(net, cfg, regime, step)
        {
            return false;
        }
    }
    true
}

/// Structural validity of a step under the regime (used when the step ties
/// with, but differs from, the enumerated bests).
fn regime_admits(net: &Network, cfg: &GameConfig, regime: MoveRegime, step: &TraceStep) -> bool {
    let u = step.agent;
    match (&step.change, regime) {
        (StepChange::Strategy { before, after }, MoveRegime::KBg) => {
            if net.strategy(u) != before {
                return false;
            }
            let pool: BTreeSet<u32> = candidate_pool(net, u, Some(cfg.k)).into_iter().collect();
            after.iter().all(|t| pool.contains(t))
        }
        (StepChange::Strategy { before, after }, MoveRegime::KGbg) => {
            if net.strategy(u) != before {
                return false;
            }
            let removed: Vec<u32> = before.difference(after).copied().collect();
            let added: Vec<u32> = after.difference(before).copied().collect();
            let hood = net.k_neighborhood(u, cfg.k);
            let addable = |t: &u32| hood.contains(&AgentId(*t)) && !net.has_edge(u, AgentId(*t));
            match (removed.len(), added.len()) {
                (1, 0) => true,
                (0, 1) => addable(&added[0]),
                (1, 1) => addable(&added[0]),
                _ => false,
            }
        }
        (
            StepChange::IncidentSwap {
                old_neighbor,
                new_neighbor,
            },
            MoveRegime::KAsg,
        ) => {
            net.strategy(u).contains(old_neighbor)
                && net.k_neighborhood(u, cfg.k).contains(&AgentId(*new_neighbor))
                && !net.has_edge(u, AgentId(*new_neighbor))
        }
        (
            StepChange::IncidentSwap {
                old_neighbor,
                new_neighbor,
            },
            MoveRegime::KSg,
        ) => {
            net.has_edge(u, AgentId(*old_neighbor))
                && net.k_neighborhood(u, cfg.k).contains(&AgentId(*new_neighbor))
                && !net.has_edge(u, AgentId(*new_neighbor))
        }
        _ => false,
    }
}

/// Bounded depth-first search of the improvement multigraph for a verified
/// best-response cycle. Successors of a state are, for every agent, all of
/// her equal-best improving changes (capped per agent). Returns the first
/// verified cycle found.
pub fn find_br_cycle(
    cfg: &GameConfig,
    regime: MoveRegime,
    seeds: &[Network],
    search_budget: u64,
) -> Result<Option<Trace>, DynError> {
    const MAX_TIES: usize = 4;
    const MAX_DEPTH: usize = 4096;

    let mut explored: u64 = 0;
    let mut black: HashSet<NetworkDigest> = HashSet::new();

    for seed in seeds {
        if explored >= search_budget {
            break;
        }
        if let Some(trace) = dfs_for_cycle(
            cfg,
            regime,
            seed,
            MAX_DEPTH,
            MAX_TIES,
            search_budget,
            &mut explored,
            &mut black,
        )? {
            return Ok(Some(trace));
        }
    }
    Ok(None)
}

struct DfsFrame {
    net: Network,
    digest: NetworkDigest,
    changes: Vec<(AgentId, StepChange)>,
    next_change: usize,
    /// Whole subtree explored: safe to never revisit. A depth- or
    /// budget-truncated descendant poisons the flag up the stack.
    complete: bool,
}

#[allow(clippy::too_many_arguments)]
fn dfs_for_cycle(
    cfg: &GameConfig,
    regime: MoveRegime,
    seed: &Network,
    depth_cap: usize,
    max_ties: usize,
    budget: u64,
    explored: &mut u64,
    black: &mut HashSet<NetworkDigest>,
) -> Result<Option<Trace>, DynError> {
    let seed_digest = seed.canonical_hash();
    if black.contains(&seed_digest) {
        return Ok(None);
    }
    let mut stack: Vec<DfsFrame> = Vec::new();
    let mut on_path: HashMap<NetworkDigest, usize> = HashMap::new();

    let expand = |net: &Network, explored: &mut u64| -> Result<Vec<(AgentId, StepChange)>, DynError> {
        *explored += 1;
        let mut out = Vec::new();
        for u in net.agents() {
            for c in best_changes(net, cfg, regime, u, max_ties)? {
                out.push((u, c.change));
            }
        }
        Ok(out)
    };

    stack.push(DfsFrame {
        net: seed.clone(),
        digest: seed_digest,
        changes: expand(seed, explored)?,
        next_change: 0,
        complete: true,
    });
    on_path.insert(seed_digest, 0);

    while let Some(frame_index) = stack.len().checked_sub(1) {
        if *explored >= budget {
            // out of budget: nothing alive gets blackened
            return Ok(None);
        }
        let frame = &mut stack[frame_index];
        if frame.next_change >= frame.changes.len() {
            let popped = stack.pop().unwrap();
            on_path.remove(&popped.digest);
            if popped.complete {
                black.insert(popped.digest);
            } else if let Some(parent) = stack.last_mut() {
                parent.complete = false;
            }
            continue;
        }
        let (agent, change) = frame.changes[frame.next_change].clone();
        frame.next_change += 1;

        let next = apply_change(&frame.net, agent, &change);
        let digest = next.canonical_hash();

        if let Some(&cycle_start) = on_path.get(&digest) {
            // back edge: the stack segment from cycle_start plus this move
            // closes a best-response cycle
            let mut steps = Vec::new();
            for i in cycle_start..stack.len() {
                let (a, c) = if i + 1 < stack.len() {
                    stack[i].outgoing()
                } else {
                    (agent, change.clone())
                };
                let after_net = if i + 1 < stack.len() {
                    stack[i + 1].net.clone()
                } else {
                    next.clone()
                };
                steps.push(TraceStep {
                    agent: a,
                    change: c,
                    hash_after: after_net.canonical_hash().to_hex(),
                });
            }
            let period = steps.len() as u64;
            let trace = Trace {
                start: stack[cycle_start].net.clone(),
                cfg: cfg.clone(),
                regime,
                scheduler: Scheduler::Script {
                    agents: steps.iter().map(|s| s.agent).collect(),
                },
                steps,
                outcome: Outcome::Cycle {
                    first_index: 0,
                    period,
                },
                activations: period,
            };
            if verify_cycle(&trace, cfg, regime) {
                return Ok(Some(trace));
            }
            continue;
        }

        if black.contains(&digest) {
            continue;
        }
        if stack.len() >= depth_cap {
            stack[frame_index].complete = false;
            continue;
        }
        let changes = expand(&next, explored)?;
        on_path.insert(digest, stack.len());
        stack.push(DfsFrame {
            net: next,
            digest,
            changes,
            next_change: 0,
            complete: true,
        });
    }
    Ok(None)
}

impl DfsFrame {
    /// The edge this frame most recently descended through.
    fn outgoing(&self) -> (AgentId, StepChange) {
        self.changes[self.next_change - 1].clone()
    }
}

/// Deterministic seed states for the cycle search: caption-guided patterns
/// first (ownership structures known to sit near cycles at the search sizes),
/// then random connected states.
pub fn default_cycle_seeds(
    n: u32,
    regime: MoveRegime,
    rng_seed: u64,
    count: usize,
) -> Vec<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seeds = Vec::new();

    // two triangle-plus-pendants households oscillating over shared edges
    if n >= 6 {
        let base = vec![(1u32, 0u32), (0, 4), (1, 4), (3, 1), (2, 1), (5, 4)];
        if let Ok(net) = Network::from_owned_edges(n, pad_connected(n, base.clone(), &mut rng)) {
            seeds.push(net);
        }
        let tree = vec![(1u32, 0u32), (1, 4), (3, 1), (2, 1), (5, 4)];
        if let Ok(net) = Network::from_owned_edges(n, pad_connected(n, tree, &mut rng)) {
            seeds.push(net);
        }
    }
    // swap-heavy pattern: two owners contesting a shared far vertex
    if n >= 5 {
        let pattern = vec![(3u32, 2u32), (0, 2), (1, 4)];
        for _ in 0..4 {
            if let Ok(net) =
                Network::from_owned_edges(n, pad_connected(n, pattern.clone(), &mut rng))
            {
                seeds.push(net);
            }
        }
    }
    let want_trees = matches!(regime, MoveRegime::KAsg | MoveRegime::KSg);
    while seeds.len() < count {
        if want_trees || rng.gen_bool(0.5) {
            seeds.push(random_tree(n, &mut rng));
        } else {
            seeds.push(random_connected_network(n, &mut rng));
        }
    }
    seeds.truncate(count);
    seeds
}

/// Extends `edges` with random edges until the graph on `n` agents is
/// connected, never touching existing pairs.
fn pad_connected(n: u32, mut edges: Vec<(u32, u32)>, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let present = |edges: &[(u32, u32)], a: u32, b: u32| {
        edges
            .iter()
            .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    };
    loop {
        let mut parent: Vec<u32> = (0..n).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        }
        let root = find(&mut parent, 0);
        let stray: Vec<u32> = (0..n).filter(|&v| find(&mut parent, v) != root).collect();
        if stray.is_empty() {
            return edges;
        }
        let v = stray[rng.gen_range(0..stray.len())];
        let joined: Vec<u32> = (0..n).filter(|&w| find(&mut parent, w) == root).collect();
        let w = joined[rng.gen_range(0..joined.len())];
        if !present(&edges, v, w) {
            if rng.gen_bool(0.5) {
                edges.push((v, w));
            } else {
                edges.push((w, v));
            }
        }
    }
}

/// JSON-lines serialization: a header line, one line per step, one outcome
/// line.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum TraceLine {
    Header {
        start: Network,
        cfg: GameConfig,
        regime: MoveRegime,
        scheduler: Scheduler,
        activations: u64,
    },
    Step(TraceStep),
    Outcome(Outcome),
}

pub fn trace_to_jsonl(trace: &Trace) -> String {
    let mut out = String::new();
    let header = TraceLine::Header {
        start: trace.start.clone(),
        cfg: trace.cfg.clone(),
        regime: trace.regime,
        scheduler: trace.scheduler.clone(),
        activations: trace.activations,
    };
    out.push_str(&serde_json::to_string(&header).unwrap());
    out.push('\n');
    for step in &trace.steps {
        out.push_str(&serde_json::to_string(&TraceLine::Step(step.clone())).unwrap());
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(&TraceLine::Outcome(trace.outcome)).unwrap());
    out.push('\n');
    out
}

pub fn trace_from_jsonl(text: &str) -> Result<Trace, DynError> {
    let mut header = None;
    let mut steps = Vec::new();
    let mut outcome = None;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TraceLine =
            serde_json::from_str(line).map_err(|e| DynError::Trace(e.to_string()))?;
        match parsed {
            TraceLine::Header { .. } if header.is_some() => {
                return Err(DynError::Trace("duplicate header".into()))
            }
            TraceLine::Header {
                start,
                cfg,
                regime,
                scheduler,
                activations,
            } => header = Some((start, cfg, regime, scheduler, activations)),
            TraceLine::Step(s) => steps.push(s),
            TraceLine::Outcome(o) => outcome = Some(o),
        }
    }
    let (start, cfg, regime, scheduler, activations) =
        header.ok_or_else(|| DynError::Trace("missing header".into()))?;
    let outcome = outcome.ok_or_else(|| DynError::Trace("missing outcome".into()))?;
    Ok(Trace {
        start,
        cfg,
        regime,
        scheduler,
        steps,
        outcome,
        activations,
    })
}

/// Sum of every agent's distance cost: the ordinal potential of swap
/// processes on trees. `None` on disconnected states.
pub fn total_distance(net: &Network) -> Option<u64> {
    let mut total = 0u64;
    for u in net.agents() {
        for d in net.shortest_paths(u) {
            total += d.finite()?;
        }
    }
    Some(total)
}
