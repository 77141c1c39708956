//! Single greedy moves, the k-local strategy space, exact best-response
//! solvers, and the facility-location view of an agent's move problem.
//!
//! Strategy spaces are exponential and best responses are solved by
//! exhaustion; explicit budgets guard every solver. Tie-breaking is total and
//! deterministic everywhere: fewest targets first, then the lexicographically
//! smallest target set; among equal-cost greedy moves, deletions before swaps
//! before purchases, then lexicographic targets.

use std::collections::BTreeSet;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{agent_cost, agent_cost_with_strategy, Cost, GameConfig};
use crate::graph::{AgentId, Distance, Network};

/// Guard for the global best-response enumeration (`2^(n-1)` strategies).
pub const GLOBAL_RESPONSE_MAX_AGENTS: u32 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("strategy space too large: {size} candidate targets exceed budget {budget}")]
    SpaceTooLarge { size: usize, budget: usize },
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// A single buy, delete, or swap of one own edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MoveKind {
    Delete { target: u32 },
    Swap { old: u32, new: u32 },
    Buy { target: u32 },
}

impl MoveKind {
    /// Deterministic order: deletions, then swaps, then purchases, each by
    /// lexicographic targets.
    fn rank(self) -> (u8, u32, u32) {
        match self {
            MoveKind::Delete { target } => (0, target, 0),
            MoveKind::Swap { old, new } => (1, old, new),
            MoveKind::Buy { target } => (2, target, 0),
        }
    }
}

impl PartialOrd for MoveKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MoveKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyMove {
    pub actor: AgentId,
    #[serde(flatten)]
    pub kind: MoveKind,
}

/// A full strategy for one agent: the set of agents she buys edges to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub actor: AgentId,
    pub targets: BTreeSet<u32>,
}

/// Valid targets for `u`'s strategy changes: her own current targets plus
/// every agent in the radius-`k` neighborhood she could buy toward (no self,
/// no agent already owning an edge to her). `None` radius means global reach.
pub fn candidate_pool(net: &Network, u: AgentId, radius: Option<u32>) -> Vec<u32> {
    let mut pool: BTreeSet<u32> = net.strategy(u).clone();
    match radius {
        Some(k) => {
            for v in net.k_neighborhood(u, k) {
                if v != u && !net.strategy(v).contains(&u.0) {
                    pool.insert(v.0);
                }
            }
        }
        None => {
            for v in net.agents() {
                if v != u && !net.strategy(v).contains(&u.0) {
                    pool.insert(v.0);
                }
            }
        }
    }
    pool.into_iter().collect()
}

/// All valid single k-local greedy moves of `u`, in canonical order.
pub fn enumerate_greedy_moves(net: &Network, cfg: &GameConfig, u: AgentId) -> Vec<GreedyMove> {
    enumerate_greedy_moves_in(net, u, Some(cfg.k))
}

/// Greedy moves with an explicit reach: `Some(k)` for k-local, `None` for
/// unrestricted targets.
pub fn enumerate_greedy_moves_in(
    net: &Network,
    u: AgentId,
    radius: Option<u32>,
) -> Vec<GreedyMove> {
    let own: Vec<u32> = net.strategy(u).iter().copied().collect();
    let buy_targets: Vec<u32> = match radius {
        Some(k) => net
            .k_neighborhood(u, k)
            .into_iter()
            .filter(|&v| v != u && !net.has_edge(u, v))
            .map(|v| v.0)
            .collect(),
        None => net
            .agents()
            .filter(|&v| v != u && !net.has_edge(u, v))
            .map(|v| v.0)
            .collect(),
    };
    let mut moves = Vec::new();
    for &t in &own {
        moves.push(GreedyMove {
            actor: u,
            kind: MoveKind::Delete { target: t },
        });
    }
    for &old in &own {
        for &new in &buy_targets {
            moves.push(GreedyMove {
                actor: u,
                kind: MoveKind::Swap { old, new },
            });
        }
    }
    for &t in &buy_targets {
        moves.push(GreedyMove {
            actor: u,
            kind: MoveKind::Buy { target: t },
        });
    }
    moves.sort_by_key(|m| m.kind.rank());
    moves
}

/// The strategy resulting from a single greedy move.
pub fn move_targets(net: &Network, mv: &GreedyMove) -> BTreeSet<u32> {
    let mut targets = net.strategy(mv.actor).clone();
    match mv.kind {
        MoveKind::Delete { target } => {
            targets.remove(&target);
        }
        MoveKind::Swap { old, new } => {
            targets.remove(&old);
            targets.insert(new);
        }
        MoveKind::Buy { target } => {
            targets.insert(target);
        }
    }
    targets
}

/// Iterator over the k-local strategy space of `u`: every subset of the
/// candidate pool, the current strategy included. Neighborhoods are evaluated
/// in the pre-move network.
pub struct StrategySpace {
    actor: AgentId,
    pool: Vec<u32>,
    next_mask: u64,
    end: u64,
}

impl Iterator for StrategySpace {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        if self.next_mask == self.end {
            return None;
        }
        let mask = self.next_mask;
        self.next_mask += 1;
        let targets = self
            .pool
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &t)| t)
            .collect();
        Some(Strategy {
            actor: self.actor,
            targets,
        })
    }
}

pub fn local_strategy_space(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
) -> Result<StrategySpace, MoveError> {
    let pool = candidate_pool(net, u, Some(cfg.k));
    if pool.len() > cfg.space_budget as usize {
        return Err(MoveError::SpaceTooLarge {
            size: pool.len(),
            budget: cfg.space_budget as usize,
        });
    }
    let end = 1u64 << pool_len_checked(&pool);
    Ok(StrategySpace {
        actor: u,
        pool,
        next_mask: 0,
        end,
    })
}

fn pool_len_checked(pool: &[u32]) -> u32 {
    assert!(pool.len() < 63);
    pool.len() as u32
}

/// Applies a validated strategy, returning the new network.
pub fn apply_strategy(net: &Network, s: &Strategy) -> Result<Network, MoveError> {
    let u = s.actor;
    if u.0 >= net.agent_count() {
        return Err(MoveError::InvalidStrategy(format!(
            "actor {u} out of range"
        )));
    }
    for &t in &s.targets {
        if t >= net.agent_count() {
            return Err(MoveError::InvalidStrategy(format!(
                "target {t} out of range"
            )));
        }
        if t == u.0 {
            return Err(MoveError::InvalidStrategy("self-loop".into()));
        }
        if net.strategy(AgentId(t)).contains(&u.0) {
            return Err(MoveError::InvalidStrategy(format!(
                "agent {t} already owns an edge to {u}"
            )));
        }
    }
    Ok(net.with_strategy(u, &s.targets))
}

fn better_strategy(
    cost: Cost,
    targets: &[u32],
    best_cost: Cost,
    best_targets: &[u32],
) -> bool {
    match cost.cmp(&best_cost) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => match targets.len().cmp(&best_targets.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => targets < best_targets,
        },
    }
}

fn best_strategy_over_pool(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
    pool: &[u32],
) -> (Strategy, Cost) {
    let len = pool_len_checked(pool);
    let mut scratch: Vec<u32> = Vec::with_capacity(pool.len());
    let mut best_targets: Vec<u32> = net.strategy(u).iter().copied().collect();
    let mut best_cost = agent_cost(net, cfg, u);
    for mask in 0u64..(1 << len) {
        scratch.clear();
        for (i, &t) in pool.iter().enumerate() {
            if mask >> i & 1 == 1 {
                scratch.push(t);
            }
        }
        let cost = agent_cost_with_strategy(net, cfg, u, &scratch);
        if better_strategy(cost, &scratch, best_cost, &best_targets) {
            best_cost = cost;
            best_targets = scratch.clone();
        }
    }
    (
        Strategy {
            actor: u,
            targets: best_targets.into_iter().collect(),
        },
        best_cost,
    )
}

/// Cost-minimizing strategy of `u` over the k-local strategy space, solved by
/// exhaustion. Exponential in the candidate pool; fails beyond the configured
/// budget.
pub fn best_k_local_response(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
) -> Result<(Strategy, Cost), MoveError> {
    let pool = candidate_pool(net, u, Some(cfg.k));
    if pool.len() > cfg.space_budget as usize {
        return Err(MoveError::SpaceTooLarge {
            size: pool.len(),
            budget: cfg.space_budget as usize,
        });
    }
    Ok(best_strategy_over_pool(net, cfg, u, &pool))
}

/// Cost-minimizing strategy of `u` over all subsets of `V \ {u}`. The locality
/// radius in `cfg` is ignored. Guarded by `GLOBAL_RESPONSE_MAX_AGENTS`.
pub fn best_global_response(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
) -> Result<(Strategy, Cost), MoveError> {
    if net.agent_count() > GLOBAL_RESPONSE_MAX_AGENTS {
        return Err(MoveError::SpaceTooLarge {
            size: net.agent_count() as usize - 1,
            budget: GLOBAL_RESPONSE_MAX_AGENTS as usize - 1,
        });
    }
    let pool = candidate_pool(net, u, None);
    Ok(best_strategy_over_pool(net, cfg, u, &pool))
}

/// Best strictly improving single k-local greedy move of `u`, if any.
pub fn best_greedy_move(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
) -> Option<(GreedyMove, Cost)> {
    best_greedy_move_in(net, cfg, u, Some(cfg.k))
}

/// Best strictly improving single greedy move with explicit reach.
pub fn best_greedy_move_in(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
    radius: Option<u32>,
) -> Option<(GreedyMove, Cost)> {
    let current = agent_cost(net, cfg, u);
    let mut best: Option<(GreedyMove, Cost)> = None;
    for mv in enumerate_greedy_moves_in(net, u, radius) {
        let targets: Vec<u32> = move_targets(net, &mv).into_iter().collect();
        let cost = agent_cost_with_strategy(net, cfg, u, &targets);
        if cost >= current {
            continue;
        }
        // enumeration order is the tie order, so replace only on strict gain
        match &best {
            Some((_, bc)) if cost >= *bc => {}
            _ => best = Some((mv, cost)),
        }
    }
    best
}

/// The facility-location instance whose solutions are `u`'s k-local moves:
/// facilities are the reachable targets, clients everyone else, opening is
/// free exactly for agents already paying for an edge to `u`, and distances
/// are shortest paths plus one.
#[derive(Debug, Clone)]
pub struct UmflInstance {
    pub center: AgentId,
    pub facilities: Vec<AgentId>,
    pub clients: Vec<AgentId>,
    /// Opening cost per facility, aligned with `facilities`.
    pub opening_cost: Vec<Rational64>,
    /// `distance[i][j]`: distance from `facilities[i]` to `clients[j]`.
    pub distance: Vec<Vec<Distance>>,
}

pub fn build_umfl_instance(net: &Network, cfg: &GameConfig, u: AgentId) -> UmflInstance {
    let facilities: Vec<AgentId> = net
        .k_neighborhood(u, cfg.k)
        .into_iter()
        .filter(|&v| v != u)
        .collect();
    let clients: Vec<AgentId> = net.agents().filter(|&v| v != u).collect();
    let opening_cost = facilities
        .iter()
        .map(|&v| {
            if net.strategy(v).contains(&u.0) {
                Rational64::zero()
            } else {
                cfg.alpha
            }
        })
        .collect();
    let distance = facilities
        .iter()
        .map(|&v| {
            let d = net.shortest_paths(v);
            clients
                .iter()
                .map(|&x| d[x.index()] + Distance::Finite(1))
                .collect()
        })
        .collect();
    UmflInstance {
        center: u,
        facilities,
        clients,
        opening_cost,
        distance,
    }
}

impl UmflInstance {
    /// Facility-location cost of opening `open`. Facilities with zero opening
    /// cost (edges owned by others) are always open on top of `open`: they
    /// model connections the center cannot refuse, and with them the cost of
    /// the center's current strategy equals her game cost.
    pub fn evaluate(&self, open: &BTreeSet<u32>) -> Cost {
        let mut opening = Rational64::zero();
        let mut opened = vec![false; self.facilities.len()];
        for (i, &f) in self.facilities.iter().enumerate() {
            if open.contains(&f.0) {
                opened[i] = true;
                opening += self.opening_cost[i];
            } else if self.opening_cost[i].is_zero() {
                opened[i] = true;
            }
        }
        let mut total = Cost::Finite(opening);
        for j in 0..self.clients.len() {
            let mut nearest = Distance::Infinite;
            for (i, open) in opened.iter().enumerate() {
                if *open {
                    nearest = nearest.min(self.distance[i][j]);
                }
            }
            let term = match nearest {
                Distance::Finite(v) => Cost::from_int(v as i64),
                Distance::Infinite => Cost::Infinite,
            };
            total = total + term;
            if !total.is_finite() {
                return Cost::Infinite;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        clique, ds_reduction, line, star, tree_star, tree_star_leaf, PlainGraph,
    };
    use crate::cost::CostMode;

    fn rat(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn sum_cfg(p: i64, q: i64, k: u32) -> GameConfig {
        GameConfig::sum(rat(p, q), k)
    }

    #[test]
    fn greedy_moves_line_endpoint() {
        let net = line(3);
        let u = AgentId(0);
        let k1 = enumerate_greedy_moves(&net, &sum_cfg(1, 1, 1), u);
        assert_eq!(
            k1,
            vec![GreedyMove {
                actor: u,
                kind: MoveKind::Delete { target: 1 }
            }]
        );
        let k2 = enumerate_greedy_moves(&net, &sum_cfg(1, 1, 2), u);
        assert_eq!(
            k2,
            vec![
                GreedyMove {
                    actor: u,
                    kind: MoveKind::Delete { target: 1 }
                },
                GreedyMove {
                    actor: u,
                    kind: MoveKind::Swap { old: 1, new: 2 }
                },
                GreedyMove {
                    actor: u,
                    kind: MoveKind::Buy { target: 2 }
                },
            ]
        );
    }

    #[test]
    fn greedy_moves_clique_nonowner_is_empty() {
        let net = clique(4);
        // agent 3 owns nothing and is adjacent to everyone
        assert!(enumerate_greedy_moves(&net, &sum_cfg(1, 1, 3), AgentId(3)).is_empty());
    }

    #[test]
    fn greedy_move_count_bound() {
        let net = tree_star(2, 4);
        for k in 1..=3 {
            let cfg = sum_cfg(1, 1, k);
            for u in net.agents() {
                let hood = net.k_neighborhood(u, k).len();
                let own = net.strategy(u).len();
                let bound = own + (hood - 1) + own * (hood - 1);
                assert!(enumerate_greedy_moves(&net, &cfg, u).len() <= bound);
            }
        }
    }

    #[test]
    fn strategy_space_is_the_subset_lattice() {
        // star leaf with nothing owned: pool is the other leaves (center owns
        // the edge to u, so it is excluded), 2^(n-2) strategies
        let net = star(5);
        let space: Vec<_> = local_strategy_space(&net, &sum_cfg(1, 1, 2), AgentId(1))
            .unwrap()
            .collect();
        assert_eq!(space.len(), 8);
        assert!(space.iter().any(|s| s.targets.is_empty()));
    }

    #[test]
    fn strategy_space_line_endpoint_k1() {
        let net = line(3);
        let space: Vec<_> = local_strategy_space(&net, &sum_cfg(1, 1, 1), AgentId(0))
            .unwrap()
            .collect();
        let sets: Vec<BTreeSet<u32>> = space.into_iter().map(|s| s.targets).collect();
        assert_eq!(sets, vec![BTreeSet::new(), BTreeSet::from([1])]);
    }

    #[test]
    fn strategy_space_contains_distance_two_ancestor() {
        let net = tree_star(2, 4);
        let u = tree_star_leaf(2);
        let space = local_strategy_space(&net, &sum_cfg(1, 1, 2), u).unwrap();
        let want: BTreeSet<u32> = BTreeSet::from([0]); // the root, two hops up
        assert!(space.into_iter().any(|s| s.targets == want));
    }

    #[test]
    fn strategy_space_budget_guard() {
        let net = clique(8);
        let cfg = sum_cfg(1, 1, 2).with_space_budget(3);
        assert!(matches!(
            local_strategy_space(&net, &cfg, AgentId(0)),
            Err(MoveError::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn apply_strategy_rules() {
        let net = line(2);
        // identity keeps the hash
        let same = apply_strategy(
            &net,
            &Strategy {
                actor: AgentId(0),
                targets: BTreeSet::from([1]),
            },
        )
        .unwrap();
        assert_eq!(same.canonical_hash(), net.canonical_hash());
        // endpoint deletes its only edge
        let cut = apply_strategy(
            &net,
            &Strategy {
                actor: AgentId(0),
                targets: BTreeSet::new(),
            },
        )
        .unwrap();
        assert_eq!(cut.edge_count(), 0);
        // buying toward the owner of an existing edge is invalid
        assert!(matches!(
            apply_strategy(
                &net,
                &Strategy {
                    actor: AgentId(1),
                    targets: BTreeSet::from([0]),
                }
            ),
            Err(MoveError::InvalidStrategy(_))
        ));
        // star leaf buys an edge to another leaf: count +1, buyer owns
        let s = star(4);
        let bought = apply_strategy(
            &s,
            &Strategy {
                actor: AgentId(1),
                targets: BTreeSet::from([2]),
            },
        )
        .unwrap();
        assert_eq!(bought.edge_count(), 4);
        assert_eq!(bought.edge_owner(AgentId(1), AgentId(2)), Some(AgentId(1)));
    }

    #[test]
    fn hub_best_response_is_a_minimum_dominating_set() {
        let p3 = PlainGraph {
            n: 3,
            edges: vec![(0, 1), (1, 2)],
        };
        let inst = ds_reduction(&p3);
        let cfg = GameConfig::new(inst.alpha, 1, CostMode::Sum);
        let (best, _) = best_k_local_response(&inst.net, &cfg, inst.hub).unwrap();
        assert_eq!(best.targets, BTreeSet::from([1]));

        let c4 = PlainGraph {
            n: 4,
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        };
        let inst = ds_reduction(&c4);
        let cfg = GameConfig::new(inst.alpha, 1, CostMode::Sum);
        let (best, _) = best_k_local_response(&inst.net, &cfg, inst.hub).unwrap();
        assert_eq!(best.targets.len(), 2);
    }

    #[test]
    fn hub_response_is_radius_independent() {
        let c4 = PlainGraph {
            n: 4,
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        };
        let inst = ds_reduction(&c4);
        let mut answers = Vec::new();
        for k in 1..=3 {
            let cfg = GameConfig::new(inst.alpha, k, CostMode::Sum);
            answers.push(best_k_local_response(&inst.net, &cfg, inst.hub).unwrap());
        }
        let global = best_global_response(
            &inst.net,
            &GameConfig::new(inst.alpha, 1, CostMode::Sum),
            inst.hub,
        )
        .unwrap();
        assert!(answers.iter().all(|a| *a == answers[0]));
        assert_eq!(answers[0], global);
    }

    #[test]
    fn star_is_stable_for_expensive_edges() {
        let net = star(5);
        let cfg = sum_cfg(5, 2, 2);
        for u in net.agents() {
            let (best, cost) = best_k_local_response(&net, &cfg, u).unwrap();
            assert_eq!(best.targets, *net.strategy(u));
            assert_eq!(cost, agent_cost(&net, &cfg, u));
            assert!(best_greedy_move(&net, &cfg, u).is_none());
        }
    }

    #[test]
    fn star_leaf_buys_when_edges_are_cheap() {
        let net = star(5);
        let cfg = sum_cfg(1, 2, 2);
        let (mv, _) = best_greedy_move(&net, &cfg, AgentId(1)).unwrap();
        assert_eq!(mv.kind, MoveKind::Buy { target: 2 });
    }

    #[test]
    fn tree_star_leaf_best_greedy_buy() {
        // leaf of the depth-2 tree, 16-leaf star: buying two hops toward the
        // star center gains |V| - 3 = 22
        let net = tree_star(2, 16);
        let cfg = sum_cfg(1, 1, 2);
        let u = tree_star_leaf(2);
        let before = agent_cost(&net, &cfg, u);
        let (mv, after) = best_greedy_move(&net, &cfg, u).unwrap();
        assert_eq!(mv.kind, MoveKind::Buy { target: 0 });
        let gain = before.finite().unwrap() - after.finite().unwrap();
        // distance gain 22 minus the edge price 1
        assert_eq!(gain, rat(21, 1));
    }

    #[test]
    fn kne_tree_has_no_greedy_move() {
        let (net, cfg) = crate::constructions::kne_tree_instance(3, 2);
        for u in net.agents() {
            assert!(best_greedy_move(&net, &cfg, u).is_none());
        }
    }

    #[test]
    fn local_never_beats_global() {
        let net = tree_star(2, 3);
        for k in [1u32, 2] {
            let cfg = sum_cfg(5, 2, k);
            for u in net.agents() {
                let (_, local) = best_k_local_response(&net, &cfg, u).unwrap();
                let (_, global) = best_global_response(&net, &cfg, u).unwrap();
                assert!(global <= local);
            }
        }
    }

    #[test]
    fn greedy_moves_are_strategies_and_weaker_than_full_moves() {
        let net = tree_star(1, 2);
        for k in 1..=3 {
            let cfg = sum_cfg(3, 2, k);
            for u in net.agents() {
                let space: Vec<BTreeSet<u32>> = local_strategy_space(&net, &cfg, u)
                    .unwrap()
                    .map(|s| s.targets)
                    .collect();
                let mut best_move_cost = agent_cost(&net, &cfg, u);
                for mv in enumerate_greedy_moves(&net, &cfg, u) {
                    let t = move_targets(&net, &mv);
                    assert!(space.contains(&t), "greedy move outside strategy space");
                    let c = agent_cost_with_strategy(
                        &net,
                        &cfg,
                        u,
                        &t.iter().copied().collect::<Vec<_>>(),
                    );
                    best_move_cost = best_move_cost.min(c);
                }
                let (_, best_full) = best_k_local_response(&net, &cfg, u).unwrap();
                assert!(best_full <= best_move_cost);
            }
        }
    }

    #[test]
    fn umfl_identity_star_center() {
        let net = star(4);
        let cfg = sum_cfg(3, 1, 2);
        let u = AgentId(0);
        let inst = build_umfl_instance(&net, &cfg, u);
        assert!(inst.opening_cost.iter().all(|&c| c == rat(3, 1)));
        assert_eq!(
            inst.evaluate(net.strategy(u)),
            agent_cost(&net, &cfg, u)
        );
    }

    #[test]
    fn umfl_identity_line_endpoints() {
        let net = line(4);
        let cfg = sum_cfg(2, 1, 2);
        for u in [AgentId(0), AgentId(3)] {
            let inst = build_umfl_instance(&net, &cfg, u);
            assert_eq!(inst.facilities.len(), 2);
            assert_eq!(
                inst.evaluate(net.strategy(u)),
                agent_cost(&net, &cfg, u),
                "agent {u}"
            );
        }
    }

    #[test]
    fn umfl_free_facilities_are_incoming_edges() {
        let net = line(4);
        let cfg = sum_cfg(2, 1, 2);
        // agent 2 is owned-into by agent 1
        let inst = build_umfl_instance(&net, &cfg, AgentId(2));
        let idx = inst.facilities.iter().position(|&f| f == AgentId(1)).unwrap();
        assert!(inst.opening_cost[idx].is_zero());
    }

    #[test]
    fn umfl_identity_random_networks() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..200 {
            let n = 3 + (trial % 8) as u32;
            let net = crate::enumerate::random_connected_network(n, &mut rng);
            let cfg = sum_cfg(5, 3, 1 + (trial % 3) as u32);
            for u in net.agents() {
                let inst = build_umfl_instance(&net, &cfg, u);
                assert_eq!(
                    inst.evaluate(net.strategy(u)),
                    agent_cost(&net, &cfg, u),
                    "n={n} u={u}"
                );
            }
        }
    }
}
