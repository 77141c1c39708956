//! Certification of the solution concepts and their approximation factors.
//!
//! A verdict is either HOLDS or the lowest-id violating agent together with
//! her tie-broken best improving change. Per-agent checks are independent and
//! fan out across threads; the reported witness is chosen by agent id, never
//! by completion order.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{agent_cost, agent_cost_with_strategy, Cost, GameConfig};
use crate::graph::{AgentId, Network};
use crate::moves::{
    best_global_response, best_greedy_move, best_greedy_move_in, best_k_local_response,
    enumerate_greedy_moves_in, move_targets, GreedyMove, MoveError, MoveKind, Strategy,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EqError {
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
}

/// The certified solution concepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Concept {
    Ne,
    KNe,
    Ge,
    KGe,
    Ase,
}

impl Concept {
    pub const ALL: [Concept; 5] = [
        Concept::Ne,
        Concept::KNe,
        Concept::Ge,
        Concept::KGe,
        Concept::Ase,
    ];
}

/// An improving change found for a witness: either a full strategy or a
/// single greedy move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WitnessChange {
    Move(GreedyMove),
    Strategy(Strategy),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub agent: AgentId,
    pub change: WitnessChange,
    pub cost_before: Cost,
    pub cost_after: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated { witness: Witness },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Which change set an approximation factor ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    LocalFull,
    LocalGreedy,
    GlobalFull,
    GlobalGreedy,
}

fn improvement_for(
    net: &Network,
    cfg: &GameConfig,
    concept: Concept,
    u: AgentId,
) -> Result<Option<Witness>, MoveError> {
    let current = agent_cost(net, cfg, u);
    match concept {
        Concept::Ne => {
            let (strategy, cost) = best_global_response(net, cfg, u)?;
            Ok((cost < current).then_some(Witness {
                agent: u,
                change: WitnessChange::Strategy(strategy),
                cost_before: current,
                cost_after: cost,
            }))
        }
        Concept::KNe => {
            let (strategy, cost) = best_k_local_response(net, cfg, u)?;
            Ok((cost < current).then_some(Witness {
                agent: u,
                change: WitnessChange::Strategy(strategy),
                cost_before: current,
                cost_after: cost,
            }))
        }
        Concept::Ge => Ok(best_greedy_move_in(net, cfg, u, None).map(|(mv, cost)| Witness {
            agent: u,
            change: WitnessChange::Move(mv),
            cost_before: current,
            cost_after: cost,
        })),
        Concept::KGe => Ok(best_greedy_move(net, cfg, u).map(|(mv, cost)| Witness {
            agent: u,
            change: WitnessChange::Move(mv),
            cost_before: current,
            cost_after: cost,
        })),
        Concept::Ase => Ok(best_own_swap(net, cfg, u).map(|(mv, cost)| Witness {
            agent: u,
            change: WitnessChange::Move(mv),
            cost_before: current,
            cost_after: cost,
        })),
    }
}

/// Best strictly improving swap of one own edge, unrestricted targets.
/// Edge counts never change, so the edge price plays no role.
fn best_own_swap(net: &Network, cfg: &GameConfig, u: AgentId) -> Option<(GreedyMove, Cost)> {
    let current = agent_cost(net, cfg, u);
    let mut best: Option<(GreedyMove, Cost)> = None;
    for mv in enumerate_greedy_moves_in(net, u, None) {
        if !matches!(mv.kind, MoveKind::Swap { .. }) {
            continue;
        }
        let targets: Vec<u32> = move_targets(net, &mv).into_iter().collect();
        let cost = agent_cost_with_strategy(net, cfg, u, &targets);
        if cost >= current {
            continue;
        }
        match &best {
            Some((_, bc)) if cost >= *bc => {}
            _ => best = Some((mv, cost)),
        }
    }
    best
}

fn certify_concept(
    net: &Network,
    cfg: &GameConfig,
    concept: Concept,
) -> Result<Verdict, MoveError> {
    let agents: Vec<AgentId> = net.agents().collect();
    let first = agents
        .par_iter()
        .map(|&u| improvement_for(net, cfg, concept, u))
        .find_map_first(|r| match r {
            Ok(Some(w)) => Some(Ok(w)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        });
    match first {
        None => Ok(Verdict::Holds),
        Some(Ok(witness)) => Ok(Verdict::Violated { witness }),
        Some(Err(e)) => Err(e),
    }
}

/// No agent improves by any k-local move.
pub fn is_k_ne(net: &Network, cfg: &GameConfig) -> Result<Verdict, MoveError> {
    certify_concept(net, cfg, Concept::KNe)
}

/// No agent improves by a single k-local greedy move.
pub fn is_k_ge(net: &Network, cfg: &GameConfig) -> Result<Verdict, MoveError> {
    certify_concept(net, cfg, Concept::KGe)
}

/// No agent improves by any strategy change. The locality radius is ignored.
pub fn is_ne(net: &Network, cfg: &GameConfig) -> Result<Verdict, MoveError> {
    certify_concept(net, cfg, Concept::Ne)
}

/// No agent improves by buying, deleting or swapping one own edge anywhere.
pub fn is_ge(net: &Network, cfg: &GameConfig) -> Result<Verdict, MoveError> {
    certify_concept(net, cfg, Concept::Ge)
}

/// No agent improves by swapping one own edge; independent of the edge price.
pub fn is_ase(net: &Network, cfg: &GameConfig) -> Result<Verdict, MoveError> {
    certify_concept(net, cfg, Concept::Ase)
}

/// Best achievable cost for `u` within a scope, including keeping the current
/// strategy. Infinite-cost outcomes are never "achievable".
fn best_achievable(
    net: &Network,
    cfg: &GameConfig,
    scope: Scope,
    u: AgentId,
) -> Result<Cost, MoveError> {
    let current = agent_cost(net, cfg, u);
    let best = match scope {
        Scope::LocalFull => best_k_local_response(net, cfg, u)?.1,
        Scope::GlobalFull => best_global_response(net, cfg, u)?.1,
        Scope::LocalGreedy => best_greedy_move(net, cfg, u)
            .map(|(_, c)| c)
            .unwrap_or(current),
        Scope::GlobalGreedy => best_greedy_move_in(net, cfg, u, None)
            .map(|(_, c)| c)
            .unwrap_or(current),
    };
    Ok(best.min(current))
}

/// `u`'s cost divided by her best achievable cost under the scope (>= 1).
pub fn agent_approx_factor(
    net: &Network,
    cfg: &GameConfig,
    scope: Scope,
    u: AgentId,
) -> Result<Cost, MoveError> {
    let current = agent_cost(net, cfg, u);
    let best = best_achievable(net, cfg, scope, u)?;
    Ok(match (current, best) {
        (Cost::Finite(c), Cost::Finite(b)) => Cost::Finite(c / b),
        // nothing finite is achievable: no change can improve anything
        (Cost::Infinite, Cost::Infinite) => Cost::from_int(1),
        (Cost::Infinite, Cost::Finite(_)) => Cost::Infinite,
        (Cost::Finite(_), Cost::Infinite) => unreachable!("best includes current"),
    })
}

/// Maximum per-agent approximation factor under the scope.
pub fn approx_factor(net: &Network, cfg: &GameConfig, scope: Scope) -> Result<Cost, MoveError> {
    let agents: Vec<AgentId> = net.agents().collect();
    let factors: Result<Vec<Cost>, MoveError> = agents
        .par_iter()
        .map(|&u| agent_approx_factor(net, cfg, scope, u))
        .collect();
    Ok(factors?.into_iter().max().unwrap_or(Cost::from_int(1)))
}

/// Full certification: verdicts for the requested concepts plus the local and
/// global approximation factors. Factors whose solvers exceed their budgets
/// are reported as absent rather than failing the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub verdicts: BTreeMap<Concept, Verdict>,
    pub beta_local: Option<Cost>,
    pub beta_global: Option<Cost>,
}

pub fn certify(
    net: &Network,
    cfg: &GameConfig,
    concepts: &[Concept],
) -> Result<EquilibriumReport, MoveError> {
    let mut verdicts = BTreeMap::new();
    for &concept in concepts {
        verdicts.insert(concept, certify_concept(net, cfg, concept)?);
    }
    let beta_local = approx_factor(net, cfg, Scope::LocalFull).ok();
    let beta_global = approx_factor(net, cfg, Scope::GlobalFull).ok();
    Ok(EquilibriumReport {
        verdicts,
        beta_local,
        beta_global,
    })
}

/// Size of `N_r(u)` for every agent, shared by the neighborhood-growth checks.
fn ball_sizes(net: &Network, r: u32) -> Vec<u64> {
    net.agents()
        .map(|u| net.k_neighborhood(u, r).len() as u64)
        .collect()
}

/// Per-agent outcome of the radius-2 growth inequality `|N_2(v)| > n/(2a)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallSizeCheck {
    pub agent: AgentId,
    pub ball_size: u64,
    pub pass: bool,
}

/// One radius `d` of the iterated-growth dichotomy: either some agent's
/// `(2d+3)`-ball exceeds n/2, or every agent's `(3d+3)`-ball exceeds
/// `lambda * n / a`. Both branches are reported.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthDichotomyCheck {
    pub d: u32,
    pub lambda: u64,
    pub big_ball_agent: Option<AgentId>,
    pub all_balls_grow: bool,
    pub pass: bool,
}

/// One radius `d` of the half-to-all check: an agent whose `d`-ball holds half
/// the agents must reach everyone within `2d+1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfToAllCheck {
    pub d: u32,
    pub agent: AgentId,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeighborhoodGrowthReport {
    /// `|N_2(v)| > n/(2a)` per agent; requires k >= 2.
    pub radius_two: Option<Vec<BallSizeCheck>>,
    /// Growth dichotomy for every valid `d <= k/3 - 1`; requires k >= 6.
    pub growth_dichotomy: Vec<GrowthDichotomyCheck>,
    /// Half-to-all for every valid `d <= k/2 - 1`; requires k >= 4, a < n/2.
    pub half_to_all: Vec<HalfToAllCheck>,
}

/// Evaluates the equilibrium neighborhood-growth inequalities. The network
/// must certify as a k-local Nash equilibrium first; each inequality family
/// is evaluated only where its own parameter preconditions hold.
pub fn check_neighborhood_growth(net: &Network, cfg: &GameConfig) -> Result<NeighborhoodGrowthReport, EqError> {
    match is_k_ne(net, cfg)? {
        Verdict::Holds => {}
        Verdict::Violated { witness } => {
            return Err(EqError::PreconditionNotMet(format!(
                "network is not a k-local Nash equilibrium: agent {} improves",
                witness.agent
            )));
        }
    }
    let n = net.agent_count() as i64;
    let alpha = cfg.alpha;

    let radius_two = (cfg.k >= 2).then(|| {
        ball_sizes(net, 2)
            .into_iter()
            .enumerate()
            .map(|(u, size)| BallSizeCheck {
                agent: AgentId(u as u32),
                ball_size: size,
                // |N_2(v)| > n / (2 alpha)
                pass: Rational64::from_integer(size as i64) * 2 * alpha
                    > Rational64::from_integer(n),
            })
            .collect()
    });

    let mut growth_dichotomy = Vec::new();
    if cfg.k >= 6 {
        for d in 1..=cfg.k / 3 - 1 {
            let inner = ball_sizes(net, d);
            // largest integer satisfying the strict hypothesis |N_d(u)| > lambda
            let lambda = inner.iter().min().copied().unwrap_or(0).saturating_sub(1);
            let big_ball_agent = ball_sizes(net, 2 * d + 3)
                .iter()
                .position(|&s| 2 * s as i64 > n)
                .map(|u| AgentId(u as u32));
            let all_balls_grow = ball_sizes(net, 3 * d + 3).iter().all(|&s| {
                Rational64::from_integer(s as i64) * alpha
                    > Rational64::from_integer(lambda as i64 * n)
            });
            growth_dichotomy.push(GrowthDichotomyCheck {
                d,
                lambda,
                big_ball_agent,
                all_balls_grow,
                pass: big_ball_agent.is_some() || all_balls_grow,
            });
        }
    }

    let mut half_to_all = Vec::new();
    if cfg.k >= 4 && alpha * 2 < Rational64::from_integer(n) {
        for d in 1..=cfg.k / 2 - 1 {
            let inner = ball_sizes(net, d);
            for (u, &size) in inner.iter().enumerate() {
                if 2 * size as i64 >= n {
                    let reach = net.k_neighborhood(AgentId(u as u32), 2 * d + 1).len() as i64;
                    half_to_all.push(HalfToAllCheck {
                        d,
                        agent: AgentId(u as u32),
                        pass: reach >= n,
                    });
                }
            }
        }
    }

    Ok(NeighborhoodGrowthReport {
        radius_two,
        growth_dichotomy,
        half_to_all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        clique, complete_binary_tree, directed_cycle, gk_nontree, kne_tree_instance, line, star,
        tree_star, tree_star_center, tree_star_leaf,
    };
    use crate::cost::CostMode;
    use crate::formulas::max_purchase_gain;

    fn rat(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn kne_tree_certifies() {
        let (net, cfg) = kne_tree_instance(3, 2);
        assert!(is_k_ne(&net, &cfg).unwrap().holds());
    }

    #[test]
    fn line_is_one_local_stable() {
        for alpha in [rat(1, 2), rat(5, 1)] {
            let cfg = GameConfig::sum(alpha, 1);
            assert!(is_k_ne(&line(6), &cfg).unwrap().holds());
        }
    }

    #[test]
    fn star_two_local_verdicts() {
        let net = star(5);
        assert!(is_k_ne(&net, &GameConfig::sum(rat(3, 2), 2))
            .unwrap()
            .holds());
        match is_k_ne(&net, &GameConfig::sum(rat(1, 2), 2)).unwrap() {
            Verdict::Violated { witness } => {
                assert_eq!(witness.agent, AgentId(1));
                match witness.change {
                    WitnessChange::Strategy(s) => assert!(!s.targets.is_empty()),
                    _ => panic!("expected a strategy witness"),
                }
            }
            Verdict::Holds => panic!("cheap edges must break the star"),
        }
    }

    #[test]
    fn star_is_ne_for_expensive_edges() {
        assert!(is_ne(&star(5), &GameConfig::sum(rat(2, 1), 1))
            .unwrap()
            .holds());
    }

    #[test]
    fn line_swap_violates_k_ge() {
        // agent 0 owns the edge to 1; swapping it two hops ahead pays
        let net = line(5);
        match is_k_ge(&net, &GameConfig::sum(rat(2, 1), 2)).unwrap() {
            Verdict::Violated { witness } => {
                assert_eq!(witness.agent, AgentId(0));
                assert_eq!(
                    match witness.change {
                        WitnessChange::Move(m) => m.kind,
                        _ => panic!("expected a move witness"),
                    },
                    MoveKind::Swap { old: 1, new: 2 }
                );
            }
            Verdict::Holds => panic!("line must admit an improving swap"),
        }
    }

    #[test]
    fn expensive_clique_admits_deletions() {
        let net = clique(4);
        match is_k_ge(&net, &GameConfig::sum(rat(5, 1), 1)).unwrap() {
            Verdict::Violated { witness } => {
                assert_eq!(witness.agent, AgentId(0));
                assert!(matches!(
                    witness.change,
                    WitnessChange::Move(GreedyMove {
                        kind: MoveKind::Delete { target: 1 },
                        ..
                    })
                ));
            }
            Verdict::Holds => panic!("deleting a clique edge must pay at alpha = 5"),
        }
    }

    #[test]
    fn stable_tree_is_swap_stable() {
        let (net, cfg) = kne_tree_instance(3, 2);
        assert!(is_ase(&net, &cfg).unwrap().holds());
    }

    #[test]
    fn tree_star_locality_gap() {
        // d = 4, l = 81: stable for 2-local greedy moves at the oracle price,
        // yet the global purchase toward the star center still pays
        let d = 4;
        let l = 81;
        let net = tree_star(d, l);
        let delta = max_purchase_gain(d, 2, l).oracle;
        assert_eq!(delta, (net.agent_count() as i64) - 3);
        let cfg = GameConfig::sum(rat(delta, 1), 2);
        assert!(is_k_ge(&net, &cfg).unwrap().holds());
        assert!(!is_ge(&net, &cfg).unwrap().holds());
        // the deepest leaf's best unrestricted greedy move is the purchase
        // of the star center
        let u = tree_star_leaf(d);
        let (mv, _) = crate::moves::best_greedy_move_in(&net, &cfg, u, None).unwrap();
        assert_eq!(
            mv.kind,
            MoveKind::Buy {
                target: tree_star_center(d).0
            }
        );
    }

    #[test]
    fn approx_factor_one_at_equilibrium() {
        let net = star(5);
        let cfg = GameConfig::sum(rat(3, 1), 2);
        for scope in [
            Scope::LocalFull,
            Scope::LocalGreedy,
            Scope::GlobalFull,
            Scope::GlobalGreedy,
        ] {
            assert_eq!(approx_factor(&net, &cfg, scope).unwrap(), Cost::from_int(1));
        }
    }

    #[test]
    fn tree_star_greedy_factor_values() {
        let d = 4;
        let l = 81;
        let net = tree_star(d, l);
        let delta = max_purchase_gain(d, 2, l).oracle;
        let cfg = GameConfig::sum(rat(delta, 1), 2);
        let u = tree_star_leaf(d);
        // before: pure distance cost 748; after buying the center: 111 + 319
        let factor = agent_approx_factor(&net, &cfg, Scope::GlobalGreedy, u).unwrap();
        assert_eq!(factor, Cost::Finite(rat(748, 430)));
        assert_eq!(
            agent_approx_factor(&net, &cfg, Scope::LocalGreedy, u).unwrap(),
            Cost::from_int(1)
        );
    }

    #[test]
    fn swap_gap_factors_straddle_one() {
        for k in [2u32, 3] {
            let inst = gk_nontree(k).unwrap();
            let at_k = GameConfig::sum(inst.alpha, k);
            let beyond = GameConfig::sum(inst.alpha, k + 1);
            assert_eq!(
                agent_approx_factor(&inst.net, &at_k, Scope::LocalGreedy, inst.u).unwrap(),
                Cost::from_int(1),
                "k = {k}"
            );
            assert!(
                agent_approx_factor(&inst.net, &beyond, Scope::LocalGreedy, inst.u).unwrap()
                    > Cost::from_int(1),
                "k = {k}"
            );
        }
    }

    #[test]
    fn report_betas_track_verdicts() {
        let net = star(5);
        let good = certify(&net, &GameConfig::sum(rat(3, 1), 2), &Concept::ALL).unwrap();
        assert!(good.verdicts.values().all(|v| v.holds()));
        assert_eq!(good.beta_local, Some(Cost::from_int(1)));
        assert_eq!(good.beta_global, Some(Cost::from_int(1)));

        let bad = certify(&net, &GameConfig::sum(rat(1, 2), 2), &Concept::ALL).unwrap();
        assert!(!bad.verdicts[&Concept::KNe].holds());
        assert!(bad.beta_local.unwrap() > Cost::from_int(1));
    }

    #[test]
    fn report_serializes_with_concept_names() {
        let net = star(4);
        let report = certify(&net, &GameConfig::sum(rat(3, 1), 2), &Concept::ALL).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"k-ne\""));
        assert!(json.contains("\"status\":\"holds\""));
    }

    #[test]
    fn growth_checks_on_star_equilibrium() {
        let net = star(6);
        let cfg = GameConfig::sum(rat(3, 2), 2);
        let report = check_neighborhood_growth(&net, &cfg).unwrap();
        let radius_two = report.radius_two.unwrap();
        assert!(radius_two.iter().all(|c| c.pass && c.ball_size == 6));
        assert!(report.growth_dichotomy.is_empty());
        assert!(report.half_to_all.is_empty());
    }

    #[test]
    fn growth_checks_require_equilibrium() {
        let net = star(5);
        let cfg = GameConfig::sum(rat(1, 2), 2);
        assert!(matches!(
            check_neighborhood_growth(&net, &cfg),
            Err(EqError::PreconditionNotMet(_))
        ));
    }

    #[test]
    fn growth_checks_with_large_radius() {
        // a clique is k-NE exactly at alpha = 1 (every deletion subset is
        // cost-neutral); all radius families apply at k = 6
        let net = clique(8);
        let cfg = GameConfig::sum(rat(1, 1), 6);
        let report = check_neighborhood_growth(&net, &cfg).unwrap();
        assert!(report.growth_dichotomy.iter().all(|c| c.pass));
        assert!(!report.half_to_all.is_empty());
        assert!(report.half_to_all.iter().all(|c| c.pass));
    }

    #[test]
    fn max_mode_odd_cycle_is_two_local_stable() {
        let cfg = GameConfig::new(rat(3, 2), 2, CostMode::Max);
        assert!(is_k_ne(&directed_cycle(5), &cfg).unwrap().holds());
    }

    #[test]
    fn binary_tree_at_scaled_price_holds() {
        let net = complete_binary_tree(3);
        let cfg = GameConfig::sum(rat(15, 1), 2);
        assert!(is_k_ne(&net, &cfg).unwrap().holds());
        // at a fraction of the price a leaf buys upward
        let cheap = GameConfig::sum(rat(1, 1), 2);
        assert!(!is_k_ne(&net, &cheap).unwrap().holds());
    }
}
