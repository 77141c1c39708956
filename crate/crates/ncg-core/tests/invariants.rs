//! Structural invariants beyond the acceptance gate: swap locality on trees,
//! greedy stability of the tree-star family at the engine-derived price,
//! purchase-target characterizations, optimum cross-checks, and the
//! approximation-factor growth trend.

use std::collections::HashSet;

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ncg_core::constructions::{tree_star, tree_star_center, tree_star_leaf};
use ncg_core::cost::{
    agent_cost, agent_cost_with_strategy, opt_cost, social_cost, Cost, GameConfig,
};
use ncg_core::dynamics::{run, MoveRegime, Outcome, Scheduler};
use ncg_core::enumerate::{
    connected_edge_subsets, for_each_connected_network, for_each_ownership, random_connected_network,
    random_tree,
};
use ncg_core::equilibrium::{agent_approx_factor, approx_factor, is_k_ge, Scope};
use ncg_core::formulas::{
    center_purchase_threshold, leaf_dist_after_center_purchase, max_purchase_gain,
    tree_star_leaf_dist,
};
use ncg_core::graph::{AgentId, Distance, Network};
use ncg_core::moves::{
    best_k_local_response, enumerate_greedy_moves, enumerate_greedy_moves_in, local_strategy_space,
    move_targets, MoveKind,
};

fn rat(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

fn dist_sum(net: &Network, u: AgentId) -> i64 {
    net.shortest_paths(u)
        .iter()
        .map(|d| d.finite().unwrap() as i64)
        .sum()
}

/// Distance change of the own-edge swap `u: old -> new`, negative when it
/// improves.
fn swap_delta(net: &Network, u: AgentId, old: u32, new: u32) -> i64 {
    let targets: Vec<u32> = net
        .strategy(u)
        .iter()
        .copied()
        .filter(|&t| t != old)
        .chain(std::iter::once(new))
        .collect();
    let cfg = GameConfig::sum(rat(1, 1), 1);
    let after = agent_cost_with_strategy(net, &cfg, u, &targets)
        .finite()
        .map(|c| c - rat(targets.len() as i64, 1))
        .map(|c| *c.numer());
    match after {
        Some(a) => a - dist_sum(net, u),
        None => i64::MAX, // disconnecting swap
    }
}

#[test]
fn improving_tree_swaps_are_visible_two_hops_away() {
    // whenever any own-edge swap improves on a tree, a 2-local one does too
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for trial in 0..500 {
        let n = 4 + (trial % 11) as u32; // 4..=14
        let tree = random_tree(n, &mut rng);
        for u in tree.agents() {
            let own: Vec<u32> = tree.strategy(u).iter().copied().collect();
            let mut any_global = false;
            for &old in &own {
                for new in 0..n {
                    if new == u.0 || tree.has_edge(u, AgentId(new)) {
                        continue;
                    }
                    if swap_delta(&tree, u, old, new) < 0 {
                        any_global = true;
                    }
                }
            }
            if !any_global {
                continue;
            }
            let hood = tree.k_neighborhood(u, 2);
            let any_local = own.iter().any(|&old| {
                hood.iter().any(|&w| {
                    w != u && !tree.has_edge(u, w) && swap_delta(&tree, u, old, w.0) < 0
                })
            });
            assert!(
                any_local,
                "agent {u} improves by a far swap but not locally, trial {trial}"
            );
        }
    }
}

#[test]
fn tree_star_is_greedy_stable_at_the_engine_price_radius_three() {
    for d in [4u32, 6] {
        let l = 3u32.pow(d);
        let net = tree_star(d, l);
        let delta = max_purchase_gain(d, 3, l).oracle;
        let cfg = GameConfig::sum(rat(delta, 1), 3);
        assert!(
            is_k_ge(&net, &cfg).unwrap().holds(),
            "tree-star d={d} must be stable for 3-local greedy moves"
        );
    }
}

fn best_single_purchase_cost(net: &Network, u: AgentId) -> Cost {
    let cfg = GameConfig::sum(rat(1, 1), 2);
    // the deep leaf owns nothing: its unrestricted greedy moves are exactly
    // the single purchases
    let moves = enumerate_greedy_moves_in(net, u, None);
    assert!(moves.iter().all(|m| matches!(m.kind, MoveKind::Buy { .. })));
    moves
        .iter()
        .map(|m| {
            let t: Vec<u32> = move_targets(net, m).into_iter().collect();
            agent_cost_with_strategy(net, &cfg, u, &t)
        })
        .min()
        .unwrap()
}

#[test]
fn center_purchase_dominates_for_large_stars() {
    let cfg = GameConfig::sum(rat(1, 1), 2);
    for d in [4u32, 6] {
        for l in [1u32 << (d + 1), (1 << (d + 1)) + 7] {
            let net = tree_star(d, l);
            let u = tree_star_leaf(d);
            let via_center = agent_cost_with_strategy(&net, &cfg, u, &[tree_star_center(d).0]);
            assert_eq!(
                via_center,
                best_single_purchase_cost(&net, u),
                "buying the center must be optimal at d={d} l={l}"
            );
        }
    }
    // the center-versus-bridge threshold alone is not enough: just past it,
    // the purchase of the root still wins (engine verdict, frozen)
    let d = 4;
    let l = center_purchase_threshold(d).unwrap() as u32;
    let net = tree_star(d, l);
    let u = tree_star_leaf(d);
    let via_center = agent_cost_with_strategy(&net, &cfg, u, &[tree_star_center(d).0]);
    let best = best_single_purchase_cost(&net, u);
    assert_eq!(via_center, Cost::from_int(190));
    assert_eq!(best, Cost::from_int(184));
    let via_root = agent_cost_with_strategy(&net, &cfg, u, &[0]);
    assert_eq!(via_root, best);
}

#[test]
fn deepest_leaves_have_the_largest_purchase_gain() {
    for d in [3u32, 4] {
        let l = 1u32 << (d + 1);
        let net = tree_star(d, l);
        let leaf_range = (1u32 << d) - 1..(1 << (d + 1)) - 1;
        for k in [2u32, 3] {
            let mut best_gain = i64::MIN;
            let mut best_agents = Vec::new();
            for u in net.agents() {
                let before = dist_sum(&net, u);
                let hood = net.k_neighborhood(u, k);
                let mut gain = 0i64;
                for &t in hood.iter() {
                    if t == u || net.has_edge(u, t) {
                        continue;
                    }
                    let bought = net.with_edge(u, t);
                    gain = gain.max(before - dist_sum(&bought, u));
                }
                if gain > best_gain {
                    best_gain = gain;
                    best_agents.clear();
                }
                if gain == best_gain {
                    best_agents.push(u.0);
                }
            }
            assert!(
                best_agents.iter().any(|a| leaf_range.contains(a)),
                "a deepest leaf must attain the maximum gain, d={d} k={k}: {best_agents:?}"
            );
        }
    }
}

#[test]
fn optimum_matches_graph_exhaustive_minimum_up_to_six() {
    // social cost is ownership-independent, so the reference optimum can be
    // checked against the graph-level minimum
    for n in 3..=6u32 {
        for alpha in [rat(2, 1), rat(3, 1), rat(7, 2)] {
            let cfg = GameConfig::sum(alpha, 1);
            let subsets = connected_edge_subsets(n);
            let best = subsets
                .par_iter()
                .map(|edges| {
                    let net = Network::from_owned_edges(n, edges.iter().copied()).unwrap();
                    social_cost(&net, &cfg)
                })
                .min()
                .unwrap();
            assert_eq!(opt_cost(n, &cfg).unwrap(), best, "n={n} alpha={alpha}");
        }
    }
    // and the independence itself, on a sampled graph
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let reference = random_connected_network(7, &mut rng);
    let cfg = GameConfig::sum(rat(5, 2), 1);
    let value = social_cost(&reference, &cfg);
    let edges = reference.owned_edges();
    for_each_ownership(7, &edges[..edges.len().min(12)], |net| {
        if net.edge_count() == reference.edge_count() {
            assert_eq!(social_cost(net, &cfg), value);
        }
    });
}

#[test]
fn digests_separate_the_exhaustive_corpus() {
    let mut seen = HashSet::new();
    for n in 2..=5u32 {
        for_each_connected_network(n, |net| {
            assert!(seen.insert(net.canonical_hash()), "digest collision at n={n}");
        });
    }
}

#[test]
fn radius_one_moves_only_ever_remove_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..20 {
        let n = 5 + (trial % 6) as u32;
        let net = random_connected_network(n, &mut rng);
        let cfg = GameConfig::sum(rat(3, 1), 1);
        for regime in [MoveRegime::KGbg, MoveRegime::KBg] {
            let trace = run(&net, &cfg, regime, &Scheduler::RoundRobin, 10_000).unwrap();
            assert!(matches!(trace.outcome, Outcome::Converged { .. }));
            let states = trace.states().unwrap();
            for pair in states.windows(2) {
                assert!(
                    pair[1].edge_count() < pair[0].edge_count(),
                    "edge count must fall on every radius-1 move, trial {trial}"
                );
            }
        }
    }
}

fn greedy_results_stay_in_the_strategy_space(net: &Network) {
    for k in 1..=3u32 {
        let cfg = GameConfig::sum(rat(3, 2), k);
        for u in net.agents() {
            let space: Vec<_> = local_strategy_space(net, &cfg, u)
                .unwrap()
                .map(|s| s.targets)
                .collect();
            let mut best_move = agent_cost(net, &cfg, u);
            for mv in enumerate_greedy_moves(net, &cfg, u) {
                let targets = move_targets(net, &mv);
                assert!(space.contains(&targets), "greedy move escaped the space");
                let t: Vec<u32> = targets.into_iter().collect();
                best_move = best_move.min(agent_cost_with_strategy(net, &cfg, u, &t));
            }
            let (_, best_full) = best_k_local_response(net, &cfg, u).unwrap();
            assert!(best_full <= best_move);
        }
    }
}

#[test]
fn strategy_space_subsumes_greedy_moves() {
    // exhaustive to five agents, sampled at six
    for n in 2..=5u32 {
        let subsets = connected_edge_subsets(n);
        subsets.par_iter().for_each(|edges| {
            for_each_ownership(n, edges, greedy_results_stay_in_the_strategy_space);
        });
    }
    let trials: Vec<u64> = (0..2000).collect();
    trials.par_iter().for_each(|&trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(31_000 + trial);
        let net = random_connected_network(6, &mut rng);
        greedy_results_stay_in_the_strategy_space(&net);
    });
}

#[test]
fn approx_factor_grows_like_depth_over_radius() {
    // the per-depth greedy gap of the tree-star family approaches
    // (d + 3) / (k + 1); the measured slope in d must sit within 15%
    let k = 2u32;
    let mut factors = Vec::new();
    for d in [4u32, 6, 8] {
        let l = 3u32.pow(d);
        let net = tree_star(d, l);
        let n = net.agent_count() as i64;
        // engine-verified for d in {4, 6}; the verified radius-2 pattern
        // |V| - 3 continues the price at d = 8, where the full gain scan is
        // out of test budget
        let alpha = if d <= 6 {
            let gain = max_purchase_gain(d, k, l);
            assert_eq!(gain.oracle, n - 3);
            gain.oracle
        } else {
            n - 3
        };
        // the distance pieces stay oracle-checked at every depth
        assert!(tree_star_leaf_dist(d, l).unwrap().matches);
        assert!(leaf_dist_after_center_purchase(d, l).unwrap().matches);

        let cfg = GameConfig::sum(rat(alpha, 1), k);
        let u = tree_star_leaf(d);
        let factor = agent_approx_factor(&net, &cfg, Scope::GlobalGreedy, u)
            .unwrap()
            .finite()
            .unwrap();
        factors.push(*factor.numer() as f64 / *factor.denom() as f64);
        if d == 4 {
            // at desk size, the deep leaf is the network-wide maximum
            assert_eq!(
                approx_factor(&net, &cfg, Scope::GlobalGreedy).unwrap(),
                Cost::Finite(factor)
            );
        }
    }
    assert!(factors[0] < factors[1] && factors[1] < factors[2]);
    let slope = (factors[2] - factors[0]) / 4.0;
    let predicted = 1.0 / (k as f64 + 1.0);
    assert!(
        (slope / predicted - 1.0).abs() <= 0.15,
        "slope {slope} strays from {predicted}"
    );
}

#[test]
fn stable_tree_star_diameter_never_exceeds_the_greedy_gap_bound() {
    // greedy-stable trees: the unrestricted greedy factor stays below the
    // diameter
    {
        let d = 4u32;
        let l = 3u32.pow(d);
        let net = tree_star(d, l);
        let delta = max_purchase_gain(d, 2, l).oracle;
        let cfg = GameConfig::sum(rat(delta, 1), 2);
        assert!(is_k_ge(&net, &cfg).unwrap().holds());
        let factor = approx_factor(&net, &cfg, Scope::GlobalGreedy).unwrap();
        let diam = match net.diameter() {
            Distance::Finite(v) => Cost::from_int(v as i64),
            Distance::Infinite => unreachable!(),
        };
        assert!(factor <= diam, "factor {factor} beyond diameter {diam}");
    }
}
