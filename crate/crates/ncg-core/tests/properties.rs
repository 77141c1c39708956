//! Property tests over randomly drawn ownership networks.

use proptest::prelude::*;

use ncg_core::cost::{agent_cost, GameConfig};
use ncg_core::enumerate::all_pairs;
use ncg_core::graph::AgentId;
use ncg_core::moves::{best_global_response, best_k_local_response, build_umfl_instance};
use ncg_core::Network;

fn arb_network(max_n: u32) -> impl Strategy<Value = Network> {
    (2u32..=max_n)
        .prop_flat_map(|n| {
            let m = all_pairs(n).len();
            (
                Just(n),
                prop::collection::vec(
                    prop_oneof![Just(None), Just(Some(false)), Just(Some(true))],
                    m,
                ),
            )
        })
        .prop_map(|(n, picks)| {
            let pairs = all_pairs(n);
            let edges = pairs
                .iter()
                .zip(picks)
                .filter_map(|(&(u, v), pick)| pick.map(|flip| if flip { (v, u) } else { (u, v) }));
            Network::from_owned_edges(n, edges).unwrap()
        })
}

fn arb_alpha() -> impl Strategy<Value = num_rational::Rational64> {
    (1i64..40, 1i64..5).prop_map(|(p, q)| num_rational::Rational64::new(p, q))
}

proptest! {
    #[test]
    fn json_round_trips(net in arb_network(8)) {
        let back = Network::from_json(&net.to_json()).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(back.canonical_hash(), net.canonical_hash());
    }

    #[test]
    fn strategies_partition_edges(net in arb_network(8)) {
        let total: usize = net.agents().map(|u| net.strategy(u).len()).sum();
        prop_assert_eq!(total, net.edge_count());
    }

    #[test]
    fn neighborhoods_grow_with_radius(net in arb_network(8)) {
        for u in net.agents() {
            for k in 1..4 {
                let small = net.k_neighborhood(u, k);
                let big = net.k_neighborhood(u, k + 1);
                prop_assert!(small.is_subset(&big));
            }
        }
    }

    #[test]
    fn cost_ignores_foreign_ownership(net in arb_network(7), alpha in arb_alpha()) {
        // flip the owner of every edge not incident to agent 0
        let u = AgentId(0);
        let flipped: Vec<(u32, u32)> = net
            .owned_edges()
            .into_iter()
            .map(|(o, t)| if o != 0 && t != 0 { (t, o) } else { (o, t) })
            .collect();
        let other = Network::from_owned_edges(net.agent_count(), flipped).unwrap();
        let cfg = GameConfig::sum(alpha, 2);
        prop_assert_eq!(agent_cost(&net, &cfg, u), agent_cost(&other, &cfg, u));
    }

    #[test]
    fn local_optimum_never_beats_global(net in arb_network(7), alpha in arb_alpha(), k in 1u32..4) {
        let cfg = GameConfig::sum(alpha, k);
        for u in net.agents() {
            let (_, local) = best_k_local_response(&net, &cfg, u).unwrap();
            let (_, global) = best_global_response(&net, &cfg, u).unwrap();
            prop_assert!(global <= local);
        }
    }

    #[test]
    fn facility_view_reproduces_cost(net in arb_network(7), alpha in arb_alpha(), k in 1u32..4) {
        let cfg = GameConfig::sum(alpha, k);
        for u in net.agents() {
            let inst = build_umfl_instance(&net, &cfg, u);
            prop_assert_eq!(inst.evaluate(net.strategy(u)), agent_cost(&net, &cfg, u));
        }
    }
}
