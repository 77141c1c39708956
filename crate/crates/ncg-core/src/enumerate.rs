//! Exhaustive and random generation of small networks, used by the oracle
//! and acceptance suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Network;

/// All unordered pairs on `n` labels, in lexicographic order.
pub fn all_pairs(n: u32) -> Vec<(u32, u32)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

/// Calls `f` on every connected ownership-annotated network on `n` labeled
/// agents: every edge subset, every owner assignment. For n = 5 this is
/// roughly 50k states.
pub fn for_each_connected_network(n: u32, mut f: impl FnMut(&Network)) {
    let pairs = all_pairs(n);
    let m = pairs.len();
    assert!(m < 32, "edge mask does not fit");
    for edge_mask in 0u32..(1 << m) {
        let chosen: Vec<(u32, u32)> = (0..m)
            .filter(|i| edge_mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        if !connected(n, &chosen) {
            continue;
        }
        let e = chosen.len();
        for owner_mask in 0u32..(1 << e) {
            let edges = chosen.iter().enumerate().map(|(i, &(u, v))| {
                if owner_mask >> i & 1 == 1 {
                    (v, u)
                } else {
                    (u, v)
                }
            });
            let net = Network::from_owned_edges(n, edges).unwrap();
            f(&net);
        }
    }
}

/// Edge subsets (not ownerships) of connected graphs on `n` labels.
pub fn for_each_connected_graph(n: u32, mut f: impl FnMut(&[(u32, u32)])) {
    let pairs = all_pairs(n);
    let m = pairs.len();
    assert!(m < 32);
    for edge_mask in 0u32..(1 << m) {
        let chosen: Vec<(u32, u32)> = (0..m)
            .filter(|i| edge_mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        if connected(n, &chosen) {
            f(&chosen);
        }
    }
}

/// Materialized edge subsets of all connected graphs on `n` labels, for
/// callers that want to fan out over them in parallel.
pub fn connected_edge_subsets(n: u32) -> Vec<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    for_each_connected_graph(n, |edges| out.push(edges.to_vec()));
    out
}

/// Every owner assignment of the given edge set.
pub fn for_each_ownership(n: u32, edges: &[(u32, u32)], mut f: impl FnMut(&Network)) {
    let e = edges.len();
    assert!(e < 32);
    for owner_mask in 0u32..(1 << e) {
        let oriented = edges.iter().enumerate().map(|(i, &(u, v))| {
            if owner_mask >> i & 1 == 1 {
                (v, u)
            } else {
                (u, v)
            }
        });
        let net = Network::from_owned_edges(n, oriented).unwrap();
        f(&net);
    }
}

fn connected(n: u32, edges: &[(u32, u32)]) -> bool {
    let mut parent: Vec<u32> = (0..n).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    let mut components = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru as usize] = rv;
            components -= 1;
        }
    }
    components == 1
}

/// A connected network drawn by rejection sampling from G(n, p) with random
/// ownership. Deterministic in the RNG state.
pub fn random_connected_network(n: u32, rng: &mut ChaCha8Rng) -> Network {
    loop {
        let p = rng.gen_range(0.25..0.75);
        let mut edges = Vec::new();
        for (u, v) in all_pairs(n) {
            if rng.gen_bool(p) {
                if rng.gen_bool(0.5) {
                    edges.push((u, v));
                } else {
                    edges.push((v, u));
                }
            }
        }
        if connected(n, &edges) {
            return Network::from_owned_edges(n, edges).unwrap();
        }
    }
}

/// A uniformly random labeled tree (random parent chain) with random edge
/// ownership.
pub fn random_tree(n: u32, rng: &mut ChaCha8Rng) -> Network {
    assert!(n >= 2);
    // random permutation + random attachment gives a well-spread tree shape
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n as usize {
        let parent = order[rng.gen_range(0..i)];
        let child = order[i];
        if rng.gen_bool(0.5) {
            edges.push((parent, child));
        } else {
            edges.push((child, parent));
        }
    }
    Network::from_owned_edges(n, edges).unwrap()
}

/// A random connected plain graph for the reduction tests.
pub fn random_connected_plain_graph(
    n: u32,
    rng: &mut ChaCha8Rng,
) -> crate::constructions::PlainGraph {
    loop {
        let p = rng.gen_range(0.3..0.8);
        let edges: Vec<(u32, u32)> = all_pairs(n)
            .into_iter()
            .filter(|_| rng.gen_bool(p))
            .collect();
        if connected(n, &edges) {
            return crate::constructions::PlainGraph { n, edges };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn connected_network_counts_small() {
        let mut count = 0u64;
        for_each_connected_network(3, |_| count += 1);
        // 3 spanning trees * 4 ownerships + triangle * 8
        assert_eq!(count, 20);
    }

    #[test]
    fn enumeration_yields_distinct_digests() {
        // the digest must separate every small state, ownership included
        let mut seen = HashSet::new();
        for n in 2..=4u32 {
            for_each_connected_network(n, |net| {
                assert!(seen.insert(net.canonical_hash()));
            });
        }
    }

    #[test]
    fn random_generators_deterministic_and_valid() {
        use rand::SeedableRng;
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let na = random_connected_network(9, &mut a);
        let nb = random_connected_network(9, &mut b);
        assert_eq!(na, nb);
        assert!(na.is_connected());
        let t = random_tree(10, &mut a);
        assert!(t.is_connected());
        assert_eq!(t.edge_count(), 9);
    }
}
