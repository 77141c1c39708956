//! Generators for the named network families: paths, stars, cliques, cycles,
//! ownership-rooted binary trees, the tree-star gadget, the hardness
//! reduction, and the certified non-tree swap-locality instance.
//!
//! Wherever a family leaves ownership "arbitrary", the lower-index endpoint
//! owns, so every generator is deterministic.

use std::collections::BTreeSet;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{CostMode, GameConfig};
use crate::graph::{AgentId, GraphError, Network};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("construction search exhausted without a certified instance")]
    SearchFailed,
}

/// Path `0 - 1 - ... - n-1`; each edge owned by the lower-index endpoint.
pub fn line(n: u32) -> Network {
    assert!(n >= 2);
    Network::from_owned_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
}

/// Spanning star; the center `0` owns every edge.
pub fn star(n: u32) -> Network {
    assert!(n >= 2);
    Network::from_owned_edges(n, (1..n).map(|i| (0, i))).unwrap()
}

/// Complete network; edge `{u, v}` owned by `min(u, v)`.
pub fn clique(n: u32) -> Network {
    assert!(n >= 2);
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Network::from_owned_edges(n, edges).unwrap()
}

/// Complete network with circulant ownership: agent `u` owns the edges to the
/// next `floor((n-1)/2)` agents cyclically, and for even `n` the diameter
/// pairs `{u, u + n/2}` go to the lower index. Every agent owns roughly half
/// her incident edges.
pub fn clique_balanced(n: u32) -> Network {
    assert!(n >= 2);
    let half = (n - 1) / 2;
    let mut edges = Vec::new();
    for u in 0..n {
        for g in 1..=half {
            edges.push((u, (u + g) % n));
        }
    }
    if n.is_multiple_of(2) {
        for u in 0..n / 2 {
            edges.push((u, u + n / 2));
        }
    }
    Network::from_owned_edges(n, edges).unwrap()
}

/// Cycle where agent `i` owns the edge `{i, i+1 mod n}`: every agent owns
/// exactly one edge.
pub fn directed_cycle(n: u32) -> Network {
    assert!(n >= 3);
    Network::from_owned_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

/// Complete binary tree of depth `d` in heap order (children of `i` are
/// `2i+1`, `2i+2`); every edge is owned by the endpoint closer to the root.
pub fn complete_binary_tree(d: u32) -> Network {
    assert!(d >= 1);
    let n = (1u32 << (d + 1)) - 1;
    let edges = (0..n).flat_map(|i| {
        [2 * i + 1, 2 * i + 2]
            .into_iter()
            .filter(move |&c| c < n)
            .map(move |c| (i, c))
    });
    Network::from_owned_edges(n, edges).unwrap()
}

/// A depth-`d` complete binary tree hung at distance `l` from a reference
/// agent `u`: `u` starts a path of length `l` ending in `v`, and `v` owns an
/// edge to the tree's root. For `l = 0`, `v` and `u` coincide.
///
/// `members` lists `v` and the tree agents: the unit the distance-sum
/// calculus is defined over (`2^{d+1}` agents).
pub struct HangingTree {
    pub net: Network,
    pub u: AgentId,
    pub members: Vec<AgentId>,
}

pub fn h_tree(d: u32, l: u32) -> HangingTree {
    let tree_size = 1u32 << (d + 1); // 2^{d+1} - 1 nodes, ids offset by l+1
    let n = l + tree_size; // path 0..=l, then the tree
    let v = l;
    let root = l + 1;
    let mut edges: Vec<(u32, u32)> = (0..l).map(|i| (i, i + 1)).collect();
    edges.push((v, root));
    for i in 0..tree_size - 1 {
        for c in [2 * i + 1, 2 * i + 2] {
            if c < tree_size - 1 {
                edges.push((root + i, root + c));
            }
        }
    }
    let net = Network::from_owned_edges(n, edges).unwrap();
    let members = std::iter::once(v)
        .chain(root..n)
        .map(AgentId)
        .collect();
    HangingTree {
        net,
        u: AgentId(0),
        members,
    }
}

/// The tree-star gadget: a depth-`d` complete binary tree (root-owned edges)
/// joined through a bridge agent `y` to an `l`-leaf star whose center `z`
/// owns all its leaf edges. `y` owns the edges to the root and to `z`.
/// `n = 2^{d+1} + l + 1`.
pub fn tree_star(d: u32, l: u32) -> Network {
    assert!(d >= 1 && l >= 1);
    let tree_n = (1u32 << (d + 1)) - 1;
    let y = tree_n;
    let z = tree_n + 1;
    let n = tree_n + 2 + l;
    let mut edges: Vec<(u32, u32)> = (0..tree_n)
        .flat_map(|i| {
            [2 * i + 1, 2 * i + 2]
                .into_iter()
                .filter(move |&c| c < tree_n)
                .map(move |c| (i, c))
        })
        .collect();
    edges.push((y, 0));
    edges.push((y, z));
    for leaf in z + 1..n {
        edges.push((z, leaf));
    }
    Network::from_owned_edges(n, edges).unwrap()
}

/// The leftmost depth-`d` leaf of the tree inside `tree_star(d, _)`.
pub fn tree_star_leaf(d: u32) -> AgentId {
    AgentId((1 << d) - 1)
}

/// The bridge agent `y` of `tree_star(d, _)`.
pub fn tree_star_bridge(d: u32) -> AgentId {
    AgentId((1 << (d + 1)) - 1)
}

/// The star center `z` of `tree_star(d, _)`.
pub fn tree_star_center(d: u32) -> AgentId {
    AgentId(1 << (d + 1))
}

/// A plain (ownerless) graph, the input of the hardness reduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlainGraph {
    pub n: u32,
    pub edges: Vec<(u32, u32)>,
}

impl PlainGraph {
    pub fn from_json(text: &str) -> Result<PlainGraph, GraphError> {
        let g: PlainGraph =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &self.edges {
            if u >= self.n {
                return Err(GraphError::IndexOutOfRange(u, self.n));
            }
            if v >= self.n {
                return Err(GraphError::IndexOutOfRange(v, self.n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(())
    }

    /// `true` if `pick` dominates the graph: every vertex is in `pick` or has
    /// a neighbor there.
    pub fn is_dominating(&self, pick: &BTreeSet<u32>) -> bool {
        let mut covered = vec![false; self.n as usize];
        for &v in pick {
            covered[v as usize] = true;
        }
        for &(u, v) in &self.edges {
            if pick.contains(&u) {
                covered[v as usize] = true;
            }
            if pick.contains(&v) {
                covered[u as usize] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }

    /// Size of a minimum dominating set, by exhaustive search.
    pub fn min_dominating_set_size(&self) -> u32 {
        assert!(self.n <= 24, "exhaustive dominating set needs small graphs");
        for size in 0..=self.n {
            let mut found = false;
            let mut pick = BTreeSet::new();
            search_ds(self, 0, size, &mut pick, &mut found);
            if found {
                return size;
            }
        }
        self.n
    }
}

fn search_ds(g: &PlainGraph, from: u32, remaining: u32, pick: &mut BTreeSet<u32>, found: &mut bool) {
    if *found {
        return;
    }
    if remaining == 0 {
        *found = g.is_dominating(pick);
        return;
    }
    for v in from..g.n {
        if g.n - v < remaining {
            break;
        }
        pick.insert(v);
        search_ds(g, v + 1, remaining - 1, pick, found);
        pick.remove(&v);
        if *found {
            return;
        }
    }
}

/// Output of the dominating-set reduction: the input graph with lower-index
/// ownership plus a hub agent owning an edge to everyone, at edge price 3/2.
pub struct DsInstance {
    pub net: Network,
    pub hub: AgentId,
    pub alpha: Rational64,
}

pub fn ds_reduction(g: &PlainGraph) -> DsInstance {
    g.validate().expect("reduction input must be a valid graph");
    let hub = g.n;
    let mut edges: Vec<(u32, u32)> = g
        .edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    edges.extend((0..g.n).map(|v| (hub, v)));
    DsInstance {
        net: Network::from_owned_edges(g.n + 1, edges).unwrap(),
        hub: AgentId(hub),
        alpha: Rational64::new(3, 2),
    }
}

/// `(T_d, alpha)` with `alpha = (k-1) * n`: a tree instance that is immune to
/// every k-local move.
pub fn kne_tree_instance(d: u32, k: u32) -> (Network, GameConfig) {
    assert!(2 <= k && k <= d, "need 2 <= k <= d");
    let net = complete_binary_tree(d);
    let n = net.agent_count() as i64;
    let alpha = Rational64::from_integer((k as i64 - 1) * n);
    let cfg = GameConfig::new(alpha, k, CostMode::Sum);
    (net, cfg)
}

/// A certified instance where the designated agent cannot improve by any
/// k-local swap but strictly improves by a (k+1)-local swap. `alpha` makes
/// all of the agent's k-local greedy moves non-improving as well.
pub struct SwapGapInstance {
    pub net: Network,
    pub u: AgentId,
    pub alpha: Rational64,
}

/// Searches a bounded family of cycle-with-pendants candidates and returns
/// the first one that certifies the swap-locality gap for radius `k`.
///
/// Candidate shape: a simple cycle through `a`, with the probe agent `u`
/// pendant on `a`, and two far pendants placed symmetrically at arc distance
/// `k` on both sides. The certificate is checked move-by-move, never assumed.
pub fn gk_nontree(k: u32) -> Result<SwapGapInstance, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::BadParams(
            "swap-locality gap needs k >= 2".into(),
        ));
    }
    // arc lengths to try: (a -> first pendant anchor, anchor -> far vertex)
    let base = [(k, k - 1)];
    let variations = [
        (k, k),
        (k + 1, k - 1),
        (k, k.saturating_sub(2).max(1)),
        (k + 1, k),
    ];
    for &(fore, aft) in base.iter().chain(variations.iter()) {
        if let Some(instance) = build_swap_gap_candidate(k, fore, aft) {
            if let Some(alpha) = certify_swap_gap(&instance.0, instance.1, k) {
                return Ok(SwapGapInstance {
                    net: instance.0,
                    u: instance.1,
                    alpha,
                });
            }
        }
    }
    Err(ConstructionError::SearchFailed)
}

/// Cycle of length `2 * (fore + aft)` with pendants on the two vertices at
/// arc distance `fore` from `a`, plus the probe `u` pendant on `a`.
fn build_swap_gap_candidate(_k: u32, fore: u32, aft: u32) -> Option<(Network, AgentId)> {
    let cycle_len = 2 * (fore + aft);
    if cycle_len < 3 {
        return None;
    }
    // ids: 0 = u, 1..=cycle_len = cycle (1 = a), then the two pendants
    let a = 1u32;
    let cyc = |i: u32| 1 + (i % cycle_len);
    let pendant_b = cycle_len + 1;
    let pendant_d = cycle_len + 2;
    let n = cycle_len + 3;
    let mut edges = vec![(0u32, a)];
    for i in 0..cycle_len {
        edges.push((cyc(i).min(cyc(i + 1)), cyc(i).max(cyc(i + 1))));
    }
    edges.push((pendant_b, cyc(fore)));
    edges.push((pendant_d, cyc(cycle_len - fore)));
    Some((Network::from_owned_edges(n, edges).unwrap(), AgentId(0)))
}

/// Certifies the gap for `u` and picks an edge price: every k-local swap of
/// `u` must be distance-neutral or worse, some (k+1)-local swap must strictly
/// improve, and `alpha` is set to the probe's best k-local single-purchase
/// gain so no k-local greedy move of `u` improves either.
fn certify_swap_gap(net: &Network, u: AgentId, k: u32) -> Option<Rational64> {
    let own: Vec<u32> = net.strategy(u).iter().copied().collect();
    if own.len() != 1 {
        return None;
    }
    let old = own[0];
    let base_dist = dist_sum(net, u)?;

    let swap_delta = |radius: u32, w: u32| -> Option<i64> {
        let mut s = BTreeSet::new();
        s.insert(w);
        let hood = net.k_neighborhood(u, radius);
        if !hood.contains(&AgentId(w)) || net.has_edge(u, AgentId(w)) || w == u.0 {
            return None;
        }
        let swapped = net.with_strategy(u, &s);
        dist_sum(&swapped, u).map(|d| d as i64 - base_dist as i64)
    };

    // (1) no k-local swap of u improves
    for w in 0..net.agent_count() {
        if let Some(delta) = swap_delta(k, w) {
            if delta < 0 {
                return None;
            }
        }
    }
    // (2) some (k+1)-local swap strictly improves
    let mut improving = false;
    for w in 0..net.agent_count() {
        if let Some(delta) = swap_delta(k + 1, w) {
            if delta < 0 {
                improving = true;
                break;
            }
        }
    }
    if !improving {
        return None;
    }
    // (3) alpha = best k-local single-buy gain of u
    let mut best_gain: i64 = 0;
    for w in net.k_neighborhood(u, k) {
        if w == u || net.has_edge(u, w) {
            continue;
        }
        let bought = net.with_edge(u, w);
        let gain = base_dist as i64 - dist_sum(&bought, u)? as i64;
        best_gain = best_gain.max(gain);
    }
    let _ = old;
    Some(Rational64::from_integer(best_gain.max(1)))
}

fn dist_sum(net: &Network, u: AgentId) -> Option<u64> {
    net.shortest_paths(u)
        .iter()
        .map(|d| d.finite())
        .sum::<Option<u64>>()
}
