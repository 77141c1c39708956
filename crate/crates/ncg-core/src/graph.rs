//! Labeled undirected networks with per-edge ownership.
//!
//! Agents are fixed integer labels. Two states are equal only if they agree
//! label-wise, including owners; there is no isomorphism canonicalization.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// Index of an agent, in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for AgentId {
    fn from(i: u32) -> Self {
        AgentId(i)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exact hop count, or unreachable. `INFINITE` is absorbing under addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub const ZERO: Distance = Distance::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => a.cmp(b),
            (Distance::Finite(_), Distance::Infinite) => std::cmp::Ordering::Less,
            (Distance::Infinite, Distance::Finite(_)) => std::cmp::Ordering::Greater,
            (Distance::Infinite, Distance::Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::ops::Add for Distance {
    type Output = Distance;
    fn add(self, rhs: Distance) -> Distance {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => write!(f, "{v}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("agent index {0} out of range for n = {1}")]
    IndexOutOfRange(u32, u32),
    #[error("self-loop at agent {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(u32, u32),
    #[error("invalid network JSON: {0}")]
    Json(String),
}

/// An ownership-annotated undirected network.
///
/// The state is the strategy vector: `strategies[u]` is the set of agents `u`
/// bought an edge to. Every edge has a unique owner by construction; parallel
/// edges and self-loops are unrepresentable. Values are immutable after
/// construction; all modifications copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: u32,
    strategies: Vec<BTreeSet<u32>>,
    adj: Vec<Vec<u32>>,
}

impl Network {
    /// An edgeless network on `n` agents.
    pub fn empty(n: u32) -> Network {
        Network {
            n,
            strategies: vec![BTreeSet::new(); n as usize],
            adj: vec![Vec::new(); n as usize],
        }
    }

    /// Builds a network from `(owner, other)` pairs, validating all invariants.
    pub fn from_owned_edges(
        n: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Network, GraphError> {
        let mut strategies = vec![BTreeSet::new(); n as usize];
        let mut seen = BTreeSet::new();
        for (owner, other) in edges {
            if owner >= n {
                return Err(GraphError::IndexOutOfRange(owner, n));
            }
            if other >= n {
                return Err(GraphError::IndexOutOfRange(other, n));
            }
            if owner == other {
                return Err(GraphError::SelfLoop(owner));
            }
            let key = (owner.min(other), owner.max(other));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            strategies[owner as usize].insert(other);
        }
        let mut net = Network {
            n,
            strategies,
            adj: Vec::new(),
        };
        net.rebuild_adjacency();
        Ok(net)
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.n as usize];
        for (u, targets) in self.strategies.iter().enumerate() {
            for &v in targets {
                adj[u].push(v);
                adj[v as usize].push(u as u32);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        self.adj = adj;
    }

    pub fn agent_count(&self) -> u32 {
        self.n
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n).map(AgentId)
    }

    /// The strategy of `u`: agents `u` owns an edge to.
    pub fn strategy(&self, u: AgentId) -> &BTreeSet<u32> {
        &self.strategies[u.index()]
    }

    /// Agents owning an edge to `u`.
    pub fn incoming(&self, u: AgentId) -> Vec<u32> {
        self.adj[u.index()]
            .iter()
            .copied()
            .filter(|&v| self.strategies[v as usize].contains(&u.0))
            .collect()
    }

    pub fn neighbors(&self, u: AgentId) -> &[u32] {
        &self.adj[u.index()]
    }

    pub fn has_edge(&self, u: AgentId, v: AgentId) -> bool {
        self.strategies[u.index()].contains(&v.0) || self.strategies[v.index()].contains(&u.0)
    }

    /// Owner of edge `{u, v}`, if present.
    pub fn edge_owner(&self, u: AgentId, v: AgentId) -> Option<AgentId> {
        if self.strategies[u.index()].contains(&v.0) {
            Some(u)
        } else if self.strategies[v.index()].contains(&u.0) {
            Some(v)
        } else {
            None
        }
    }

    pub fn edge_count(&self) -> usize {
        self.strategies.iter().map(|s| s.len()).sum()
    }

    /// Edges as `(owner, other)`, sorted.
    pub fn owned_edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, targets) in self.strategies.iter().enumerate() {
            for &v in targets {
                out.push((u as u32, v));
            }
        }
        out.sort_unstable();
        out
    }

    /// Copy with `u`'s owned edges replaced by `targets`. Invariants are the
    /// caller's responsibility (see `moves::apply_strategy` for the checked
    /// entry point); this only debug-asserts.
    pub fn with_strategy(&self, u: AgentId, targets: &BTreeSet<u32>) -> Network {
        debug_assert!(targets.iter().all(|&t| t < self.n && t != u.0));
        let mut net = self.clone();
        net.strategies[u.index()] = targets.clone();
        net.rebuild_adjacency();
        net
    }

    /// Copy with one extra edge owned by `owner`. Panics on invalid input.
    pub fn with_edge(&self, owner: AgentId, other: AgentId) -> Network {
        assert!(!self.has_edge(owner, other) && owner != other);
        let mut net = self.clone();
        net.strategies[owner.index()].insert(other.0);
        net.rebuild_adjacency();
        net
    }

    /// Copy with the edge `{a, b}` removed, whoever owns it. Panics if absent.
    pub fn without_edge(&self, a: AgentId, b: AgentId) -> Network {
        let owner = self.edge_owner(a, b).expect("edge must exist");
        let other = if owner == a { b } else { a };
        let mut net = self.clone();
        net.strategies[owner.index()].remove(&other.0);
        net.rebuild_adjacency();
        net
    }

    /// Hop distances from `source` to every agent.
    pub fn shortest_paths(&self, source: AgentId) -> Vec<Distance> {
        assert!(source.0 < self.n, "source out of range");
        let mut dist = vec![Distance::Infinite; self.n as usize];
        let mut queue = VecDeque::new();
        dist[source.index()] = Distance::Finite(0);
        queue.push_back(source.0);
        while let Some(x) = queue.pop_front() {
            let dx = match dist[x as usize] {
                Distance::Finite(v) => v,
                Distance::Infinite => unreachable!(),
            };
            for &y in &self.adj[x as usize] {
                if dist[y as usize] == Distance::Infinite {
                    dist[y as usize] = Distance::Finite(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// All agents within hop distance `k` of `u`, including `u` itself.
    pub fn k_neighborhood(&self, u: AgentId, k: u32) -> BTreeSet<AgentId> {
        assert!(u.0 < self.n, "agent out of range");
        let mut dist = vec![u32::MAX; self.n as usize];
        let mut queue = VecDeque::new();
        let mut out = BTreeSet::new();
        dist[u.index()] = 0;
        out.insert(u);
        queue.push_back(u.0);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x as usize];
            if dx == k {
                continue;
            }
            for &y in &self.adj[x as usize] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dx + 1;
                    out.insert(AgentId(y));
                    queue.push_back(y);
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.shortest_paths(AgentId(0))
            .iter()
            .all(|d| d.is_finite())
    }

    /// Maximum over all pairs of the shortest-path distance; `INFINITE` on
    /// disconnected networks.
    pub fn diameter(&self) -> Distance {
        let mut best = Distance::Finite(0);
        for u in self.agents() {
            for d in self.shortest_paths(u) {
                best = best.max(d);
                if best == Distance::Infinite {
                    return Distance::Infinite;
                }
            }
        }
        best
    }

    /// Deterministic digest of `(n, sorted owner-annotated edge list)`.
    /// Stable across runs and platforms; ownership is part of the state.
    pub fn canonical_hash(&self) -> NetworkDigest {
        let mut hasher = Sha256::new();
        hasher.update(self.n.to_le_bytes());
        for (owner, other) in self.owned_edges() {
            hasher.update(owner.to_le_bytes());
            hasher.update(other.to_le_bytes());
        }
        NetworkDigest(hasher.finalize().into())
    }

    /// Parses the shared JSON format `{"n": .., "edges": [[owner, other], ..]}`.
    /// Rejects duplicates, self-loops and out-of-range indices.
    pub fn from_json(text: &str) -> Result<Network, GraphError> {
        let raw: RawNetwork =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        Network::from_owned_edges(raw.n, raw.edges)
    }

    /// Shared JSON format, edges sorted by `(owner, other)`.
    pub fn to_json(&self) -> String {
        let raw = RawNetwork {
            n: self.n,
            edges: self.owned_edges(),
        };
        serde_json::to_string(&raw).expect("network serialization cannot fail")
    }

    /// DOT rendering; edges are directed away from their owners.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph network {\n");
        for u in 0..self.n {
            out.push_str(&format!("  {u};\n"));
        }
        for (owner, other) in self.owned_edges() {
            out.push_str(&format!("  {owner} -> {other};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl Serialize for Network {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawNetwork {
            n: self.n,
            edges: self.owned_edges(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Network {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Network, D::Error> {
        let raw = RawNetwork::deserialize(deserializer)?;
        Network::from_owned_edges(raw.n, raw.edges).map_err(D::Error::custom)
    }
}

/// SHA-256 digest of a network's canonical encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetworkDigest(pub [u8; 32]);

impl NetworkDigest {
    pub fn to_hex(self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<NetworkDigest> {
        if s.len() != 64 {
            return None;
        }
        let mut out = [0u8; 32];
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let hi = (chunk[0] as char).to_digit(16)?;
            let lo = (chunk[1] as char).to_digit(16)?;
            out[i] = (hi * 16 + lo) as u8;
        }
        Some(NetworkDigest(out))
    }
}

impl fmt::Debug for NetworkDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

impl fmt::Display for NetworkDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{clique, complete_binary_tree, line, star, tree_star};

    #[test]
    fn strategies_partition_edge_set() {
        let net = clique(5);
        let total: usize = net.agents().map(|u| net.strategy(u).len()).sum();
        assert_eq!(total, net.edge_count());
        assert_eq!(net.edge_count(), 10);
    }

    #[test]
    fn shortest_paths_star_center() {
        let net = star(5);
        let d = net.shortest_paths(AgentId(0));
        assert_eq!(d[0], Distance::Finite(0));
        for leaf in &d[1..5] {
            assert_eq!(*leaf, Distance::Finite(1));
        }
    }

    #[test]
    fn shortest_paths_line_endpoint() {
        let net = line(4);
        let d = net.shortest_paths(AgentId(0));
        let want: Vec<_> = (0..4).map(Distance::Finite).collect();
        assert_eq!(d, want);
    }

    #[test]
    fn shortest_paths_tree_star_leaf_sum() {
        // depth-2 tree joined to an 8-leaf star: leaf distance sum is 63
        let net = tree_star(2, 8);
        let leaf = AgentId(3);
        let sum: u64 = net
            .shortest_paths(leaf)
            .iter()
            .map(|d| d.finite().unwrap())
            .sum();
        assert_eq!(sum, 63);
    }

    #[test]
    fn k_neighborhood_line_middle() {
        let net = line(5);
        let hood = net.k_neighborhood(AgentId(2), 1);
        let want: BTreeSet<_> = [1, 2, 3].map(AgentId).into();
        assert_eq!(hood, want);
    }

    #[test]
    fn k_neighborhood_clique_is_everything() {
        let net = clique(4);
        for u in net.agents() {
            assert_eq!(net.k_neighborhood(u, 1).len(), 4);
        }
    }

    #[test]
    fn k_neighborhood_binary_tree_root() {
        let net = complete_binary_tree(3);
        assert_eq!(net.k_neighborhood(AgentId(0), 2).len(), 7);
    }

    #[test]
    fn k_neighborhood_monotone_in_k() {
        let net = tree_star(2, 3);
        for u in net.agents() {
            for k in 1..5 {
                let small = net.k_neighborhood(u, k);
                let big = net.k_neighborhood(u, k + 1);
                assert!(small.is_subset(&big));
            }
        }
    }

    #[test]
    fn diameter_star_is_two() {
        for n in 3..7 {
            assert_eq!(star(n).diameter(), Distance::Finite(2));
        }
    }

    #[test]
    fn diameter_tree_star_small_depths() {
        // eccentricity of a deepest leaf is d+3, which is the diameter for d <= 3
        assert_eq!(tree_star(2, 4).diameter(), Distance::Finite(5));
        assert_eq!(tree_star(3, 4).diameter(), Distance::Finite(6));
        // from d = 4 on, two deepest leaves in opposite subtrees dominate: 2d
        assert_eq!(tree_star(4, 4).diameter(), Distance::Finite(8));
    }

    #[test]
    fn diameter_disconnected_is_infinite() {
        let net = Network::from_owned_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(net.diameter(), Distance::Infinite);
    }

    #[test]
    fn diameter_matches_bfs_maximum() {
        let net = tree_star(3, 5);
        let by_bfs = net
            .agents()
            .flat_map(|u| net.shortest_paths(u))
            .max()
            .unwrap();
        assert_eq!(net.diameter(), by_bfs);
    }

    #[test]
    fn hash_equal_networks_equal() {
        let a = star(4);
        let b = star(4);
        assert_eq!(a.canonical_hash(), b.canonical_hash());
    }

    #[test]
    fn hash_sees_ownership() {
        let a = Network::from_owned_edges(3, [(0, 1), (1, 2)]).unwrap();
        let b = Network::from_owned_edges(3, [(0, 1), (2, 1)]).unwrap();
        assert_ne!(a.canonical_hash(), b.canonical_hash());
    }

    #[test]
    fn hash_stable_across_processes() {
        // frozen digest: the determinism contract for cycle detection
        assert_eq!(
            star(3).canonical_hash().to_hex(),
            "18227cb3a77a9f442b30153283e0fb15596a58ea16d9f7346b3b366b20577229"
        );
    }

    #[test]
    fn json_format_is_pinned() {
        assert_eq!(star(3).to_json(), r#"{"n":3,"edges":[[0,1],[0,2]]}"#);
        let back = Network::from_json(&star(3).to_json()).unwrap();
        assert_eq!(back, star(3));
    }

    #[test]
    fn json_reader_rejects_bad_input() {
        assert!(matches!(
            Network::from_json(r#"{"n":3,"edges":[[0,3]]}"#),
            Err(GraphError::IndexOutOfRange(3, 3))
        ));
        assert!(matches!(
            Network::from_json(r#"{"n":3,"edges":[[1,1]]}"#),
            Err(GraphError::SelfLoop(1))
        ));
        assert!(matches!(
            Network::from_json(r#"{"n":3,"edges":[[0,1],[1,0]]}"#),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Network::from_json("{"),
            Err(GraphError::Json(_))
        ));
    }

    #[test]
    fn infinite_distance_is_absorbing() {
        assert_eq!(
            Distance::Infinite + Distance::Finite(3),
            Distance::Infinite
        );
        assert!(Distance::Finite(1_000_000) < Distance::Infinite);
    }
}
