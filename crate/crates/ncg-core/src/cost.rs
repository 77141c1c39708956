//! Exact agent and social cost for the sum and max variants, the reference
//! optimum, and per-network price-of-anarchy ratios.
//!
//! All arithmetic is exact: the edge price is a rational and strict
//! improvement means strictly smaller rational cost. Floats never appear.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{clique, star};
use crate::graph::{AgentId, Network};

/// How an agent aggregates her distances to everyone else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Sum,
    Max,
}

impl fmt::Display for CostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostMode::Sum => write!(f, "sum"),
            CostMode::Max => write!(f, "max"),
        }
    }
}

/// Edge price, locality radius and aggregation mode of one game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    #[serde(with = "rational_string")]
    pub alpha: Rational64,
    pub k: u32,
    pub mode: CostMode,
    /// Cap on `|S_u ∪ N_k(u)|` for exhaustive local best responses.
    #[serde(default = "default_space_budget")]
    pub space_budget: u32,
}

fn default_space_budget() -> u32 {
    24
}

impl GameConfig {
    pub fn new(alpha: Rational64, k: u32, mode: CostMode) -> GameConfig {
        assert!(alpha > Rational64::zero(), "alpha must be positive");
        assert!(k >= 1, "locality radius must be at least 1");
        GameConfig {
            alpha,
            k,
            mode,
            space_budget: default_space_budget(),
        }
    }

    pub fn sum(alpha: Rational64, k: u32) -> GameConfig {
        GameConfig::new(alpha, k, CostMode::Sum)
    }

    pub fn with_space_budget(mut self, budget: u32) -> GameConfig {
        self.space_budget = budget;
        self
    }
}

/// Serializes rationals as decimal-free `"p/q"` strings (`"3"` when q = 1).
pub mod rational_string {
    use super::*;

    pub fn serialize<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(*r))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub fn format_rational(r: Rational64) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"`. No decimal points.
pub fn parse_rational(text: &str) -> Result<Rational64, CostError> {
    let bad = || CostError::BadRational(text.to_string());
    match text.split_once('/') {
        None => {
            let p = i64::from_str(text.trim()).map_err(|_| bad())?;
            Ok(Rational64::from_integer(p))
        }
        Some((p, q)) => {
            let p = i64::from_str(p.trim()).map_err(|_| bad())?;
            let q = i64::from_str(q.trim()).map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
    }
}

/// Exact rational value, or infinite (disconnection). Also used for cost
/// ratios and approximation factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cost {
    Finite(Rational64),
    Infinite,
}

impl Cost {
    pub fn from_int(v: i64) -> Cost {
        Cost::Finite(Rational64::from_integer(v))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(self) -> Option<Rational64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => std::cmp::Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => std::cmp::Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{}", format_rational(*v)),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Cost, D::Error> {
        let text = String::deserialize(d)?;
        if text == "inf" {
            return Ok(Cost::Infinite);
        }
        parse_rational(&text)
            .map(Cost::Finite)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CostError {
    #[error("reference optimum is only characterized for the sum variant")]
    NotSupported,
    #[error("ratio against a disconnected network is infinite")]
    InfiniteRatio,
    #[error("not a p/q rational: {0}")]
    BadRational(String),
}

/// Distance part of `u`'s cost: sum or max of hop distances, infinite if any
/// agent is unreachable.
pub fn distance_cost(net: &Network, mode: CostMode, u: AgentId) -> Cost {
    let dist = net.shortest_paths(u);
    aggregate(dist.iter().map(|d| d.finite()), mode)
}

fn aggregate(dists: impl Iterator<Item = Option<u64>>, mode: CostMode) -> Cost {
    let mut sum: u64 = 0;
    let mut max: u64 = 0;
    for d in dists {
        match d {
            Some(v) => {
                sum += v;
                max = max.max(v);
            }
            None => return Cost::Infinite,
        }
    }
    match mode {
        CostMode::Sum => Cost::from_int(sum as i64),
        CostMode::Max => Cost::from_int(max as i64),
    }
}

/// `alpha * |S_u|` plus the distance cost of `u`.
pub fn agent_cost(net: &Network, cfg: &GameConfig, u: AgentId) -> Cost {
    let edges = Cost::Finite(cfg.alpha * net.strategy(u).len() as i64);
    edges + distance_cost(net, cfg.mode, u)
}

/// Distance cost of `u` in the virtual network where `u`'s incident edges are
/// exactly `{u, v}` for `v` in `u_neighbors`, everything else unchanged.
/// Evaluates by BFS without materializing the modified network.
pub fn distance_cost_with_neighbors(
    net: &Network,
    mode: CostMode,
    u: AgentId,
    u_neighbors: &[u32],
) -> Cost {
    let n = net.agent_count() as usize;
    let mut u_adj = vec![false; n];
    for &t in u_neighbors {
        debug_assert!(t != u.0 && (t as usize) < n);
        u_adj[t as usize] = true;
    }

    let mut dist = vec![u64::MAX; n];
    let mut queue = VecDeque::new();
    dist[u.index()] = 0;
    queue.push_back(u.0);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x as usize];
        if x == u.0 {
            for (y, adjacent) in u_adj.iter().enumerate() {
                if *adjacent && dist[y] == u64::MAX {
                    dist[y] = dx + 1;
                    queue.push_back(y as u32);
                }
            }
        } else {
            for &y in net.neighbors(AgentId(x)) {
                if y == u.0 {
                    continue;
                }
                if dist[y as usize] == u64::MAX {
                    dist[y as usize] = dx + 1;
                    queue.push_back(y);
                }
            }
            // the virtual edge back toward u, seen from the far side
            if u_adj[x as usize] && dist[u.index()] == u64::MAX {
                dist[u.index()] = dx + 1;
                queue.push_back(u.0);
            }
        }
    }

    aggregate(
        dist.iter()
            .map(|&d| if d == u64::MAX { None } else { Some(d) }),
        mode,
    )
}

/// `u`'s cost if her strategy were `targets` (sorted, deduplicated),
/// everything else unchanged.
pub fn agent_cost_with_strategy(
    net: &Network,
    cfg: &GameConfig,
    u: AgentId,
    targets: &[u32],
) -> Cost {
    let mut neighbors: Vec<u32> = targets.to_vec();
    neighbors.extend(net.incoming(u));
    let edges = Cost::Finite(cfg.alpha * targets.len() as i64);
    edges + distance_cost_with_neighbors(net, cfg.mode, u, &neighbors)
}

/// Sum of all agents' costs.
pub fn social_cost(net: &Network, cfg: &GameConfig) -> Cost {
    let mut total = Cost::from_int(0);
    for u in net.agents() {
        total = total + agent_cost(net, cfg, u);
        if !total.is_finite() {
            return Cost::Infinite;
        }
    }
    total
}

/// Social cost of the reference optimum on `n` agents: the clique for
/// `alpha < 2`, the spanning star otherwise. The value comes from evaluating
/// the generated network, not from a closed form.
pub fn opt_cost(n: u32, cfg: &GameConfig) -> Result<Cost, CostError> {
    if cfg.mode != CostMode::Sum {
        return Err(CostError::NotSupported);
    }
    assert!(n >= 2, "optimum needs at least two agents");
    let reference = if cfg.alpha >= Rational64::from_integer(2) {
        star(n)
    } else {
        clique(n)
    };
    Ok(social_cost(&reference, cfg))
}

/// Exact `social_cost(net) / opt_cost(n)` for connected sum-variant networks.
pub fn poa_ratio(net: &Network, cfg: &GameConfig) -> Result<Rational64, CostError> {
    let social = match social_cost(net, cfg) {
        Cost::Finite(v) => v,
        Cost::Infinite => return Err(CostError::InfiniteRatio),
    };
    let opt = opt_cost(net.agent_count(), cfg)?
        .finite()
        .expect("reference optimum is connected");
    Ok(social / opt)
}
