//! Exact engine for network creation games with k-local strategy changes:
//! ownership-annotated graphs, rational cost accounting for the sum and max
//! variants, exhaustive best-response solvers, equilibrium certification,
//! sequential dynamics with cycle detection, and the closed-form evaluators
//! backing the experiment suite.

pub mod constructions;
pub mod cost;
pub mod dynamics;
pub mod enumerate;
pub mod equilibrium;
pub mod formulas;
pub mod graph;
pub mod moves;

pub use cost::{Cost, CostMode, GameConfig};
pub use graph::{AgentId, Distance, Network, NetworkDigest};
