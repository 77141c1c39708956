//! C ABI over the network creation game engine.
//!
//! Conventions: networks are opaque handles created and freed here; every
//! fallible call returns an [`NcgStatus`] and writes results through out
//! pointers; strings returned by the library are freed with
//! [`ncg_string_free`]. Handles are immutable and safe to share across
//! threads. Panics never cross the boundary; they surface as
//! `NCG_STATUS_PANIC`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_rational::Rational64;

use ncg_core::constructions;
use ncg_core::cost::{agent_cost, social_cost, Cost, CostMode, GameConfig};
use ncg_core::equilibrium::{is_k_ge, is_k_ne, Verdict};
use ncg_core::graph::{AgentId, Distance};
use ncg_core::moves::{best_greedy_move, MoveError, MoveKind};
use ncg_core::Network;

/// Opaque network handle.
pub struct NcgNetwork(Network);

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgStatus {
    Ok = 0,
    /// A pointer argument was null or a parameter was out of range.
    InvalidArgument = 1,
    /// Input text was not a valid network description.
    Parse = 2,
    /// An exhaustive solver exceeded its configured budget.
    SpaceTooLarge = 3,
    /// The operation is not defined for the requested variant.
    Unsupported = 4,
    /// A panic was caught at the boundary.
    Panic = 5,
}

/// Exact rational value with an infinity flag (disconnected networks).
#[repr(C)]
#[derive(Clone, Copy)]
pub struct NcgCost {
    pub num: i64,
    pub den: i64,
    pub is_infinite: bool,
}

impl From<Cost> for NcgCost {
    fn from(c: Cost) -> NcgCost {
        match c {
            Cost::Finite(v) => NcgCost {
                num: *v.numer(),
                den: *v.denom(),
                is_infinite: false,
            },
            Cost::Infinite => NcgCost {
                num: 0,
                den: 1,
                is_infinite: true,
            },
        }
    }
}

/// Distance aggregation of the cost function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum NcgMode {
    Sum = 0,
    Max = 1,
}

/// Kind of a single greedy move.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgMoveKind {
    Delete = 0,
    Swap = 1,
    Buy = 2,
}

/// A single greedy move of `agent`. For buys and deletes only `target` is
/// meaningful; swaps carry the replaced target in `swap_old`.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct NcgMove {
    pub agent: u32,
    pub kind: NcgMoveKind,
    pub target: u32,
    pub swap_old: u32,
}

fn guarded<F: FnOnce() -> NcgStatus>(f: F) -> NcgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => NcgStatus::Panic,
    }
}

fn config(alpha_num: i64, alpha_den: i64, k: u32, mode: NcgMode) -> Option<GameConfig> {
    if alpha_den == 0 || alpha_num <= 0 || alpha_den < 0 || k == 0 {
        return None;
    }
    let mode = match mode {
        NcgMode::Sum => CostMode::Sum,
        NcgMode::Max => CostMode::Max,
    };
    Some(GameConfig::new(Rational64::new(alpha_num, alpha_den), k, mode))
}

unsafe fn net_ref<'a>(handle: *const NcgNetwork) -> Option<&'a Network> {
    handle.as_ref().map(|h| &h.0)
}

fn emit_network(net: Network, out: *mut *mut NcgNetwork) -> NcgStatus {
    if out.is_null() {
        return NcgStatus::InvalidArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(NcgNetwork(net))) };
    NcgStatus::Ok
}

/// Parses the shared JSON format `{"n": .., "edges": [[owner, other], ..]}`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. The returned handle is freed with `ncg_network_free`.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_from_json(
    json: *const c_char,
    out: *mut *mut NcgNetwork,
) -> NcgStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return NcgStatus::InvalidArgument;
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return NcgStatus::Parse,
        };
        match Network::from_json(text) {
            Ok(net) => emit_network(net, out),
            Err(_) => NcgStatus::Parse,
        }
    })
}

/// Serializes a network to the shared JSON format. Free the string with
/// `ncg_string_free`.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_to_json(
    net: *const NcgNetwork,
    out: *mut *mut c_char,
) -> NcgStatus {
    guarded(|| {
        let (net, out) = match (net_ref(net), out.as_mut()) {
            (Some(n), Some(o)) => (n, o),
            _ => return NcgStatus::InvalidArgument,
        };
        match CString::new(net.to_json()) {
            Ok(s) => {
                *out = s.into_raw();
                NcgStatus::Ok
            }
            Err(_) => NcgStatus::Panic,
        }
    })
}

/// Frees a handle returned by any constructor. Null is ignored.
///
/// # Safety
/// `net` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_free(net: *mut NcgNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn ncg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Path network; each edge owned by its lower-index endpoint.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_line(n: u32, out: *mut *mut NcgNetwork) -> NcgStatus {
    guarded(|| {
        if n < 2 {
            return NcgStatus::InvalidArgument;
        }
        emit_network(constructions::line(n), out)
    })
}

/// Spanning star; the center owns every edge.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_star(n: u32, out: *mut *mut NcgNetwork) -> NcgStatus {
    guarded(|| {
        if n < 2 {
            return NcgStatus::InvalidArgument;
        }
        emit_network(constructions::star(n), out)
    })
}

/// Complete network; each edge owned by its lower-index endpoint.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_clique(n: u32, out: *mut *mut NcgNetwork) -> NcgStatus {
    guarded(|| {
        if n < 2 {
            return NcgStatus::InvalidArgument;
        }
        emit_network(constructions::clique(n), out)
    })
}

/// Cycle where every agent owns exactly one edge.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_cycle(n: u32, out: *mut *mut NcgNetwork) -> NcgStatus {
    guarded(|| {
        if n < 3 {
            return NcgStatus::InvalidArgument;
        }
        emit_network(constructions::directed_cycle(n), out)
    })
}

/// Complete binary tree of the given depth, edges owned toward the root.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_binary_tree(
    depth: u32,
    out: *mut *mut NcgNetwork,
) -> NcgStatus {
    guarded(|| {
        if depth == 0 || depth > 20 {
            return NcgStatus::InvalidArgument;
        }
        emit_network(constructions::complete_binary_tree(depth), out)
    })
}

/// The tree-star gadget on `2^(d+1) + l + 1` agents.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_tree_star(
    d: u32,
    l: u32,
    out: *mut *mut NcgNetwork,
) -> NcgStatus {
    guarded(|| {
        if d == 0 || d > 20 || l == 0 {
            return NcgStatus::InvalidArgument;
        }
        emit_network(constructions::tree_star(d, l), out)
    })
}

/// Number of agents.
///
/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_agent_count(net: *const NcgNetwork) -> u32 {
    net_ref(net).map(|n| n.agent_count()).unwrap_or(0)
}

/// Exact diameter; `is_infinite` set on disconnected networks.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_diameter(
    net: *const NcgNetwork,
    out: *mut NcgCost,
) -> NcgStatus {
    guarded(|| {
        let (net, out) = match (net_ref(net), out.as_mut()) {
            (Some(n), Some(o)) => (n, o),
            _ => return NcgStatus::InvalidArgument,
        };
        *out = match net.diameter() {
            Distance::Finite(v) => NcgCost {
                num: v as i64,
                den: 1,
                is_infinite: false,
            },
            Distance::Infinite => NcgCost {
                num: 0,
                den: 1,
                is_infinite: true,
            },
        };
        NcgStatus::Ok
    })
}

/// Cost of one agent: `alpha * |owned edges|` plus her distance cost.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_agent_cost(
    net: *const NcgNetwork,
    alpha_num: i64,
    alpha_den: i64,
    k: u32,
    mode: NcgMode,
    agent: u32,
    out: *mut NcgCost,
) -> NcgStatus {
    guarded(|| {
        let (net, out) = match (net_ref(net), out.as_mut()) {
            (Some(n), Some(o)) => (n, o),
            _ => return NcgStatus::InvalidArgument,
        };
        let cfg = match config(alpha_num, alpha_den, k, mode) {
            Some(c) => c,
            None => return NcgStatus::InvalidArgument,
        };
        if agent >= net.agent_count() {
            return NcgStatus::InvalidArgument;
        }
        *out = agent_cost(net, &cfg, AgentId(agent)).into();
        NcgStatus::Ok
    })
}

/// Sum of all agents' costs.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncg_social_cost(
    net: *const NcgNetwork,
    alpha_num: i64,
    alpha_den: i64,
    k: u32,
    mode: NcgMode,
    out: *mut NcgCost,
) -> NcgStatus {
    guarded(|| {
        let (net, out) = match (net_ref(net), out.as_mut()) {
            (Some(n), Some(o)) => (n, o),
            _ => return NcgStatus::InvalidArgument,
        };
        let cfg = match config(alpha_num, alpha_den, k, mode) {
            Some(c) => c,
            None => return NcgStatus::InvalidArgument,
        };
        *out = social_cost(net, &cfg).into();
        NcgStatus::Ok
    })
}

#[allow(clippy::too_many_arguments)]
fn verdict_call(
    net: *const NcgNetwork,
    alpha_num: i64,
    alpha_den: i64,
    k: u32,
    mode: NcgMode,
    holds: *mut bool,
    witness_agent: *mut u32,
    check: impl Fn(&Network, &GameConfig) -> Result<Verdict, MoveError>,
) -> NcgStatus {
    let (net, holds) = match (unsafe { net_ref(net) }, unsafe { holds.as_mut() }) {
        (Some(n), Some(h)) => (n, h),
        _ => return NcgStatus::InvalidArgument,
    };
    let cfg = match config(alpha_num, alpha_den, k, mode) {
        Some(c) => c,
        None => return NcgStatus::InvalidArgument,
    };
    match check(net, &cfg) {
        Ok(Verdict::Holds) => {
            *holds = true;
            NcgStatus::Ok
        }
        Ok(Verdict::Violated { witness }) => {
            *holds = false;
            if let Some(w) = unsafe { witness_agent.as_mut() } {
                *w = witness.agent.0;
            }
            NcgStatus::Ok
        }
        Err(MoveError::SpaceTooLarge { .. }) => NcgStatus::SpaceTooLarge,
        Err(_) => NcgStatus::Unsupported,
    }
}

/// Certifies the k-local Nash property: no agent improves by any k-local
/// move. On violation, the lowest violating agent is written to
/// `witness_agent` (which may be null).
///
/// # Safety
/// `net` must be a live handle; `holds` must be valid; `witness_agent` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn ncg_is_k_ne(
    net: *const NcgNetwork,
    alpha_num: i64,
    alpha_den: i64,
    k: u32,
    mode: NcgMode,
    holds: *mut bool,
    witness_agent: *mut u32,
) -> NcgStatus {
    guarded(|| {
        verdict_call(
            net, alpha_num, alpha_den, k, mode, holds, witness_agent, is_k_ne,
        )
    })
}

/// Certifies the k-local greedy property: no agent improves by one k-local
/// buy, delete or swap.
///
/// # Safety
/// As `ncg_is_k_ne`.
#[no_mangle]
pub unsafe extern "C" fn ncg_is_k_ge(
    net: *const NcgNetwork,
    alpha_num: i64,
    alpha_den: i64,
    k: u32,
    mode: NcgMode,
    holds: *mut bool,
    witness_agent: *mut u32,
) -> NcgStatus {
    guarded(|| {
        verdict_call(
            net, alpha_num, alpha_den, k, mode, holds, witness_agent, is_k_ge,
        )
    })
}

/// Best strictly improving single k-local greedy move of `agent`.
/// `has_move` is false when the agent is already at a local optimum.
///
/// # Safety
/// `net` must be a live handle; `has_move` must be valid; `mv` may be null.
#[no_mangle]
pub unsafe extern "C" fn ncg_best_greedy_move(
    net: *const NcgNetwork,
    alpha_num: i64,
    alpha_den: i64,
    k: u32,
    mode: NcgMode,
    agent: u32,
    has_move: *mut bool,
    mv: *mut NcgMove,
) -> NcgStatus {
    guarded(|| {
        let (net, has_move) = match (net_ref(net), has_move.as_mut()) {
            (Some(n), Some(h)) => (n, h),
            _ => return NcgStatus::InvalidArgument,
        };
        let cfg = match config(alpha_num, alpha_den, k, mode) {
            Some(c) => c,
            None => return NcgStatus::InvalidArgument,
        };
        if agent >= net.agent_count() {
            return NcgStatus::InvalidArgument;
        }
        match best_greedy_move(net, &cfg, AgentId(agent)) {
            None => {
                *has_move = false;
            }
            Some((found, _)) => {
                *has_move = true;
                if let Some(out) = mv.as_mut() {
                    *out = match found.kind {
                        MoveKind::Delete { target } => NcgMove {
                            agent,
                            kind: NcgMoveKind::Delete,
                            target,
                            swap_old: u32::MAX,
                        },
                        MoveKind::Swap { old, new } => NcgMove {
                            agent,
                            kind: NcgMoveKind::Swap,
                            target: new,
                            swap_old: old,
                        },
                        MoveKind::Buy { target } => NcgMove {
                            agent,
                            kind: NcgMoveKind::Buy,
                            target,
                            swap_old: u32::MAX,
                        },
                    };
                }
            }
        }
        NcgStatus::Ok
    })
}

/// Stable 64-bit prefix of the canonical network digest, for quick state
/// comparison across the boundary.
///
/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncg_network_digest_prefix(net: *const NcgNetwork) -> u64 {
    match net_ref(net) {
        Some(n) => {
            let d = n.canonical_hash().0;
            u64::from_le_bytes(d[..8].try_into().unwrap())
        }
        None => 0,
    }
}
