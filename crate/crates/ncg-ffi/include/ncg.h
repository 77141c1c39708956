#ifndef NCG_H
#define NCG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Distance aggregation of the cost function.
 */
typedef enum {
  NCG_MODE_SUM = 0,
  NCG_MODE_MAX = 1,
} NcgMode;

/**
 * Kind of a single greedy move.
 */
typedef enum {
  NCG_MOVE_KIND_DELETE = 0,
  NCG_MOVE_KIND_SWAP = 1,
  NCG_MOVE_KIND_BUY = 2,
} NcgMoveKind;

/**
 * Status code of every fallible call.
 */
typedef enum {
  NCG_STATUS_OK = 0,
  /**
   * A pointer argument was null or a parameter was out of range.
   */
  NCG_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Input text was not a valid network description.
   */
  NCG_STATUS_PARSE = 2,
  /**
   * An exhaustive solver exceeded its configured budget.
   */
  NCG_STATUS_SPACE_TOO_LARGE = 3,
  /**
   * The operation is not defined for the requested variant.
   */
  NCG_STATUS_UNSUPPORTED = 4,
  /**
   * A panic was caught at the boundary.
   */
  NCG_STATUS_PANIC = 5,
} NcgStatus;

/**
 * Opaque network handle.
 */
typedef struct NcgNetwork NcgNetwork;

/**
 * Exact rational value with an infinity flag (disconnected networks).
 */
typedef struct {
  int64_t num;
  int64_t den;
  bool is_infinite;
} NcgCost;

/**
 * A single greedy move of `agent`. For buys and deletes only `target` is
 * meaningful; swaps carry the replaced target in `swap_old`.
 */
typedef struct {
  uint32_t agent;
  NcgMoveKind kind;
  uint32_t target;
  uint32_t swap_old;
} NcgMove;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses the shared JSON format `{"n": .., "edges": [[owner, other], ..]}`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. The returned handle is freed with `ncg_network_free`.
 */
NcgStatus ncg_network_from_json(const char *json, NcgNetwork **out);

/**
 * Serializes a network to the shared JSON format. Free the string with
 * `ncg_string_free`.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
NcgStatus ncg_network_to_json(const NcgNetwork *net, char **out);

/**
 * Frees a handle returned by any constructor. Null is ignored.
 *
 * # Safety
 * `net` must have come from this library and not been freed before.
 */
void ncg_network_free(NcgNetwork *net);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have come from this library and not been freed before.
 */
void ncg_string_free(char *s);

/**
 * Path network; each edge owned by its lower-index endpoint.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
NcgStatus ncg_network_line(uint32_t n, NcgNetwork **out);

/**
 * Spanning star; the center owns every edge.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
NcgStatus ncg_network_star(uint32_t n, NcgNetwork **out);

/**
 * Complete network; each edge owned by its lower-index endpoint.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
NcgStatus ncg_network_clique(uint32_t n, NcgNetwork **out);

/**
 * Cycle where every agent owns exactly one edge.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
NcgStatus ncg_network_cycle(uint32_t n, NcgNetwork **out);

/**
 * Complete binary tree of the given depth, edges owned toward the root.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
NcgStatus ncg_network_binary_tree(uint32_t depth, NcgNetwork **out);

/**
 * The tree-star gadget on `2^(d+1) + l + 1` agents.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
NcgStatus ncg_network_tree_star(uint32_t d, uint32_t l, NcgNetwork **out);

/**
 * Number of agents.
 *
 * # Safety
 * `net` must be a live handle.
 */
uint32_t ncg_network_agent_count(const NcgNetwork *net);

/**
 * Exact diameter; `is_infinite` set on disconnected networks.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
NcgStatus ncg_network_diameter(const NcgNetwork *net, NcgCost *out);

/**
 * Cost of one agent: `alpha * |owned edges|` plus her distance cost.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
NcgStatus ncg_agent_cost(const NcgNetwork *net,
                         int64_t alpha_num,
                         int64_t alpha_den,
                         uint32_t k,
                         NcgMode mode,
                         uint32_t agent,
                         NcgCost *out);

/**
 * Sum of all agents' costs.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer.
 */
NcgStatus ncg_social_cost(const NcgNetwork *net,
                          int64_t alpha_num,
                          int64_t alpha_den,
                          uint32_t k,
                          NcgMode mode,
                          NcgCost *out);

/**
 * Certifies the k-local Nash property: no agent improves by any k-local
 * move. On violation, the lowest violating agent is written to
 * `witness_agent` (which may be null).
 *
 * # Safety
 * `net` must be a live handle; `holds` must be valid; `witness_agent` may be
 * null.
 */
NcgStatus ncg_is_k_ne(const NcgNetwork *net,
                      int64_t alpha_num,
                      int64_t alpha_den,
                      uint32_t k,
                      NcgMode mode,
                      bool *holds,
                      uint32_t *witness_agent);

/**
 * Certifies the k-local greedy property: no agent improves by one k-local
 * buy, delete or swap.
 *
 * # Safety
 * As `ncg_is_k_ne`.
 */
NcgStatus ncg_is_k_ge(const NcgNetwork *net,
                      int64_t alpha_num,
                      int64_t alpha_den,
                      uint32_t k,
                      NcgMode mode,
                      bool *holds,
                      uint32_t *witness_agent);

/**
 * Best strictly improving single k-local greedy move of `agent`.
 * `has_move` is false when the agent is already at a local optimum.
 *
 * # Safety
 * `net` must be a live handle; `has_move` must be valid; `mv` may be null.
 */
NcgStatus ncg_best_greedy_move(const NcgNetwork *net,
                               int64_t alpha_num,
                               int64_t alpha_den,
                               uint32_t k,
                               NcgMode mode,
                               uint32_t agent,
                               bool *has_move,
                               NcgMove *mv);

/**
 * Stable 64-bit prefix of the canonical network digest, for quick state
 * comparison across the boundary.
 *
 * # Safety
 * `net` must be a live handle.
 */
uint64_t ncg_network_digest_prefix(const NcgNetwork *net);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NCG_H */
