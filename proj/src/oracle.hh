// oracle.hh -- explicit-state ground truth at desk scale: bounded exploration
// of configuration graphs, lasso search under generalized Buchi predicates
// and switch budgets, and verdict cross-checking.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mpds.hh"
#include "product.hh"

namespace mcaret {

struct OracleConfig {
  uint64_t state = 0;
  std::vector<std::vector<uint64_t>> stacks;
  bool operator==(const OracleConfig& o) const {
    return state == o.state && stacks == o.stacks;
  }
};

struct OracleEdge {
  StackIndex stack = 0;
  ActionKind action = ActionKind::Internal;
  uint32_t tag = 0;  // rule id in the originating system
};

struct ExploreSystem {
  uint32_t stack_count = 1;
  std::vector<OracleConfig> initial;
  std::function<std::vector<std::pair<OracleEdge, OracleConfig>>(const OracleConfig&)>
      successors;
};

struct ConfigGraph {
  std::vector<OracleConfig> vertices;
  std::vector<std::vector<std::pair<OracleEdge, uint32_t>>> edges;
  std::vector<bool> truncated;  // some successor exceeded the height cutoff
  std::vector<uint32_t> initial;
  uint32_t stack_count = 1;

  bool truncation_reachable() const;  // every vertex is reachable by construction
};

struct ExploreLimits {
  uint32_t height_cutoff = 8;
  std::size_t vertex_budget = 2'000'000;
};

// BFS closure of the initial configurations under successors, cutting off
// configurations whose stacks exceed the height limit. Throws on budget
// exhaustion.
ConfigGraph explore(const ExploreSystem& sys, const ExploreLimits& limits);

enum class OracleAnswer { Yes, No, Inconclusive };

struct OracleLasso {
  std::vector<uint32_t> vertices;                 // v_0 .. v_m, cycle closes at v_m
  std::vector<std::pair<OracleEdge, uint32_t>> steps;  // one per move, target vertex
  std::size_t cycle_start = 0;
};

struct LassoSearch {
  OracleAnswer answer = OracleAnswer::No;
  std::optional<OracleLasso> lasso;
};

// Searches for a lasso whose cycle meets every predicate, with the total
// switch count bounded by k-1 when `k` is set (the cycle itself must then be
// switch-free). Predicates read the vertex's control state.
LassoSearch find_accepting_lasso(const ConfigGraph& g,
                                 const std::vector<std::function<bool(uint64_t)>>& predicates,
                                 std::optional<uint32_t> k);

// --- adapters ---

ExploreSystem explore_system_of(const EnhancedMpds& sys);
ExploreSystem explore_system_of(Product& prod);

LassoRun to_base_lasso(const EnhancedMpds& sys, const ConfigGraph& g, const OracleLasso& l);
AugLasso to_aug_lasso(Product& prod, const ConfigGraph& g, const OracleLasso& l);

// Oracle verdict for the bounded repeated-reachability question on an
// enhanced system: an infinite k-bounded run from the initial configuration
// visiting `target` infinitely often.
LassoSearch oracle_rep(const EnhancedMpds& sys, StateId target, std::optional<uint32_t> k,
                       const ExploreLimits& limits);

// Oracle verdict for bounded model checking: explores the product from I0 and
// searches for a k-bounded lasso meeting the whole acceptance family.
struct ProductOracleResult {
  OracleAnswer answer = OracleAnswer::No;
  std::optional<AugLasso> witness;
  std::size_t vertices = 0;
  bool truncated = false;
};
ProductOracleResult oracle_bmc(Product& prod, uint32_t k, const ExploreLimits& limits);

enum class Agreement { Agree, Disagree, Inconclusive };

Agreement cross_check(OracleAnswer oracle, bool solver_yes);

}  // namespace mcaret
