// solver.hh -- top of the pipeline: context-skeleton enumeration with iterated
// post*, repeated-head tail checks, degeneralization by counter, and the
// bounded model checking driver.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "formula.hh"
#include "mpds.hh"
#include "pauto.hh"
#include "product.hh"

namespace mcaret {

struct SkeletonEntry {
  std::string state;   // rendered global state
  uint32_t stack = 0;  // 1-based
};

struct Witness {
  std::vector<SkeletonEntry> skeleton;
  std::string head_state;
  std::string head_letter;
};

struct SolverStats {
  SatStats sat;
  uint64_t skeletons_explored = 0;
  uint64_t tail_checks = 0;
  uint64_t initial_states = 0;
  double state_space_bound = 0;  // |P| used by the growth audit
  bool audit_ok = true;
  uint64_t audit_max_op_growth = 0;
  uint64_t audit_max_path_growth = 0;
  uint64_t interned_states = 0;
  uint64_t interned_letters = 0;
  double wall_ms = 0;
};

struct Verdict {
  bool yes = false;
  std::optional<Witness> witness;
  SolverStats stats;
};

// A multi-stack system presented lazily for the solver: states carry their
// active stack, rules are keyed by (state, top letter of the active stack).
struct LazyMpdsView {
  uint32_t stack_count = 1;
  std::function<std::vector<PdsRule>(PdsState, PdsLetter)> rules;
  std::function<StackIndex(PdsState)> stack_of;
  std::function<bool(PdsState)> target;
  std::function<std::string(PdsState)> render_state;
  std::function<std::string(PdsLetter)> render_letter;
  std::vector<PdsLetter> bottom_letters;  // one per stack
  double state_space_bound = 0;
};

// Bounded repeated reachability: is there an infinite k-bounded run from
// (initial, all-bottom stacks) whose control satisfies `view.target`
// infinitely often? Enumerates context skeletons depth-first with shared
// per-prefix automata and closes each candidate tail with a repeated-head
// check.
Verdict brep_single_lazy(const LazyMpdsView& view, PdsState initial, uint32_t k,
                         SolverStats* stats_out = nullptr);

// The explicit-system form: target is a single enhanced global state.
Verdict brep_single(const EnhancedMpds& sys, StateId target, uint32_t k);

struct BmcOptions {
  uint32_t jobs = 1;
};

// Bounded model checking: builds the synchronized product for the (already
// simplified) formula, degeneralizes the acceptance family with a counter and
// runs one BREP instance per initial augmented state.
Verdict bmc(Product& product, uint32_t k, const BmcOptions& opts = {});

// Rewrites derived operators and stack atoms, and compiles action atoms away
// by tracking the upcoming action in the global state. The returned view owns
// replacement system/table objects when the transformation applies.
struct Prepared {
  std::shared_ptr<EnhancedMpds> owned_sys;
  std::shared_ptr<FormulaTable> owned_table;
  const EnhancedMpds* sys = nullptr;
  FormulaTable* table = nullptr;
  FormulaId root = 0;
};

Prepared prepare(const EnhancedMpds& sys, FormulaTable& table, FormulaId f);

}  // namespace mcaret
