// product.hh -- the synchronized product of an enhanced multi-pushdown system
// with a Multi-CaRet formula: augmented states and stack letters, the
// transition conditions, the generalized Buchi family, initial states, the
// run-augmentation map used by the oracle, and regularity-constraint tracking.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "closure.hh"
#include "lasso.hh"
#include "mpds.hh"
#include "pauto.hh"

namespace mcaret {

using AtomId = uint32_t;       // 0 is the distinguished empty atom
using AugStateId = uint32_t;
using AugLetterId = uint32_t;

constexpr AtomId kEmptyAtom = 0;

// Interned atom store with per-slot admissible lists. An atom serving stack j
// must place its G x [N] element on j, may not claim foreign abstract-next
// formulas, and must satisfy the own-index abstract/caller-until unfoldings.
class AtomTable {
public:
  explicit AtomTable(const Closure& cl);

  const Closure& closure() const { return *cl_; }
  AtomId intern(const AtomBits& bits);
  const AtomBits& bits(AtomId id) const { return atoms_[id]; }
  bool get(AtomId id, uint32_t closure_idx) const { return atoms_[id].get(closure_idx); }
  uint32_t count() const { return static_cast<uint32_t>(atoms_.size()); }

  const std::vector<AtomId>& slot_atoms(StackIndex j) const { return slot_atoms_[j]; }
  bool slot_admissible(const AtomBits& bits, StackIndex j) const;

  std::string render(AtomId id) const;

private:
  const Closure* cl_;
  std::vector<AtomBits> atoms_;
  std::unordered_map<AtomBits, AtomId, AtomBitsHash> index_;
  std::vector<std::vector<AtomId>> slot_atoms_;
};

struct AugStateData {
  StateId base_g = 0;          // plain component of the enhanced state
  StackIndex active = 0;
  std::vector<AtomId> atoms;   // one per stack
  uint32_t ret_mask = 0;       // bit j set = willreturn
  uint32_t dead_mask = 0;      // bit j set = dead
  std::vector<uint64_t> reg;   // per constraint: reachable-state set of its NFA

  bool operator==(const AugStateData& o) const {
    return base_g == o.base_g && active == o.active && atoms == o.atoms &&
           ret_mask == o.ret_mask && dead_mask == o.dead_mask && reg == o.reg;
  }
  bool willreturn(StackIndex j) const { return (ret_mask >> j) & 1; }
  bool dead(StackIndex j) const { return (dead_mask >> j) & 1; }
};

struct AugLetterData {
  LetterId letter = kBottom;
  AtomId atom = kEmptyAtom;
  bool willreturn = false;
  std::vector<uint64_t> reg_snapshot;  // for constraints on this letter's stack

  bool operator==(const AugLetterData& o) const {
    return letter == o.letter && atom == o.atom && willreturn == o.willreturn &&
           reg_snapshot == o.reg_snapshot;
  }
};

struct ProductRule {
  AugStateId from = 0;
  AugLetterId top = 0;
  AugStateId to = 0;
  StackIndex stack = 0;     // acting stack (the source's active stack)
  StackIndex to_stack = 0;  // target's active stack
  ActionKind kind = ActionKind::Internal;
  AugLetterId out = 0;      // pushed/rewritten letter; unused for returns
  uint32_t base_rule = 0;   // underlying system rule id
};

struct AugConfig {
  AugStateId state = 0;
  std::vector<std::vector<AugLetterId>> stacks;
  bool operator==(const AugConfig& o) const { return state == o.state && stacks == o.stacks; }
};

struct AccPredicate {
  std::string name;
  std::function<bool(AugStateId)> test;
};

// An augmented lasso: gamma(rho) of a base lasso, or an accepting product
// lasso found by the oracle.
struct AugLasso {
  std::vector<AugConfig> configs;
  std::vector<ProductRule> steps;
  std::size_t cycle_start = 0;
};

struct RegConstraint {
  uint32_t closure_idx = 0;  // the in(s, A) member
  StackIndex stack = 0;
  uint32_t automaton = 0;    // index into the formula table
  uint64_t initial_set = 0;
  uint64_t accepting_set = 0;
};

class Product {
public:
  // `root` must already be simplified. The closure is built internally.
  Product(const EnhancedMpds& sys, FormulaTable& table, FormulaId root);

  const EnhancedMpds& system() const { return *sys_; }
  const Closure& closure() const { return *cl_; }
  const AtomTable& atom_table() const { return atoms_; }
  const FormulaTable& table() const { return *table_; }
  uint32_t stack_count() const { return sys_->stack_count(); }
  const std::vector<RegConstraint>& reg_constraints() const { return reg_; }

  AugStateId intern_state(AugStateData d);
  const AugStateData& state(AugStateId id) const { return states_[id]; }
  AugLetterId intern_letter(AugLetterData d);
  const AugLetterData& letter(AugLetterId id) const { return letters_[id]; }
  AugLetterId bottom_letter(StackIndex j) const { return bottom_letters_[j]; }
  uint32_t state_count() const { return static_cast<uint32_t>(states_.size()); }
  uint32_t letter_count() const { return static_cast<uint32_t>(letters_.size()); }

  // Upper bound on the number of augmented global states (for the growth
  // audit); counts tags, slot atoms, and regularity tracker values.
  double state_space_bound() const;

  // The transition conditions, generated on demand and cached per head.
  const std::vector<ProductRule>& rules(AugStateId state, AugLetterId top);

  // Configuration-level successors (for the explicit-state oracle).
  std::vector<std::pair<ProductRule, AugConfig>> successors(const AugConfig& c);

  AugConfig initial_config(AugStateId s) const;

  // I0: all initial augmented states for the system's initial states, with the
  // root formula asserted on the initial stack.
  std::vector<AugStateId> initial_states();
  std::vector<AugStateId> initial_states_for(StateId base_g0, StackIndex i0);

  // Generalized Buchi family: F1 per until, F2 per abstract-until, F3/F4 per
  // stack.
  std::vector<AccPredicate> acceptance_family() const;

  // gamma: the unique augmentation of a base lasso. Throws if the lasso does
  // not close after augmentation (cannot happen for valid lassos).
  AugLasso augment(const LassoRun& base);

  // Forgets augmentations: the base lasso underlying a product lasso.
  LassoRun project(const AugLasso& aug) const;

  // Checks one augmented step against the transition conditions; used by
  // tests and by the witness self-validation.
  bool step_allowed(const AugConfig& from, const ProductRule& r, const AugConfig& to);

  std::string render_state(AugStateId id) const;
  std::string render_letter(AugLetterId id) const;

private:
  friend class InitialEnumerator;

  bool pre_checks(const AugStateData& st) const;
  std::vector<ProductRule> generate(AugStateId state_id, AugLetterId top_id);

  const EnhancedMpds* sys_;
  FormulaTable* table_;
  std::unique_ptr<Closure> cl_;
  AtomTable atoms_;
  std::vector<RegConstraint> reg_;
  std::vector<std::vector<uint32_t>> reg_on_stack_;  // constraint indices per stack

  std::vector<AugStateData> states_;
  std::vector<AugLetterData> letters_;
  struct StateHash {
    std::size_t operator()(const AugStateData& d) const {
      std::size_t h = d.base_g;
      hash_mix(h, d.active);
      hash_mix(h, d.ret_mask);
      hash_mix(h, d.dead_mask);
      for (AtomId a : d.atoms) hash_mix(h, a);
      for (uint64_t r : d.reg) hash_mix(h, static_cast<std::size_t>(r));
      return h;
    }
  };
  struct LetterHash {
    std::size_t operator()(const AugLetterData& d) const {
      std::size_t h = d.letter;
      hash_mix(h, d.atom);
      hash_mix(h, d.willreturn);
      for (uint64_t r : d.reg_snapshot) hash_mix(h, static_cast<std::size_t>(r));
      return h;
    }
  };
  std::unordered_map<AugStateData, AugStateId, StateHash> state_index_;
  std::unordered_map<AugLetterData, AugLetterId, LetterHash> letter_index_;
  std::vector<AugLetterId> bottom_letters_;

  std::unordered_map<uint64_t, std::vector<ProductRule>> rule_cache_;
};

}  // namespace mcaret
