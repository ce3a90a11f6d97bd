// lasso.hh -- finite encodings of ultimately periodic runs, the abstract and
// caller successor relations, and the reference satisfaction evaluator.
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "formula.hh"
#include "mpds.hh"

namespace mcaret {

// An infinite run prefix.cycle^omega of an enhanced system, stored as the
// configurations c_0..c_T with c_T equal to c_{cycle_start}.
struct LassoRun {
  const EnhancedMpds* sys = nullptr;
  std::vector<Config> configs;
  std::vector<uint32_t> rule_ids;  // one per step; rule_ids.size() + 1 == configs.size()
  std::size_t cycle_start = 0;

  std::size_t steps() const { return rule_ids.size(); }
  std::size_t cycle_len() const { return steps() - cycle_start; }

  // Folds an arbitrary position into [0, steps()).
  std::size_t canon(std::size_t t) const {
    if (t < steps()) return t;
    return cycle_start + (t - cycle_start) % cycle_len();
  }

  const Config& config_at(std::size_t t) const { return configs[canon(t)]; }
  const Rule& rule_at(std::size_t t) const { return sys->rule(rule_ids[canon(t)]); }
  StackIndex active_at(std::size_t t) const { return sys->stack_of(config_at(t).state); }
  ActionKind action_at(std::size_t t) const { return rule_at(t).kind; }
  std::size_t height(StackIndex s, std::size_t t) const {
    return config_at(t).stacks[s].size();
  }

  std::vector<StackIndex> active_prefix() const;
  std::vector<StackIndex> active_cycle() const;
  std::vector<ActionKind> action_prefix() const;
  std::vector<ActionKind> action_cycle() const;

  // Replays every step and checks the cycle closes; throws otherwise.
  void validate() const;
};

// Succ^{a,s}: defined only when s is active at t. Case split on the height
// change of stack s: call waits for the first later s-active position at the
// pre-call height, internal takes the next s-active position, return has no
// abstract successor.
std::optional<std::size_t> abstract_succ(const LassoRun& run, std::size_t t, StackIndex s);

// Succ^{c,s}: the largest t' < t where s is active at height(s,t) - 1.
std::optional<std::size_t> caller_succ(const LassoRun& run, std::size_t t, StackIndex s);

// Reference evaluator for the satisfaction relation. Derived operators are
// evaluated through their defining rewrites. Memoized per (formula, canonical
// position); terminates on every valid lasso.
class Evaluator {
public:
  Evaluator(FormulaTable& table, const LassoRun& run);

  bool evaluate(std::size_t t, FormulaId f);

private:
  bool eval_canon(std::size_t t, FormulaId f);
  std::optional<std::size_t> first_active_at_or_after(std::size_t t, StackIndex s) const;
  std::optional<std::size_t> last_active_at_or_before(std::size_t t, StackIndex s) const;

  FormulaTable& table_;
  const LassoRun& run_;
  struct KeyHash {
    std::size_t operator()(const std::pair<FormulaId, std::size_t>& k) const {
      std::size_t h = k.first;
      hash_mix(h, k.second);
      return h;
    }
  };
  std::unordered_map<std::pair<FormulaId, std::size_t>, bool, KeyHash> memo_;
};

bool evaluate(FormulaTable& table, const LassoRun& run, std::size_t t, FormulaId f);

}  // namespace mcaret
