// mpds.hh -- multi-pushdown systems: model, one-step semantics, enhancement,
// and boundedness predicates over runs.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "base.hh"

namespace mcaret {

using StateId = uint32_t;    // index into a state-name table
using LetterId = uint32_t;   // index into the stack alphabet; 0 is always bottom
using StackIndex = uint32_t; // 0-based internally; rendered 1-based

constexpr LetterId kBottom = 0;

enum class ActionKind : uint8_t { Call, Return, Internal };

const char* action_name(ActionKind a);

// One transition acting on stack `stack`. For plain systems `to_stack` equals
// `stack`; for enhanced systems it names the next active stack.
struct Rule {
  StateId from = 0;
  LetterId top = 0;
  StateId to = 0;
  StackIndex stack = 0;
  StackIndex to_stack = 0;
  ActionKind kind = ActionKind::Internal;
  LetterId arg = 0;
  uint32_t id = 0;  // stable, assigned in declaration order across all stacks
};

struct Config {
  StateId state = 0;
  std::vector<std::vector<LetterId>> stacks;  // bottom first, top last

  bool operator==(const Config& o) const { return state == o.state && stacks == o.stacks; }
};

struct ConfigHash {
  std::size_t operator()(const Config& c) const {
    std::size_t h = std::hash<StateId>()(c.state);
    for (const auto& w : c.stacks) {
      hash_mix(h, w.size());
      for (LetterId a : w) hash_mix(h, a);
    }
    return h;
  }
};

class Mpds {
public:
  Mpds(std::vector<std::string> states, uint32_t stack_count,
       std::vector<std::string> alphabet,  // alphabet[0] must be "bot"
       std::vector<Rule> rules, StateId init_state, StackIndex init_stack);

  uint32_t stack_count() const { return stack_count_; }
  const std::vector<std::string>& state_names() const { return states_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<Rule>& rules_for(StackIndex s) const { return by_stack_[s]; }
  StateId init_state() const { return init_state_; }
  StackIndex init_stack() const { return init_stack_; }

  const std::string& state_name(StateId g) const { return states_[g]; }
  const std::string& letter_name(LetterId a) const { return alphabet_[a]; }

  Config initial_config() const;

private:
  std::vector<std::string> states_;
  uint32_t stack_count_;
  std::vector<std::string> alphabet_;
  std::vector<Rule> rules_;
  std::vector<std::vector<Rule>> by_stack_;
  StateId init_state_;
  StackIndex init_stack_;
};

// Enhanced system: global states are pairs (g, s); every rule in Delta_s has a
// source whose stack component is s and a target naming the next active stack.
class EnhancedMpds {
public:
  // Builds the enhancement of a plain system (Lemma-1 construction): each rule
  // splits into one enhanced rule per possible next stack.
  static EnhancedMpds enhance(const Mpds& m, StackIndex initial_active);

  // Wraps a system whose rules already carry next-stack targets.
  static EnhancedMpds from_enhanced_rules(std::vector<std::string> base_states,
                                          uint32_t stack_count,
                                          std::vector<std::string> alphabet,
                                          std::vector<Rule> rules, StateId init_state,
                                          StackIndex init_stack);

  uint32_t stack_count() const { return stack_count_; }
  uint32_t base_state_count() const { return static_cast<uint32_t>(base_states_.size()); }
  uint32_t state_count() const { return base_state_count() * stack_count_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::string& letter_name(LetterId a) const { return alphabet_[a]; }

  // Enhanced state ids pack (g, s) as g * N + s.
  StateId state_of(StateId g, StackIndex s) const { return g * stack_count_ + s; }
  StateId base_of(StateId e) const { return e / stack_count_; }
  StackIndex stack_of(StateId e) const { return e % stack_count_; }
  std::string state_name(StateId e) const;
  const std::string& base_state_name(StateId g) const { return base_states_[g]; }

  const std::vector<Rule>& rules_for(StackIndex s) const { return by_stack_[s]; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(uint32_t id) const { return rules_[id]; }

  StateId init_state() const { return init_states_.front(); }  // enhanced id
  const std::vector<StateId>& init_states() const { return init_states_; }
  void set_init_states(std::vector<StateId> inits) { init_states_ = std::move(inits); }
  Config initial_config() const;

  // All one-step successors of an enhanced configuration, in rule order.
  std::vector<std::pair<const Rule*, Config>> successors(const Config& c) const;

private:
  EnhancedMpds() = default;

  std::vector<std::string> base_states_;
  uint32_t stack_count_ = 1;
  std::vector<std::string> alphabet_;
  std::vector<Rule> rules_;                   // rule.from/to are enhanced ids
  std::vector<std::vector<Rule>> by_stack_;
  std::vector<StateId> init_states_;
};

// Applies one rule to a configuration. Throws on precondition violations
// (state/top mismatch, bottom discipline).
Config step(const Config& c, const Rule& r, uint32_t stack_count);

// True iff the rule is applicable in c (matching state, stack top).
bool rule_applies(const Config& c, const Rule& r);

// --- boundedness predicates over active-stack / action sequences ---

// Definition of k-bounded over a finite switch record: at most k-1 positions t
// with s_t != s_{t+1}.
bool is_k_bounded(const std::vector<StackIndex>& active, uint32_t k);

// Lasso form: prefix then cycle repeated forever. The cycle must be switch-free
// and the total switch count of prefix + junctions must be <= k-1.
bool is_k_bounded_lasso(const std::vector<StackIndex>& prefix,
                        const std::vector<StackIndex>& cycle, uint32_t k);

bool is_k_phase_bounded_lasso(const std::vector<StackIndex>& active_prefix,
                              const std::vector<ActionKind>& action_prefix,
                              const std::vector<StackIndex>& active_cycle,
                              const std::vector<ActionKind>& action_cycle, uint32_t k);

// Order-boundedness: at every return on stack s, all stacks strictly below s in
// `rank` hold only the bottom letter. `configs` are the lasso's configurations
// (prefix followed by one cycle; the step at position t uses active[t]).
bool is_order_bounded_lasso(const std::vector<Config>& configs,
                            const std::vector<StackIndex>& active,
                            const std::vector<ActionKind>& actions, std::size_t cycle_start,
                            const std::vector<uint32_t>& rank);

}  // namespace mcaret
