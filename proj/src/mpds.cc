#include "mpds.hh"

#include <algorithm>

namespace mcaret {

const char* action_name(ActionKind a) {
  switch (a) {
    case ActionKind::Call: return "call";
    case ActionKind::Return: return "return";
    case ActionKind::Internal: return "internal";
  }
  return "?";
}

namespace {

void validate_rule(const Rule& r, std::size_t n_states, std::size_t n_letters,
                   uint32_t n_stacks) {
  require(r.from < n_states && r.to < n_states, "rule references unknown state");
  require(r.top < n_letters && r.arg < n_letters, "rule references unknown letter");
  require(r.stack < n_stacks && r.to_stack < n_stacks, "rule references unknown stack");
  switch (r.kind) {
    case ActionKind::Call:
      require(r.arg != kBottom, cat("rule ", r.id, ": bottom cannot be pushed"));
      break;
    case ActionKind::Return:
      require(r.top != kBottom, cat("rule ", r.id, ": bottom cannot be popped"));
      require(r.top == r.arg, cat("rule ", r.id, ": return must pop the letter it matches"));
      break;
    case ActionKind::Internal:
      require((r.top == kBottom) == (r.arg == kBottom),
              cat("rule ", r.id, ": bottom cannot be replaced"));
      break;
  }
}

std::vector<std::vector<Rule>> split_by_stack(const std::vector<Rule>& rules,
                                              uint32_t stack_count) {
  std::vector<std::vector<Rule>> by(stack_count);
  for (const Rule& r : rules) by[r.stack].push_back(r);
  return by;
}

}  // namespace

Mpds::Mpds(std::vector<std::string> states, uint32_t stack_count,
           std::vector<std::string> alphabet, std::vector<Rule> rules,
           StateId init_state, StackIndex init_stack)
    : states_(std::move(states)),
      stack_count_(stack_count),
      alphabet_(std::move(alphabet)),
      rules_(std::move(rules)),
      init_state_(init_state),
      init_stack_(init_stack) {
  require(stack_count_ >= 1, "system needs at least one stack");
  require(!states_.empty(), "system needs at least one state");
  require(!alphabet_.empty() && alphabet_[0] == "bot", "alphabet[0] must be bot");
  require(init_state_ < states_.size(), "initial state out of range");
  require(init_stack_ < stack_count_, "initial stack out of range");
  for (uint32_t i = 0; i < rules_.size(); ++i) {
    rules_[i].id = i;
    require(rules_[i].to_stack == rules_[i].stack,
            "plain system rules cannot name a next stack");
    validate_rule(rules_[i], states_.size(), alphabet_.size(), stack_count_);
  }
  by_stack_ = split_by_stack(rules_, stack_count_);
}

Config Mpds::initial_config() const {
  Config c;
  c.state = init_state_;
  c.stacks.assign(stack_count_, {kBottom});
  return c;
}

EnhancedMpds EnhancedMpds::enhance(const Mpds& m, StackIndex initial_active) {
  require(initial_active < m.stack_count(), "initial stack out of range");
  EnhancedMpds e;
  e.base_states_.assign(m.state_names().begin(), m.state_names().end());
  e.stack_count_ = m.stack_count();
  e.alphabet_ = m.alphabet();
  uint32_t next_id = 0;
  for (const Rule& r : m.rules()) {
    for (StackIndex s2 = 0; s2 < e.stack_count_; ++s2) {
      Rule er = r;
      er.from = e.state_of(r.from, r.stack);
      er.to = e.state_of(r.to, s2);
      er.to_stack = s2;
      er.id = next_id++;
      e.rules_.push_back(er);
    }
  }
  e.by_stack_ = split_by_stack(e.rules_, e.stack_count_);
  e.init_states_ = {e.state_of(m.init_state(), initial_active)};
  return e;
}

EnhancedMpds EnhancedMpds::from_enhanced_rules(std::vector<std::string> base_states,
                                               uint32_t stack_count,
                                               std::vector<std::string> alphabet,
                                               std::vector<Rule> rules, StateId init_state,
                                               StackIndex init_stack) {
  EnhancedMpds e;
  e.base_states_ = std::move(base_states);
  e.stack_count_ = stack_count;
  e.alphabet_ = std::move(alphabet);
  require(stack_count >= 1, "system needs at least one stack");
  require(!e.alphabet_.empty() && e.alphabet_[0] == "bot", "alphabet[0] must be bot");
  require(init_state < e.base_states_.size(), "initial state out of range");
  require(init_stack < stack_count, "initial stack out of range");
  uint32_t next_id = 0;
  for (Rule r : rules) {
    Rule er = r;
    er.from = e.state_of(r.from, r.stack);
    er.to = e.state_of(r.to, r.to_stack);
    er.id = next_id++;
    validate_rule(er, e.state_count(), e.alphabet_.size(), stack_count);
    e.rules_.push_back(er);
  }
  e.by_stack_ = split_by_stack(e.rules_, e.stack_count_);
  e.init_states_ = {e.state_of(init_state, init_stack)};
  return e;
}

std::string EnhancedMpds::state_name(StateId e) const {
  return cat("(", base_states_[base_of(e)], ",", stack_of(e) + 1, ")");
}

Config EnhancedMpds::initial_config() const {
  Config c;
  c.state = init_state();
  c.stacks.assign(stack_count_, {kBottom});
  return c;
}

std::vector<std::pair<const Rule*, Config>> EnhancedMpds::successors(const Config& c) const {
  std::vector<std::pair<const Rule*, Config>> out;
  StackIndex s = stack_of(c.state);
  for (const Rule& r : by_stack_[s]) {
    if (!rule_applies(c, r)) continue;
    out.emplace_back(&r, step(c, r, stack_count_));
  }
  return out;
}

bool rule_applies(const Config& c, const Rule& r) {
  if (c.state != r.from) return false;
  const auto& w = c.stacks[r.stack];
  return !w.empty() && w.back() == r.top;
}

Config step(const Config& c, const Rule& r, uint32_t stack_count) {
  require(r.stack < stack_count && r.stack < c.stacks.size(), "rule stack out of range");
  require(c.state == r.from, "rule source state does not match configuration");
  const auto& w = c.stacks[r.stack];
  require(!w.empty() && w.back() == r.top, "rule top letter does not match stack");
  Config out = c;
  out.state = r.to;
  auto& ws = out.stacks[r.stack];
  switch (r.kind) {
    case ActionKind::Return:
      require(r.top != kBottom, "bottom cannot be popped");
      ws.pop_back();
      break;
    case ActionKind::Internal:
      require((r.top == kBottom) == (r.arg == kBottom), "bottom cannot be replaced");
      ws.back() = r.arg;
      break;
    case ActionKind::Call:
      require(r.arg != kBottom, "bottom cannot be pushed");
      ws.push_back(r.arg);
      break;
  }
  return out;
}

bool is_k_bounded(const std::vector<StackIndex>& active, uint32_t k) {
  require(k >= 1, "k-boundedness requires k >= 1");
  uint32_t switches = 0;
  for (std::size_t t = 0; t + 1 < active.size(); ++t)
    if (active[t] != active[t + 1]) ++switches;
  return switches <= k - 1;
}

bool is_k_bounded_lasso(const std::vector<StackIndex>& prefix,
                        const std::vector<StackIndex>& cycle, uint32_t k) {
  require(k >= 1, "k-boundedness requires k >= 1");
  require(!cycle.empty(), "lasso cycle must be nonempty");
  for (std::size_t t = 0; t + 1 < cycle.size(); ++t)
    if (cycle[t] != cycle[t + 1]) return false;
  if (cycle.back() != cycle.front()) return false;
  uint32_t switches = 0;
  for (std::size_t t = 0; t + 1 < prefix.size(); ++t)
    if (prefix[t] != prefix[t + 1]) ++switches;
  if (!prefix.empty() && prefix.back() != cycle.front()) ++switches;
  return switches <= k - 1;
}

namespace {

// Number of maximal constant blocks in a sequence.
uint32_t block_count(const std::vector<StackIndex>& seq) {
  if (seq.empty()) return 0;
  uint32_t blocks = 1;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (seq[i] != seq[i + 1]) ++blocks;
  return blocks;
}

}  // namespace

bool is_k_phase_bounded_lasso(const std::vector<StackIndex>& active_prefix,
                              const std::vector<ActionKind>& action_prefix,
                              const std::vector<StackIndex>& active_cycle,
                              const std::vector<ActionKind>& action_cycle, uint32_t k) {
  require(active_prefix.size() == action_prefix.size(), "prefix length mismatch");
  require(active_cycle.size() == action_cycle.size(), "cycle length mismatch");
  if (k == 0) return false;
  std::vector<StackIndex> ret_prefix, ret_cycle;
  for (std::size_t i = 0; i < action_prefix.size(); ++i)
    if (action_prefix[i] == ActionKind::Return) ret_prefix.push_back(active_prefix[i]);
  for (std::size_t i = 0; i < action_cycle.size(); ++i)
    if (action_cycle[i] == ActionKind::Return) ret_cycle.push_back(active_cycle[i]);

  std::vector<StackIndex> seq = ret_prefix;
  if (!ret_cycle.empty()) {
    // Returns in the cycle repeat forever: a second stack there forces
    // infinitely many phase changes.
    for (StackIndex s : ret_cycle)
      if (s != ret_cycle.front()) return false;
    seq.push_back(ret_cycle.front());
  }
  return block_count(seq) <= k;
}

bool is_order_bounded_lasso(const std::vector<Config>& configs,
                            const std::vector<StackIndex>& active,
                            const std::vector<ActionKind>& actions, std::size_t cycle_start,
                            const std::vector<uint32_t>& rank) {
  require(configs.size() == active.size() + 1, "config/step count mismatch");
  require(active.size() == actions.size(), "active/action count mismatch");
  require(cycle_start < configs.size(), "cycle start out of range");
  for (std::size_t t = 0; t < actions.size(); ++t) {
    if (actions[t] != ActionKind::Return) continue;
    StackIndex s = active[t];
    for (StackIndex j = 0; j < configs[t].stacks.size(); ++j) {
      if (rank[j] < rank[s] && configs[t].stacks[j].size() > 1) return false;
    }
  }
  return true;
}

}  // namespace mcaret
