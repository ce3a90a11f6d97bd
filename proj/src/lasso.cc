#include "lasso.hh"

#include <unordered_set>

namespace mcaret {

std::vector<StackIndex> LassoRun::active_prefix() const {
  std::vector<StackIndex> out;
  for (std::size_t t = 0; t < cycle_start; ++t) out.push_back(active_at(t));
  return out;
}

std::vector<StackIndex> LassoRun::active_cycle() const {
  std::vector<StackIndex> out;
  for (std::size_t t = cycle_start; t < steps(); ++t) out.push_back(active_at(t));
  return out;
}

std::vector<ActionKind> LassoRun::action_prefix() const {
  std::vector<ActionKind> out;
  for (std::size_t t = 0; t < cycle_start; ++t) out.push_back(action_at(t));
  return out;
}

std::vector<ActionKind> LassoRun::action_cycle() const {
  std::vector<ActionKind> out;
  for (std::size_t t = cycle_start; t < steps(); ++t) out.push_back(action_at(t));
  return out;
}

void LassoRun::validate() const {
  require(sys != nullptr, "lasso has no system");
  require(configs.size() == rule_ids.size() + 1, "lasso config/step count mismatch");
  require(cycle_start < steps(), "lasso cycle must be nonempty");
  for (std::size_t t = 0; t < steps(); ++t) {
    const Rule& r = sys->rule(rule_ids[t]);
    require(sys->stack_of(configs[t].state) == r.stack, "lasso step on inactive stack");
    Config next = step(configs[t], r, sys->stack_count());
    require(next == configs[t + 1], "lasso step does not replay");
  }
  require(configs.back() == configs[cycle_start], "lasso cycle does not close");
}

namespace {

// Scanning this far covers one full period beyond both t and the cycle entry.
std::size_t scan_limit(const LassoRun& run, std::size_t t) {
  return std::max(t + 1, run.cycle_start) + run.cycle_len() + 1;
}

}  // namespace

std::optional<std::size_t> abstract_succ(const LassoRun& run, std::size_t t, StackIndex s) {
  t = run.canon(t);
  if (run.active_at(t) != s) return std::nullopt;
  std::size_t h = run.height(s, t);
  std::size_t h_next = run.height(s, t + 1);
  if (h_next + 1 == h) return std::nullopt;  // return action
  bool is_call = h_next == h + 1;
  for (std::size_t p = t + 1, limit = scan_limit(run, t); p <= limit; ++p) {
    if (run.active_at(p) != s) continue;
    if (!is_call || run.height(s, p) == h) return p;
  }
  return std::nullopt;
}

std::optional<std::size_t> caller_succ(const LassoRun& run, std::size_t t, StackIndex s) {
  t = run.canon(t);
  std::size_t h = run.height(s, t);
  if (h <= 1) return std::nullopt;  // only the bottom frame, no caller
  for (std::size_t p = t; p-- > 0;) {
    if (run.active_at(p) == s && run.height(s, p) == h - 1) return p;
  }
  return std::nullopt;
}

Evaluator::Evaluator(FormulaTable& table, const LassoRun& run) : table_(table), run_(run) {}

std::optional<std::size_t> Evaluator::first_active_at_or_after(std::size_t t,
                                                               StackIndex s) const {
  for (std::size_t p = t, limit = scan_limit(run_, t); p <= limit; ++p)
    if (run_.active_at(p) == s) return p;
  return std::nullopt;
}

std::optional<std::size_t> Evaluator::last_active_at_or_before(std::size_t t,
                                                               StackIndex s) const {
  for (std::size_t p = t + 1; p-- > 0;)
    if (run_.active_at(p) == s) return p;
  return std::nullopt;
}

bool Evaluator::evaluate(std::size_t t, FormulaId f) { return eval_canon(run_.canon(t), f); }

bool Evaluator::eval_canon(std::size_t t, FormulaId f) {
  auto key = std::make_pair(f, t);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const FNode n = table_.node(f);
  bool v = false;
  switch (n.kind) {
    case FKind::StateAtom: {
      StateId st = run_.config_at(t).state;
      v = run_.sys->base_of(st) == n.a && run_.sys->stack_of(st) == n.stack;
      break;
    }
    case FKind::StackAtom:
      v = run_.active_at(t) == n.stack;
      break;
    case FKind::ActionAtom:
      v = run_.action_at(t) == static_cast<ActionKind>(n.a);
      break;
    case FKind::RegAtom: {
      const auto& w = run_.config_at(t).stacks[n.stack];
      v = table_.automaton(n.a).accepts(std::span<const LetterId>(w.data(), w.size()));
      break;
    }
    case FKind::Not:
      v = !eval_canon(t, n.a);
      break;
    case FKind::Or:
      v = eval_canon(t, n.a) || eval_canon(t, n.b);
      break;
    case FKind::Next:
      v = eval_canon(run_.canon(t + 1), n.a);
      break;
    case FKind::Until: {
      std::unordered_set<std::size_t> visited;
      std::size_t p = t;
      while (true) {
        if (eval_canon(p, n.b)) {
          v = true;
          break;
        }
        if (!eval_canon(p, n.a)) break;
        if (!visited.insert(p).second) break;
        p = run_.canon(p + 1);
      }
      break;
    }
    case FKind::AbsNext: {
      auto succ = abstract_succ(run_, t, n.stack);
      v = succ && eval_canon(run_.canon(*succ), n.a);
      break;
    }
    case FKind::AbsUntil: {
      auto i0 = first_active_at_or_after(t, n.stack);
      if (!i0) break;
      std::unordered_set<std::size_t> visited;
      std::size_t p = run_.canon(*i0);
      while (true) {
        if (eval_canon(p, n.b)) {
          v = true;
          break;
        }
        if (!eval_canon(p, n.a)) break;
        if (!visited.insert(p).second) break;
        auto succ = abstract_succ(run_, p, n.stack);
        if (!succ) break;
        p = run_.canon(*succ);
      }
      break;
    }
    case FKind::CallerNext: {
      auto succ = caller_succ(run_, t, n.stack);
      v = succ && eval_canon(*succ, n.a);
      break;
    }
    case FKind::CallerUntil: {
      auto i0 = last_active_at_or_before(t, n.stack);
      if (!i0) break;
      std::size_t p = *i0;
      while (true) {
        if (eval_canon(p, n.b)) {
          v = true;
          break;
        }
        if (!eval_canon(p, n.a)) break;
        auto succ = caller_succ(run_, p, n.stack);
        if (!succ) break;
        p = *succ;
      }
      break;
    }
    case FKind::StackNext:
    case FKind::AbsNextAny:
    case FKind::AbsUntilAny:
      v = eval_canon(t, table_.rewrite_derived(f));
      break;
  }
  memo_.emplace(key, v);
  return v;
}

bool evaluate(FormulaTable& table, const LassoRun& run, std::size_t t, FormulaId f) {
  Evaluator ev(table, run);
  return ev.evaluate(t, f);
}

}  // namespace mcaret
