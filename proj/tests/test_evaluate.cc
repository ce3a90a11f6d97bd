#include <doctest.h>

#include "helpers.hh"
#include "lasso.hh"

using namespace mcaret;
using namespace mcaret::testing;

TEST_CASE("abstract successor on the SYS1 lasso") {
  EnhancedMpds sys = sys1();
  LassoRun run = sys1_lasso(sys);
  // t=0 is the call; the first later position with stack 1 back at height 1
  // is t=2.
  CHECK(abstract_succ(run, 0, 0) == std::optional<std::size_t>{2});
  // t=2 is internal: the next active position.
  CHECK(abstract_succ(run, 2, 0) == std::optional<std::size_t>{3});
  // t=1 is the return: undefined.
  CHECK_FALSE(abstract_succ(run, 1, 0).has_value());
}

TEST_CASE("caller successor on the SYS1 lasso") {
  EnhancedMpds sys = sys1();
  LassoRun run = sys1_lasso(sys);
  // At t=1 the stack is [bot a]; the caller is the call at t=0.
  CHECK(caller_succ(run, 1, 0) == std::optional<std::size_t>{0});
  // At bottom height there is no caller.
  CHECK_FALSE(caller_succ(run, 0, 0).has_value());
  CHECK_FALSE(caller_succ(run, 2, 0).has_value());
}

TEST_CASE("evaluate on the SYS1 lasso") {
  EnhancedMpds sys = sys1();
  LassoRun run = sys1_lasso(sys);
  std::vector<std::string> names{"g0", "g1"};
  FormulaTable t(names, 1, sys.alphabet());
  Evaluator ev(t, run);

  FormulaId g0 = t.state_atom(0, 0);
  FormulaId g1 = t.state_atom(1, 0);
  CHECK(ev.evaluate(0, t.mk_and(g0, t.mk_next(g0))));
  CHECK(ev.evaluate(0, t.mk_abs_next(0, g1)));
  CHECK_FALSE(ev.evaluate(2, t.mk_abs_next(0, g1)));
  // Tautology.
  CHECK(ev.evaluate(0, t.mk_or(g0, t.mk_not(g0))));
  // Until and actions.
  CHECK(ev.evaluate(0, t.mk_until(g0, g1)));
  CHECK(ev.evaluate(0, t.action_atom(ActionKind::Call)));
  CHECK(ev.evaluate(1, t.action_atom(ActionKind::Return)));
  CHECK(ev.evaluate(2, t.action_atom(ActionKind::Internal)));
  // G g0 fails (g1 occurs), F g1 holds.
  CHECK_FALSE(ev.evaluate(0, t.mk_globally(g0)));
  CHECK(ev.evaluate(0, t.mk_eventually(g1)));
  // Positions beyond the cycle fold back.
  CHECK(ev.evaluate(3, g0));
  CHECK(ev.evaluate(5, g1));
}

TEST_CASE("regularity constraints read the stack bottom-up") {
  EnhancedMpds sys = sys1();
  LassoRun run = sys1_lasso(sys);
  std::vector<std::string> names{"g0", "g1"};
  FormulaTable t(names, 1, sys.alphabet());
  // Accepts exactly the word "bot".
  t.add_automaton("empty", Nfa(2, {0}, {1}, {{0, kBottom, 1}}));
  // Accepts "bot a".
  t.add_automaton("one", Nfa(3, {0}, {2}, {{0, kBottom, 1}, {1, 1, 2}}));
  Evaluator ev(t, run);
  FormulaId in_empty = t.reg_atom(0, 0);
  FormulaId in_one = t.reg_atom(0, 1);
  CHECK(ev.evaluate(0, in_empty));
  CHECK_FALSE(ev.evaluate(1, in_empty));
  CHECK(ev.evaluate(1, in_one));
  CHECK(ev.evaluate(2, in_empty));
}

TEST_CASE("derived operators evaluate through their rewrites") {
  EnhancedMpds sys = sys1();
  LassoRun run = sys1_lasso(sys);
  std::vector<std::string> names{"g0", "g1"};
  FormulaTable t(names, 1, sys.alphabet());
  Evaluator ev(t, run);
  FormulaId g1f = t.state_atom(1, 0);
  for (FormulaId f : {t.mk_stack_next(0, g1f), t.mk_abs_next_any(g1f),
                      t.mk_abs_until_any(t.state_atom(0, 0), g1f)}) {
    for (std::size_t pos = 0; pos < run.steps(); ++pos)
      CHECK(ev.evaluate(pos, f) == ev.evaluate(pos, t.rewrite_derived(f)));
  }
}

TEST_CASE("U^a_s with the parameter stack never active again is false") {
  // Two stacks; stack 2 is never active. Build a one-state internal loop on
  // stack 1 as an enhanced system.
  std::vector<Rule> rules{{0, kBottom, 0, 0, 0, ActionKind::Internal, kBottom}};
  EnhancedMpds sys = EnhancedMpds::from_enhanced_rules({"g0"}, 2, {"bot"}, rules, 0, 0);
  LassoRun run;
  run.sys = &sys;
  run.cycle_start = 0;
  Config c = sys.initial_config();
  run.configs = {c, c};
  run.rule_ids = {0};
  run.validate();
  FormulaTable t({"g0"}, 2, sys.alphabet());
  Evaluator ev(t, run);
  FormulaId taut = t.mk_true();
  CHECK_FALSE(ev.evaluate(0, t.mk_abs_until(1, taut, taut)));
  CHECK(ev.evaluate(0, t.mk_abs_until(0, taut, taut)));
}

TEST_CASE("lasso validation rejects non-closing cycles") {
  EnhancedMpds sys = sys1();
  LassoRun run;
  run.sys = &sys;
  run.cycle_start = 0;
  Config c = sys.initial_config();
  run.configs = {c, step(c, sys.rule(0), 1)};
  run.rule_ids = {0};
  CHECK_THROWS_AS(run.validate(), McError);
}
