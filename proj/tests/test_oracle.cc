#include <doctest.h>

#include "helpers.hh"
#include "oracle.hh"

using namespace mcaret;
using namespace mcaret::testing;

TEST_CASE("explore: SYS1 with H = 2 has 3 configurations, no truncation") {
  EnhancedMpds sys = sys1();
  ConfigGraph g = explore(explore_system_of(sys), {2, 1000});
  CHECK(g.vertices.size() == 3);
  CHECK_FALSE(g.truncation_reachable());
}

TEST_CASE("explore: SYS2 is a three-configuration dead end") {
  // Both rules fire on top bot only, so each stack grows once and the run
  // stops: 3 reachable configurations and no truncation at H = 3.
  EnhancedMpds sys = sys2();
  ConfigGraph g = explore(explore_system_of(sys), {3, 1000});
  CHECK(g.vertices.size() == 3);
  CHECK_FALSE(g.truncation_reachable());
}

TEST_CASE("explore: a pumping system is truncated at the cutoff") {
  // One stack, calls forever: heights grow without bound.
  std::vector<Rule> rules{{0, kBottom, 0, 0, 0, ActionKind::Call, 1},
                          {0, 1, 0, 0, 0, ActionKind::Call, 1}};
  EnhancedMpds sys =
      EnhancedMpds::from_enhanced_rules({"g0"}, 1, {"bot", "a"}, rules, 0, 0);
  ConfigGraph g = explore(explore_system_of(sys), {3, 1000});
  CHECK(g.truncation_reachable());
}

TEST_CASE("explore: internal-only systems ignore the cutoff") {
  std::vector<Rule> rules{{0, kBottom, 0, 0, 0, ActionKind::Internal, kBottom}};
  EnhancedMpds sys = EnhancedMpds::from_enhanced_rules({"g0"}, 1, {"bot"}, rules, 0, 0);
  ConfigGraph g1 = explore(explore_system_of(sys), {1, 1000});
  ConfigGraph g8 = explore(explore_system_of(sys), {8, 1000});
  CHECK(g1.vertices.size() == g8.vertices.size());
}

TEST_CASE("explore: the vertex budget is a hard error") {
  std::vector<Rule> rules{{0, kBottom, 0, 0, 0, ActionKind::Call, 1},
                          {0, 1, 0, 0, 0, ActionKind::Call, 1}};
  EnhancedMpds sys =
      EnhancedMpds::from_enhanced_rules({"g0"}, 1, {"bot", "a"}, rules, 0, 0);
  CHECK_THROWS_WITH_AS(explore(explore_system_of(sys), {64, 4}),
                       doctest::Contains("budget"), McError);
}

TEST_CASE("find_accepting_lasso on SYS1: target cycles exist for k = 1") {
  EnhancedMpds sys = sys1();
  ConfigGraph g = explore(explore_system_of(sys), {4, 10000});
  std::vector<std::function<bool(uint64_t)>> preds{
      [&](uint64_t s) { return s == sys.init_state(); }};
  LassoSearch res = find_accepting_lasso(g, preds, 1);
  REQUIRE(res.answer == OracleAnswer::Yes);
  // Witness self-validation: the lasso replays under step().
  LassoRun run = to_base_lasso(sys, g, *res.lasso);
  CHECK(run.cycle_len() >= 1);
  bool target_in_cycle = false;
  for (std::size_t t_ = run.cycle_start; t_ < run.steps(); ++t_)
    if (run.configs[t_].state == sys.init_state()) target_in_cycle = true;
  CHECK(target_in_cycle);
}

TEST_CASE("find_accepting_lasso: acyclic graphs give no") {
  // One call and then a dead end; no cycles anywhere.
  std::vector<Rule> rules{{0, kBottom, 1, 0, 0, ActionKind::Call, 1}};
  EnhancedMpds sys = EnhancedMpds::from_enhanced_rules({"g0", "g1"}, 1, {"bot", "a"}, rules,
                                                       0, 0);
  ConfigGraph g = explore(explore_system_of(sys), {4, 1000});
  std::vector<std::function<bool(uint64_t)>> preds{[](uint64_t) { return true; }};
  CHECK(find_accepting_lasso(g, preds, 1).answer == OracleAnswer::No);
}

TEST_CASE("oracle_rep examples from the named systems") {
  EnhancedMpds s1 = sys1();
  CHECK(oracle_rep(s1, s1.init_state(), 1, {8, 100000}).answer == OracleAnswer::Yes);
  // SYS2: every infinite run switches forever; bounded search stays
  // inconclusive or no, and resolves to no via the switch-free-cycle argument.
  EnhancedMpds s2 = sys2();
  for (uint32_t k : {1u, 2u, 3u}) {
    auto res = oracle_rep(s2, s2.init_state(), k, {6, 100000});
    CHECK(res.answer == OracleAnswer::No);
  }
}

TEST_CASE("oracle_bmc on SYS1 and SYS2 micro-cases") {
  // SYS1, phi = (g0,1), k = 1: yes.
  {
    EnhancedMpds sys = sys1();
    FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
    Product prod(sys, t, t.state_atom(0, 0));
    auto res = oracle_bmc(prod, 1, {6, 200000});
    CHECK(res.answer == OracleAnswer::Yes);
    REQUIRE(res.witness.has_value());
    // Self-validating witness: every step satisfies the conditions and each
    // predicate is met in the cycle.
    const AugLasso& aug = *res.witness;
    for (std::size_t i = 0; i < aug.steps.size(); ++i)
      CHECK(prod.step_allowed(aug.configs[i], aug.steps[i], aug.configs[i + 1]));
    for (const auto& pred : prod.acceptance_family()) {
      bool hit = false;
      for (std::size_t i = aug.cycle_start; i < aug.steps.size(); ++i)
        if (pred.test(aug.configs[i].state)) hit = true;
      CHECK(hit);
    }
    // Lemma 4 on this witness: projecting and re-augmenting reproduces it.
    LassoRun base = prod.project(aug);
    base.validate();
    AugLasso again = prod.augment(base);
    REQUIRE(again.configs.size() == aug.configs.size());
    for (std::size_t i = 0; i < aug.configs.size(); ++i)
      CHECK(again.configs[i] == aug.configs[i]);
  }
  // SYS1, phi = Xa[1](g1,1), k = 1: yes.
  {
    EnhancedMpds sys = sys1();
    FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
    Product prod(sys, t, t.mk_abs_next(0, t.state_atom(1, 0)));
    CHECK(oracle_bmc(prod, 1, {6, 200000}).answer == OracleAnswer::Yes);
  }
  // SYS2: no for any phi and k <= 3 (here phi = (g0,1)).
  {
    EnhancedMpds sys = sys2();
    FormulaTable t({"g0"}, 2, sys.alphabet());
    Product prod(sys, t, t.state_atom(0, 0));
    for (uint32_t k : {1u, 2u, 3u})
      CHECK(oracle_bmc(prod, k, {5, 400000}).answer == OracleAnswer::No);
  }
}
