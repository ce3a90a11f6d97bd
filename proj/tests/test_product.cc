#include <doctest.h>

#include "helpers.hh"
#include "oracle.hh"
#include "product.hh"

using namespace mcaret;
using namespace mcaret::testing;

namespace {

EnhancedMpds internal_loop() {
  // One state, one stack, a single internal self-loop on bot.
  std::vector<Rule> rules{{0, kBottom, 0, 0, 0, ActionKind::Internal, kBottom}};
  return EnhancedMpds::from_enhanced_rules({"g0"}, 1, {"bot"}, rules, 0, 0);
}

}  // namespace

TEST_CASE("internal loop with phi = (g0,1): unique initial state, one successor") {
  EnhancedMpds sys = internal_loop();
  FormulaTable t({"g0"}, 1, sys.alphabet());
  Product prod(sys, t, t.state_atom(0, 0));
  auto inits = prod.initial_states();
  REQUIRE(inits.size() == 1);
  const AugStateData& st = prod.state(inits[0]);
  CHECK(st.active == 0);
  CHECK_FALSE(st.dead(0));
  CHECK_FALSE(st.willreturn(0));
  auto rules = prod.rules(inits[0], prod.bottom_letter(0));
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].to == inits[0]);  // the product loops on the same state
  CHECK(rules[0].kind == ActionKind::Internal);
}

TEST_CASE("acceptance family: counts and the dead disjuncts") {
  EnhancedMpds sys = sys2();
  FormulaTable t({"g0"}, 2, sys.alphabet());
  // phi with no untils over N = 2: exactly F3_1, F3_2, F4_1, F4_2.
  Product prod(sys, t, t.state_atom(0, 0));
  auto fam = prod.acceptance_family();
  REQUIRE(fam.size() == 4);
  CHECK(fam[0].name == "F3:1");
  CHECK(fam[3].name == "F4:2");

  // A state with stack 2 dead satisfies F3_2 and F4_2.
  auto inits = prod.initial_states();
  bool saw_dead = false;
  for (AugStateId id : inits) {
    if (prod.state(id).dead(1)) {
      saw_dead = true;
      CHECK(fam[1].test(id));
      CHECK(fam[3].test(id));
    }
  }
  CHECK(saw_dead);
}

TEST_CASE("acceptance family: F1 needs the until discharged") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  FormulaId p = t.state_atom(0, 0), q = t.state_atom(1, 0);
  FormulaId until = t.mk_until(p, q);
  Product prod(sys, t, until);
  auto fam = prod.acceptance_family();
  // 1 until + 0 abstract-untils + 2*1 stacks.
  REQUIRE(fam.size() == 3);
  CHECK(fam[0].name.substr(0, 3) == "F1:");
  // An initial state whose atom has the until pending (q false, p true, X psi
  // true) does not satisfy F1.
  bool checked = false;
  for (AugStateId id : prod.initial_states()) {
    const AugStateData& st = prod.state(id);
    const Closure& cl = prod.closure();
    uint32_t uidx = cl.index_of(until).value();
    uint32_t qidx = cl.index_of(q).value();
    if (prod.atom_table().get(st.atoms[0], uidx) &&
        !prod.atom_table().get(st.atoms[0], qidx)) {
      CHECK_FALSE(fam[0].test(id));
      checked = true;
    }
  }
  CHECK(checked);
}

TEST_CASE("initial states: the root must sit in the initial stack's atom") {
  EnhancedMpds sys = sys1();  // init g0
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  // phi = (g1,1): atoms contain exactly one state atom, so no initial atom
  // can carry both (g0,1) and (g1,1).
  Product prod(sys, t, t.state_atom(1, 0));
  CHECK(prod.initial_states().empty());

  FormulaTable t2({"g0", "g1"}, 1, sys.alphabet());
  Product prod2(sys, t2, t2.state_atom(0, 0));
  CHECK_FALSE(prod2.initial_states().empty());
  for (AugStateId id : prod2.initial_states()) {
    CHECK_FALSE(prod2.state(id).dead(0));
    CHECK_FALSE(prod2.state(id).willreturn(0));  // bottom frames never return
  }
}

TEST_CASE("gamma on the SYS1 lasso: tags, atoms, and Lemma 3 on this instance") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  FormulaId phi = t.mk_abs_next(0, t.state_atom(1, 0));  // Xa[1] (g1,1)
  Product prod(sys, t, phi);
  LassoRun run = sys1_lasso(sys);
  AugLasso aug = prod.augment(run);

  REQUIRE(aug.configs.size() == 4);
  // Heights never drop below 1, so the bottom frames carry noreturn; the
  // pushed frame at t=1 will return.
  CHECK_FALSE(prod.state(aug.configs[0].state).willreturn(0));
  CHECK(prod.state(aug.configs[1].state).willreturn(0));
  CHECK_FALSE(prod.state(aug.configs[2].state).willreturn(0));
  for (const AugConfig& c : aug.configs) CHECK_FALSE(prod.state(c.state).dead(0));

  // phi holds exactly at the call position.
  const Closure& cl = prod.closure();
  uint32_t phi_idx = cl.index_of(phi).value();
  auto holds = [&](std::size_t t_) {
    const AugStateData& st = prod.state(aug.configs[t_].state);
    return prod.atom_table().get(st.atoms[0], phi_idx);
  };
  CHECK(holds(0));
  CHECK_FALSE(holds(1));
  CHECK_FALSE(holds(2));

  // Every step of gamma(rho) satisfies the transition conditions.
  for (std::size_t i = 0; i < aug.steps.size(); ++i)
    CHECK(prod.step_allowed(aug.configs[i], aug.steps[i], aug.configs[i + 1]));

  // The cycle meets every acceptance predicate.
  for (const auto& pred : prod.acceptance_family()) {
    bool hit = false;
    for (std::size_t i = aug.cycle_start; i < aug.steps.size(); ++i)
      if (pred.test(aug.configs[i].state)) hit = true;
    CAPTURE(pred.name);
    CHECK(hit);
  }

  // Projection forgets augmentations exactly.
  LassoRun back = prod.project(aug);
  back.validate();
  CHECK(back.configs.size() == run.configs.size());
  for (std::size_t i = 0; i < run.configs.size(); ++i)
    CHECK(back.configs[i] == run.configs[i]);

  // Theorem 5 (A): identical active and action sequences.
  CHECK(back.active_prefix() == run.active_prefix());
  CHECK(back.active_cycle() == run.active_cycle());
  CHECK(back.action_cycle() == run.action_cycle());

  // Re-augmenting the projection reproduces the augmented lasso.
  AugLasso again = prod.augment(back);
  REQUIRE(again.configs.size() == aug.configs.size());
  for (std::size_t i = 0; i < aug.configs.size(); ++i)
    CHECK(again.configs[i] == aug.configs[i]);
}

TEST_CASE("frame property: a step on stack s leaves other stacks' components") {
  EnhancedMpds sys = sys2();
  FormulaTable t({"g0"}, 2, sys.alphabet());
  Product prod(sys, t, t.state_atom(0, 0));
  for (AugStateId id : prod.initial_states()) {
    StackIndex s = prod.state(id).active;
    for (const ProductRule& r : prod.rules(id, prod.bottom_letter(s))) {
      const AugStateData& before = prod.state(id);
      const AugStateData& after = prod.state(r.to);
      for (StackIndex j = 0; j < 2; ++j) {
        if (j == s) continue;
        CHECK(before.atoms[j] == after.atoms[j]);
        CHECK(before.willreturn(j) == after.willreturn(j));
        CHECK(before.dead(j) == after.dead(j));
      }
    }
  }
}

TEST_CASE("no successor ever dies with pending abstract-next obligations") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  FormulaId phi = t.mk_abs_next(0, t.state_atom(1, 0));
  Product prod(sys, t, phi);
  const Closure& cl = prod.closure();
  // Walk the entire reachable product graph and check the invariant on every
  // generated transition.
  ExploreLimits limits{4, 100000};
  ConfigGraph g = explore(explore_system_of(prod), limits);
  int steps = 0;
  for (uint32_t v = 0; v < g.vertices.size(); ++v) {
    AugStateId from = static_cast<AugStateId>(g.vertices[v].state);
    for (const auto& [e, w] : g.edges[v]) {
      AugStateId to = static_cast<AugStateId>(g.vertices[w].state);
      ++steps;
      StackIndex s = prod.state(from).active;
      if (prod.state(to).dead(s)) {
        for (uint32_t idx : cl.abs_next_members(s))
          CHECK_FALSE(prod.atom_table().get(prod.state(from).atoms[s], idx));
      }
      if (e.action == ActionKind::Return) {
        // The restored tag equals the popped letter's tag: visible as the
        // target's tag given the letter below, checked via step_allowed in
        // the gamma test; here we at least require the pre-tag promised it.
        CHECK(prod.state(from).willreturn(s));
      }
    }
  }
  CHECK(steps > 0);
}

TEST_CASE("regularity tracking: snapshots save and restore") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  // Complete DFA accepting exactly "bot": after one call the constraint
  // fails, after the matching return it holds again.
  t.add_automaton("empty", Nfa(3, {0}, {1},
                               {{0, kBottom, 1},
                                {0, 1, 2},
                                {1, kBottom, 2},
                                {1, 1, 2},
                                {2, kBottom, 2},
                                {2, 1, 2}}));
  FormulaId phi = t.mk_until(t.mk_true(), t.reg_atom(0, 0));  // F in(1, empty)
  Product prod(sys, t, phi);
  REQUIRE(prod.reg_constraints().size() == 1);
  const RegConstraint& c = prod.reg_constraints()[0];

  LassoRun run = sys1_lasso(sys);
  AugLasso aug = prod.augment(run);
  auto holds = [&](std::size_t pos) {
    return (prod.state(aug.configs[pos].state).reg[0] & c.accepting_set) != 0;
  };
  CHECK(holds(0));
  CHECK_FALSE(holds(1));  // content bot a
  CHECK(holds(2));        // restored after the pop
  CHECK(holds(3));
  // Deterministic automaton: the tracked set is always a singleton.
  for (const AugConfig& cfg : aug.configs) {
    uint64_t x = prod.state(cfg.state).reg[0];
    CHECK(__builtin_popcountll(x) == 1);
  }
  // Lemma 3 still holds with the tracker attached.
  for (std::size_t i = 0; i < aug.steps.size(); ++i)
    CHECK(prod.step_allowed(aug.configs[i], aug.steps[i], aug.configs[i + 1]));
}
