#include <doctest.h>

#include "helpers.hh"
#include "oracle.hh"
#include "solver.hh"

using namespace mcaret;
using namespace mcaret::testing;

TEST_CASE("brep_single: SYS1 target (g0,1), k = 1 is yes") {
  EnhancedMpds sys = sys1();
  Verdict v = brep_single(sys, sys.init_state(), 1);
  CHECK(v.yes);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->skeleton.size() == 1);
  CHECK(v.witness->skeleton[0].state == "(g0,1)");
  CHECK(v.stats.audit_ok);
}

TEST_CASE("brep_single: SYS2 is no for k up to 3") {
  EnhancedMpds sys = sys2();
  for (uint32_t k : {1u, 2u, 3u}) {
    Verdict v = brep_single(sys, sys.init_state(), k);
    CHECK_FALSE(v.yes);
    CHECK(v.stats.audit_ok);
  }
}

TEST_CASE("brep_single: k = 1 cannot reach a target on another stack") {
  // The target lives on stack 2 but k = 1 skeletons stay on stack 1.
  EnhancedMpds sys = sys2();
  Verdict v = brep_single(sys, sys.state_of(0, 1), 1);
  CHECK_FALSE(v.yes);
}

TEST_CASE("bmc micro-cases: SYS1 yes / SYS2 no") {
  {
    EnhancedMpds sys = sys1();
    FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
    Product prod(sys, t, t.state_atom(0, 0));
    Verdict v = bmc(prod, 1);
    CHECK(v.yes);
    CHECK(v.stats.audit_ok);
  }
  {
    EnhancedMpds sys = sys1();
    FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
    Product prod(sys, t, t.mk_abs_next(0, t.state_atom(1, 0)));
    Verdict v = bmc(prod, 1);
    CHECK(v.yes);
  }
  {
    EnhancedMpds sys = sys2();
    FormulaTable t({"g0"}, 2, sys.alphabet());
    Product prod(sys, t, t.state_atom(0, 0));
    for (uint32_t k : {1u, 2u, 3u}) CHECK_FALSE(bmc(prod, k).yes);
  }
}

TEST_CASE("bmc verdict is monotone in k on SYS1 variants") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  Product prod(sys, t, t.state_atom(0, 0));
  bool prev = bmc(prod, 1).yes;
  for (uint32_t k = 2; k <= 3; ++k) {
    bool cur = bmc(prod, k).yes;
    if (prev) CHECK(cur);
    prev = cur;
  }
}

TEST_CASE("bmc agrees with the oracle on the named instances") {
  {
    EnhancedMpds sys = sys1();
    FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
    Product prod(sys, t, t.state_atom(0, 0));
    Verdict v = bmc(prod, 1);
    auto o = oracle_bmc(prod, 1, {8, 500000});
    CHECK(cross_check(o.answer, v.yes) == Agreement::Agree);
  }
  {
    EnhancedMpds sys = sys2();
    FormulaTable t({"g0"}, 2, sys.alphabet());
    Product prod(sys, t, t.state_atom(0, 0));
    Verdict v = bmc(prod, 2);
    auto o = oracle_bmc(prod, 2, {5, 500000});
    CHECK(cross_check(o.answer, v.yes) == Agreement::Agree);
    CHECK_FALSE(v.yes);
  }
}

TEST_CASE("prepare: action atoms move into the global state") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  FormulaId f = parse_formula(t, "call & g0@1");
  Prepared p = prepare(sys, t, f);
  REQUIRE(p.owned_sys != nullptr);
  CHECK(p.sys->base_state_count() == 6);  // 2 states x 3 actions
  CHECK(p.sys->init_states().size() == 3);
  CHECK(p.table->is_simplified(p.root));

  // End to end: "the first action is a call" holds on SYS1 (k = 1).
  Product prod(*p.sys, *p.table, p.root);
  CHECK(bmc(prod, 1).yes);

  // "the first action is a return" is impossible from all-bottom stacks.
  FormulaId f2 = parse_formula(t, "ret");
  Prepared p2 = prepare(sys, t, f2);
  Product prod2(*p2.sys, *p2.table, p2.root);
  CHECK_FALSE(bmc(prod2, 1).yes);
}

TEST_CASE("prepare without action atoms reuses the inputs") {
  EnhancedMpds sys = sys1();
  FormulaTable t({"g0", "g1"}, 1, sys.alphabet());
  FormulaId f = parse_formula(t, "Xs[1] g1@1");
  Prepared p = prepare(sys, t, f);
  CHECK(p.owned_sys == nullptr);
  CHECK(p.sys == &sys);
  CHECK(p.table->is_simplified(p.root));
}
