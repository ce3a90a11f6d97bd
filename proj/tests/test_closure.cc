#include <doctest.h>

#include <set>

#include "closure.hh"

using namespace mcaret;

namespace {

// Exhaustive subset filter over 2^|Cl|; the independent oracle for the lazy
// atom enumerator.
std::set<std::vector<uint64_t>> brute_force_atoms(const Closure& cl) {
  REQUIRE(cl.size() <= 20);
  std::set<std::vector<uint64_t>> out;
  for (uint64_t mask = 0; mask < (uint64_t{1} << cl.size()); ++mask) {
    AtomBits a;
    a.resize(cl.size());
    for (uint32_t i = 0; i < cl.size(); ++i) a.set(i, (mask >> i) & 1);
    if (cl.is_atom(a)) out.insert(a.words);
  }
  return out;
}

std::set<std::vector<uint64_t>> lazy_atoms(const Closure& cl) {
  std::set<std::vector<uint64_t>> out;
  for (uint64_t i = 0; i < cl.atom_count(); ++i) out.insert(cl.atom_at(i).words);
  return out;
}

}  // namespace

TEST_CASE("closure of a bare state atom") {
  FormulaTable t({"g0"}, 1, {"bot"});
  Closure cl(t, t.state_atom(0, 0));
  CHECK(cl.size() == 2);  // (g0,1) and its negation
  CHECK(cl.atom_count() == 1);
  AtomBits a = cl.atom_at(0);
  CHECK(a.get(cl.element_index(0, 0)));
}

TEST_CASE("closure of an until: fixed count 8") {
  FormulaTable t({"g0", "g1"}, 1, {"bot"});
  FormulaId f = t.mk_until(t.state_atom(0, 0), t.state_atom(1, 0));
  Closure cl(t, f);
  // {phi, X phi, (g0,1), (g1,1)} plus the four negations.
  CHECK(cl.size() == 8);
  CHECK(cl.index_of(t.mk_next(f)).has_value());
  // Atoms: element choice (2) x X-polarity (2); the until itself is forced.
  CHECK(cl.atom_count() == 4);
  CHECK(lazy_atoms(cl) == brute_force_atoms(cl));
}

TEST_CASE("no double negation in the closure") {
  FormulaTable t({"g0"}, 1, {"bot"});
  FormulaId p = t.state_atom(0, 0);
  Closure cl(t, t.mk_not(t.mk_not(p)));
  int neg_of_neg = 0;
  for (const auto& e : cl.entries())
    if (e.kind == FKind::Not && t.node(t.node(e.formula).a).kind == FKind::Not) ++neg_of_neg;
  // The root !!p itself is a member, but the closure rules never introduce a
  // second negation on a negated member.
  CHECK(neg_of_neg == 1);
}

TEST_CASE("abstract/caller untils contribute their unfolding members") {
  FormulaTable t({"g0", "g1"}, 2, {"bot", "a"});
  FormulaId p = t.state_atom(0, 0), q = t.state_atom(1, 1);
  FormulaId ua = t.mk_abs_until(1, p, q);
  Closure cla(t, ua);
  CHECK(cla.index_of(t.mk_abs_next(1, ua)).has_value());
  FormulaId uc = t.mk_caller_until(0, p, q);
  Closure clc(t, uc);
  CHECK(clc.index_of(t.mk_caller_next(0, uc)).has_value());
}

TEST_CASE("lazy atoms equal brute force on assorted formulas") {
  FormulaTable t({"g0", "g1"}, 2, {"bot", "a"});
  uint32_t empty_nfa = t.add_automaton("bots", Nfa(2, {0}, {1}, {{0, kBottom, 1}}));
  (void)empty_nfa;
  for (const char* text : {
           "g0@1",
           "g0@1 | !g1@2",
           "X g0@1",
           "g0@2 Ua[2] g1@2",
           "g0@1 Uc[1] g1@1",
           "in(1, bots) U g1@2",
       }) {
    CAPTURE(text);
    FormulaId f = parse_formula(t, text);
    Closure cl(t, f);
    if (cl.size() <= 16) CHECK(lazy_atoms(cl) == brute_force_atoms(cl));
    // No atom contains both psi and !psi.
    for (uint64_t i = 0; i < cl.atom_count(); ++i) {
      AtomBits a = cl.atom_at(i);
      for (const auto& e : cl.entries())
        if (e.kind != FKind::Not && e.neg >= 0)
          CHECK(a.get(cl.index_of(e.formula).value()) != a.get(e.neg));
    }
  }
}

TEST_CASE("closure size is linear: |Cl| <= 4|phi| + 2|G|N") {
  FormulaTable t({"g0", "g1", "g2"}, 2, {"bot", "a"});
  for (const char* text : {
           "g0@1",
           "g0@1 U g1@2",
           "(g0@1 U g1@1) U (g2@2 Ua[1] g0@2)",
           "X X X g0@1",
           "g0@1 Uc[2] (g1@1 Ua[2] g2@1)",
           "!(g0@1 | g1@1) U !g2@2",
       }) {
    CAPTURE(text);
    FormulaId f = parse_formula(t, text);
    Closure cl(t, f);
    CHECK(cl.size() <= 4 * t.size(f) + 2 * 3 * 2);
  }
}
