#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hh"
#include "pauto.hh"

using namespace mcaret;
using namespace mcaret::testing;

namespace {

// A P-automaton accepting exactly one configuration (p, w) with w bottom-first.
PAutomaton single_config(PdsState p, std::vector<LetterId> stack_bottom_first) {
  PAutomaton a;
  uint32_t cur = a.add_p_state(p);
  for (auto it = stack_bottom_first.rbegin(); it != stack_bottom_first.rend(); ++it) {
    uint32_t next = a.add_aux_state();
    a.add_transition(cur, *it, next);
    cur = next;
  }
  a.mark_accepting(cur);
  return a;
}

std::vector<PdsRule> sys1_rules() {
  // Top-first view of SYS1's three reachable rules.
  return {
      {0, kBottom, 0, PdsOp::Push, 1, 0},    // (g0, bot) -> (g0, a bot)
      {0, 1, 1, PdsOp::Pop, 0, 1},           // (g0, a) -> (g1, eps)
      {1, kBottom, 0, PdsOp::Replace, 0, 2}  // (g1, bot) -> (g0, bot)
  };
}

// Forward BFS over configurations up to a height bound; the independent
// oracle for post* membership on push-acyclic systems.
std::vector<std::pair<PdsState, std::vector<PdsLetter>>> bfs_forward(
    const std::vector<PdsRule>& rules, PdsState p0, std::vector<PdsLetter> w0_topfirst,
    std::size_t max_height, std::size_t max_nodes = 200000) {
  std::vector<std::pair<PdsState, std::vector<PdsLetter>>> all{{p0, w0_topfirst}};
  std::size_t head = 0;
  while (head < all.size() && all.size() < max_nodes) {
    auto [p, w] = all[head++];
    if (w.empty()) continue;
    for (const PdsRule& r : rules) {
      if (r.from != p || r.top != w.front()) continue;
      std::vector<PdsLetter> w2;
      switch (r.op) {
        case PdsOp::Push:
          w2.push_back(r.out);
          w2.insert(w2.end(), w.begin(), w.end());
          break;
        case PdsOp::Replace:
          w2 = w;
          w2.front() = r.out;
          break;
        case PdsOp::Pop:
          w2.assign(w.begin() + 1, w.end());
          break;
      }
      if (w2.size() > max_height) continue;
      auto item = std::make_pair(r.to, w2);
      bool seen = false;
      for (const auto& x : all)
        if (x == item) seen = true;
      if (!seen) all.push_back(std::move(item));
    }
  }
  return all;
}

}  // namespace

TEST_CASE("post*: no rules is the identity on the language") {
  PAutomaton a = single_config(7, {kBottom, 1});
  LazyPds pds = materialize({});
  PAutomaton b = post_star(pds, a);
  std::vector<LetterId> w{kBottom, 1};
  CHECK(b.accepts_config(7, w));
  std::vector<LetterId> v{kBottom};
  CHECK_FALSE(b.accepts_config(7, v));
  CHECK(b.state_count() == a.state_count());
}

TEST_CASE("post*: a single internal rule adds exactly the successor") {
  std::vector<PdsRule> rules{{0, 1, 1, PdsOp::Replace, 2, 0}};
  PAutomaton a = single_config(0, {kBottom, 1});
  PAutomaton b = post_star(materialize(rules), a);
  std::vector<LetterId> w1{kBottom, 1}, w2{kBottom, 2};
  CHECK(b.accepts_config(0, w1));
  CHECK(b.accepts_config(1, w2));
  CHECK_FALSE(b.accepts_config(1, w1));
  CHECK_FALSE(b.accepts_config(0, w2));
}

TEST_CASE("pre*: no rules is the identity; a return rule adds predecessors") {
  std::vector<PdsRule> none;
  PAutomaton a = single_config(1, {kBottom});
  PAutomaton b = pre_star(none, a);
  std::vector<LetterId> w{kBottom};
  CHECK(b.accepts_config(1, w));

  std::vector<PdsRule> rules{{0, 1, 1, PdsOp::Pop, 0, 0}};
  PAutomaton c = pre_star(rules, a);
  std::vector<LetterId> wa{kBottom, 1};
  CHECK(c.accepts_config(0, wa));
  CHECK(c.accepts_config(1, w));
}

TEST_CASE("pre* is idempotent") {
  auto rules = sys1_rules();
  PAutomaton a = single_config(0, {kBottom});
  PAutomaton b = pre_star(rules, a);
  PAutomaton c = pre_star(rules, b);
  std::vector<std::vector<LetterId>> words{{kBottom}, {1, kBottom}, {1, 1, kBottom}};
  for (PdsState p : {uint64_t{0}, uint64_t{1}})
    for (const auto& w : words) {
      std::span<const PdsLetter> sw(w.data(), w.size());
      CHECK(b.accepts_word(p, sw) == c.accepts_word(p, sw));
    }
}

TEST_CASE("post*/pre* duality and BFS agreement on random systems") {
  std::mt19937_64 rng(20240811);
  for (int iter = 0; iter < 60; ++iter) {
    uint32_t n_states = 2 + rng() % 3;
    uint32_t n_letters = 2 + rng() % 2;  // including bot
    uint32_t n_rules = 2 + rng() % 7;
    std::vector<PdsRule> rules;
    bool acyclic_push = iter % 2 == 0;
    for (uint32_t i = 0; i < n_rules; ++i) {
      PdsRule r;
      r.from = rng() % n_states;
      r.top = rng() % n_letters;
      r.to = rng() % n_states;
      switch (rng() % 3) {
        case 0: {
          r.op = PdsOp::Push;
          uint32_t lo = acyclic_push ? r.top + 1 : 1;
          if (lo >= n_letters) {
            r.op = PdsOp::Replace;
            r.out = r.top;
            break;
          }
          r.out = lo + rng() % (n_letters - lo);
          break;
        }
        case 1:
          r.op = PdsOp::Replace;
          r.out = r.top == kBottom ? kBottom : 1 + rng() % (n_letters - 1);
          break;
        default:
          if (r.top == kBottom) {
            r.op = PdsOp::Replace;
            r.out = kBottom;
          } else {
            r.op = PdsOp::Pop;
            r.out = r.top;
          }
      }
      r.tag = i;
      rules.push_back(r);
    }

    auto random_config = [&]() {
      std::vector<PdsLetter> w;
      uint32_t extra = rng() % 3;
      for (uint32_t i = 0; i < extra; ++i) w.push_back(1 + rng() % (n_letters - 1));
      w.push_back(kBottom);
      return std::make_pair(PdsState(rng() % n_states), w);
    };
    for (int pair = 0; pair < 8; ++pair) {
      auto [p, w] = random_config();
      auto [q, v] = random_config();
      PAutomaton from;
      {
        uint32_t cur = from.add_p_state(p);
        for (PdsLetter a : w) {
          uint32_t nxt = from.add_aux_state();
          from.add_transition(cur, a, nxt);
          cur = nxt;
        }
        from.mark_accepting(cur);
      }
      PAutomaton to;
      {
        uint32_t cur = to.add_p_state(q);
        for (PdsLetter a : v) {
          uint32_t nxt = to.add_aux_state();
          to.add_transition(cur, a, nxt);
          cur = nxt;
        }
        to.mark_accepting(cur);
      }
      PAutomaton fwd = post_star(materialize(rules), from);
      PAutomaton bwd = pre_star(rules, to);
      std::span<const PdsLetter> sv(v.data(), v.size());
      std::span<const PdsLetter> sw(w.data(), w.size());
      bool post_hit = fwd.accepts_word(q, sv);
      bool pre_hit = bwd.accepts_word(p, sw);
      CHECK(post_hit == pre_hit);

      if (acyclic_push) {
        auto reach = bfs_forward(rules, p, w, 4 + w.size());
        bool bfs_hit = false;
        for (const auto& [rp, rw] : reach)
          if (rp == q && rw == v) bfs_hit = true;
        CHECK(bfs_hit == post_hit);
      }
    }
  }
}

TEST_CASE("fsa_of / pa_of compose to the identity") {
  Nfa b(3, {0}, {2}, {{0, kBottom, 1}, {1, 1, 2}, {2, 1, 2}});
  std::vector<PdsState> all_p{0, 1, 2};
  PAutomaton pa = pa_of(b, 1, all_p);
  std::vector<PdsLetter> w{kBottom, 1};
  CHECK(pa.accepts_word(1, w));
  CHECK_FALSE(pa.accepts_word(0, w));
  CHECK_FALSE(pa.accepts_word(2, w));
  Nfa back = fsa_of(pa, 1);
  for (const auto& word : std::vector<std::vector<LetterId>>{
           {kBottom}, {kBottom, 1}, {kBottom, 1, 1}, {1}, {}}) {
    std::span<const LetterId> sw(word.data(), word.size());
    CHECK(back.accepts(sw) == b.accepts(sw));
  }
  SatStats st;
  PAutomaton pa2 = pa_of(b, 1, all_p, &st);
  CHECK(st.max_op_growth <= all_p.size());
}

TEST_CASE("repeated head: immediate self-loop") {
  std::vector<PdsRule> rules{{0, kBottom, 0, PdsOp::Replace, kBottom, 0}};
  PAutomaton a = single_config(0, {kBottom});
  CHECK(repeated_head_infinite_run(materialize(rules), a,
                                   [](PdsState p) { return p == 0; }));
  CHECK_FALSE(repeated_head_infinite_run(materialize(rules), a,
                                         [](PdsState p) { return p == 9; }));
}

TEST_CASE("repeated head: all-return systems have no infinite runs") {
  std::vector<PdsRule> rules{{0, 1, 0, PdsOp::Pop, 1, 0}, {0, 2, 1, PdsOp::Pop, 2, 1}};
  PAutomaton a = single_config(0, {kBottom, 1, 1, 2});
  CHECK_FALSE(repeated_head_infinite_run(materialize(rules), a,
                                         [](PdsState) { return true; }));
}

TEST_CASE("repeated head on SYS1's stack projection") {
  PAutomaton a = single_config(0, {kBottom});
  RepeatedHeadWitness w;
  CHECK(repeated_head_infinite_run(materialize(sys1_rules()), a,
                                   [](PdsState p) { return p == 0; }, &w));
  CHECK(w.head_letter == kBottom);
  CHECK(repeated_head_infinite_run(materialize(sys1_rules()), a,
                                   [](PdsState p) { return p == 1; }));
}

TEST_CASE("post* growth obeys the additive state bound") {
  SatStats st;
  PAutomaton a = single_config(0, {kBottom});
  PAutomaton b = post_star(materialize(sys1_rules()), a, &st);
  CHECK(st.max_op_growth <= 2 * 2);  // |P| x |Gamma| here
  CHECK(b.state_count() <= a.state_count() + 2 * 2);
  std::vector<LetterId> w{kBottom, 1};
  CHECK(b.accepts_config(0, w));
  std::vector<LetterId> v{kBottom};
  CHECK(b.accepts_config(1, v));
}

TEST_CASE("golden dump of a saturated automaton") {
  PAutomaton a = single_config(0, {kBottom});
  PAutomaton b = post_star(materialize(sys1_rules()), a);
  std::ostringstream os;
  b.dump(
      os, [](PdsState p) { return p == 0 ? std::string("g0") : std::string("g1"); },
      [](PdsLetter l) { return l == 0 ? std::string("bot") : std::string("a"); });
  CHECK(os.str() ==
        "g0 a m(g0,1)\n"
        "g0 bot q1\n"
        "g1 bot q1\n"
        "m(g0,1) bot q1\n"
        "accepting: q1\n");
}
