#include "pauto.hh"

#include <algorithm>
#include <deque>
#include <memory>
#include <ostream>

namespace mcaret {

LazyPds materialize(std::vector<PdsRule> rules) {
  auto index = std::make_shared<std::map<std::pair<PdsState, PdsLetter>, std::vector<PdsRule>>>();
  for (const PdsRule& r : rules) (*index)[{r.from, r.top}].push_back(r);
  LazyPds pds;
  pds.rules_for = [index](PdsState p, PdsLetter a) -> std::vector<PdsRule> {
    auto it = index->find({p, a});
    if (it == index->end()) return {};
    return it->second;
  };
  return pds;
}

uint32_t PAutomaton::add_p_state(PdsState p) {
  auto it = p_index_.find(p);
  if (it != p_index_.end()) return it->second;
  uint32_t q = state_count();
  nodes_.push_back({Node::Kind::P, p, 0});
  accepting_.push_back(false);
  out_.emplace_back();
  eps_out_.emplace_back();
  eps_in_.emplace_back();
  p_index_.emplace(p, q);
  return q;
}

uint32_t PAutomaton::add_aux_state() {
  uint32_t q = state_count();
  nodes_.push_back({Node::Kind::Aux, 0, 0});
  accepting_.push_back(false);
  out_.emplace_back();
  eps_out_.emplace_back();
  eps_in_.emplace_back();
  return q;
}

uint32_t PAutomaton::add_mid_state(PdsState p, PdsLetter a) {
  auto it = mid_index_.find({p, a});
  if (it != mid_index_.end()) return it->second;
  uint32_t q = state_count();
  nodes_.push_back({Node::Kind::Mid, p, a});
  accepting_.push_back(false);
  out_.emplace_back();
  eps_out_.emplace_back();
  eps_in_.emplace_back();
  mid_index_.emplace(std::make_pair(p, a), q);
  return q;
}

std::optional<uint32_t> PAutomaton::find_p_state(PdsState p) const {
  auto it = p_index_.find(p);
  if (it == p_index_.end()) return std::nullopt;
  return it->second;
}

bool PAutomaton::add_transition(uint32_t from, PdsLetter letter, uint32_t to) {
  uint64_t key = (uint64_t(from) << 40) ^ (uint64_t(letter) << 20) ^ to;
  // Distinct triples must map to distinct keys; sizes stay far below 2^20.
  require(from < (1u << 20) && to < (1u << 20) && letter < (1u << 20),
          "automaton too large");
  if (!trans_set_.insert(key).second) return false;
  transitions_.emplace_back(from, letter, to);
  out_[from].emplace_back(letter, to);
  return true;
}

void PAutomaton::add_eps(uint32_t from, uint32_t to) {
  eps_out_[from].push_back(to);
  eps_in_[to].push_back(from);
}

void PAutomaton::mark_accepting(uint32_t q) { accepting_[q] = true; }

const std::vector<std::pair<PdsLetter, uint32_t>>& PAutomaton::outgoing(uint32_t q) const {
  return out_[q];
}

bool PAutomaton::accepts_word(PdsState p, std::span<const PdsLetter> w) const {
  auto start = find_p_state(p);
  if (!start) return false;
  auto eps_close = [&](std::vector<uint32_t>& set) {
    std::vector<bool> in(state_count(), false);
    std::deque<uint32_t> work(set.begin(), set.end());
    for (uint32_t q : set) in[q] = true;
    set.clear();
    while (!work.empty()) {
      uint32_t q = work.front();
      work.pop_front();
      set.push_back(q);
      for (uint32_t r : eps_out_[q])
        if (!in[r]) {
          in[r] = true;
          work.push_back(r);
        }
    }
  };
  std::vector<uint32_t> cur{*start};
  eps_close(cur);
  for (PdsLetter a : w) {
    std::vector<bool> seen(state_count(), false);
    std::vector<uint32_t> next;
    for (uint32_t q : cur)
      for (const auto& [y, r] : out_[q])
        if (y == a && !seen[r]) {
          seen[r] = true;
          next.push_back(r);
        }
    cur = std::move(next);
    if (cur.empty()) return false;
    eps_close(cur);
  }
  return std::any_of(cur.begin(), cur.end(), [&](uint32_t q) { return accepting_[q]; });
}

bool PAutomaton::accepts_config(PdsState p, std::span<const LetterId> stack) const {
  std::vector<PdsLetter> w(stack.rbegin(), stack.rend());
  return accepts_word(p, w);
}

std::vector<bool> PAutomaton::coaccessible() const {
  std::vector<std::vector<uint32_t>> rev(state_count());
  for (const auto& [from, letter, to] : transitions_) rev[to].push_back(from);
  std::vector<bool> co(state_count(), false);
  std::deque<uint32_t> work;
  for (uint32_t q = 0; q < state_count(); ++q)
    if (accepting_[q]) {
      co[q] = true;
      work.push_back(q);
    }
  while (!work.empty()) {
    uint32_t q = work.front();
    work.pop_front();
    for (uint32_t r : rev[q])
      if (!co[r]) {
        co[r] = true;
        work.push_back(r);
      }
    for (uint32_t r : eps_in_[q])
      if (!co[r]) {
        co[r] = true;
        work.push_back(r);
      }
  }
  return co;
}

bool PAutomaton::language_empty() const {
  auto co = coaccessible();
  for (uint32_t q = 0; q < state_count(); ++q)
    if (nodes_[q].kind == Node::Kind::P && co[q]) {
      if (accepting_[q]) return false;
      for (const auto& [letter, to] : out_[q])
        if (co[to]) return false;
      for (uint32_t r : eps_out_[q])
        if (co[r]) return false;
    }
  return true;
}

std::string PAutomaton::node_label(
    uint32_t q, const std::function<std::string(PdsState)>& state_name) const {
  const Node& n = nodes_[q];
  switch (n.kind) {
    case Node::Kind::P:
      return state_name ? state_name(n.pstate) : cat("p", n.pstate);
    case Node::Kind::Aux:
      return cat("q", q);
    case Node::Kind::Mid:
      return cat("m(", state_name ? state_name(n.pstate) : cat("p", n.pstate), ",", n.letter,
                 ")");
  }
  return "?";
}

void PAutomaton::dump(std::ostream& os, const std::function<std::string(PdsState)>& state_name,
                      const std::function<std::string(PdsLetter)>& letter_name) const {
  std::vector<std::string> lines;
  for (const auto& [from, letter, to] : transitions_) {
    lines.push_back(cat(node_label(from, state_name), " ",
                        letter_name ? letter_name(letter) : cat("a", letter), " ",
                        node_label(to, state_name)));
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << "\n";
  std::vector<std::string> acc;
  for (uint32_t q = 0; q < state_count(); ++q)
    if (accepting_[q]) acc.push_back(node_label(q, state_name));
  std::sort(acc.begin(), acc.end());
  os << "accepting:";
  for (const auto& a : acc) os << " " << a;
  os << "\n";
}

// ---------------------------------------------------------------------------
// post* saturation (worklist over transitions, FIFO)
// ---------------------------------------------------------------------------

PAutomaton post_star(const LazyPds& pds, const PAutomaton& input, SatStats* stats) {
  for (const auto& [from, letter, to] : input.transitions_)
    require(input.nodes_[to].kind != PAutomaton::Node::Kind::P,
            "post* input may not have transitions into control states");

  PAutomaton a = input;
  uint32_t before = a.state_count();

  std::deque<std::tuple<uint32_t, PdsLetter, uint32_t>> work(a.transitions_.begin(),
                                                             a.transitions_.end());
  std::unordered_set<uint64_t> processed;
  std::map<std::pair<PdsState, PdsLetter>, std::vector<PdsRule>> rule_cache;
  auto rules_of = [&](PdsState p, PdsLetter y) -> const std::vector<PdsRule>& {
    auto key = std::make_pair(p, y);
    auto it = rule_cache.find(key);
    if (it == rule_cache.end()) it = rule_cache.emplace(key, pds.rules_for(p, y)).first;
    return it->second;
  };

  auto push_work = [&](uint32_t f, PdsLetter y, uint32_t t) {
    if (a.add_transition(f, y, t)) work.emplace_back(f, y, t);
  };

  // eps edges found so far; adding one replays existing outgoing transitions.
  auto add_eps_edge = [&](uint32_t f, uint32_t t) {
    for (uint32_t seen : a.eps_out_[f])
      if (seen == t) return;
    a.add_eps(f, t);
    if (a.accepting_[t]) a.accepting_[f] = true;
    for (const auto& [y, to] : std::vector<std::pair<PdsLetter, uint32_t>>(a.out_[t]))
      push_work(f, y, to);
  };

  while (!work.empty()) {
    auto [from, letter, to] = work.front();
    work.pop_front();
    uint64_t key = (uint64_t(from) << 40) ^ (uint64_t(letter) << 20) ^ to;
    if (!processed.insert(key).second) continue;

    // New outgoing transition of `from`: replay epsilon predecessors.
    for (uint32_t e : a.eps_in_[from]) push_work(e, letter, to);

    if (a.nodes_[from].kind != PAutomaton::Node::Kind::P) continue;
    PdsState p = a.nodes_[from].pstate;
    for (const PdsRule& r : rules_of(p, letter)) {
      uint32_t target = a.add_p_state(r.to);
      switch (r.op) {
        case PdsOp::Replace:
          push_work(target, r.out, to);
          break;
        case PdsOp::Pop:
          add_eps_edge(target, to);
          break;
        case PdsOp::Push: {
          uint32_t mid = a.add_mid_state(r.to, r.out);
          push_work(target, r.out, mid);
          push_work(mid, letter, to);
          break;
        }
      }
    }
  }

  if (stats) {
    stats->post_star_calls++;
    uint64_t growth = a.state_count() - before;
    stats->states_added += growth;
    stats->max_op_growth = std::max(stats->max_op_growth, growth);
    stats->transitions_added += a.transitions_.size() - input.transitions_.size();
  }
  return a;
}

// ---------------------------------------------------------------------------
// pre* saturation (explicit rule list)
// ---------------------------------------------------------------------------

PAutomaton pre_star(const std::vector<PdsRule>& rules, const PAutomaton& input,
                    SatStats* stats) {
  PAutomaton a = input;
  uint32_t before = a.state_count();
  for (const PdsRule& r : rules) {
    a.add_p_state(r.from);
    a.add_p_state(r.to);
  }

  // Index rules by (to, out) for replace/push triggering.
  std::map<std::pair<PdsState, PdsLetter>, std::vector<const PdsRule*>> by_target;
  for (const PdsRule& r : rules)
    if (r.op != PdsOp::Pop) by_target[{r.to, r.out}].push_back(&r);

  std::deque<std::tuple<uint32_t, PdsLetter, uint32_t>> work;
  auto push_work = [&](uint32_t f, PdsLetter y, uint32_t t) {
    if (a.add_transition(f, y, t)) work.emplace_back(f, y, t);
  };
  for (const auto& t : a.transitions_) work.push_back(t);
  for (const PdsRule& r : rules)
    if (r.op == PdsOp::Pop) push_work(*a.find_p_state(r.from), r.top, *a.find_p_state(r.to));

  // Push rules with a matched first letter wait for the second: (q1, top) ->
  // pending sources.
  std::map<std::pair<uint32_t, PdsLetter>, std::vector<uint32_t>> pending;
  std::unordered_set<uint64_t> processed;

  while (!work.empty()) {
    auto [from, letter, to] = work.front();
    work.pop_front();
    uint64_t key = (uint64_t(from) << 40) ^ (uint64_t(letter) << 20) ^ to;
    if (!processed.insert(key).second) continue;

    if (a.nodes_[from].kind == PAutomaton::Node::Kind::P) {
      auto it = by_target.find({a.nodes_[from].pstate, letter});
      if (it != by_target.end()) {
        for (const PdsRule* r : it->second) {
          uint32_t src = *a.find_p_state(r->from);
          if (r->op == PdsOp::Replace) {
            push_work(src, r->top, to);
          } else {  // Push: need to --r->top--> w
            auto key2 = std::make_pair(to, r->top);
            auto& waiters = pending[key2];
            if (std::find(waiters.begin(), waiters.end(), src) == waiters.end())
              waiters.push_back(src);
            for (const auto& [y, w] : std::vector<std::pair<PdsLetter, uint32_t>>(a.out_[to]))
              if (y == r->top) push_work(src, r->top, w);
          }
        }
      }
    }
    auto itp = pending.find({from, letter});
    if (itp != pending.end()) {
      for (uint32_t src : itp->second) push_work(src, letter, to);
    }
  }

  if (stats) {
    stats->pre_star_calls++;
    uint64_t growth = a.state_count() - before;
    stats->states_added += growth;
    stats->max_op_growth = std::max(stats->max_op_growth, growth);
  }
  return a;
}

// ---------------------------------------------------------------------------
// FSA / PA conversions
// ---------------------------------------------------------------------------

Nfa fsa_of(const PAutomaton& a, PdsState p, SatStats* stats) {
  if (stats) {
    stats->fsa_calls++;
    stats->states_added += 1;  // the fresh initial state
    stats->max_op_growth = std::max<uint64_t>(stats->max_op_growth, 1);
  }
  auto start = a.find_p_state(p);
  Nfa empty(1, {0}, {}, {});
  if (!start) return empty;

  // Epsilon-closure of the root; transitions were materialized by post*, so
  // closures only matter for acceptance and the root's own out-edges.
  std::vector<uint32_t> root_closure{*start};
  std::vector<bool> in_closure(a.state_count(), false);
  in_closure[*start] = true;
  for (std::size_t i = 0; i < root_closure.size(); ++i) {
    uint32_t q = root_closure[i];
    for (uint32_t r : a.eps_out()[q])
      if (!in_closure[r]) {
        in_closure[r] = true;
        root_closure.push_back(r);
      }
  }

  uint32_t n = a.state_count();
  Nfa out(n + 1, {n}, {}, {});
  for (const auto& [from, letter, to] : a.transitions()) out.add_transition(from, letter, to);
  for (uint32_t q = 0; q < n; ++q)
    if (a.is_accepting(q)) out.add_accepting(q);
  bool root_accepting = false;
  for (uint32_t q : root_closure) {
    if (a.is_accepting(q)) root_accepting = true;
    for (const auto& [letter, to] : a.outgoing(q)) out.add_transition(n, letter, to);
  }
  if (root_accepting) out.add_accepting(n);
  return out.trimmed();
}

PAutomaton pa_of(const Nfa& b, PdsState p, std::span<const PdsState> all_p, SatStats* stats) {
  if (stats) stats->pa_calls++;
  require(b.initial().size() == 1, "pa_of requires a single-initial word automaton");
  uint32_t b_init = b.initial().front();
  for (const auto& t : b.transitions())
    require(t.to != b_init, "pa_of requires no transitions into the initial state");

  PAutomaton out;
  uint32_t root = out.add_p_state(p);
  for (PdsState q : all_p) out.add_p_state(q);
  std::vector<uint32_t> map(b.state_count(), UINT32_MAX);
  map[b_init] = root;
  for (uint32_t q = 0; q < b.state_count(); ++q)
    if (q != b_init) map[q] = out.add_aux_state();
  for (const auto& t : b.transitions()) out.add_transition(map[t.from], t.letter, map[t.to]);
  for (uint32_t q : b.accepting()) out.mark_accepting(map[q]);
  if (stats) {
    uint64_t growth =
        out.state_count() > b.state_count() ? out.state_count() - b.state_count() : 0;
    stats->states_added += growth;
    stats->max_op_growth = std::max(stats->max_op_growth, growth);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repeated-head detection
// ---------------------------------------------------------------------------

namespace {

struct HeadGraph {
  // nodes indexed densely; edges (to, flagged)
  std::vector<std::vector<std::pair<uint32_t, bool>>> edges;
};

// Tarjan SCC, iterative, deterministic.
std::vector<uint32_t> scc_of(const HeadGraph& g) {
  uint32_t n = static_cast<uint32_t>(g.edges.size());
  std::vector<uint32_t> comp(n, UINT32_MAX), low(n), disc(n, UINT32_MAX), stk;
  std::vector<bool> on_stack(n, false);
  uint32_t timer = 0, comp_count = 0;
  struct Frame {
    uint32_t v;
    std::size_t edge;
  };
  for (uint32_t root = 0; root < n; ++root) {
    if (disc[root] != UINT32_MAX) continue;
    std::vector<Frame> call_stack{{root, 0}};
    while (!call_stack.empty()) {
      Frame& f = call_stack.back();
      uint32_t v = f.v;
      if (f.edge == 0) {
        disc[v] = low[v] = timer++;
        stk.push_back(v);
        on_stack[v] = true;
      }
      if (f.edge < g.edges[v].size()) {
        uint32_t w = g.edges[v][f.edge].first;
        f.edge++;
        if (disc[w] == UINT32_MAX) {
          call_stack.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        if (low[v] == disc[v]) {
          while (true) {
            uint32_t w = stk.back();
            stk.pop_back();
            on_stack[w] = false;
            comp[w] = comp_count;
            if (w == v) break;
          }
          comp_count++;
        }
        call_stack.pop_back();
        if (!call_stack.empty()) {
          uint32_t parent = call_stack.back().v;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }
  return comp;
}

}  // namespace

bool repeated_head_infinite_run(const LazyPds& pds, const PAutomaton& a,
                                const std::function<bool(PdsState)>& target,
                                RepeatedHeadWitness* witness, SatStats* stats) {
  if (stats) stats->repeated_head_calls++;
  PAutomaton closed = post_star(pds, a, stats);

  // Reachable heads and the restricted rule set.
  std::map<std::pair<PdsState, PdsLetter>, uint32_t> head_index;
  std::vector<std::pair<PdsState, PdsLetter>> heads;
  std::vector<PdsRule> rules;
  std::unordered_set<uint64_t> rule_seen;
  auto head_of = [&](PdsState p, PdsLetter y) {
    auto it = head_index.find({p, y});
    if (it != head_index.end()) return it->second;
    uint32_t idx = static_cast<uint32_t>(heads.size());
    head_index.emplace(std::make_pair(p, y), idx);
    heads.emplace_back(p, y);
    return idx;
  };
  for (const auto& [from, letter, to] : closed.transitions()) {
    if (closed.node(from).kind != PAutomaton::Node::Kind::P) continue;
    uint32_t h = head_of(closed.node(from).pstate, letter);
    (void)h;
  }
  std::size_t head_count_snapshot = heads.size();
  for (std::size_t i = 0; i < head_count_snapshot; ++i) {
    auto [p, y] = heads[i];
    for (const PdsRule& r : pds.rules_for(p, y)) {
      std::size_t hsh = std::hash<PdsState>()(r.from);
      hash_mix(hsh, r.top);
      hash_mix(hsh, r.to);
      hash_mix(hsh, static_cast<std::size_t>(r.op));
      hash_mix(hsh, r.out);
      if (rule_seen.insert(hsh).second) rules.push_back(r);
    }
  }

  // Pop relations with a target-hit bit: pops[b] holds (p, y, q) facts meaning
  // (p, y) can be fully popped ending in control q; b records a target visit.
  struct Fact {
    uint32_t head;
    PdsState q;
    bool bit;
  };
  std::map<std::tuple<uint32_t, PdsState, bool>, bool> fact_seen;
  std::deque<Fact> fact_work;
  std::map<uint32_t, std::vector<std::pair<PdsState, bool>>> facts_by_head;
  auto add_fact = [&](uint32_t head, PdsState q, bool bit) {
    if (!fact_seen.emplace(std::make_tuple(head, q, bit), true).second) return;
    fact_work.push_back({head, q, bit});
    facts_by_head[head].emplace_back(q, bit);
  };

  std::map<std::pair<PdsState, PdsLetter>, std::vector<const PdsRule*>> replace_by_target,
      push_by_target;
  for (const PdsRule& r : rules) {
    if (r.op == PdsOp::Replace) replace_by_target[{r.to, r.out}].push_back(&r);
    if (r.op == PdsOp::Push) push_by_target[{r.to, r.out}].push_back(&r);
    if (r.op == PdsOp::Pop) add_fact(head_of(r.from, r.top), r.to, target(r.to));
  }

  // Partial joins for push rules: after (r.to, r.out) pops to q with bit b1,
  // wait for (q, r.top) popping to q2.
  std::map<std::pair<PdsState, PdsLetter>, std::vector<std::tuple<const PdsRule*, bool>>>
      partial;
  while (!fact_work.empty()) {
    Fact f = fact_work.front();
    fact_work.pop_front();
    auto [p, y] = heads[f.head];
    auto it = replace_by_target.find({p, y});
    if (it != replace_by_target.end())
      for (const PdsRule* r : it->second)
        add_fact(head_of(r->from, r->top), f.q, f.bit || target(r->to));
    auto itp = push_by_target.find({p, y});
    if (itp != push_by_target.end()) {
      for (const PdsRule* r : itp->second) {
        bool b1 = f.bit || target(r->to);
        partial[{f.q, r->top}].emplace_back(r, b1);
        auto known = facts_by_head.find(head_index.count({f.q, r->top})
                                            ? head_index[{f.q, r->top}]
                                            : UINT32_MAX);
        if (known != facts_by_head.end())
          for (const auto& [q2, b2] : std::vector<std::pair<PdsState, bool>>(known->second))
            add_fact(head_of(r->from, r->top), q2, b1 || b2);
      }
    }
    auto itw = partial.find({p, y});
    if (itw != partial.end()) {
      for (const auto& [r, b1] : std::vector<std::tuple<const PdsRule*, bool>>(itw->second))
        add_fact(head_of(r->from, r->top), f.q, b1 || f.bit);
    }
  }

  // Head graph: level-preserving moves plus call-and-resume edges.
  HeadGraph g;
  auto ensure_size = [&]() { g.edges.resize(heads.size()); };
  ensure_size();
  for (const PdsRule& r : rules) {
    uint32_t src = head_of(r.from, r.top);
    ensure_size();
    if (r.op == PdsOp::Replace) {
      uint32_t dst = head_of(r.to, r.out);
      ensure_size();
      g.edges[src].emplace_back(dst, target(r.to));
    } else if (r.op == PdsOp::Push) {
      uint32_t dst = head_of(r.to, r.out);
      ensure_size();
      g.edges[src].emplace_back(dst, target(r.to));
      auto callee = head_index.find({r.to, r.out});
      if (callee != head_index.end()) {
        auto facts = facts_by_head.find(callee->second);
        if (facts != facts_by_head.end()) {
          for (const auto& [q2, b2] : facts->second) {
            uint32_t resume = head_of(q2, r.top);
            ensure_size();
            g.edges[src].emplace_back(resume, target(r.to) || b2);
          }
        }
      }
    }
  }

  auto comp = scc_of(g);
  uint32_t n = static_cast<uint32_t>(g.edges.size());
  std::vector<bool> comp_flagged(n, false);
  for (uint32_t v = 0; v < n; ++v)
    for (const auto& [w, flag] : g.edges[v])
      if (comp[v] == comp[w] && flag) comp_flagged[comp[v]] = true;

  // GOOD = heads reaching a flagged component.
  std::vector<bool> good(n, false);
  for (uint32_t v = 0; v < n; ++v) good[v] = comp_flagged[comp[v]];
  // Reverse reachability over the head graph.
  std::vector<std::vector<uint32_t>> rev(n);
  for (uint32_t v = 0; v < n; ++v)
    for (const auto& [w, flag] : g.edges[v]) rev[w].push_back(v);
  std::deque<uint32_t> work;
  for (uint32_t v = 0; v < n; ++v)
    if (good[v]) work.push_back(v);
  while (!work.empty()) {
    uint32_t v = work.front();
    work.pop_front();
    for (uint32_t u : rev[v])
      if (!good[u]) {
        good[u] = true;
        work.push_back(u);
      }
  }

  // Some config in L(post*(A)) whose top head is GOOD?
  auto co = closed.coaccessible();
  for (const auto& [from, letter, to] : closed.transitions()) {
    if (closed.node(from).kind != PAutomaton::Node::Kind::P) continue;
    if (!co[to]) continue;
    auto it = head_index.find({closed.node(from).pstate, letter});
    if (it == head_index.end() || it->second >= n) continue;
    if (good[it->second]) {
      if (witness) {
        witness->head_state = closed.node(from).pstate;
        witness->head_letter = letter;
      }
      return true;
    }
  }
  return false;
}

}  // namespace mcaret
