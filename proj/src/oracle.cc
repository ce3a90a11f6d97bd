#include "oracle.hh"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace mcaret {

namespace {

struct OracleConfigHash {
  std::size_t operator()(const OracleConfig& c) const {
    std::size_t h = std::hash<uint64_t>()(c.state);
    for (const auto& w : c.stacks) {
      hash_mix(h, w.size());
      for (uint64_t a : w) hash_mix(h, static_cast<std::size_t>(a));
    }
    return h;
  }
};

}  // namespace

bool ConfigGraph::truncation_reachable() const {
  return std::find(truncated.begin(), truncated.end(), true) != truncated.end();
}

ConfigGraph explore(const ExploreSystem& sys, const ExploreLimits& limits) {
  ConfigGraph g;
  g.stack_count = sys.stack_count;
  std::unordered_map<OracleConfig, uint32_t, OracleConfigHash> index;
  std::deque<uint32_t> work;
  auto add_vertex = [&](const OracleConfig& c) {
    auto it = index.find(c);
    if (it != index.end()) return it->second;
    require(g.vertices.size() < limits.vertex_budget, "oracle vertex budget exceeded");
    uint32_t v = static_cast<uint32_t>(g.vertices.size());
    g.vertices.push_back(c);
    g.edges.emplace_back();
    g.truncated.push_back(false);
    index.emplace(c, v);
    work.push_back(v);
    return v;
  };
  for (const auto& c : sys.initial) g.initial.push_back(add_vertex(c));
  while (!work.empty()) {
    uint32_t v = work.front();
    work.pop_front();
    auto succ = sys.successors(g.vertices[v]);
    for (auto& [edge, next] : succ) {
      bool over = false;
      for (const auto& w : next.stacks)
        if (w.size() > limits.height_cutoff) over = true;
      if (over) {
        g.truncated[v] = true;
        continue;
      }
      uint32_t u = add_vertex(next);
      g.edges[v].emplace_back(edge, u);
    }
  }
  return g;
}

namespace {

// Strongly connected components of the stack-j edge subgraph (or of the whole
// graph when j is empty). Iterative Tarjan.
std::vector<uint32_t> scc_subgraph(const ConfigGraph& g, std::optional<StackIndex> j) {
  uint32_t n = static_cast<uint32_t>(g.vertices.size());
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
      if (f.edge == 0 && disc[v] == UINT32_MAX) {
        disc[v] = low[v] = timer++;
        stk.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (f.edge < g.edges[v].size()) {
        const auto& [e, w] = g.edges[v][f.edge];
        f.edge++;
        if (j && e.stack != *j) continue;
        if (disc[w] == UINT32_MAX) {
          call_stack.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], disc[w]);
      }
      if (descended) continue;
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
      if (!call_stack.empty())
        low[call_stack.back().v] = std::min(low[call_stack.back().v], low[v]);
    }
  }
  return comp;
}

// Shortest path within one component of the stack-j subgraph. With
// `at_least_one_edge` the empty path does not count even if `from` is a goal.
std::optional<std::vector<std::pair<OracleEdge, uint32_t>>> path_in_component(
    const ConfigGraph& g, const std::vector<uint32_t>& comp, uint32_t my_comp,
    std::optional<StackIndex> j, uint32_t from, const std::function<bool(uint32_t)>& goal,
    bool at_least_one_edge) {
  if (!at_least_one_edge && goal(from))
    return std::vector<std::pair<OracleEdge, uint32_t>>{};
  std::unordered_map<uint32_t, std::pair<uint32_t, std::size_t>> parent;
  std::deque<uint32_t> work;
  parent.emplace(from, std::make_pair(UINT32_MAX, std::size_t{0}));
  work.push_back(from);
  while (!work.empty()) {
    uint32_t v = work.front();
    work.pop_front();
    for (std::size_t i = 0; i < g.edges[v].size(); ++i) {
      const auto& [e, w] = g.edges[v][i];
      if (j && e.stack != *j) continue;
      if (comp[w] != my_comp) continue;
      if (goal(w)) {
        std::vector<std::pair<OracleEdge, uint32_t>> path;
        path.emplace_back(e, w);
        uint32_t cur = v;
        while (cur != from) {
          auto [pv, pe] = parent.at(cur);
          path.emplace_back(g.edges[pv][pe].first, cur);
          cur = pv;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (!parent.count(w)) {
        parent.emplace(w, std::make_pair(v, i));
        work.push_back(w);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

LassoSearch find_accepting_lasso(const ConfigGraph& g,
                                 const std::vector<std::function<bool(uint64_t)>>& predicates,
                                 std::optional<uint32_t> k) {
  LassoSearch result;
  uint32_t n = static_cast<uint32_t>(g.vertices.size());
  if (k) require(*k >= 1, "switch bound must be at least 1");

  // Candidate cycles live in single-stack subgraphs when k is set. A
  // component qualifies if it has an internal edge and covers all predicates.
  std::vector<std::optional<StackIndex>> stack_choices;
  if (k)
    for (StackIndex j = 0; j < g.stack_count; ++j) stack_choices.push_back(j);
  else
    stack_choices.push_back(std::nullopt);

  struct Candidate {
    std::optional<StackIndex> j;
    std::vector<uint32_t> comp;
    std::vector<bool> qualifying;
  };
  std::vector<Candidate> cands;
  for (auto j : stack_choices) {
    Candidate c;
    c.j = j;
    c.comp = scc_subgraph(g, j);
    uint32_t comp_count = 0;
    for (uint32_t v = 0; v < n; ++v) comp_count = std::max(comp_count, c.comp[v] + 1);
    std::vector<bool> has_edge(comp_count, false);
    std::vector<std::vector<bool>> covered(comp_count,
                                           std::vector<bool>(predicates.size(), false));
    for (uint32_t v = 0; v < n; ++v) {
      for (const auto& [e, w] : g.edges[v]) {
        if (j && e.stack != *j) continue;
        if (c.comp[v] == c.comp[w]) has_edge[c.comp[v]] = true;
      }
      for (std::size_t p = 0; p < predicates.size(); ++p)
        if (predicates[p](g.vertices[v].state)) covered[c.comp[v]][p] = true;
    }
    c.qualifying.assign(comp_count, false);
    for (uint32_t cc = 0; cc < comp_count; ++cc) {
      if (!has_edge[cc]) continue;
      bool all = true;
      for (std::size_t p = 0; p < predicates.size(); ++p)
        if (!covered[cc][p]) all = false;
      c.qualifying[cc] = all;
    }
    cands.push_back(std::move(c));
  }

  constexpr uint32_t kNoStack = 0xff;
  auto key_of = [&](uint32_t v, uint32_t last) { return (uint64_t(v) << 8) | (last & 0xff); };
  std::unordered_map<uint64_t, std::tuple<uint32_t, uint32_t, std::size_t>> parent;
  std::unordered_map<uint64_t, uint32_t> best;
  uint32_t budget = k ? *k - 1 : UINT32_MAX;

  auto try_close = [&](uint32_t v, uint32_t last, uint32_t used) -> bool {
    for (const Candidate& c : cands) {
      uint32_t cc = c.comp[v];
      if (cc == UINT32_MAX || !c.qualifying[cc]) continue;
      if (k && last != kNoStack && c.j && last != *c.j && used + 1 > budget) continue;
      std::vector<std::pair<OracleEdge, uint32_t>> cycle;
      uint32_t cur = v;
      bool ok = true;
      for (std::size_t p = 0; p < predicates.size() && ok; ++p) {
        auto hit = [&](uint32_t x) { return predicates[p](g.vertices[x].state); };
        bool already = hit(cur);
        for (const auto& [e, w] : cycle)
          if (hit(w)) already = true;
        if (cycle.empty() && hit(v)) already = true;
        if (already) continue;
        auto seg = path_in_component(g, c.comp, cc, c.j, cur, hit, false);
        if (!seg) {
          ok = false;
          break;
        }
        for (auto& st : *seg) cycle.push_back(st);
        if (!seg->empty()) cur = seg->back().second;
      }
      if (!ok) continue;
      auto back = path_in_component(
          g, c.comp, cc, c.j, cur, [&](uint32_t x) { return x == v; }, cycle.empty());
      if (!back) continue;
      for (auto& st : *back) cycle.push_back(st);
      if (cycle.empty()) continue;

      std::vector<std::pair<OracleEdge, uint32_t>> prefix;
      uint32_t cv = v, cl = last;
      while (true) {
        auto it = parent.find(key_of(cv, cl));
        if (it == parent.end()) break;
        auto [pv, pl, pe] = it->second;
        if (pv == UINT32_MAX) break;
        prefix.emplace_back(g.edges[pv][pe].first, cv);
        cv = pv;
        cl = pl;
      }
      std::reverse(prefix.begin(), prefix.end());

      OracleLasso lasso;
      lasso.vertices.push_back(cv);
      for (auto& [e, w] : prefix) {
        lasso.steps.emplace_back(e, w);
        lasso.vertices.push_back(w);
      }
      lasso.cycle_start = lasso.steps.size();
      for (auto& [e, w] : cycle) {
        lasso.steps.emplace_back(e, w);
        lasso.vertices.push_back(w);
      }
      result.answer = OracleAnswer::Yes;
      result.lasso = std::move(lasso);
      return true;
    }
    return false;
  };

  std::deque<std::tuple<uint32_t, uint32_t, uint32_t>> work;
  for (uint32_t v : g.initial) {
    uint64_t key = key_of(v, kNoStack);
    if (!best.count(key)) {
      best[key] = 0;
      parent[key] = {UINT32_MAX, kNoStack, 0};
      if (try_close(v, kNoStack, 0)) return result;
      work.emplace_back(v, kNoStack, 0);
    }
  }

  while (!work.empty()) {
    auto [v, last, used] = work.front();
    work.pop_front();
    for (std::size_t i = 0; i < g.edges[v].size(); ++i) {
      const auto& [e, w] = g.edges[v][i];
      uint32_t used2 = used;
      if (k && last != kNoStack && e.stack != last) used2++;
      if (k && used2 > budget) continue;
      uint32_t last2 = k ? e.stack : kNoStack;
      uint64_t key = key_of(w, last2);
      auto it = best.find(key);
      if (it != best.end() && it->second <= used2) continue;
      best[key] = used2;
      parent[key] = {v, last, i};
      if (try_close(w, last2, used2)) return result;
      work.emplace_back(w, last2, used2);
    }
  }

  result.answer = g.truncation_reachable() ? OracleAnswer::Inconclusive : OracleAnswer::No;
  return result;
}

// ---------------------------------------------------------------------------
// adapters
// ---------------------------------------------------------------------------

ExploreSystem explore_system_of(const EnhancedMpds& sys) {
  ExploreSystem es;
  es.stack_count = sys.stack_count();
  OracleConfig init;
  init.state = sys.init_state();
  init.stacks.assign(sys.stack_count(), {kBottom});
  es.initial.push_back(std::move(init));
  const EnhancedMpds* s = &sys;
  es.successors = [s](const OracleConfig& c) {
    Config bc;
    bc.state = static_cast<StateId>(c.state);
    for (const auto& w : c.stacks) bc.stacks.emplace_back(w.begin(), w.end());
    std::vector<std::pair<OracleEdge, OracleConfig>> out;
    for (const auto& [rule, next] : s->successors(bc)) {
      OracleConfig nc;
      nc.state = next.state;
      for (const auto& w : next.stacks) nc.stacks.emplace_back(w.begin(), w.end());
      out.emplace_back(OracleEdge{rule->stack, rule->kind, rule->id}, std::move(nc));
    }
    return out;
  };
  return es;
}

ExploreSystem explore_system_of(Product& prod) {
  ExploreSystem es;
  es.stack_count = prod.stack_count();
  for (AugStateId s : prod.initial_states()) {
    AugConfig c = prod.initial_config(s);
    OracleConfig oc;
    oc.state = c.state;
    for (const auto& w : c.stacks) oc.stacks.emplace_back(w.begin(), w.end());
    es.initial.push_back(std::move(oc));
  }
  Product* p = &prod;
  es.successors = [p](const OracleConfig& c) {
    AugConfig ac;
    ac.state = static_cast<AugStateId>(c.state);
    for (const auto& w : c.stacks) {
      std::vector<AugLetterId> letters(w.begin(), w.end());
      ac.stacks.push_back(std::move(letters));
    }
    std::vector<std::pair<OracleEdge, OracleConfig>> out;
    for (const auto& [rule, next] : p->successors(ac)) {
      OracleConfig nc;
      nc.state = next.state;
      for (const auto& w : next.stacks) nc.stacks.emplace_back(w.begin(), w.end());
      out.emplace_back(OracleEdge{rule.stack, rule.kind, rule.base_rule}, std::move(nc));
    }
    return out;
  };
  return es;
}

LassoRun to_base_lasso(const EnhancedMpds& sys, const ConfigGraph& g, const OracleLasso& l) {
  LassoRun run;
  run.sys = &sys;
  run.cycle_start = l.cycle_start;
  for (uint32_t v : l.vertices) {
    Config c;
    c.state = static_cast<StateId>(g.vertices[v].state);
    for (const auto& w : g.vertices[v].stacks) c.stacks.emplace_back(w.begin(), w.end());
    run.configs.push_back(std::move(c));
  }
  for (const auto& [e, w] : l.steps) run.rule_ids.push_back(e.tag);
  run.validate();
  return run;
}

AugLasso to_aug_lasso(Product& prod, const ConfigGraph& g, const OracleLasso& l) {
  AugLasso aug;
  aug.cycle_start = l.cycle_start;
  for (uint32_t v : l.vertices) {
    AugConfig c;
    c.state = static_cast<AugStateId>(g.vertices[v].state);
    for (const auto& w : g.vertices[v].stacks) {
      std::vector<AugLetterId> letters(w.begin(), w.end());
      c.stacks.push_back(std::move(letters));
    }
    aug.configs.push_back(std::move(c));
  }
  for (std::size_t t = 0; t < l.steps.size(); ++t) {
    const AugConfig& to = aug.configs[t + 1];
    bool found = false;
    for (const auto& [rule, next] : prod.successors(aug.configs[t])) {
      if (next == to && rule.base_rule == l.steps[t].first.tag) {
        aug.steps.push_back(rule);
        found = true;
        break;
      }
    }
    require(found, "oracle lasso step does not replay in the product");
  }
  return aug;
}

namespace {

// A k-bounded lasso needs a switch-free cycle; if no rule at all keeps the
// active stack, truncation cannot hide one and "inconclusive" sharpens to no.
bool has_same_stack_rule(const EnhancedMpds& sys) {
  for (const Rule& r : sys.rules())
    if (r.stack == r.to_stack) return true;
  return false;
}

}  // namespace

LassoSearch oracle_rep(const EnhancedMpds& sys, StateId target, std::optional<uint32_t> k,
                       const ExploreLimits& limits) {
  ConfigGraph g = explore(explore_system_of(sys), limits);
  std::vector<std::function<bool(uint64_t)>> preds{
      [target](uint64_t s) { return s == target; }};
  LassoSearch res = find_accepting_lasso(g, preds, k);
  if (res.answer == OracleAnswer::Inconclusive && k && !has_same_stack_rule(sys))
    res.answer = OracleAnswer::No;
  return res;
}

ProductOracleResult oracle_bmc(Product& prod, uint32_t k, const ExploreLimits& limits) {
  ProductOracleResult res;
  ConfigGraph g = explore(explore_system_of(prod), limits);
  res.vertices = g.vertices.size();
  res.truncated = g.truncation_reachable();
  std::vector<std::function<bool(uint64_t)>> preds;
  for (auto& p : prod.acceptance_family())
    preds.push_back([f = p.test](uint64_t s) { return f(static_cast<AugStateId>(s)); });
  LassoSearch search = find_accepting_lasso(g, preds, k);
  res.answer = search.answer;
  if (res.answer == OracleAnswer::Inconclusive && !has_same_stack_rule(prod.system()))
    res.answer = OracleAnswer::No;
  if (search.lasso) res.witness = to_aug_lasso(prod, g, *search.lasso);
  return res;
}

Agreement cross_check(OracleAnswer oracle, bool solver_yes) {
  if (oracle == OracleAnswer::Inconclusive) return Agreement::Inconclusive;
  bool oracle_yes = oracle == OracleAnswer::Yes;
  return oracle_yes == solver_yes ? Agreement::Agree : Agreement::Disagree;
}

}  // namespace mcaret
