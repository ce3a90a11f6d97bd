#include "solver.hh"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

namespace mcaret {

namespace {

PdsOp op_of(ActionKind k) {
  switch (k) {
    case ActionKind::Call: return PdsOp::Push;
    case ActionKind::Internal: return PdsOp::Replace;
    case ActionKind::Return: return PdsOp::Pop;
  }
  return PdsOp::Replace;
}

struct BrepSearch {
  const LazyMpdsView& view;
  uint32_t k;
  SolverStats& stats;
  std::vector<Nfa> content;            // per-stack content automata
  std::vector<SkeletonEntry> skeleton;
  Witness witness;
  bool found = false;
  uint64_t path_growth = 0;  // states added along the current skeleton's pipeline

  BrepSearch(const LazyMpdsView& v, uint32_t k_, SolverStats& st)
      : view(v), k(k_), stats(st) {
    for (StackIndex j = 0; j < view.stack_count; ++j)
      content.push_back(singleton_word_nfa(view.bottom_letters[j], 0));
  }

  LazyPds pds_for(StackIndex j) const {
    const LazyMpdsView* v = &view;
    LazyPds pds;
    pds.rules_for = [v, j](PdsState p, PdsLetter a) -> std::vector<PdsRule> {
      if (v->stack_of(p) != j) return {};
      return v->rules(p, a);
    };
    return pds;
  }

  // Growth accounting per Proposition 7: each operation adds at most |P|
  // states and a skeleton pipeline of at most 3(k+1) operations stays within
  // 3(k+1)|P|.
  void audit_op(uint64_t op_growth) {
    stats.audit_max_op_growth = std::max(stats.audit_max_op_growth, op_growth);
    if (static_cast<double>(op_growth) > view.state_space_bound) stats.audit_ok = false;
    path_growth += op_growth;
    stats.audit_max_path_growth = std::max(stats.audit_max_path_growth, path_growth);
    if (static_cast<double>(path_growth) > 3.0 * (k + 1) * view.state_space_bound)
      stats.audit_ok = false;
  }

  void dfs(PdsState q, uint32_t switches_used) {
    if (found) return;
    StackIndex j = view.stack_of(q);
    stats.skeletons_explored++;
    skeleton.push_back({view.render_state(q), j + 1});
    uint64_t path_base = path_growth;

    LazyPds pds = pds_for(j);
    uint64_t added0 = stats.sat.states_added;
    PAutomaton pa = pa_of(content[j], q, {}, &stats.sat);
    audit_op(stats.sat.states_added - added0);

    added0 = stats.sat.states_added;
    PAutomaton closed = post_star(pds, pa, &stats.sat);
    audit_op(stats.sat.states_added - added0);

    // Tail check: the remaining run stays on stack j forever. Its internal
    // saturation is step (ii) of the procedure and outside the pipeline audit.
    stats.tail_checks++;
    RepeatedHeadWitness rh;
    SatStats tail_stats;
    bool tail = repeated_head_infinite_run(pds, closed, view.target, &rh, &tail_stats);
    stats.sat.repeated_head_calls += tail_stats.repeated_head_calls;
    if (tail) {
      found = true;
      witness.skeleton = skeleton;
      witness.head_state = view.render_state(rh.head_state);
      witness.head_letter = view.render_letter(rh.head_letter);
      skeleton.pop_back();
      return;
    }

    if (switches_used < k - 1) {
      // Switch candidates: co-accessible control states of other stacks.
      auto co = closed.coaccessible();
      std::vector<PdsState> cands;
      for (const auto& [from, letter, to] : closed.transitions()) {
        if (!co[to]) continue;
        if (closed.node(from).kind != PAutomaton::Node::Kind::P) continue;
        PdsState p = closed.node(from).pstate;
        if (view.stack_of(p) == j) continue;
        if (std::find(cands.begin(), cands.end(), p) == cands.end()) cands.push_back(p);
      }
      std::sort(cands.begin(), cands.end(), [&](PdsState a, PdsState b) {
        return view.render_state(a) < view.render_state(b);
      });
      for (PdsState q2 : cands) {
        if (found) break;
        uint64_t before = stats.sat.states_added;
        Nfa extracted = fsa_of(closed, q2, &stats.sat);
        uint64_t fsa_growth = stats.sat.states_added - before;
        audit_op(fsa_growth);
        if (!extracted.empty_language()) {
          Nfa saved = std::move(content[j]);
          content[j] = std::move(extracted);
          dfs(q2, switches_used + 1);
          content[j] = std::move(saved);
        }
        path_growth -= fsa_growth;
      }
    }
    path_growth = path_base;
    skeleton.pop_back();
  }
};

}  // namespace

Verdict brep_single_lazy(const LazyMpdsView& view, PdsState initial, uint32_t k,
                         SolverStats* stats_out) {
  require(k >= 1, "context bound must be at least 1");
  auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  SolverStats local;
  SolverStats& stats = stats_out ? *stats_out : local;
  stats.state_space_bound = view.state_space_bound;
  BrepSearch search(view, k, stats);
  search.dfs(initial, 0);
  v.yes = search.found;
  if (search.found) v.witness = search.witness;
  stats.wall_ms +=
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  v.stats = stats;
  return v;
}

Verdict brep_single(const EnhancedMpds& sys, StateId target, uint32_t k) {
  LazyMpdsView view;
  view.stack_count = sys.stack_count();
  const EnhancedMpds* s = &sys;
  view.rules = [s](PdsState p, PdsLetter a) {
    std::vector<PdsRule> out;
    StateId st = static_cast<StateId>(p);
    for (const Rule& r : s->rules_for(s->stack_of(st))) {
      if (r.from != st || r.top != a) continue;
      out.push_back({p, a, r.to, op_of(r.kind), r.arg, r.id});
    }
    return out;
  };
  view.stack_of = [s](PdsState p) { return s->stack_of(static_cast<StateId>(p)); };
  view.target = [target](PdsState p) { return p == target; };
  view.render_state = [s](PdsState p) { return s->state_name(static_cast<StateId>(p)); };
  view.render_letter = [s](PdsLetter a) { return s->letter_name(a); };
  view.bottom_letters.assign(sys.stack_count(), kBottom);
  view.state_space_bound = static_cast<double>(sys.state_count());
  return brep_single_lazy(view, sys.init_state(), k);
}

Verdict bmc(Product& product, uint32_t k, const BmcOptions& opts) {
  require(k >= 1, "context bound must be at least 1");
  auto t0 = std::chrono::steady_clock::now();
  auto family = product.acceptance_family();
  uint64_t m = family.size();
  require(m >= 1, "acceptance family is empty");

  std::vector<AugStateId> inits = product.initial_states();

  auto shared_family = std::make_shared<std::vector<AccPredicate>>(std::move(family));
  Product* prod = &product;

  LazyMpdsView view;
  view.stack_count = product.stack_count();
  view.state_space_bound = product.state_space_bound() * static_cast<double>(m);
  view.rules = [prod, shared_family, m](PdsState p, PdsLetter a) {
    AugStateId aug = static_cast<AugStateId>(p / m);
    uint64_t c = p % m;
    uint64_t c2 = (*shared_family)[c].test(aug) ? (c + 1) % m : c;
    std::vector<PdsRule> out;
    for (const ProductRule& r : prod->rules(aug, static_cast<AugLetterId>(a)))
      out.push_back(
          {p, a, uint64_t(r.to) * m + c2, op_of(r.kind), r.out, r.base_rule});
    return out;
  };
  view.stack_of = [prod, m](PdsState p) {
    return prod->state(static_cast<AugStateId>(p / m)).active;
  };
  view.target = [prod, shared_family, m](PdsState p) {
    return p % m == 0 && (*shared_family)[0].test(static_cast<AugStateId>(p / m));
  };
  view.render_state = [prod, m](PdsState p) {
    return cat(prod->render_state(static_cast<AugStateId>(p / m)), "#", p % m + 1);
  };
  view.render_letter = [prod](PdsLetter a) {
    return prod->render_letter(static_cast<AugLetterId>(a));
  };
  view.bottom_letters.clear();
  for (StackIndex j = 0; j < product.stack_count(); ++j)
    view.bottom_letters.push_back(product.bottom_letter(j));

  Verdict out;
  out.stats.state_space_bound = view.state_space_bound;
  out.stats.initial_states = inits.size();

  uint32_t jobs = std::max<uint32_t>(1, opts.jobs);
  jobs = std::min<uint32_t>(jobs, std::max<std::size_t>(std::size_t{1}, inits.size()));

  std::vector<std::optional<Verdict>> results(inits.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_yes{inits.size()};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= inits.size()) break;
      if (i > first_yes.load()) continue;  // a smaller index already answered yes
      Verdict v = brep_single_lazy(view, uint64_t(inits[i]) * m, k);
      if (v.yes) {
        std::size_t expect = first_yes.load();
        while (i < expect && !first_yes.compare_exchange_weak(expect, i)) {
        }
      }
      results[i] = std::move(v);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (uint32_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  for (std::size_t i = 0; i < inits.size(); ++i) {
    if (!results[i]) continue;
    const Verdict& v = *results[i];
    out.stats.skeletons_explored += v.stats.skeletons_explored;
    out.stats.tail_checks += v.stats.tail_checks;
    out.stats.sat.post_star_calls += v.stats.sat.post_star_calls;
    out.stats.sat.pre_star_calls += v.stats.sat.pre_star_calls;
    out.stats.sat.fsa_calls += v.stats.sat.fsa_calls;
    out.stats.sat.pa_calls += v.stats.sat.pa_calls;
    out.stats.sat.states_added += v.stats.sat.states_added;
    out.stats.sat.repeated_head_calls += v.stats.sat.repeated_head_calls;
    out.stats.audit_ok = out.stats.audit_ok && v.stats.audit_ok;
    out.stats.audit_max_op_growth =
        std::max(out.stats.audit_max_op_growth, v.stats.audit_max_op_growth);
    out.stats.audit_max_path_growth =
        std::max(out.stats.audit_max_path_growth, v.stats.audit_max_path_growth);
    if (v.yes && !out.yes) {
      out.yes = true;
      out.witness = v.witness;
    }
  }
  out.stats.interned_states = product.state_count();
  out.stats.interned_letters = product.letter_count();
  out.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

Prepared prepare(const EnhancedMpds& sys, FormulaTable& table, FormulaId f) {
  Prepared p;
  FormulaId f1 = table.expand_stack_atoms(table.rewrite_derived(f));
  if (!table.uses_action_atoms(f1)) {
    p.sys = &sys;
    p.table = &table;
    p.root = f1;
    return p;
  }

  // Track the upcoming action in the global state: states become (g, a) and a
  // rule of action kind a fires only from states predicting a.
  static const ActionKind kActions[3] = {ActionKind::Call, ActionKind::Return,
                                         ActionKind::Internal};
  static const char* kSuffix[3] = {"#call", "#ret", "#int"};
  std::vector<std::string> new_states;
  uint32_t base_n = sys.base_state_count();
  for (StateId g = 0; g < base_n; ++g)
    for (int a = 0; a < 3; ++a) new_states.push_back(sys.base_state_name(g) + kSuffix[a]);
  auto lifted = [&](StateId g, int a) { return g * 3 + static_cast<StateId>(a); };

  std::vector<Rule> new_rules;
  for (const Rule& r : sys.rules()) {
    int kind_idx = r.kind == ActionKind::Call ? 0 : (r.kind == ActionKind::Return ? 1 : 2);
    for (int a2 = 0; a2 < 3; ++a2) {
      Rule nr;
      nr.from = lifted(sys.base_of(r.from), kind_idx);
      nr.top = r.top;
      nr.to = lifted(sys.base_of(r.to), a2);
      nr.stack = r.stack;
      nr.to_stack = r.to_stack;
      nr.kind = r.kind;
      nr.arg = r.arg;
      new_rules.push_back(nr);
    }
  }

  // Any of the three predictions may start a run; the first action decides
  // which one is realized.
  p.owned_sys = std::make_shared<EnhancedMpds>(EnhancedMpds::from_enhanced_rules(
      new_states, sys.stack_count(), sys.alphabet(), new_rules,
      lifted(sys.base_of(sys.init_state()), 0), sys.stack_of(sys.init_state())));
  StateId g0 = sys.base_of(sys.init_state());
  StackIndex i0 = sys.stack_of(sys.init_state());
  p.owned_sys->set_init_states({p.owned_sys->state_of(lifted(g0, 0), i0),
                                p.owned_sys->state_of(lifted(g0, 1), i0),
                                p.owned_sys->state_of(lifted(g0, 2), i0)});
  p.sys = p.owned_sys.get();

  p.owned_table = std::make_shared<FormulaTable>(new_states, sys.stack_count(),
                                                 sys.alphabet());
  FormulaTable& nt = *p.owned_table;
  for (uint32_t i = 0; i < table.automaton_count(); ++i)
    nt.add_automaton(table.automaton_name(i), table.automaton(i));

  std::function<FormulaId(FormulaId)> conv = [&](FormulaId id) -> FormulaId {
    const FNode n = table.node(id);
    switch (n.kind) {
      case FKind::StateAtom: {
        FormulaId out = 0;
        bool first = true;
        for (int a = 0; a < 3; ++a) {
          FormulaId part = nt.state_atom(lifted(n.a, a), n.stack);
          out = first ? part : nt.mk_or(out, part);
          first = false;
        }
        return out;
      }
      case FKind::ActionAtom: {
        int a = static_cast<ActionKind>(n.a) == ActionKind::Call
                    ? 0
                    : (static_cast<ActionKind>(n.a) == ActionKind::Return ? 1 : 2);
        FormulaId out = 0;
        bool first = true;
        for (StateId g = 0; g < base_n; ++g)
          for (StackIndex s = 0; s < sys.stack_count(); ++s) {
            FormulaId part = nt.state_atom(lifted(g, a), s);
            out = first ? part : nt.mk_or(out, part);
            first = false;
          }
        return out;
      }
      case FKind::RegAtom:
        return nt.reg_atom(n.stack, n.a);
      case FKind::Not:
        return nt.mk_not(conv(n.a));
      case FKind::Or:
        return nt.mk_or(conv(n.a), conv(n.b));
      case FKind::Next:
        return nt.mk_next(conv(n.a));
      case FKind::Until:
        return nt.mk_until(conv(n.a), conv(n.b));
      case FKind::AbsNext:
        return nt.mk_abs_next(n.stack, conv(n.a));
      case FKind::AbsUntil:
        return nt.mk_abs_until(n.stack, conv(n.a), conv(n.b));
      case FKind::CallerNext:
        return nt.mk_caller_next(n.stack, conv(n.a));
      case FKind::CallerUntil:
        return nt.mk_caller_until(n.stack, conv(n.a), conv(n.b));
      default:
        fail("prepare: unexpected operator after rewriting");
    }
  };
  p.root = conv(f1);
  p.table = p.owned_table.get();
  return p;
}

}  // namespace mcaret
