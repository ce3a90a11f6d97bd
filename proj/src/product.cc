#include "product.hh"

#include <algorithm>

namespace mcaret {

// ---------------------------------------------------------------------------
// AtomTable
// ---------------------------------------------------------------------------

AtomTable::AtomTable(const Closure& cl) : cl_(&cl) {
  AtomBits empty;
  empty.resize(cl.size());
  atoms_.push_back(empty);
  index_.emplace(empty, kEmptyAtom);

  slot_atoms_.assign(cl.stack_count(), {});
  uint64_t n = cl.atom_count();
  for (uint64_t i = 0; i < n; ++i) {
    AtomBits a = cl.atom_at(i);
    AtomId id = intern(a);
    for (StackIndex j = 0; j < cl.stack_count(); ++j)
      if (slot_admissible(a, j)) slot_atoms_[j].push_back(id);
  }
}

AtomId AtomTable::intern(const AtomBits& bits) {
  auto it = index_.find(bits);
  if (it != index_.end()) return it->second;
  AtomId id = static_cast<AtomId>(atoms_.size());
  atoms_.push_back(bits);
  index_.emplace(bits, id);
  return id;
}

bool AtomTable::slot_admissible(const AtomBits& a, StackIndex j) const {
  const Closure& cl = *cl_;
  // The single G x [N] element must sit on stack j.
  for (uint32_t idx : cl.state_atom_members()) {
    if (a.get(idx) && cl.entry(idx).stack != j) return false;
  }
  // No foreign abstract-next claims: Succ^{a,u} is undefined while u is
  // inactive, and this atom's reference positions have stack j active.
  for (StackIndex u = 0; u < cl.stack_count(); ++u) {
    if (u == j) continue;
    for (uint32_t idx : cl.abs_next_members(u))
      if (a.get(idx)) return false;
  }
  // Own-index abstract/caller-until unfolding.
  for (uint32_t idx : cl.abs_until_members()) {
    const ClosureEntry& e = cl.entry(idx);
    if (e.stack != j) continue;
    bool rhs = a.get(e.op_b) || (a.get(e.op_a) && a.get(e.unfold));
    if (a.get(idx) != rhs) return false;
  }
  for (uint32_t idx : cl.caller_until_members()) {
    const ClosureEntry& e = cl.entry(idx);
    if (e.stack != j) continue;
    bool rhs = a.get(e.op_b) || (a.get(e.op_a) && a.get(e.unfold));
    if (a.get(idx) != rhs) return false;
  }
  return true;
}

std::string AtomTable::render(AtomId id) const {
  if (id == kEmptyAtom) return "{}";
  std::string out = "{";
  bool first = true;
  for (uint32_t i = 0; i < cl_->size(); ++i) {
    if (!atoms_[id].get(i)) continue;
    if (cl_->entry(i).kind == FKind::Not) continue;  // positive members suffice
    if (!first) out += ", ";
    out += cl_->table().render(cl_->entry(i).formula);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Product
// ---------------------------------------------------------------------------

namespace {

struct Masks {
  AtomBits req_true, req_false;

  explicit Masks(std::size_t bits) {
    req_true.resize(bits);
    req_false.resize(bits);
  }
  void pin(uint32_t idx, bool v) { (v ? req_true : req_false).set(idx, true); }
  bool consistent() const {
    for (std::size_t w = 0; w < req_true.words.size(); ++w)
      if (req_true.words[w] & req_false.words[w]) return false;
    return true;
  }
  bool matches(const AtomBits& a) const {
    for (std::size_t w = 0; w < a.words.size(); ++w) {
      if ((a.words[w] & req_true.words[w]) != req_true.words[w]) return false;
      if (a.words[w] & req_false.words[w]) return false;
    }
    return true;
  }
};

uint64_t nfa_image_mask(const Nfa& nfa, uint64_t set, LetterId a) {
  uint64_t next = 0;
  for (uint32_t q = 0; q < nfa.state_count(); ++q)
    if (set & (uint64_t{1} << q)) {
      uint32_t arr[1] = {q};
      for (uint32_t q2 : nfa.image(std::span<const uint32_t>(arr, 1), a))
        next |= uint64_t{1} << q2;
    }
  return next;
}

}  // namespace

Product::Product(const EnhancedMpds& sys, FormulaTable& table, FormulaId root)
    : sys_(&sys),
      table_(&table),
      cl_(std::make_unique<Closure>(table, root)),
      atoms_(*cl_) {
  require(sys.stack_count() <= 32, "at most 32 stacks supported");
  reg_on_stack_.assign(stack_count(), {});
  for (uint32_t idx : cl_->reg_members()) {
    const ClosureEntry& e = cl_->entry(idx);
    const Nfa& nfa = table.automaton(e.payload);
    require(nfa.state_count() <= 64, "constraint automata are limited to 64 states");
    RegConstraint c;
    c.closure_idx = idx;
    c.stack = e.stack;
    c.automaton = e.payload;
    for (uint32_t q : nfa.initial()) c.initial_set |= uint64_t{1} << q;
    for (uint32_t q : nfa.accepting()) c.accepting_set |= uint64_t{1} << q;
    reg_on_stack_[e.stack].push_back(static_cast<uint32_t>(reg_.size()));
    reg_.push_back(c);
  }
  // Per-stack bottom letters: empty atom, noreturn, snapshots holding the
  // constraint values for the empty content, so an internal rewrite of bot
  // recomputes the bot-content sets correctly.
  for (StackIndex j = 0; j < stack_count(); ++j) {
    AugLetterData d;
    d.letter = kBottom;
    d.atom = kEmptyAtom;
    d.willreturn = false;
    for (uint32_t ci : reg_on_stack_[j]) d.reg_snapshot.push_back(reg_[ci].initial_set);
    bottom_letters_.push_back(intern_letter(std::move(d)));
  }
}

AugStateId Product::intern_state(AugStateData d) {
  require(d.atoms.size() == stack_count(), "augmented state arity mismatch");
  require(!d.dead(d.active), "active stack must be alive");
  for (StackIndex j = 0; j < stack_count(); ++j) {
    if (d.dead(j))
      require(d.atoms[j] == kEmptyAtom && !d.willreturn(j),
              "dead stacks carry the empty atom and noreturn");
    else
      require(d.atoms[j] != kEmptyAtom, "alive stacks carry a nonempty atom");
  }
  auto it = state_index_.find(d);
  if (it != state_index_.end()) return it->second;
  AugStateId id = static_cast<AugStateId>(states_.size());
  states_.push_back(d);
  state_index_.emplace(std::move(d), id);
  return id;
}

AugLetterId Product::intern_letter(AugLetterData d) {
  auto it = letter_index_.find(d);
  if (it != letter_index_.end()) return it->second;
  AugLetterId id = static_cast<AugLetterId>(letters_.size());
  letters_.push_back(d);
  letter_index_.emplace(std::move(d), id);
  return id;
}

double Product::state_space_bound() const {
  double atoms_per_slot = 1;
  for (StackIndex j = 0; j < stack_count(); ++j)
    atoms_per_slot *= static_cast<double>(atoms_.slot_atoms(j).size()) + 1.0;
  double tags = 1;
  for (uint32_t j = 0; j < 2 * stack_count(); ++j) tags *= 2.0;
  double regs = 1;
  for (const RegConstraint& c : reg_) {
    for (uint32_t q = 0; q < table_->automaton(c.automaton).state_count(); ++q) regs *= 2.0;
  }
  return static_cast<double>(sys_->base_state_count()) * atoms_per_slot * tags * regs *
         static_cast<double>(stack_count());
}

bool Product::pre_checks(const AugStateData& st) const {
  StackIndex s = st.active;
  if (st.dead(s)) return false;
  const AtomBits& as = atoms_.bits(st.atoms[s]);
  // (g, s) must belong to the active atom.
  if (!as.get(cl_->element_index(st.base_g, s))) return false;
  // in(s_i, A_i) membership must reflect the tracked constraint sets.
  for (std::size_t c = 0; c < reg_.size(); ++c) {
    bool holds = (st.reg[c] & reg_[c].accepting_set) != 0;
    if (as.get(reg_[c].closure_idx) != holds) return false;
  }
  // Foreign abstract-untils in the active atom agree with the owner's atom.
  for (uint32_t idx : cl_->abs_until_members()) {
    StackIndex i = cl_->entry(idx).stack;
    if (i == s) continue;
    if (as.get(idx) != atoms_.get(st.atoms[i], idx)) return false;
  }
  return true;
}

const std::vector<ProductRule>& Product::rules(AugStateId state, AugLetterId top) {
  require(top < (1u << 24), "letter space exhausted");
  uint64_t key = (uint64_t(state) << 24) | top;
  auto it = rule_cache_.find(key);
  if (it != rule_cache_.end()) return it->second;
  auto generated = generate(state, top);
  return rule_cache_.emplace(key, std::move(generated)).first->second;
}

std::vector<ProductRule> Product::generate(AugStateId state_id, AugLetterId top_id) {
  const AugStateData st = states_[state_id];
  const AugLetterData top = letters_[top_id];
  std::vector<ProductRule> out;
  if (!pre_checks(st)) return out;
  const Closure& cl = *cl_;
  StackIndex s = st.active;
  const AtomBits as = atoms_.bits(st.atoms[s]);
  const AtomBits top_atom = atoms_.bits(top.atom);

  bool has_abs_obligation = false;
  for (uint32_t idx : cl.abs_next_members(s))
    if (as.get(idx)) has_abs_obligation = true;

  // Value the next active atom must record for Xc[u] psi after this step.
  auto caller_next_value = [&](uint32_t idx, StackIndex u, ActionKind kind) {
    if (u != s) return as.get(idx);
    switch (kind) {
      case ActionKind::Call: return as.get(cl.entry(idx).op_a);
      case ActionKind::Internal: return as.get(idx);
      case ActionKind::Return: return top_atom.get(idx);
    }
    return false;
  };

  StateId esrc = sys_->state_of(st.base_g, s);
  for (const Rule& r : sys_->rules_for(s)) {
    if (r.from != esrc || r.top != top.letter) continue;
    // Conditions on returns: the tag must promise one and no abstract-next
    // obligation may be pending.
    if (r.kind == ActionKind::Return && (!st.willreturn(s) || has_abs_obligation)) continue;
    StackIndex s2 = r.to_stack;
    StateId g2 = sys_->base_of(r.to);
    if (s2 != s && st.dead(s2)) continue;

    // Constraint-tracker update and the call snapshot.
    std::vector<uint64_t> reg2 = st.reg;
    std::vector<uint64_t> push_snapshot;
    for (std::size_t pos = 0; pos < reg_on_stack_[s].size(); ++pos) {
      uint32_t ci = reg_on_stack_[s][pos];
      const Nfa& nfa = table_->automaton(reg_[ci].automaton);
      switch (r.kind) {
        case ActionKind::Call:
          push_snapshot.push_back(st.reg[ci]);
          reg2[ci] = nfa_image_mask(nfa, st.reg[ci], r.arg);
          break;
        case ActionKind::Internal:
          reg2[ci] = nfa_image_mask(nfa, top.reg_snapshot[pos], r.arg);
          break;
        case ActionKind::Return:
          reg2[ci] = top.reg_snapshot[pos];
          break;
      }
    }

    // willreturn discipline (conditions 4-6).
    std::vector<bool> r_choices;
    switch (r.kind) {
      case ActionKind::Call:
        r_choices = st.willreturn(s) ? std::vector<bool>{true} : std::vector<bool>{true, false};
        break;
      case ActionKind::Internal:
        r_choices = {st.willreturn(s)};
        break;
      case ActionKind::Return:
        r_choices = {top.willreturn};
        break;
    }

    for (bool r_new : r_choices) {
      // A call whose frame never pops admits no abstract-next obligations.
      if (r.kind == ActionKind::Call && !r_new && has_abs_obligation) continue;
      for (int die = 0; die <= 1; ++die) {
        if (die) {
          if (s2 == s) continue;
          if (r_new) continue;
          if (has_abs_obligation) continue;
        }

        if (s2 != s) {
          // The next active atom is already fixed; check the transfer
          // conditions against it.
          const AtomBits& a2 = atoms_.bits(st.atoms[s2]);
          bool ok = a2.get(cl.element_index(g2, s2));
          for (uint32_t idx : cl.next_members()) {
            if (!ok) break;
            if (a2.get(cl.entry(idx).op_a) != as.get(idx)) ok = false;
          }
          for (StackIndex u = 0; u < stack_count() && ok; ++u)
            for (uint32_t idx : cl.caller_next_members(u))
              if (a2.get(idx) != caller_next_value(idx, u, r.kind)) {
                ok = false;
                break;
              }
          for (uint32_t idx : cl.caller_until_members()) {
            if (!ok) break;
            if (cl.entry(idx).stack == s2) continue;
            if (a2.get(idx) != as.get(idx)) ok = false;
          }
          for (std::size_t c = 0; c < reg_.size() && ok; ++c) {
            bool holds = (reg2[c] & reg_[c].accepting_set) != 0;
            if (a2.get(reg_[c].closure_idx) != holds) ok = false;
          }
          if (!ok) continue;
        }

        AugLetterId out_letter = top_id;
        if (r.kind == ActionKind::Call) {
          AugLetterData d;
          d.letter = r.arg;
          d.atom = st.atoms[s];
          d.willreturn = st.willreturn(s);
          d.reg_snapshot = push_snapshot;
          out_letter = intern_letter(std::move(d));
        } else if (r.kind == ActionKind::Internal) {
          AugLetterData d;
          d.letter = r.arg;
          d.atom = top.atom;
          d.willreturn = top.willreturn;
          d.reg_snapshot = top.reg_snapshot;
          out_letter = intern_letter(std::move(d));
        }

        uint32_t ret2 = (st.ret_mask & ~(1u << s)) | (r_new ? (1u << s) : 0u);
        uint32_t dead2 = st.dead_mask | (die ? (1u << s) : 0u);

        auto emit = [&](AtomId new_atom) {
          AugStateData nd;
          nd.base_g = g2;
          nd.active = s2;
          nd.atoms = st.atoms;
          nd.atoms[s] = new_atom;
          nd.ret_mask = ret2;
          nd.dead_mask = dead2;
          nd.reg = reg2;
          ProductRule pr;
          pr.from = state_id;
          pr.top = top_id;
          pr.to = intern_state(std::move(nd));
          pr.stack = s;
          pr.to_stack = s2;
          pr.kind = r.kind;
          pr.out = out_letter;
          pr.base_rule = r.id;
          out.push_back(pr);
        };

        if (die) {
          emit(kEmptyAtom);
          continue;
        }

        Masks m(cl.size());
        // Abstract-next transfer into the successor atom of stack s: the
        // equalities also force empty fragments when the stack is about to
        // revive against an empty successor.
        if (r.kind == ActionKind::Internal) {
          for (uint32_t idx : cl.abs_next_members(s)) m.pin(cl.entry(idx).op_a, as.get(idx));
        } else if (r.kind == ActionKind::Return) {
          for (uint32_t idx : cl.abs_next_members(s))
            m.pin(cl.entry(idx).op_a, top_atom.get(idx));
        }
        if (s2 == s) {
          m.pin(cl.element_index(g2, s), true);
          for (uint32_t idx : cl.next_members()) m.pin(cl.entry(idx).op_a, as.get(idx));
          for (StackIndex u = 0; u < stack_count(); ++u)
            for (uint32_t idx : cl.caller_next_members(u))
              m.pin(idx, caller_next_value(idx, u, r.kind));
          for (uint32_t idx : cl.caller_until_members())
            if (cl.entry(idx).stack != s) m.pin(idx, as.get(idx));
          for (uint32_t idx : cl.abs_until_members()) {
            StackIndex i = cl.entry(idx).stack;
            if (i != s) m.pin(idx, atoms_.get(st.atoms[i], idx));
          }
          for (std::size_t c = 0; c < reg_.size(); ++c)
            m.pin(reg_[c].closure_idx, (reg2[c] & reg_[c].accepting_set) != 0);
        } else {
          // The revived atom's own abstract-untils must match the pending
          // values recorded in the next active atom.
          const AtomBits& a2 = atoms_.bits(st.atoms[s2]);
          for (uint32_t idx : cl.abs_until_members())
            if (cl.entry(idx).stack == s) m.pin(idx, a2.get(idx));
        }
        if (!m.consistent()) continue;
        for (AtomId cand : atoms_.slot_atoms(s))
          if (m.matches(atoms_.bits(cand))) emit(cand);
      }
    }
  }
  return out;
}

std::vector<std::pair<ProductRule, AugConfig>> Product::successors(const AugConfig& c) {
  std::vector<std::pair<ProductRule, AugConfig>> out;
  StackIndex s = states_[c.state].active;
  AugLetterId top = c.stacks[s].back();
  for (const ProductRule& r : rules(c.state, top)) {
    AugConfig next = c;
    next.state = r.to;
    auto& w = next.stacks[s];
    switch (r.kind) {
      case ActionKind::Call: w.push_back(r.out); break;
      case ActionKind::Internal: w.back() = r.out; break;
      case ActionKind::Return: w.pop_back(); break;
    }
    out.emplace_back(r, std::move(next));
  }
  return out;
}

AugConfig Product::initial_config(AugStateId s) const {
  AugConfig c;
  c.state = s;
  for (StackIndex j = 0; j < stack_count(); ++j) c.stacks.push_back({bottom_letters_[j]});
  return c;
}

std::vector<AugStateId> Product::initial_states() {
  std::vector<AugStateId> all;
  for (StateId e : sys_->init_states()) {
    for (AugStateId id : initial_states_for(sys_->base_of(e), sys_->stack_of(e)))
      all.push_back(id);
  }
  return all;
}

std::vector<AugStateId> Product::initial_states_for(StateId g0, StackIndex i0) {
  const Closure& cl = *cl_;
  uint32_t n = stack_count();

  std::vector<uint64_t> reg0;
  for (const RegConstraint& c : reg_)
    reg0.push_back(nfa_image_mask(table_->automaton(c.automaton), c.initial_set, kBottom));

  // Candidates for the initial stack's atom: the root and (g0, i0) hold, no
  // caller-next claims (all stacks start at bottom), no foreign
  // caller-untils, and constraint members match the initial tracker values.
  std::vector<AtomId> root_cands;
  for (AtomId id : atoms_.slot_atoms(i0)) {
    const AtomBits& a = atoms_.bits(id);
    if (!a.get(cl.root_index())) continue;
    if (!a.get(cl.element_index(g0, i0))) continue;
    bool ok = true;
    for (uint32_t idx : cl.all_caller_next_members())
      if (a.get(idx)) ok = false;
    for (uint32_t idx : cl.caller_until_members())
      if (cl.entry(idx).stack != i0 && a.get(idx)) ok = false;
    for (std::size_t c = 0; c < reg_.size() && ok; ++c)
      if (a.get(reg_[c].closure_idx) != ((reg0[c] & reg_[c].accepting_set) != 0)) ok = false;
    if (ok) root_cands.push_back(id);
  }

  std::vector<AugStateId> out;
  for (uint32_t dead_mask = 0; dead_mask < (1u << n); ++dead_mask) {
    if (dead_mask & (1u << i0)) continue;
    for (AtomId a0 : root_cands) {
      // Alive foreign stacks carry atoms agreeing with the initial atom on
      // their own abstract-untils.
      std::vector<std::vector<AtomId>> cands(n);
      bool feasible = true;
      for (StackIndex j = 0; j < n && feasible; ++j) {
        if (j == i0 || (dead_mask & (1u << j))) continue;
        for (AtomId id : atoms_.slot_atoms(j)) {
          bool ok = true;
          for (uint32_t idx : cl.abs_until_members()) {
            if (cl.entry(idx).stack != j) continue;
            if (atoms_.get(id, idx) != atoms_.get(a0, idx)) ok = false;
          }
          if (ok) cands[j].push_back(id);
        }
        if (cands[j].empty()) feasible = false;
      }
      if (!feasible) continue;
      std::vector<AtomId> pick(n, kEmptyAtom);
      pick[i0] = a0;
      std::function<void(StackIndex)> rec = [&](StackIndex j) {
        if (j == n) {
          AugStateData d;
          d.base_g = g0;
          d.active = i0;
          d.atoms = pick;
          d.ret_mask = 0;
          d.dead_mask = dead_mask;
          d.reg = reg0;
          out.push_back(intern_state(std::move(d)));
          return;
        }
        if (j == i0 || (dead_mask & (1u << j))) {
          rec(j + 1);
          return;
        }
        for (AtomId id : cands[j]) {
          pick[j] = id;
          rec(j + 1);
        }
        pick[j] = kEmptyAtom;
      };
      rec(0);
    }
  }
  return out;
}

std::vector<AccPredicate> Product::acceptance_family() const {
  std::vector<AccPredicate> fam;
  const Closure& cl = *cl_;
  const Product* self = this;
  for (uint32_t idx : cl.until_members()) {
    fam.push_back({cat("F1:", table_->render(cl.entry(idx).formula)),
                   [self, idx](AugStateId id) {
                     const AugStateData& st = self->states_[id];
                     AtomId a = st.atoms[st.active];
                     const ClosureEntry& e = self->cl_->entry(idx);
                     return self->atoms_.get(a, e.op_b) || !self->atoms_.get(a, idx);
                   }});
  }
  for (uint32_t idx : cl.abs_until_members()) {
    StackIndex sigma = cl.entry(idx).stack;
    fam.push_back({cat("F2:", table_->render(cl.entry(idx).formula)),
                   [self, idx, sigma](AugStateId id) {
                     const AugStateData& st = self->states_[id];
                     if (st.dead(sigma)) return true;
                     if (st.active != sigma || st.willreturn(sigma)) return false;
                     AtomId a = st.atoms[sigma];
                     const ClosureEntry& e = self->cl_->entry(idx);
                     return self->atoms_.get(a, e.op_b) || !self->atoms_.get(a, idx);
                   }});
  }
  for (StackIndex j = 0; j < stack_count(); ++j)
    fam.push_back({cat("F3:", j + 1), [self, j](AugStateId id) {
                     const AugStateData& st = self->states_[id];
                     return st.active == j || st.dead(j);
                   }});
  for (StackIndex j = 0; j < stack_count(); ++j)
    fam.push_back({cat("F4:", j + 1), [self, j](AugStateId id) {
                     const AugStateData& st = self->states_[id];
                     return st.dead(j) || (st.active == j && !st.willreturn(j));
                   }});
  return fam;
}

// ---------------------------------------------------------------------------
// gamma and projection
// ---------------------------------------------------------------------------

AugLasso Product::augment(const LassoRun& base) {
  base.validate();
  const Closure& cl = *cl_;
  uint32_t n = stack_count();
  std::size_t T = base.steps();
  std::size_t kappa = base.cycle_start;
  std::size_t L = base.cycle_len();
  Evaluator ev(*table_, base);

  std::vector<bool> active_in_cycle(n, false);
  std::vector<std::ptrdiff_t> last_active(n, -1);
  for (std::size_t t = 0; t < T; ++t) {
    StackIndex s = base.active_at(t);
    last_active[s] = static_cast<std::ptrdiff_t>(t);
    if (t >= kappa) active_in_cycle[s] = true;
  }

  auto dead_at = [&](StackIndex j, std::size_t t) {
    if (active_in_cycle[j]) return false;
    return last_active[j] < static_cast<std::ptrdiff_t>(t);
  };
  // noreturn iff the stack never drops below its current height; heights are
  // periodic over the cycle, so prefix-plus-one-cycle minima decide it.
  auto noreturn_at = [&](StackIndex j, std::size_t t) {
    std::size_t h = base.height(j, t);
    std::size_t mn = h;
    for (std::size_t p = t; p <= T; ++p) mn = std::min(mn, base.height(j, p));
    for (std::size_t p = kappa; p <= T; ++p) mn = std::min(mn, base.height(j, p));
    return mn >= h;
  };
  auto next_active = [&](StackIndex j, std::size_t t) -> std::size_t {
    for (std::size_t p = t; p <= std::max(t, kappa) + L + 1; ++p)
      if (base.active_at(p) == j) return p;
    fail("augment: alive stack has no next activity");
  };

  auto atom_at = [&](StackIndex j, std::size_t t) -> AtomId {
    if (dead_at(j, t)) return kEmptyAtom;
    std::size_t ref = next_active(j, t);
    AtomBits bits;
    bits.resize(cl.size());
    for (uint32_t i = 0; i < cl.size(); ++i)
      bits.set(i, ev.evaluate(ref, cl.entry(i).formula));
    return atoms_.intern(bits);
  };

  auto reg_at = [&](std::size_t t) {
    std::vector<uint64_t> out;
    for (const RegConstraint& c : reg_) {
      const Nfa& nfa = table_->automaton(c.automaton);
      uint64_t x = c.initial_set;
      for (LetterId a : base.config_at(t).stacks[c.stack]) x = nfa_image_mask(nfa, x, a);
      out.push_back(x);
    }
    return out;
  };

  AugLasso aug;
  aug.cycle_start = kappa;

  std::vector<std::vector<AugLetterId>> letter_stacks;
  for (StackIndex j = 0; j < n; ++j)
    letter_stacks.push_back(std::vector<AugLetterId>{bottom_letters_[j]});

  std::vector<AugStateId> state_ids;
  for (std::size_t t = 0; t <= T; ++t) {
    AugStateData d;
    d.base_g = sys_->base_of(base.config_at(t).state);
    d.active = base.active_at(t);
    d.atoms.resize(n);
    d.ret_mask = 0;
    d.dead_mask = 0;
    for (StackIndex j = 0; j < n; ++j) {
      d.atoms[j] = atom_at(j, t);
      bool dj = dead_at(j, t);
      if (dj) d.dead_mask |= 1u << j;
      if (!dj && !noreturn_at(j, t)) d.ret_mask |= 1u << j;
    }
    d.reg = reg_at(t);
    state_ids.push_back(intern_state(std::move(d)));
    AugConfig c;
    c.state = state_ids.back();
    c.stacks = letter_stacks;
    aug.configs.push_back(std::move(c));

    if (t == T) break;
    const Rule& r = base.rule_at(t);
    StackIndex s = base.active_at(t);
    ProductRule pr;
    pr.from = state_ids[t];
    pr.top = letter_stacks[s].back();
    pr.stack = s;
    pr.to_stack = sys_->stack_of(base.config_at(t + 1).state);
    pr.kind = r.kind;
    pr.base_rule = r.id;
    const AugLetterData top = letters_[letter_stacks[s].back()];
    switch (r.kind) {
      case ActionKind::Call: {
        AugLetterData ld;
        ld.letter = r.arg;
        ld.atom = states_[state_ids[t]].atoms[s];
        ld.willreturn = states_[state_ids[t]].willreturn(s);
        for (uint32_t ci : reg_on_stack_[s])
          ld.reg_snapshot.push_back(states_[state_ids[t]].reg[ci]);
        pr.out = intern_letter(std::move(ld));
        letter_stacks[s].push_back(pr.out);
        break;
      }
      case ActionKind::Internal: {
        AugLetterData ld;
        ld.letter = r.arg;
        ld.atom = top.atom;
        ld.willreturn = top.willreturn;
        ld.reg_snapshot = top.reg_snapshot;
        pr.out = intern_letter(std::move(ld));
        letter_stacks[s].back() = pr.out;
        break;
      }
      case ActionKind::Return:
        pr.out = pr.top;
        letter_stacks[s].pop_back();
        break;
    }
    aug.steps.push_back(pr);
  }
  for (std::size_t t = 0; t < T; ++t) aug.steps[t].to = aug.configs[t + 1].state;
  require(aug.configs.back() == aug.configs[kappa], "augmented lasso does not close");
  return aug;
}

LassoRun Product::project(const AugLasso& aug) const {
  LassoRun base;
  base.sys = sys_;
  base.cycle_start = aug.cycle_start;
  for (const AugConfig& c : aug.configs) {
    Config bc;
    const AugStateData& st = states_[c.state];
    bc.state = sys_->state_of(st.base_g, st.active);
    for (const auto& w : c.stacks) {
      std::vector<LetterId> letters;
      for (AugLetterId l : w) letters.push_back(letters_[l].letter);
      bc.stacks.push_back(std::move(letters));
    }
    base.configs.push_back(std::move(bc));
  }
  for (const ProductRule& r : aug.steps) base.rule_ids.push_back(r.base_rule);
  return base;
}

bool Product::step_allowed(const AugConfig& from, const ProductRule& r, const AugConfig& to) {
  for (const auto& [rule, next] : successors(from)) {
    if (rule.to == r.to && rule.kind == r.kind && rule.base_rule == r.base_rule &&
        rule.out == r.out && next == to)
      return true;
  }
  return false;
}

std::string Product::render_state(AugStateId id) const {
  const AugStateData& st = states_[id];
  std::string out = cat("(", sys_->base_state_name(st.base_g), ",", st.active + 1, ")[");
  for (StackIndex j = 0; j < stack_count(); ++j) {
    if (j) out += " ";
    out += cat(j + 1, ":", st.dead(j) ? "dead" : (st.willreturn(j) ? "wr" : "nr"), ":",
               atoms_.render(st.atoms[j]));
  }
  return out + "]";
}

std::string Product::render_letter(AugLetterId id) const {
  const AugLetterData& d = letters_[id];
  return cat("(", sys_->letter_name(d.letter), ",", d.willreturn ? "wr" : "nr", ",",
             atoms_.render(d.atom), ")");
}

}  // namespace mcaret
