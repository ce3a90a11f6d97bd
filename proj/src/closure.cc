#include "closure.hh"

#include <algorithm>
#include <deque>

namespace mcaret {

Closure::Closure(FormulaTable& table, FormulaId root)
    : table_(&table), mutable_table_(&table), root_(root) {
  require(table.is_simplified(root),
          "closure requires the simplified language (state atoms, reg atoms, !, |, X, U, "
          "Xa[s], Ua[s], Xc[s], Uc[s])");
  build(root);
  classify();
}

std::optional<uint32_t> Closure::index_of(FormulaId f) const {
  auto it = index_of_.find(f);
  if (it == index_of_.end()) return std::nullopt;
  return it->second;
}

void Closure::build(FormulaId root) {
  FormulaTable& t = *mutable_table_;
  std::deque<FormulaId> work;
  auto add = [&](FormulaId f) {
    if (index_of_.count(f)) return;
    uint32_t idx = static_cast<uint32_t>(entries_.size());
    index_of_.emplace(f, idx);
    ClosureEntry e;
    e.formula = f;
    e.kind = t.node(f).kind;
    e.stack = t.node(f).stack;
    if (e.kind == FKind::StateAtom) e.state = t.node(f).a;
    if (e.kind == FKind::RegAtom) e.payload = t.node(f).a;
    entries_.push_back(e);
    work.push_back(f);
  };

  add(root);
  uint32_t n_states = state_count();
  for (StateId g = 0; g < n_states; ++g)
    for (StackIndex s = 0; s < stack_count(); ++s) add(t.state_atom(g, s));

  while (!work.empty()) {
    FormulaId f = work.front();
    work.pop_front();
    const FNode n = t.node(f);
    switch (n.kind) {
      case FKind::Not:
        add(n.a);
        break;
      case FKind::Or:
        add(n.a);
        add(n.b);
        break;
      case FKind::Next:
        add(n.a);
        break;
      case FKind::AbsNext:
      case FKind::CallerNext:
        add(n.a);
        break;
      case FKind::Until:
        add(n.a);
        add(n.b);
        add(t.mk_next(f));
        break;
      case FKind::AbsUntil:
        add(n.a);
        add(n.b);
        add(t.mk_abs_next(n.stack, f));
        break;
      case FKind::CallerUntil:
        add(n.a);
        add(n.b);
        add(t.mk_caller_next(n.stack, f));
        break;
      case FKind::StateAtom:
      case FKind::RegAtom:
        break;
      default:
        fail("closure: formula not in the simplified language");
    }
    if (n.kind != FKind::Not) add(t.mk_not(f));
  }

  // Resolve operand/partner indices now that membership is final.
  for (ClosureEntry& e : entries_) {
    const FNode n = t.node(e.formula);
    switch (e.kind) {
      case FKind::Not:
        e.op_a = static_cast<int32_t>(index_of_.at(n.a));
        e.neg = e.op_a;
        break;
      case FKind::Or:
      case FKind::Until:
      case FKind::AbsUntil:
      case FKind::CallerUntil:
        e.op_a = static_cast<int32_t>(index_of_.at(n.a));
        e.op_b = static_cast<int32_t>(index_of_.at(n.b));
        break;
      case FKind::Next:
      case FKind::AbsNext:
      case FKind::CallerNext:
        e.op_a = static_cast<int32_t>(index_of_.at(n.a));
        break;
      default:
        break;
    }
    if (e.kind == FKind::Until) e.unfold = static_cast<int32_t>(index_of_.at(t.mk_next(e.formula)));
    if (e.kind == FKind::AbsUntil)
      e.unfold = static_cast<int32_t>(index_of_.at(t.mk_abs_next(e.stack, e.formula)));
    if (e.kind == FKind::CallerUntil)
      e.unfold = static_cast<int32_t>(index_of_.at(t.mk_caller_next(e.stack, e.formula)));
    if (e.kind != FKind::Not) e.neg = static_cast<int32_t>(index_of_.at(t.mk_not(e.formula)));
  }

  element_index_.assign(n_states * stack_count(), 0);
  for (StateId g = 0; g < n_states; ++g)
    for (StackIndex s = 0; s < stack_count(); ++s)
      element_index_[g * stack_count() + s] = index_of_.at(t.state_atom(g, s));
}

void Closure::classify() {
  abs_nexts_.assign(stack_count(), {});
  caller_nexts_.assign(stack_count(), {});
  for (uint32_t i = 0; i < entries_.size(); ++i) {
    const ClosureEntry& e = entries_[i];
    switch (e.kind) {
      case FKind::StateAtom:
        state_atoms_.push_back(i);
        break;
      case FKind::RegAtom:
        regs_.push_back(i);
        free_members_.push_back(i);
        break;
      case FKind::Next:
        nexts_.push_back(i);
        free_members_.push_back(i);
        break;
      case FKind::AbsNext:
        abs_nexts_[e.stack].push_back(i);
        free_members_.push_back(i);
        break;
      case FKind::CallerNext:
        caller_nexts_[e.stack].push_back(i);
        all_caller_nexts_.push_back(i);
        free_members_.push_back(i);
        break;
      case FKind::Until:
        untils_.push_back(i);
        determined_members_.push_back(i);
        break;
      case FKind::AbsUntil:
        abs_untils_.push_back(i);
        free_members_.push_back(i);
        break;
      case FKind::CallerUntil:
        caller_untils_.push_back(i);
        free_members_.push_back(i);
        break;
      case FKind::Not:
      case FKind::Or:
        determined_members_.push_back(i);
        break;
      default:
        fail("closure: unexpected member kind");
    }
  }
  // Determined members are computed in ascending formula size, so operands
  // (strictly smaller) and free members are available when needed.
  std::sort(determined_members_.begin(), determined_members_.end(),
            [&](uint32_t a, uint32_t b) {
              uint32_t sa = table_->size(entries_[a].formula);
              uint32_t sb = table_->size(entries_[b].formula);
              if (sa != sb) return sa < sb;
              return a < b;
            });
}

uint64_t Closure::atom_count() const {
  uint64_t n = state_atoms_.size();
  require(free_members_.size() < 63, "closure too large for atom enumeration");
  return n << free_members_.size();
}

AtomBits Closure::atom_at(uint64_t i) const {
  require(i < atom_count(), "atom index out of range");
  AtomBits a;
  a.resize(entries_.size());
  uint64_t element_choice = i >> free_members_.size();
  uint64_t free_bits = i & ((uint64_t{1} << free_members_.size()) - 1);
  a.set(state_atoms_[element_choice], true);
  for (std::size_t j = 0; j < free_members_.size(); ++j)
    a.set(free_members_[j], (free_bits >> j) & 1);
  for (uint32_t idx : determined_members_) {
    const ClosureEntry& e = entries_[idx];
    switch (e.kind) {
      case FKind::Not:
        a.set(idx, !a.get(e.op_a));
        break;
      case FKind::Or:
        a.set(idx, a.get(e.op_a) || a.get(e.op_b));
        break;
      case FKind::Until:
        a.set(idx, a.get(e.op_b) || (a.get(e.op_a) && a.get(e.unfold)));
        break;
      default:
        fail("unreachable");
    }
  }
  return a;
}

bool Closure::is_atom(const AtomBits& a) const {
  // Rule: exactly one element of G x [N].
  int elements = 0;
  for (uint32_t i : state_atoms_) elements += a.get(i) ? 1 : 0;
  if (elements != 1) return false;
  for (uint32_t i = 0; i < entries_.size(); ++i) {
    const ClosureEntry& e = entries_[i];
    // Rule: for every !psi in Cl, psi in A iff !psi not in A.
    if (e.kind == FKind::Not) {
      if (a.get(i) == a.get(e.op_a)) return false;
    }
    if (e.kind == FKind::Or) {
      if (a.get(i) != (a.get(e.op_a) || a.get(e.op_b))) return false;
    }
    if (e.kind == FKind::Until) {
      bool rhs = a.get(e.op_b) || (a.get(e.op_a) && a.get(e.unfold));
      if (a.get(i) != rhs) return false;
    }
  }
  return true;
}

}  // namespace mcaret
