// closure.hh -- the closure set Cl(phi) and its locally consistent subsets
// (atoms), with a lazy constraint-propagating atom enumerator.
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "formula.hh"

namespace mcaret {

// Membership bitset over closure indices.
struct AtomBits {
  std::vector<uint64_t> words;

  void resize(std::size_t bits) { words.assign((bits + 63) / 64, 0); }
  bool get(uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
  void set(uint32_t i, bool v) {
    if (v)
      words[i >> 6] |= (uint64_t{1} << (i & 63));
    else
      words[i >> 6] &= ~(uint64_t{1} << (i & 63));
  }
  bool operator==(const AtomBits& o) const { return words == o.words; }
  bool empty() const {
    for (uint64_t w : words)
      if (w) return false;
    return true;
  }
};

struct AtomBitsHash {
  std::size_t operator()(const AtomBits& a) const {
    std::size_t h = 0x51ed270b;
    for (uint64_t w : a.words) hash_mix(h, static_cast<std::size_t>(w));
    return h;
  }
};

struct ClosureEntry {
  FormulaId formula;
  FKind kind;
  int32_t neg = -1;   // index of the syntactic negation partner
  int32_t op_a = -1;  // operand closure indices where applicable
  int32_t op_b = -1;
  int32_t unfold = -1;  // Until: index of X(psi); AbsUntil/CallerUntil: of Xb[s](psi)
  uint32_t stack = 0;   // stack parameter (StateAtom/AbsNext/AbsUntil/...)
  StateId state = 0;    // StateAtom only
  uint32_t payload = 0; // RegAtom: automaton index
};

class Closure {
public:
  // Builds Cl(root) over the table's G and N per the five closure rules. The
  // table is extended with X(psi)/Xb[s](psi)/negation nodes as needed.
  // `root` must be in the simplified language (see FormulaTable::is_simplified).
  Closure(FormulaTable& table, FormulaId root);

  const FormulaTable& table() const { return *table_; }
  FormulaId root() const { return root_; }
  uint32_t root_index() const { return index_of_.at(root_); }

  uint32_t size() const { return static_cast<uint32_t>(entries_.size()); }
  const ClosureEntry& entry(uint32_t i) const { return entries_[i]; }
  const std::vector<ClosureEntry>& entries() const { return entries_; }
  std::optional<uint32_t> index_of(FormulaId f) const;

  uint32_t stack_count() const { return table_->stack_count(); }
  uint32_t state_count() const { return static_cast<uint32_t>(table_->state_names().size()); }

  // Closure index of the state atom (g, s); all of G x [N] is present.
  uint32_t element_index(StateId g, StackIndex s) const {
    return element_index_[g * stack_count() + s];
  }

  // Pre-sliced member lists (closure indices), in closure order.
  const std::vector<uint32_t>& state_atom_members() const { return state_atoms_; }
  const std::vector<uint32_t>& next_members() const { return nexts_; }
  const std::vector<uint32_t>& abs_next_members(StackIndex s) const { return abs_nexts_[s]; }
  const std::vector<uint32_t>& caller_next_members(StackIndex s) const {
    return caller_nexts_[s];
  }
  const std::vector<uint32_t>& all_caller_next_members() const { return all_caller_nexts_; }
  const std::vector<uint32_t>& until_members() const { return untils_; }
  const std::vector<uint32_t>& abs_until_members() const { return abs_untils_; }
  const std::vector<uint32_t>& caller_until_members() const { return caller_untils_; }
  const std::vector<uint32_t>& reg_members() const { return regs_; }

  // --- atoms ---

  // Number of non-empty atoms: one (g,s) element choice times free polarities.
  uint64_t atom_count() const;

  // The i-th atom in canonical order; restartable and random-access.
  AtomBits atom_at(uint64_t i) const;

  // True iff `a` satisfies the four atom rules (negation completeness,
  // disjunction rule, until unfolding, exactly one G x [N] element). This is
  // the independent subset filter used by tests; it does not share logic with
  // the enumerator.
  bool is_atom(const AtomBits& a) const;

private:
  void build(FormulaId root);
  void classify();

  const FormulaTable* table_;
  FormulaTable* mutable_table_;
  FormulaId root_;
  std::vector<ClosureEntry> entries_;
  std::unordered_map<FormulaId, uint32_t> index_of_;
  std::vector<uint32_t> element_index_;

  std::vector<uint32_t> state_atoms_;
  std::vector<uint32_t> nexts_;
  std::vector<std::vector<uint32_t>> abs_nexts_;
  std::vector<std::vector<uint32_t>> caller_nexts_;
  std::vector<uint32_t> all_caller_nexts_;
  std::vector<uint32_t> untils_;
  std::vector<uint32_t> abs_untils_;
  std::vector<uint32_t> caller_untils_;
  std::vector<uint32_t> regs_;

  // enumerator support
  std::vector<uint32_t> free_members_;        // polarity choices
  std::vector<uint32_t> determined_members_;  // computed bottom-up, by size
};

}  // namespace mcaret
