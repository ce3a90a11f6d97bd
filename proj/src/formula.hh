// formula.hh -- Multi-CaRet syntax trees, hash-consed per system, with the
// concrete-grammar parser/renderer and derived-operator rewriting.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "base.hh"
#include "mpds.hh"
#include "nfa.hh"

namespace mcaret {

using FormulaId = uint32_t;

enum class FKind : uint8_t {
  StateAtom,    // (g, s): state is g and stack s is active
  ActionAtom,   // call / return / internal
  StackAtom,    // stack s is active
  RegAtom,      // in(s, A): content of stack s is in L(A), read bottom-up
  Not,
  Or,
  Next,         // X
  Until,        // U
  AbsNext,      // Xa[s]
  AbsUntil,     // Ua[s]
  CallerNext,   // Xc[s]
  CallerUntil,  // Uc[s]
  StackNext,    // Xs[s]   (derived)
  AbsNextAny,   // Xa      (derived)
  AbsUntilAny,  // Ua      (derived)
};

struct FNode {
  FKind kind;
  uint32_t a = 0;     // left operand / state id / action / automaton index
  uint32_t b = 0;     // right operand
  uint32_t stack = 0; // stack parameter where applicable

  bool operator==(const FNode& o) const {
    return kind == o.kind && a == o.a && b == o.b && stack == o.stack;
  }
};

// Owns the hash-consed nodes of formulas over one system's states, stacks
// and alphabet. Also owns the named constraint automata formulas reference.
class FormulaTable {
public:
  FormulaTable(std::vector<std::string> state_names, uint32_t stack_count,
               std::vector<std::string> alphabet);

  uint32_t stack_count() const { return stack_count_; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::optional<LetterId> letter_index(const std::string& name) const;

  uint32_t add_automaton(const std::string& name, Nfa a);
  const Nfa& automaton(uint32_t idx) const { return automata_[idx].second; }
  const std::string& automaton_name(uint32_t idx) const { return automata_[idx].first; }
  std::optional<uint32_t> automaton_index(const std::string& name) const;
  uint32_t automaton_count() const { return static_cast<uint32_t>(automata_.size()); }

  const FNode& node(FormulaId f) const { return nodes_[f]; }
  uint32_t size(FormulaId f) const { return sizes_[f]; }  // syntax-tree node count

  FormulaId state_atom(StateId g, StackIndex s);
  FormulaId action_atom(ActionKind a);
  FormulaId stack_atom(StackIndex s);
  FormulaId reg_atom(StackIndex s, uint32_t automaton_idx);
  FormulaId mk_not(FormulaId f);
  FormulaId mk_or(FormulaId l, FormulaId r);
  FormulaId mk_and(FormulaId l, FormulaId r);      // sugar: !(!l | !r)
  FormulaId mk_implies(FormulaId l, FormulaId r);  // sugar: !l | r
  FormulaId mk_true();                             // sugar over the first state atom
  FormulaId mk_false();
  FormulaId mk_next(FormulaId f);
  FormulaId mk_until(FormulaId l, FormulaId r);
  FormulaId mk_eventually(FormulaId f);  // sugar: true U f
  FormulaId mk_globally(FormulaId f);    // sugar: !F!f
  FormulaId mk_abs_next(StackIndex s, FormulaId f);
  FormulaId mk_abs_until(StackIndex s, FormulaId l, FormulaId r);
  FormulaId mk_caller_next(StackIndex s, FormulaId f);
  FormulaId mk_caller_until(StackIndex s, FormulaId l, FormulaId r);
  FormulaId mk_stack_next(StackIndex s, FormulaId f);
  FormulaId mk_abs_next_any(FormulaId f);
  FormulaId mk_abs_until_any(FormulaId l, FormulaId r);

  // Eliminates Xs[s], Xa and Ua via their defining equivalences; output uses
  // primitive operators only. Idempotent on primitive formulas.
  FormulaId rewrite_derived(FormulaId f);

  // Additionally rewrites stack-activity atoms to state-atom disjunctions.
  // Action atoms are left alone (see prepare() in solver.hh for those).
  FormulaId expand_stack_atoms(FormulaId f);

  bool uses_action_atoms(FormulaId f) const;
  bool uses_reg_atoms(FormulaId f) const;

  // True iff f is in the simplified product language: state atoms, reg atoms,
  // !, |, X, U, Xa[s], Ua[s], Xc[s], Uc[s].
  bool is_simplified(FormulaId f) const;

  std::string render(FormulaId f) const;

private:
  FormulaId intern(FNode n);

  std::vector<std::string> state_names_;
  uint32_t stack_count_;
  std::vector<std::string> alphabet_;
  std::vector<std::pair<std::string, Nfa>> automata_;
  std::vector<FNode> nodes_;
  std::vector<uint32_t> sizes_;
  struct NodeHash {
    std::size_t operator()(const FNode& n) const {
      std::size_t h = static_cast<std::size_t>(n.kind);
      hash_mix(h, n.a);
      hash_mix(h, n.b);
      hash_mix(h, n.stack);
      return h;
    }
  };
  std::unordered_map<FNode, FormulaId, NodeHash> index_;
};

// Parses the concrete formula grammar, including leading automaton blocks.
// Reports syntax errors with positions; validates stack indices against the
// table's stack count and automaton names against its registry.
FormulaId parse_formula(FormulaTable& table, const std::string& text);

}  // namespace mcaret
