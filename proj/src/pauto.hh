// pauto.hh -- P-automata over stack alphabets, post*/pre* saturation, the
// FSA/PA conversions, and repeated-head detection of infinite runs.
//
// Internally automata read configuration words top-first; the config-facing
// entry points take stacks written bottom-first (as Config stores them).
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "base.hh"
#include "nfa.hh"

namespace mcaret {

using PdsState = uint64_t;
using PdsLetter = uint32_t;

enum class PdsOp : uint8_t {
  Push,     // top a becomes a with `out` above it (call)
  Replace,  // top a becomes out (internal)
  Pop,      // top a removed (return)
};

struct PdsRule {
  PdsState from = 0;
  PdsLetter top = 0;
  PdsState to = 0;
  PdsOp op = PdsOp::Replace;
  PdsLetter out = 0;  // unused for Pop
  uint32_t tag = 0;   // originating rule id, carried into witnesses

  bool operator==(const PdsRule& o) const {
    return from == o.from && top == o.top && to == o.to && op == o.op && out == o.out;
  }
};

// Rules are supplied on demand, keyed by head. Saturation only ever asks for
// heads it has reached, so exponential systems stay implicit.
struct LazyPds {
  std::function<std::vector<PdsRule>(PdsState, PdsLetter)> rules_for;
};

LazyPds materialize(std::vector<PdsRule> rules);

struct SatStats {
  uint64_t post_star_calls = 0;
  uint64_t pre_star_calls = 0;
  uint64_t fsa_calls = 0;
  uint64_t pa_calls = 0;
  uint64_t states_added = 0;        // cumulative over audited operations
  uint64_t max_op_growth = 0;       // max per-operation state growth
  uint64_t transitions_added = 0;
  uint64_t repeated_head_calls = 0;
};

class PAutomaton {
public:
  struct Node {
    enum class Kind : uint8_t { P, Aux, Mid } kind;
    PdsState pstate = 0;   // P and Mid
    PdsLetter letter = 0;  // Mid: the pushed letter
  };

  PAutomaton() = default;

  uint32_t add_p_state(PdsState p);
  uint32_t add_aux_state();
  uint32_t add_mid_state(PdsState p, PdsLetter a);  // reused per (p, a)
  std::optional<uint32_t> find_p_state(PdsState p) const;

  bool add_transition(uint32_t from, PdsLetter letter, uint32_t to);
  void add_eps(uint32_t from, uint32_t to);
  void mark_accepting(uint32_t q);

  uint32_t state_count() const { return static_cast<uint32_t>(nodes_.size()); }
  const Node& node(uint32_t q) const { return nodes_[q]; }
  bool is_accepting(uint32_t q) const { return accepting_[q]; }
  const std::vector<std::tuple<uint32_t, PdsLetter, uint32_t>>& transitions() const {
    return transitions_;
  }
  const std::vector<std::pair<uint32_t, PdsLetter>>& outgoing(uint32_t q) const;
  const std::vector<std::vector<uint32_t>>& eps_out() const { return eps_out_; }

  // Membership of the configuration (p, stack) with the stack bottom-first.
  bool accepts_config(PdsState p, std::span<const LetterId> stack_bottom_first) const;
  // Word w is read top-first.
  bool accepts_word(PdsState p, std::span<const PdsLetter> w) const;

  // States from which an accepting state is reachable (epsilon included).
  std::vector<bool> coaccessible() const;

  bool language_empty() const;

  // Line format: one `from letter to` per transition plus an `accepting` line;
  // deterministic order. Render callbacks may be empty for numeric output.
  void dump(std::ostream& os, const std::function<std::string(PdsState)>& state_name,
            const std::function<std::string(PdsLetter)>& letter_name) const;

  std::string node_label(uint32_t q, const std::function<std::string(PdsState)>& state_name)
      const;

private:
  friend PAutomaton post_star(const LazyPds&, const PAutomaton&, SatStats*);
  friend PAutomaton pre_star(const std::vector<PdsRule>&, const PAutomaton&, SatStats*);

  std::vector<Node> nodes_;
  std::vector<bool> accepting_;
  std::unordered_map<PdsState, uint32_t> p_index_;
  std::map<std::pair<PdsState, PdsLetter>, uint32_t> mid_index_;
  std::vector<std::tuple<uint32_t, PdsLetter, uint32_t>> transitions_;
  std::unordered_set<uint64_t> trans_set_;
  std::vector<std::vector<std::pair<PdsLetter, uint32_t>>> out_;
  std::vector<std::vector<uint32_t>> eps_out_;
  std::vector<std::vector<uint32_t>> eps_in_;
};

// Saturates `input` into an automaton for the forward-reachable configurations.
// The input may not have transitions into P-states. Adds at most one fresh
// state per (target state, pushed letter) pair of the applied push rules.
PAutomaton post_star(const LazyPds& pds, const PAutomaton& input, SatStats* stats = nullptr);

// Backward closure over an explicit rule list; adds no states.
PAutomaton pre_star(const std::vector<PdsRule>& rules, const PAutomaton& input,
                    SatStats* stats = nullptr);

// Word automaton for { w : (p, w) in L(A) }, single fresh initial state,
// trimmed. Words are top-first like the P-automaton's.
Nfa fsa_of(const PAutomaton& a, PdsState p, SatStats* stats = nullptr);

// P-automaton recognizing exactly { (p, w) : w in L(b) }; `all_p` lists the
// control states the result must carry. b must be single-initial with no
// transitions into its initial state.
PAutomaton pa_of(const Nfa& b, PdsState p, std::span<const PdsState> all_p,
                 SatStats* stats = nullptr);

struct RepeatedHeadWitness {
  PdsState head_state = 0;
  PdsLetter head_letter = 0;
};

// True iff some configuration in L(a) starts an infinite run of `pds` whose
// control state satisfies `target` infinitely often. Implemented with the
// repeating-head characterization: post*-saturate, materialize the reachable
// sub-pds, compute pop relations (a pre* fixpoint) with a target-hit bit,
// and look for flagged cycles in the head graph.
bool repeated_head_infinite_run(const LazyPds& pds, const PAutomaton& a,
                                const std::function<bool(PdsState)>& target,
                                RepeatedHeadWitness* witness = nullptr,
                                SatStats* stats = nullptr);

}  // namespace mcaret
