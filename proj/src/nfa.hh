// nfa.hh -- nondeterministic finite automata over stack letters. Used both for
// user-supplied regularity constraints (which read stack contents bottom-up)
// and for the per-stack content automata of the saturation pipeline.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "base.hh"
#include "mpds.hh"

namespace mcaret {

struct NfaTrans {
  uint32_t from;
  LetterId letter;
  uint32_t to;
  bool operator==(const NfaTrans& o) const {
    return from == o.from && letter == o.letter && to == o.to;
  }
};

class Nfa {
public:
  Nfa() = default;
  Nfa(uint32_t n_states, std::vector<uint32_t> initial, std::vector<uint32_t> accepting,
      std::vector<NfaTrans> transitions);

  uint32_t state_count() const { return n_states_; }
  const std::vector<uint32_t>& initial() const { return initial_; }
  const std::vector<uint32_t>& accepting() const { return accepting_; }
  const std::vector<NfaTrans>& transitions() const { return transitions_; }
  bool is_accepting(uint32_t q) const { return accepting_mask_[q]; }

  // Subset image of `from` under one letter.
  std::vector<uint32_t> image(std::span<const uint32_t> from, LetterId a) const;

  bool accepts(std::span<const LetterId> word) const;
  bool empty_language() const;

  // True iff some accepting state is reachable from `from`.
  bool some_accepting(std::span<const uint32_t> from) const;

  bool deterministic() const;

  uint32_t add_state();
  void add_transition(uint32_t from, LetterId letter, uint32_t to);
  void set_initial(std::vector<uint32_t> initial);
  void add_accepting(uint32_t q);

  // Removes states that are unreachable or cannot reach acceptance; renumbers
  // the survivors in BFS order from the initial states.
  Nfa trimmed() const;

private:
  void rebuild_index();

  uint32_t n_states_ = 0;
  std::vector<uint32_t> initial_;
  std::vector<uint32_t> accepting_;
  std::vector<bool> accepting_mask_;
  std::vector<NfaTrans> transitions_;
  // per (state, letter) outgoing targets
  std::vector<std::vector<std::vector<uint32_t>>> out_;
};

// The automaton accepting exactly the one-letter word [letter].
Nfa singleton_word_nfa(LetterId letter, uint32_t alphabet_size);

}  // namespace mcaret
