#include "nfa.hh"

#include <algorithm>
#include <deque>

namespace mcaret {

Nfa::Nfa(uint32_t n_states, std::vector<uint32_t> initial, std::vector<uint32_t> accepting,
         std::vector<NfaTrans> transitions)
    : n_states_(n_states),
      initial_(std::move(initial)),
      accepting_(std::move(accepting)),
      transitions_(std::move(transitions)) {
  for (uint32_t q : initial_) require(q < n_states_, "nfa initial state out of range");
  for (uint32_t q : accepting_) require(q < n_states_, "nfa accepting state out of range");
  for (const auto& t : transitions_)
    require(t.from < n_states_ && t.to < n_states_, "nfa transition out of range");
  rebuild_index();
}

void Nfa::rebuild_index() {
  accepting_mask_.assign(n_states_, false);
  for (uint32_t q : accepting_) accepting_mask_[q] = true;
  out_.assign(n_states_, {});
  std::size_t max_letter = 0;
  for (const auto& t : transitions_) max_letter = std::max<std::size_t>(max_letter, t.letter);
  for (auto& per_state : out_) per_state.assign(max_letter + 1, {});
  for (const auto& t : transitions_) out_[t.from][t.letter].push_back(t.to);
}

std::vector<uint32_t> Nfa::image(std::span<const uint32_t> from, LetterId a) const {
  std::vector<bool> seen(n_states_, false);
  std::vector<uint32_t> out;
  for (uint32_t q : from) {
    if (q >= out_.size() || a >= out_[q].size()) continue;
    for (uint32_t r : out_[q][a]) {
      if (!seen[r]) {
        seen[r] = true;
        out.push_back(r);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Nfa::accepts(std::span<const LetterId> word) const {
  std::vector<uint32_t> cur = initial_;
  std::sort(cur.begin(), cur.end());
  for (LetterId a : word) {
    cur = image(cur, a);
    if (cur.empty()) return false;
  }
  return std::any_of(cur.begin(), cur.end(), [&](uint32_t q) { return accepting_mask_[q]; });
}

bool Nfa::some_accepting(std::span<const uint32_t> from) const {
  std::vector<bool> seen(n_states_, false);
  std::deque<uint32_t> work;
  for (uint32_t q : from) {
    if (q < n_states_ && !seen[q]) {
      seen[q] = true;
      work.push_back(q);
    }
  }
  while (!work.empty()) {
    uint32_t q = work.front();
    work.pop_front();
    if (accepting_mask_[q]) return true;
    for (const auto& targets : out_[q])
      for (uint32_t r : targets)
        if (!seen[r]) {
          seen[r] = true;
          work.push_back(r);
        }
  }
  return false;
}

bool Nfa::empty_language() const { return !some_accepting(initial_); }

bool Nfa::deterministic() const {
  if (initial_.size() > 1) return false;
  for (const auto& per_state : out_)
    for (const auto& targets : per_state)
      if (targets.size() > 1) return false;
  return true;
}

uint32_t Nfa::add_state() {
  out_.emplace_back();
  accepting_mask_.push_back(false);
  return n_states_++;
}

void Nfa::add_transition(uint32_t from, LetterId letter, uint32_t to) {
  require(from < n_states_ && to < n_states_, "nfa transition out of range");
  transitions_.push_back({from, letter, to});
  if (out_[from].size() <= letter) out_[from].resize(letter + 1);
  out_[from][letter].push_back(to);
}

void Nfa::set_initial(std::vector<uint32_t> initial) {
  for (uint32_t q : initial) require(q < n_states_, "nfa initial state out of range");
  initial_ = std::move(initial);
}

void Nfa::add_accepting(uint32_t q) {
  require(q < n_states_, "nfa accepting state out of range");
  if (!accepting_mask_[q]) {
    accepting_mask_[q] = true;
    accepting_.push_back(q);
  }
}

Nfa Nfa::trimmed() const {
  // Forward reachability.
  std::vector<bool> fwd(n_states_, false);
  std::deque<uint32_t> work;
  for (uint32_t q : initial_) {
    if (!fwd[q]) {
      fwd[q] = true;
      work.push_back(q);
    }
  }
  std::vector<std::vector<uint32_t>> rev(n_states_);
  for (const auto& t : transitions_) rev[t.to].push_back(t.from);
  std::vector<uint32_t> order;
  while (!work.empty()) {
    uint32_t q = work.front();
    work.pop_front();
    order.push_back(q);
    for (const auto& targets : out_[q])
      for (uint32_t r : targets)
        if (!fwd[r]) {
          fwd[r] = true;
          work.push_back(r);
        }
  }
  // Backward co-reachability from accepting states.
  std::vector<bool> bwd(n_states_, false);
  for (uint32_t q : accepting_)
    if (fwd[q] && !bwd[q]) {
      bwd[q] = true;
      work.push_back(q);
    }
  while (!work.empty()) {
    uint32_t q = work.front();
    work.pop_front();
    for (uint32_t r : rev[q])
      if (fwd[r] && !bwd[r]) {
        bwd[r] = true;
        work.push_back(r);
      }
  }
  std::vector<uint32_t> remap(n_states_, UINT32_MAX);
  uint32_t next = 0;
  for (uint32_t q : order)
    if (bwd[q]) remap[q] = next++;
  std::vector<uint32_t> initial2, accepting2;
  for (uint32_t q : initial_)
    if (remap[q] != UINT32_MAX) initial2.push_back(remap[q]);
  for (uint32_t q : accepting_)
    if (remap[q] != UINT32_MAX) accepting2.push_back(remap[q]);
  std::vector<NfaTrans> trans2;
  for (const auto& t : transitions_)
    if (remap[t.from] != UINT32_MAX && remap[t.to] != UINT32_MAX)
      trans2.push_back({remap[t.from], t.letter, remap[t.to]});
  std::sort(initial2.begin(), initial2.end());
  std::sort(accepting2.begin(), accepting2.end());
  return Nfa(next, std::move(initial2), std::move(accepting2), std::move(trans2));
}

Nfa singleton_word_nfa(LetterId letter, uint32_t /*alphabet_size*/) {
  return Nfa(2, {0}, {1}, {{0, letter, 1}});
}

}  // namespace mcaret
