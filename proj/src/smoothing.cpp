#include "emg/smoothing.hpp"

#include <algorithm>

namespace emg {

void VoteConfig::validate() const {
  if (vote_window < 1) throw Error("vote window must be at least 1");
}

MajorityVoter::MajorityVoter(VoteConfig cfg) : cfg_(cfg), last_(cfg.initial) { cfg_.validate(); }

GestureLabel MajorityVoter::push(GestureLabel raw) {
  window_.push_back(raw);
  ++counts_[static_cast<std::size_t>(raw.id())];
  if (window_.size() > static_cast<std::size_t>(cfg_.vote_window)) {
    --counts_[static_cast<std::size_t>(window_.front().id())];
    window_.pop_front();
  }
  const int top = *std::max_element(counts_.begin(), counts_.end());
  int winners = 0;
  int winner = 0;
  for (int g = 0; g < kNumGestures; ++g) {
    if (counts_[static_cast<std::size_t>(g)] == top) {
      ++winners;
      winner = g;
    }
  }
  // A tie holds the previous decision.
  if (winners == 1) last_ = GestureLabel(winner);
  return last_;
}

std::vector<GestureLabel> majority_vote(std::span<const GestureLabel> raw, const VoteConfig& cfg) {
  MajorityVoter voter(cfg);
  std::vector<GestureLabel> out;
  out.reserve(raw.size());
  for (GestureLabel g : raw) out.push_back(voter.push(g));
  return out;
}

}  // namespace emg
