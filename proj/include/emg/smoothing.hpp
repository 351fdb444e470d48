#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "emg/signal.hpp"

namespace emg {

struct VoteConfig {
  int vote_window = 5;
  GestureLabel initial = GestureLabel::rest();

  void validate() const;
};

/// Causal majority vote over the last vote_window raw labels.
/// A tie keeps the previous output; before the first output that is cfg.initial.
std::vector<GestureLabel> majority_vote(std::span<const GestureLabel> raw, const VoteConfig& cfg);

/// Push-one, get-one form of majority_vote(). Agrees with the batch form exactly.
class MajorityVoter {
 public:
  explicit MajorityVoter(VoteConfig cfg);

  GestureLabel push(GestureLabel raw);
  GestureLabel current() const { return last_; }

 private:
  VoteConfig cfg_;
  std::deque<GestureLabel> window_;
  std::array<int, kNumGestures> counts_{};
  GestureLabel last_;
};

}  // namespace emg
