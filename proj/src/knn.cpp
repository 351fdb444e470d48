#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include "emg/classifiers.hpp"

namespace emg {

TrainedModel train_knn(const FeatureMatrix& train, int k, const ModelContext& ctx) {
  if (k % 2 == 0) throw Error("k must be odd, got " + std::to_string(k));
  if (k < 1 || static_cast<std::size_t>(k) > train.rows) {
    throw Error("k must be between 1 and the training-set size (" + std::to_string(train.rows) +
                "), got " + std::to_string(k));
  }

  TrainedModel model;
  model.kind = ClassifierKind::KNN;
  model.standardizer = fit_standardizer(train);
  model.feature_spec = ctx.feature_spec;
  model.channel_mask = ctx.channel_mask;
  model.window_spec = ctx.window_spec;
  model.sample_rate_hz = ctx.sample_rate_hz;
  model.col_meta = train.col_meta;

  const FeatureMatrix z = standardize(model.standardizer, train);
  KnnPayload p;
  p.k = k;
  p.cols = z.cols;
  p.rows = z.values;
  p.labels.reserve(z.rows);
  for (GestureLabel g : z.row_labels) p.labels.push_back(g.id());
  model.payload = std::move(p);
  return model;
}

GestureLabel knn_decide(const KnnPayload& p, std::span<const double> x) {
  const std::size_t n = p.n_rows();
  // (squared distance, row index): lexicographic order breaks distance ties by index.
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = p.rows.data() + r * p.cols;
    double d2 = 0.0;
    for (std::size_t c = 0; c < p.cols; ++c) {
      const double diff = row[c] - x[c];
      d2 += diff * diff;
    }
    dist[r] = {d2, r};
  }
  const auto k = static_cast<std::size_t>(p.k);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

  std::array<int, kNumGestures> votes{};
  // Rank of each class's nearest member among the k neighbors.
  std::array<std::size_t, kNumGestures> first_rank;
  first_rank.fill(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto label = static_cast<std::size_t>(p.labels[dist[i].second]);
    ++votes[label];
    first_rank[label] = std::min(first_rank[label], i);
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < kNumGestures; ++g) {
    if (votes[g] > votes[best] || (votes[g] == votes[best] && first_rank[g] < first_rank[best])) {
      best = g;
    }
  }
  return GestureLabel(static_cast<int>(best));
}

}  // namespace emg
