#pragma once

// Hand-rolled random input generators shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "emg/classifiers.hpp"
#include "emg/features.hpp"

namespace gen {

// Mix of shapes so counts and AR fits see varied inputs.
inline std::vector<double> random_segment(std::mt19937_64& rng) {
  const auto n = std::uniform_int_distribution<std::size_t>(7, 300)(rng);
  const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
  std::normal_distribution<double> gauss(0.0, std::uniform_real_distribution<double>(0.01, 50.0)(rng));
  std::vector<double> x(n);
  double prev = 0.0;
  for (auto& v : x) {
    switch (kind) {
      case 0: v = gauss(rng); break;
      case 1: v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng); break;
      case 2: v = prev = 0.8 * prev + gauss(rng); break;  // correlated
      default: v = std::round(gauss(rng));  // integer-valued, like raw armband counts
    }
  }
  return x;
}

inline std::vector<double> ar2_series(double a1, double a2, std::size_t n, std::uint64_t seed, double noise) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, noise);
  std::vector<double> x(n + 200, 0.0);
  x[0] = e(rng);
  x[1] = e(rng);
  for (std::size_t k = 2; k < x.size(); ++k) x[k] = a1 * x[k - 1] + a2 * x[k - 2] + e(rng);
  return {x.begin() + 200, x.end()};  // drop burn-in
}

inline emg::FeatureSpec random_spec(std::mt19937_64& rng) {
  std::vector<emg::Feature> fs;
  for (emg::Feature f : emg::kAllFeatures)
    if (rng() % 2) fs.push_back(f);
  if (fs.empty()) fs.push_back(emg::Feature::MAV);
  return emg::FeatureSpec::make(fs, std::uniform_int_distribution<int>(1, 4)(rng),
                                std::uniform_real_distribution<double>(0.0, 0.5)(rng));
}

inline emg::ChannelMask random_mask(std::mt19937_64& rng) {
  std::vector<int> ids;
  for (int id = 1; id <= 8; ++id)
    if (rng() % 2) ids.push_back(id);
  if (ids.empty()) ids.push_back(5);
  return emg::ChannelMask(ids);
}

struct ModelCase {
  emg::TrainedModel model;
  emg::FeatureMatrix probe;
};

/// A model of random kind trained on random class clouds, plus a probe matrix
/// with the same layout.
inline ModelCase random_model(std::mt19937_64& rng) {
  using namespace emg;
  const auto spec = random_spec(rng);
  const auto mask = random_mask(rng);
  const auto layout = column_layout(spec, mask);
  const int classes = std::uniform_int_distribution<int>(2, 7)(rng);
  const auto rows = std::uniform_int_distribution<std::size_t>(3 * static_cast<std::size_t>(classes), 40)(rng);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto make = [&](std::size_t n) {
    FeatureMatrix fm;
    fm.rows = n;
    fm.cols = layout.size();
    fm.col_meta = layout;
    for (std::size_t r = 0; r < n; ++r) {
      const int cls = static_cast<int>(r % static_cast<std::size_t>(classes));
      fm.row_labels.emplace_back(cls);
      for (std::size_t c = 0; c < fm.cols; ++c) fm.values.push_back(cls * 0.7 + g(rng) * std::pow(10.0, static_cast<double>(c % 5) - 2));
    }
    return fm;
  };
  const auto train_fm = make(rows);
  const ModelContext ctx{spec, mask,
                         WindowSpec{std::uniform_int_distribution<int>(20, 80)(rng), std::uniform_int_distribution<int>(1, 20)(rng)},
                         std::uniform_int_distribution<int>(100, 2000)(rng)};
  const auto kind = static_cast<ClassifierKind>(rng() % 3);
  const int k = 2 * std::uniform_int_distribution<int>(0, 2)(rng) + 1;
  SvmOptions svm;
  svm.c_reg = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
  return {train(kind, train_fm, ctx, k, svm), make(25)};
}

}  // namespace gen
