#pragma once

// LDA, KNN and one-vs-one linear SVM behind one train/predict interface.
//
// Every classifier works on z-scored features; the standardizer is fitted on
// the training matrix only and travels with the model.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emg/features.hpp"
#include "emg/signal.hpp"

namespace emg {

inline constexpr double kStddevFloor = 1e-12;

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  /// Returns a standardized copy of one feature row.
  std::vector<double> apply(std::span<const double> row) const;
  void apply_in_place(std::span<double> row) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Column means and population standard deviations, floored at kStddevFloor.
Standardizer fit_standardizer(const FeatureMatrix& train);

/// Returns a copy of `fm` with every row standardized.
FeatureMatrix standardize(const Standardizer& s, const FeatureMatrix& fm);

enum class ClassifierKind { LDA, KNN, SVM };

std::string_view kind_name(ClassifierKind k);
ClassifierKind kind_from_name(std::string_view name);

struct LdaPayload {
  std::vector<int> classes;                 ///< gesture ids, ascending
  std::vector<std::vector<double>> means;   ///< per class, standardized space
  std::vector<std::vector<double>> weights; ///< precision * mean, per class
  std::vector<double> biases;               ///< -mean'*precision*mean/2 + log prior
  std::vector<double> log_priors;
  double ridge = 0.0;                       ///< value added to the covariance diagonal

  friend bool operator==(const LdaPayload&, const LdaPayload&) = default;
};

struct KnnPayload {
  int k = 3;
  std::size_t cols = 0;
  std::vector<double> rows;  ///< standardized training rows, row-major
  std::vector<int> labels;

  std::size_t n_rows() const { return labels.size(); }
  friend bool operator==(const KnnPayload&, const KnnPayload&) = default;
};

struct SvmPairModel {
  int class_a = 0;  ///< positive side
  int class_b = 0;  ///< negative side
  std::vector<double> w;
  double b = 0.0;
  int iterations = 0;

  double margin(std::span<const double> x) const;
  friend bool operator==(const SvmPairModel&, const SvmPairModel&) = default;
};

struct SvmPayload {
  double c_reg = 1.0;
  std::vector<SvmPairModel> pairs;

  friend bool operator==(const SvmPayload&, const SvmPayload&) = default;
};

/// A trained classifier plus everything needed to featurize its input.
struct TrainedModel {
  ClassifierKind kind = ClassifierKind::LDA;
  Standardizer standardizer;
  FeatureSpec feature_spec;
  ChannelMask channel_mask{std::vector<int>{1}};
  WindowSpec window_spec;
  int sample_rate_hz = 200;
  std::vector<ColumnMeta> col_meta;
  std::variant<LdaPayload, KnnPayload, SvmPayload> payload;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Featurization context stamped into a model at training time.
struct ModelContext {
  FeatureSpec feature_spec;
  ChannelMask channel_mask{std::vector<int>{1}};
  WindowSpec window_spec;
  int sample_rate_hz = 200;
};

struct LdaOptions {
  double ridge_lambda = 1e-6;
};

struct SvmOptions {
  double c_reg = 1.0;
  double tolerance = 1e-3;
  /// Iteration cap per pair is this factor times the pair's row count.
  int max_iter_factor = 1000;
};

TrainedModel train_lda(const FeatureMatrix& train, const ModelContext& ctx, LdaOptions opts = {});
TrainedModel train_knn(const FeatureMatrix& train, int k, const ModelContext& ctx);
TrainedModel train_svm(const FeatureMatrix& train, const ModelContext& ctx, SvmOptions opts = {});
TrainedModel train(ClassifierKind kind, const FeatureMatrix& train, const ModelContext& ctx,
                   int knn_k = 3, SvmOptions svm = {});

/// Raised when the SVM solver hits its iteration cap on some class pair.
class ConvergenceError : public Error {
 public:
  ConvergenceError(int class_a, int class_b, double duality_gap);
  int class_a() const { return a_; }
  int class_b() const { return b_; }
  double duality_gap() const { return gap_; }

 private:
  int a_;
  int b_;
  double gap_;
};

/// Labels for each row. Column meta must match the model exactly.
std::vector<GestureLabel> predict(const TrainedModel& model, const FeatureMatrix& features);
std::vector<GestureLabel> predict_serial(const TrainedModel& model, const FeatureMatrix& features);

/// Label for one raw (unstandardized) feature row.
GestureLabel predict_row(const TrainedModel& model, std::span<const double> raw_row);

struct EvaluationResult {
  std::size_t n_correct = 0;
  std::size_t n_total = 0;
  double accuracy_pct = 0.0;
  /// confusion[truth][predicted]
  std::array<std::array<std::size_t, kNumGestures>, kNumGestures> confusion{};
};

EvaluationResult evaluate(std::span<const GestureLabel> predicted,
                          std::span<const GestureLabel> truth);

/// Dual solution of one binary soft-margin problem.
struct SvmPairSolution {
  std::vector<double> alpha;
  std::vector<double> w;
  double b = 0.0;
  int iterations = 0;
  double max_violation = 0.0;  ///< m(alpha) - M(alpha) at exit
  bool converged = false;
  double duality_gap = 0.0;
};

/// SMO on a linear kernel. The first index of each working pair is the maximal
/// KKT violator; the second maximizes the second-order decrease of the dual.
/// `x` is row-major with `cols` columns; `y` holds +1/-1.
SvmPairSolution solve_svm_pair(std::span<const double> x, std::size_t cols,
                               std::span<const int> y, const SvmOptions& opts);

// Per-classifier decision rules on standardized rows; exposed for tests.
GestureLabel lda_decide(const LdaPayload& p, std::span<const double> x);
GestureLabel knn_decide(const KnnPayload& p, std::span<const double> x);
GestureLabel svm_decide(const SvmPayload& p, std::span<const double> x);

}  // namespace emg
