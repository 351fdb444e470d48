#include "emg/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace emg {

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  std::vector<double> out(row.begin(), row.end());
  apply_in_place(out);
  return out;
}

void Standardizer::apply_in_place(std::span<double> row) const {
  if (row.size() != mean.size()) {
    throw Error("standardizer expects " + std::to_string(mean.size()) + " columns, got " +
                std::to_string(row.size()));
  }
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / stddev[c];
}

Standardizer fit_standardizer(const FeatureMatrix& train) {
  if (train.rows == 0) throw Error("cannot fit a standardizer on an empty matrix");
  Standardizer s;
  s.mean.assign(train.cols, 0.0);
  s.stddev.assign(train.cols, 0.0);
  const auto n = static_cast<double>(train.rows);
  for (std::size_t r = 0; r < train.rows; ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < train.cols; ++c) s.mean[c] += row[c];
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t r = 0; r < train.rows; ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < train.cols; ++c) {
      const double d = row[c] - s.mean[c];
      s.stddev[c] += d * d;
    }
  }
  for (double& sd : s.stddev) sd = std::max(std::sqrt(sd / n), kStddevFloor);
  return s;
}

FeatureMatrix standardize(const Standardizer& s, const FeatureMatrix& fm) {
  FeatureMatrix out = fm;
  for (std::size_t r = 0; r < out.rows; ++r) s.apply_in_place(out.row(r));
  return out;
}

std::string_view kind_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::LDA: return "LDA";
    case ClassifierKind::KNN: return "KNN";
    case ClassifierKind::SVM: return "SVM";
  }
  return "?";
}

ClassifierKind kind_from_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (auto k : {ClassifierKind::LDA, ClassifierKind::KNN, ClassifierKind::SVM}) {
    if (kind_name(k) == upper) return k;
  }
  throw Error("unknown classifier '" + std::string(name) + "'");
}

TrainedModel train(ClassifierKind kind, const FeatureMatrix& train, const ModelContext& ctx,
                   int knn_k, SvmOptions svm) {
  switch (kind) {
    case ClassifierKind::LDA: return train_lda(train, ctx);
    case ClassifierKind::KNN: return train_knn(train, knn_k, ctx);
    case ClassifierKind::SVM: return train_svm(train, ctx, svm);
  }
  throw Error("unknown classifier kind");
}

namespace {

void check_columns(const TrainedModel& model, const FeatureMatrix& fm) {
  const std::size_t n = std::max(model.col_meta.size(), fm.col_meta.size());
  for (std::size_t c = 0; c < n; ++c) {
    const bool in_model = c < model.col_meta.size();
    const bool in_input = c < fm.col_meta.size();
    if (in_model && in_input && model.col_meta[c] == fm.col_meta[c]) continue;
    throw Error("feature column mismatch at column " + std::to_string(c) + ": model has " +
                (in_model ? model.col_meta[c].to_string() : std::string("<none>")) +
                ", input has " +
                (in_input ? fm.col_meta[c].to_string() : std::string("<none>")));
  }
}

GestureLabel decide(const TrainedModel& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& p) -> GestureLabel {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LdaPayload>) return lda_decide(p, x);
        else if constexpr (std::is_same_v<P, KnnPayload>) return knn_decide(p, x);
        else return svm_decide(p, x);
      },
      model.payload);
}

}  // namespace

GestureLabel predict_row(const TrainedModel& model, std::span<const double> raw_row) {
  return decide(model, model.standardizer.apply(raw_row));
}

std::vector<GestureLabel> predict_serial(const TrainedModel& model, const FeatureMatrix& features) {
  if (features.rows == 0) return {};
  check_columns(model, features);
  std::vector<GestureLabel> out;
  out.reserve(features.rows);
  for (std::size_t r = 0; r < features.rows; ++r) out.push_back(predict_row(model, features.row(r)));
  return out;
}

std::vector<GestureLabel> predict(const TrainedModel& model, const FeatureMatrix& features) {
  if (features.rows == 0) return {};
  check_columns(model, features);
  std::vector<GestureLabel> out(features.rows);
  const auto n = static_cast<std::ptrdiff_t>(features.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] = predict_row(model, features.row(static_cast<std::size_t>(r)));
  }
  return out;
}

EvaluationResult evaluate(std::span<const GestureLabel> predicted,
                          std::span<const GestureLabel> truth) {
  if (predicted.size() != truth.size()) {
    throw Error("prediction/truth length mismatch: " + std::to_string(predicted.size()) + " vs " +
                std::to_string(truth.size()));
  }
  if (truth.empty()) throw Error("cannot evaluate an empty prediction set");
  EvaluationResult res;
  res.n_total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++res.confusion[static_cast<std::size_t>(truth[i].id())][static_cast<std::size_t>(predicted[i].id())];
    if (predicted[i] == truth[i]) ++res.n_correct;
  }
  res.accuracy_pct = 100.0 * static_cast<double>(res.n_correct) / static_cast<double>(res.n_total);
  return res;
}

}  // namespace emg
