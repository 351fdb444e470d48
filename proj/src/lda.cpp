#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <map>
#include <string>

#include "emg/classifiers.hpp"

namespace emg {

namespace {

// Row indices grouped by gesture id, ascending.
std::map<int, std::vector<std::size_t>> group_rows(const FeatureMatrix& fm) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < fm.rows; ++r) groups[fm.row_labels[r].id()].push_back(r);
  return groups;
}

}  // namespace

TrainedModel train_lda(const FeatureMatrix& train, const ModelContext& ctx, LdaOptions opts) {
  const auto groups = group_rows(train);
  if (groups.size() < 2) throw Error("LDA needs at least two classes");
  for (const auto& [id, rows] : groups) {
    if (rows.size() < 2) {
      throw Error("LDA needs at least two samples of class '" +
                  std::string(GestureLabel(id).name()) + "'");
    }
  }

  TrainedModel model;
  model.kind = ClassifierKind::LDA;
  model.standardizer = fit_standardizer(train);
  model.feature_spec = ctx.feature_spec;
  model.channel_mask = ctx.channel_mask;
  model.window_spec = ctx.window_spec;
  model.sample_rate_hz = ctx.sample_rate_hz;
  model.col_meta = train.col_meta;

  const FeatureMatrix z = standardize(model.standardizer, train);
  const auto d = static_cast<Eigen::Index>(z.cols);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);

  LdaPayload p;
  for (const auto& [id, rows] : groups) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    for (std::size_t r : rows) mu += Eigen::Map<const Eigen::VectorXd>(z.row(r).data(), d);
    mu /= static_cast<double>(rows.size());
    for (std::size_t r : rows) {
      const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(z.row(r).data(), d) - mu;
      scatter.selfadjointView<Eigen::Lower>().rankUpdate(diff);
    }
    p.classes.push_back(id);
    p.means.emplace_back(mu.data(), mu.data() + d);
    p.log_priors.push_back(std::log(static_cast<double>(rows.size()) /
                                    static_cast<double>(z.rows)));
  }

  Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(z.rows - groups.size());
  const double mean_diag = cov.trace() / static_cast<double>(d);
  p.ridge = opts.ridge_lambda * (mean_diag > 0.0 ? mean_diag : 1.0);
  cov.diagonal().array() += p.ridge;

  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("LDA pooled covariance is not positive definite");

  for (std::size_t k = 0; k < p.classes.size(); ++k) {
    const Eigen::Map<const Eigen::VectorXd> mu(p.means[k].data(), d);
    const Eigen::VectorXd w = llt.solve(mu);
    p.weights.emplace_back(w.data(), w.data() + d);
    p.biases.push_back(-0.5 * mu.dot(w) + p.log_priors[k]);
  }
  model.payload = std::move(p);
  return model;
}

GestureLabel lda_decide(const LdaPayload& p, std::span<const double> x) {
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t k = 0; k < p.classes.size(); ++k) {
    double score = p.biases[k];
    for (std::size_t c = 0; c < x.size(); ++c) score += p.weights[k][c] * x[c];
    // Strict comparison: lowest class id wins ties.
    if (k == 0 || score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return GestureLabel(p.classes[best]);
}

}  // namespace emg
