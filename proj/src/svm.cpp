#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "emg/classifiers.hpp"

namespace emg {

namespace {

constexpr double kTau = 1e-12;

std::string gap_message(int a, int b, double gap) {
  std::ostringstream os;
  os << "SVM did not converge for pair (" << GestureLabel(a).name() << ", "
     << GestureLabel(b).name() << "), duality gap " << gap;
  return os.str();
}

}  // namespace

ConvergenceError::ConvergenceError(int class_a, int class_b, double duality_gap)
    : Error(gap_message(class_a, class_b, duality_gap)), a_(class_a), b_(class_b), gap_(duality_gap) {}

double SvmPairModel::margin(std::span<const double> x) const {
  double f = b;
  for (std::size_t c = 0; c < w.size(); ++c) f += w[c] * x[c];
  return f;
}

SvmPairSolution solve_svm_pair(std::span<const double> x, std::size_t cols, std::span<const int> y,
                               const SvmOptions& opts) {
  if (!(opts.c_reg > 0.0)) throw Error("SVM regularization constant C must be positive");
  const std::size_t n = y.size();
  if (x.size() != n * cols) throw Error("SVM input shape mismatch");
  const double C = opts.c_reg;

  // Signed Gram matrix Q_ij = y_i y_j <x_i, x_j>.
  std::vector<double> Q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += x[i * cols + c] * x[j * cols + c];
      Q[i * n + j] = Q[j * n + i] = static_cast<double>(y[i] * y[j]) * dot;
    }
  }

  SvmPairSolution sol;
  std::vector<double>& alpha = sol.alpha;
  alpha.assign(n, 0.0);
  std::vector<double> G(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  const auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < C);
  };

  const auto max_iter = static_cast<long long>(opts.max_iter_factor) * static_cast<long long>(n);
  long long iter = 0;
  for (;; ++iter) {
    // i: maximal violator in I_up. j: among I_low violators, the one with the
    // largest second-order decrease of the dual objective.
    std::size_t i = n;
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(y[t]) * G[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
    }
    std::size_t j = n;
    double g_min = std::numeric_limits<double>::infinity();
    double best_gain = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n && i != n; ++t) {
      if (!in_low(t)) continue;
      const double v = -static_cast<double>(y[t]) * G[t];
      g_min = std::min(g_min, v);
      const double diff = g_max - v;
      if (diff <= 0.0) continue;
      // K_ii + K_tt - 2 K_it in terms of the signed Gram matrix.
      double curv = Q[i * n + i] + Q[t * n + t] -
                    2.0 * static_cast<double>(y[i] * y[t]) * Q[i * n + t];
      if (curv <= 0.0) curv = kTau;
      const double gain = -(diff * diff) / curv;
      if (gain < best_gain) {
        best_gain = gain;
        j = t;
      }
    }
    sol.max_violation = (i == n || j == n) ? 0.0 : g_max - g_min;
    if (i == n || j == n || g_max - g_min < opts.tolerance) {
      sol.converged = true;
      break;
    }
    if (iter >= max_iter) break;

    const double* Qi = &Q[i * n];
    const double* Qj = &Q[j * n];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = Qi[i] + Qj[j] + 2.0 * Qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = Qi[i] + Qj[j] - 2.0 * Qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) G[t] += Qi[t] * dai + Qj[t] * daj;
  }
  sol.iterations = static_cast<int>(iter);

  // Offset from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = static_cast<double>(y[t]) * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = 0.0;
  if (n_free > 0) {
    rho = sum_free / n_free;
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = 0.5 * (ub + lb);
  } else if (std::isfinite(ub)) {
    rho = ub;
  } else if (std::isfinite(lb)) {
    rho = lb;
  }
  sol.b = -rho;

  sol.w.assign(cols, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] == 0.0) continue;
    const double coef = alpha[t] * static_cast<double>(y[t]);
    for (std::size_t c = 0; c < cols; ++c) sol.w[c] += coef * x[t * cols + c];
  }

  double w2 = 0.0;
  for (double v : sol.w) w2 += v * v;
  double hinge = 0.0;
  double alpha_sum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double f = sol.b;
    for (std::size_t c = 0; c < cols; ++c) f += sol.w[c] * x[t * cols + c];
    hinge += std::max(0.0, 1.0 - static_cast<double>(y[t]) * f);
    alpha_sum += alpha[t];
  }
  sol.duality_gap = (0.5 * w2 + C * hinge) - (alpha_sum - 0.5 * w2);
  return sol;
}

TrainedModel train_svm(const FeatureMatrix& train, const ModelContext& ctx, SvmOptions opts) {
  if (!(opts.c_reg > 0.0)) throw Error("SVM regularization constant C must be positive");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < train.rows; ++r) groups[train.row_labels[r].id()].push_back(r);
  if (groups.size() < 2) throw Error("SVM needs at least two classes");

  TrainedModel model;
  model.kind = ClassifierKind::SVM;
  model.standardizer = fit_standardizer(train);
  model.feature_spec = ctx.feature_spec;
  model.channel_mask = ctx.channel_mask;
  model.window_spec = ctx.window_spec;
  model.sample_rate_hz = ctx.sample_rate_hz;
  model.col_meta = train.col_meta;

  const FeatureMatrix z = standardize(model.standardizer, train);
  SvmPayload payload;
  payload.c_reg = opts.c_reg;

  for (auto a = groups.begin(); a != groups.end(); ++a) {
    for (auto b = std::next(a); b != groups.end(); ++b) {
      // Rows in original order so the solver's sweep order is fixed.
      std::vector<std::size_t> rows;
      rows.insert(rows.end(), a->second.begin(), a->second.end());
      rows.insert(rows.end(), b->second.begin(), b->second.end());
      std::sort(rows.begin(), rows.end());
      std::vector<double> x;
      x.reserve(rows.size() * z.cols);
      std::vector<int> y;
      y.reserve(rows.size());
      for (std::size_t r : rows) {
        const auto row = z.row(r);
        x.insert(x.end(), row.begin(), row.end());
        y.push_back(z.row_labels[r].id() == a->first ? 1 : -1);
      }
      const SvmPairSolution sol = solve_svm_pair(x, z.cols, y, opts);
      if (!sol.converged) throw ConvergenceError(a->first, b->first, sol.duality_gap);
      payload.pairs.push_back({a->first, b->first, sol.w, sol.b, sol.iterations});
    }
  }
  model.payload = std::move(payload);
  return model;
}

GestureLabel svm_decide(const SvmPayload& p, std::span<const double> x) {
  std::array<int, kNumGestures> votes{};
  std::array<double, kNumGestures> margin_sum{};
  std::array<bool, kNumGestures> seen{};
  for (const SvmPairModel& pair : p.pairs) {
    const double f = pair.margin(x);
    const auto a = static_cast<std::size_t>(pair.class_a);
    const auto b = static_cast<std::size_t>(pair.class_b);
    seen[a] = seen[b] = true;
    // class_a < class_b, so a zero margin goes to the lower id.
    ++votes[f >= 0.0 ? a : b];
    margin_sum[a] += f;
    margin_sum[b] -= f;
  }
  std::size_t best = kNumGestures;
  for (std::size_t g = 0; g < kNumGestures; ++g) {
    if (!seen[g]) continue;
    if (best == kNumGestures || votes[g] > votes[best] ||
        (votes[g] == votes[best] && margin_sum[g] > margin_sum[best])) {
      best = g;
    }
  }
  if (best == kNumGestures) throw Error("SVM model has no class pairs");
  return GestureLabel(static_cast<int>(best));
}

}  // namespace emg
