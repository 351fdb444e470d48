#include "emg/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace emg {

namespace {

void require_length(std::span<const double> seg, std::size_t min_len, const char* what) {
  if (seg.size() < min_len) {
    throw Error(std::string(what) + " needs at least " + std::to_string(min_len) +
                " samples, got " + std::to_string(seg.size()));
  }
}

}  // namespace

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::RMS: return "RMS";
    case Feature::MAV: return "MAV";
    case Feature::WL: return "WL";
    case Feature::ZC: return "ZC";
    case Feature::SSC: return "SSC";
    case Feature::AR: return "AR";
  }
  return "?";
}

Feature feature_from_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (Feature f : kAllFeatures) {
    if (feature_name(f) == upper) return f;
  }
  throw Error("unknown feature '" + std::string(name) + "'");
}

FeatureSpec FeatureSpec::make(std::vector<Feature> features, int ar_order, double alpha) {
  std::sort(features.begin(), features.end());
  FeatureSpec spec;
  spec.enabled = std::move(features);
  spec.ar_order = ar_order;
  spec.threshold_alpha = alpha;
  spec.validate();
  return spec;
}

void FeatureSpec::validate() const {
  if (enabled.empty()) throw Error("feature set must not be empty");
  if (!std::is_sorted(enabled.begin(), enabled.end()) ||
      std::adjacent_find(enabled.begin(), enabled.end()) != enabled.end()) {
    throw Error("feature set must be duplicate-free and in canonical order");
  }
  if (has(Feature::AR) && ar_order < 1) throw Error("AR order must be at least 1");
  if (!(threshold_alpha >= 0.0)) throw Error("threshold alpha must be non-negative");
}

bool FeatureSpec::has(Feature f) const {
  return std::find(enabled.begin(), enabled.end(), f) != enabled.end();
}

int FeatureSpec::values_per_channel() const {
  int n = 0;
  for (Feature f : enabled) n += (f == Feature::AR) ? ar_order : 1;
  return n;
}

ChannelMask::ChannelMask(std::vector<int> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) throw Error("channel mask must not be empty");
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw Error("channel mask has duplicate ids");
  }
  if (ids_.front() < 1) throw Error("channel ids are 1-based");
}

ChannelMask ChannelMask::all(int n_channels) {
  std::vector<int> ids(static_cast<std::size_t>(std::max(n_channels, 0)));
  for (int i = 0; i < n_channels; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
  return ChannelMask(std::move(ids));
}

bool ChannelMask::contains(int id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

void ChannelMask::check_within(int n_channels) const {
  if (max_id() > n_channels) {
    throw Error("channel " + std::to_string(max_id()) + " not present (recording has " +
                std::to_string(n_channels) + " channels)");
  }
}

std::string ColumnMeta::to_string() const {
  std::string s = "ch" + std::to_string(channel) + ":" + std::string(feature_name(feature));
  if (feature == Feature::AR) s += std::to_string(coeff);
  return s;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows_to_keep) const {
  FeatureMatrix out;
  out.rows = rows_to_keep.size();
  out.cols = cols;
  out.col_meta = col_meta;
  out.values.reserve(out.rows * cols);
  out.row_labels.reserve(out.rows);
  for (std::size_t r : rows_to_keep) {
    if (r >= rows) throw IndexError("row " + std::to_string(r) + " out of range");
    const auto src = row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
    out.row_labels.push_back(row_labels[r]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const ColumnMeta> layout) const {
  std::vector<std::size_t> src;
  src.reserve(layout.size());
  for (const ColumnMeta& want : layout) {
    const auto it = std::find(col_meta.begin(), col_meta.end(), want);
    if (it == col_meta.end()) throw Error("column " + want.to_string() + " not in feature matrix");
    src.push_back(static_cast<std::size_t>(it - col_meta.begin()));
  }
  FeatureMatrix out;
  out.rows = rows;
  out.cols = layout.size();
  out.col_meta.assign(layout.begin(), layout.end());
  out.row_labels = row_labels;
  out.values.reserve(out.rows * out.cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c : src) out.values.push_back(at(r, c));
  }
  return out;
}

double rms(std::span<const double> seg) {
  require_length(seg, 1, "RMS");
  double sum = 0.0;
  for (double v : seg) sum += v * v;
  return std::sqrt(sum / static_cast<double>(seg.size()));
}

double mav(std::span<const double> seg) {
  require_length(seg, 1, "MAV");
  double sum = 0.0;
  for (double v : seg) sum += std::abs(v);
  return sum / static_cast<double>(seg.size());
}

double wl(std::span<const double> seg) {
  require_length(seg, 2, "WL");
  double sum = 0.0;
  for (std::size_t k = 1; k < seg.size(); ++k) sum += std::abs(seg[k] - seg[k - 1]);
  return sum;
}

int zc(std::span<const double> seg, double alpha) {
  require_length(seg, 2, "ZC");
  if (!(alpha >= 0.0)) throw Error("ZC threshold must be non-negative");
  int count = 0;
  for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
    if (seg[k] * seg[k + 1] < 0.0 && std::abs(seg[k] - seg[k + 1]) >= alpha) ++count;
  }
  return count;
}

int ssc(std::span<const double> seg, double alpha) {
  require_length(seg, 3, "SSC");
  if (!(alpha >= 0.0)) throw Error("SSC threshold must be non-negative");
  int count = 0;
  for (std::size_t k = 1; k + 1 < seg.size(); ++k) {
    const double prod = (seg[k] - seg[k - 1]) * (seg[k] - seg[k + 1]);
    if (prod > 0.0 && prod >= alpha) ++count;
  }
  return count;
}

std::vector<double> ar_coeffs(std::span<const double> seg, int p) {
  if (p < 1) throw Error("AR order must be at least 1");
  const auto order = static_cast<std::size_t>(p);
  if (seg.size() <= 2 * order) {
    throw Error("AR(" + std::to_string(p) + ") needs more than " + std::to_string(2 * order) +
                " samples, got " + std::to_string(seg.size()));
  }
  const std::size_t n = seg.size();
  double mean = 0.0;
  for (double v : seg) mean += v;
  mean /= static_cast<double>(n);

  // Biased autocorrelation r[0..p].
  std::vector<double> r(order + 1, 0.0);
  for (std::size_t lag = 0; lag <= order; ++lag) {
    double acc = 0.0;
    for (std::size_t k = lag; k < n; ++k) acc += (seg[k] - mean) * (seg[k - lag] - mean);
    r[lag] = acc / static_cast<double>(n);
  }

  std::vector<double> a(order, 0.0);
  if (!(r[0] > 0.0)) return a;

  std::vector<double> prev(order, 0.0);
  double err = r[0];
  for (std::size_t m = 1; m <= order; ++m) {
    // Prediction error collapsed: the remaining coefficients stay zero.
    if (err <= r[0] * 1e-14) break;
    double acc = r[m];
    for (std::size_t j = 1; j < m; ++j) acc -= a[j - 1] * r[m - j];
    const double k = acc / err;
    prev = a;
    for (std::size_t j = 1; j < m; ++j) a[j - 1] = prev[j - 1] - k * prev[m - j - 1];
    a[m - 1] = k;
    err *= (1.0 - k * k);
  }
  return a;
}

std::vector<ColumnMeta> column_layout(const FeatureSpec& fspec, const ChannelMask& mask) {
  fspec.validate();
  std::vector<ColumnMeta> meta;
  meta.reserve(mask.size() * static_cast<std::size_t>(fspec.values_per_channel()));
  for (int ch : mask.ids()) {
    for (Feature f : fspec.enabled) {
      if (f == Feature::AR) {
        for (int k = 1; k <= fspec.ar_order; ++k) meta.push_back({ch, f, k});
      } else {
        meta.push_back({ch, f, 0});
      }
    }
  }
  return meta;
}

void extract_window(std::span<const std::span<const double>> channels, const FeatureSpec& fspec,
                    std::span<double> out) {
  std::size_t col = 0;
  for (const auto seg : channels) {
    for (Feature f : fspec.enabled) {
      switch (f) {
        case Feature::RMS: out[col++] = rms(seg); break;
        case Feature::MAV: out[col++] = mav(seg); break;
        case Feature::WL: out[col++] = wl(seg); break;
        case Feature::ZC: out[col++] = zc(seg, fspec.threshold_alpha); break;
        case Feature::SSC: out[col++] = ssc(seg, fspec.threshold_alpha); break;
        case Feature::AR:
          for (double c : ar_coeffs(seg, fspec.ar_order)) out[col++] = c;
          break;
      }
    }
  }
}

namespace {

FeatureMatrix prepare(const SemgRecording& rec, const WindowIndex& idx, const FeatureSpec& fspec,
                      const ChannelMask& mask) {
  mask.check_within(rec.n_channels());
  FeatureMatrix fm;
  fm.col_meta = column_layout(fspec, mask);
  fm.rows = idx.size();
  fm.cols = fm.col_meta.size();
  fm.values.assign(fm.rows * fm.cols, 0.0);
  fm.row_labels = idx.labels;
  return fm;
}

// Fills row w; returns the first offending column if any value is non-finite.
std::optional<std::size_t> fill_row(const SemgRecording& rec, const WindowIndex& idx,
                                    const FeatureSpec& fspec, const ChannelMask& mask,
                                    std::size_t w, FeatureMatrix& fm) {
  std::vector<std::span<const double>> slices;
  slices.reserve(mask.size());
  for (int ch : mask.ids()) slices.push_back(window_slice(rec, idx, w, ch - 1));
  auto out = fm.row(w);
  extract_window(slices, fspec, out);
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (!std::isfinite(out[c])) return c;
  }
  return std::nullopt;
}

[[noreturn]] void throw_non_finite(const FeatureMatrix& fm, std::size_t w, std::size_t c) {
  const ColumnMeta& m = fm.col_meta[c];
  throw Error("non-finite feature at window " + std::to_string(w) + ", channel " +
              std::to_string(m.channel) + ", feature " + std::string(feature_name(m.feature)));
}

}  // namespace

FeatureMatrix extract_matrix_serial(const SemgRecording& rec, const WindowIndex& idx,
                                    const FeatureSpec& fspec, const ChannelMask& mask) {
  FeatureMatrix fm = prepare(rec, idx, fspec, mask);
  for (std::size_t w = 0; w < fm.rows; ++w) {
    if (auto bad = fill_row(rec, idx, fspec, mask, w, fm)) throw_non_finite(fm, w, *bad);
  }
  return fm;
}

FeatureMatrix extract_matrix(const SemgRecording& rec, const WindowIndex& idx,
                             const FeatureSpec& fspec, const ChannelMask& mask) {
  FeatureMatrix fm = prepare(rec, idx, fspec, mask);
  const auto n = static_cast<std::ptrdiff_t>(fm.rows);
  // Lowest failing window wins so errors match the serial path.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> bad_col(fm.rows, kNone);
  std::vector<std::string> failure(fm.rows);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t w = 0; w < n; ++w) {
    const auto row = static_cast<std::size_t>(w);
    try {
      if (auto bad = fill_row(rec, idx, fspec, mask, row, fm)) bad_col[row] = *bad;
    } catch (const std::exception& e) {
      failure[row] = e.what();
    }
  }

  for (std::size_t w = 0; w < fm.rows; ++w) {
    if (!failure[w].empty()) throw Error(failure[w]);
    if (bad_col[w] != kNone) throw_non_finite(fm, w, bad_col[w]);
  }
  return fm;
}

}  // namespace emg
