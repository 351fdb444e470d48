#pragma once

// Time-domain sEMG features and feature-matrix assembly.
//
// extract_matrix() is the OpenMP kernel; extract_matrix_serial() is the
// reference path it must match byte for byte.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emg/signal.hpp"

namespace emg {

/// Canonical feature order. Column layout and model files depend on it.
enum class Feature { RMS, MAV, WL, ZC, SSC, AR };

inline constexpr std::array<Feature, 6> kAllFeatures = {Feature::RMS, Feature::MAV, Feature::WL,
                                                        Feature::ZC,  Feature::SSC, Feature::AR};

std::string_view feature_name(Feature f);
Feature feature_from_name(std::string_view name);

struct FeatureSpec {
  std::vector<Feature> enabled{kAllFeatures.begin(), kAllFeatures.end()};
  int ar_order = 2;
  double threshold_alpha = 0.0;

  /// Sorts `features` into canonical order; rejects empty or duplicate sets.
  static FeatureSpec make(std::vector<Feature> features, int ar_order = 2, double alpha = 0.0);

  void validate() const;
  bool has(Feature f) const;
  /// Number of columns one channel contributes.
  int values_per_channel() const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Subset of 1-based electrode ids that feed the feature matrix.
class ChannelMask {
 public:
  /// Ids are sorted; throws on empty, duplicate or non-positive ids.
  explicit ChannelMask(std::vector<int> ids);
  static ChannelMask all(int n_channels);

  std::span<const int> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(int id) const;
  int max_id() const { return ids_.back(); }
  /// Throws if any id exceeds n_channels.
  void check_within(int n_channels) const;

  friend bool operator==(const ChannelMask&, const ChannelMask&) = default;

 private:
  std::vector<int> ids_;
};

struct ColumnMeta {
  int channel = 0;  ///< 1-based electrode id
  Feature feature = Feature::RMS;
  int coeff = 0;  ///< 1..p for AR, 0 otherwise

  std::string to_string() const;
  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

/// Row-major window-by-feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<GestureLabel> row_labels;
  std::vector<ColumnMeta> col_meta;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  /// Keeps the listed rows, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows_to_keep) const;
  /// Keeps the columns whose meta appears in `layout`, in layout order.
  /// Throws if a requested column is missing.
  FeatureMatrix select_columns(std::span<const ColumnMeta> layout) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

double rms(std::span<const double> seg);
double mav(std::span<const double> seg);
double wl(std::span<const double> seg);
int zc(std::span<const double> seg, double alpha);
int ssc(std::span<const double> seg, double alpha);

/// Order-p prediction coefficients a_1..a_p of x_n = sum a_k x_{n-k} + e_n.
///
/// Yule-Walker with the biased autocorrelation of the mean-removed segment,
/// solved by Levinson-Durbin. A zero-variance segment yields all zeros.
std::vector<double> ar_coeffs(std::span<const double> seg, int p);

std::vector<ColumnMeta> column_layout(const FeatureSpec& fspec, const ChannelMask& mask);

/// Features of one window, written into `out` (size = column_layout().size()).
/// `channels[i]` is the window's slice for mask.ids()[i].
void extract_window(std::span<const std::span<const double>> channels, const FeatureSpec& fspec,
                    std::span<double> out);

FeatureMatrix extract_matrix(const SemgRecording& rec, const WindowIndex& idx,
                             const FeatureSpec& fspec, const ChannelMask& mask);
FeatureMatrix extract_matrix_serial(const SemgRecording& rec, const WindowIndex& idx,
                                    const FeatureSpec& fspec, const ChannelMask& mask);

}  // namespace emg
