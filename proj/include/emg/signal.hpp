#pragma once

// Recording types and overlapped segmentation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kNumGestures = 7;

/// One of the seven hand gestures. Id 0 is always rest.
class GestureLabel {
 public:
  constexpr GestureLabel() = default;
  /// Throws Error if id is outside 0..6.
  explicit GestureLabel(int id);

  static GestureLabel rest() { return GestureLabel{}; }
  /// Parses one of the canonical names ("rest", "fist", ...).
  static GestureLabel from_name(std::string_view name);

  constexpr int id() const { return id_; }
  std::string_view name() const;

  friend constexpr bool operator==(GestureLabel, GestureLabel) = default;
  friend constexpr auto operator<=>(GestureLabel, GestureLabel) = default;

 private:
  int id_ = 0;
};

/// Canonical names indexed by gesture id.
inline constexpr std::array<std::string_view, kNumGestures> kGestureNames = {
    "rest", "fist", "open", "wrist-up", "wrist-down", "wrist-left", "wrist-right"};

/// Multi-channel sEMG recording with one gesture label per sample.
///
/// Samples are stored channel-major: `channel(c)[k]` is sample k of channel c.
class SemgRecording {
 public:
  SemgRecording(int sample_rate_hz, std::vector<std::vector<double>> channels,
                std::vector<GestureLabel> labels);

  int sample_rate_hz() const { return rate_hz_; }
  int n_channels() const { return static_cast<int>(channels_.size()); }
  std::size_t n_samples() const { return labels_.size(); }
  double duration_s() const { return static_cast<double>(n_samples()) / rate_hz_; }

  std::span<const double> channel(int c) const;
  std::span<const GestureLabel> labels() const { return labels_; }

  friend bool operator==(const SemgRecording&, const SemgRecording&) = default;

 private:
  int rate_hz_;
  std::vector<std::vector<double>> channels_;
  std::vector<GestureLabel> labels_;
};

struct WindowSpec {
  int win_size = 51;
  int win_inc = 25;

  /// Throws Error unless 0 < win_inc <= win_size.
  void validate() const;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Materialized window start offsets and per-window labels.
struct WindowIndex {
  std::vector<std::size_t> starts;
  std::vector<GestureLabel> labels;
  int win_size = 0;
  int win_inc = 0;

  std::size_t size() const { return starts.size(); }
};

struct SegmentOptions {
  /// Drop windows whose samples carry more than one distinct label.
  bool drop_transitions = false;
};

/// Number of full windows that fit in n_samples. Zero when n_samples < win_size.
std::size_t window_count(std::size_t n_samples, const WindowSpec& spec);

/// Slides a window over the recording. Each window takes the label of its
/// center sample (start + win_size / 2).
WindowIndex segment(const SemgRecording& rec, const WindowSpec& spec,
                    SegmentOptions opts = {});

/// The win_size samples of channel ch in window w.
std::span<const double> window_slice(const SemgRecording& rec, const WindowIndex& idx,
                                     std::size_t w, int ch);

/// Decision latency of the overlapped scheme, all in milliseconds.
struct LatencyBudget {
  double t_analysis_ms = 0.0;
  double t_new_ms = 0.0;
  double t_processing_ms = 0.0;
  double decision_ms = 0.0;
};

/// D = T_a/2 + T_new/2 + tau, with T_a and T_new derived from sample counts.
LatencyBudget decision_latency(int win_size, int win_inc, int rate_hz,
                               double t_processing_ms);

}  // namespace emg
