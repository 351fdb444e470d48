#include "emg/signal.hpp"

#include <algorithm>
#include <string>

namespace emg {

GestureLabel::GestureLabel(int id) : id_(id) {
  if (id < 0 || id >= kNumGestures) {
    throw Error("gesture id out of range: " + std::to_string(id));
  }
}

GestureLabel GestureLabel::from_name(std::string_view name) {
  const auto it = std::find(kGestureNames.begin(), kGestureNames.end(), name);
  if (it == kGestureNames.end()) {
    throw Error("unknown gesture name '" + std::string(name) + "'");
  }
  return GestureLabel(static_cast<int>(it - kGestureNames.begin()));
}

std::string_view GestureLabel::name() const { return kGestureNames[id_]; }

SemgRecording::SemgRecording(int sample_rate_hz, std::vector<std::vector<double>> channels,
                             std::vector<GestureLabel> labels)
    : rate_hz_(sample_rate_hz), channels_(std::move(channels)), labels_(std::move(labels)) {
  if (rate_hz_ <= 0) throw Error("sample rate must be positive");
  if (channels_.empty()) throw Error("recording needs at least one channel");
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    if (channels_[c].size() != labels_.size()) {
      throw Error("channel " + std::to_string(c + 1) + " has " +
                  std::to_string(channels_[c].size()) + " samples, expected " +
                  std::to_string(labels_.size()));
    }
  }
}

std::span<const double> SemgRecording::channel(int c) const {
  if (c < 0 || c >= n_channels()) {
    throw IndexError("channel index " + std::to_string(c) + " out of range");
  }
  return channels_[static_cast<std::size_t>(c)];
}

void WindowSpec::validate() const {
  if (win_size <= 0) throw Error("win_size must be positive");
  if (win_inc <= 0) throw Error("win_inc must be positive");
  if (win_inc > win_size) throw Error("win_inc must not exceed win_size");
}

std::size_t window_count(std::size_t n_samples, const WindowSpec& spec) {
  spec.validate();
  const auto win = static_cast<std::size_t>(spec.win_size);
  if (n_samples < win) return 0;
  return (n_samples - win) / static_cast<std::size_t>(spec.win_inc) + 1;
}

WindowIndex segment(const SemgRecording& rec, const WindowSpec& spec, SegmentOptions opts) {
  spec.validate();
  const std::size_t n = rec.n_samples();
  if (n < static_cast<std::size_t>(spec.win_size)) {
    throw InsufficientSamples("insufficient samples: recording has " + std::to_string(n) +
                              ", window needs " + std::to_string(spec.win_size));
  }
  WindowIndex idx;
  idx.win_size = spec.win_size;
  idx.win_inc = spec.win_inc;
  const std::size_t count = window_count(n, spec);
  idx.starts.reserve(count);
  idx.labels.reserve(count);
  const auto labels = rec.labels();
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * static_cast<std::size_t>(spec.win_inc);
    const auto window = labels.subspan(start, static_cast<std::size_t>(spec.win_size));
    if (opts.drop_transitions &&
        std::any_of(window.begin(), window.end(),
                    [&](GestureLabel g) { return g != window.front(); })) {
      continue;
    }
    idx.starts.push_back(start);
    idx.labels.push_back(window[static_cast<std::size_t>(spec.win_size / 2)]);
  }
  return idx;
}

std::span<const double> window_slice(const SemgRecording& rec, const WindowIndex& idx,
                                     std::size_t w, int ch) {
  if (w >= idx.size()) {
    throw IndexError("window index " + std::to_string(w) + " out of range (" +
                     std::to_string(idx.size()) + " windows)");
  }
  const auto data = rec.channel(ch);
  const std::size_t start = idx.starts[w];
  if (start + static_cast<std::size_t>(idx.win_size) > data.size()) {
    throw IndexError("window " + std::to_string(w) + " extends past the recording");
  }
  return data.subspan(start, static_cast<std::size_t>(idx.win_size));
}

LatencyBudget decision_latency(int win_size, int win_inc, int rate_hz, double t_processing_ms) {
  if (rate_hz <= 0) throw Error("sample rate must be positive");
  WindowSpec{win_size, win_inc}.validate();
  if (t_processing_ms < 0.0) throw Error("processing time must be non-negative");
  LatencyBudget b;
  b.t_analysis_ms = 1000.0 * win_size / rate_hz;
  b.t_new_ms = 1000.0 * win_inc / rate_hz;
  b.t_processing_ms = t_processing_ms;
  b.decision_ms = 0.5 * b.t_analysis_ms + 0.5 * b.t_new_ms + t_processing_ms;
  return b;
}

}  // namespace emg
