#pragma once

// Online mode: a paced sample producer feeding an incremental recognizer
// through a bounded FIFO, majority-vote smoothing, and the 3-byte serial
// command frames sent to the arm controller.

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "emg/classifiers.hpp"
#include "emg/smoothing.hpp"

namespace emg {

// ---- command frames -------------------------------------------------------

inline constexpr std::uint8_t kFrameStart = 0x47;  // 'G'
inline constexpr std::uint8_t kFrameEnd = 0x0A;    // '\n'

using CommandFrame = std::array<std::uint8_t, 3>;

class FrameError : public Error {
 public:
  FrameError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct RobotCommand {
  GestureLabel gesture;
  CommandFrame bytes{};
};

/// 'G', ASCII digit of the gesture id, '\n'.
CommandFrame encode_command(GestureLabel g);
RobotCommand make_command(GestureLabel g);
/// Decodes exactly one 3-byte frame. FrameError carries the offending offset.
GestureLabel decode_command(std::span<const std::uint8_t> frame);
/// Decodes a concatenation of frames; offsets in errors are stream offsets.
std::vector<GestureLabel> decode_commands(std::span<const std::uint8_t> bytes);

// ---- bounded FIFO ----------------------------------------------------------

/// Blocking multi-producer/multi-consumer FIFO with a fixed capacity.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error("queue capacity must be positive");
  }

  /// False if the queue is full or closed.
  bool try_push(T value) {
    std::lock_guard lock(mu_);
    if (closed_ || items_.size() >= capacity_) return false;
    items_.push_back(std::move(value));
    not_empty_.notify_one();
    return true;
  }

  /// Blocks while full. False if the queue was closed.
  bool push(T value) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    if (closed_) return false;
    items_.push_back(std::move(value));
    not_empty_.notify_one();
    return true;
  }

  /// Blocks until an item arrives; nullopt once closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T value = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return value;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
};

// ---- incremental recognition ----------------------------------------------

struct Decision {
  std::size_t window_index = 0;
  GestureLabel raw;
  GestureLabel smoothed;
  double tau_ms = 0.0;
};

/// Consumes one multi-channel sample at a time and emits a decision exactly
/// when win_inc new samples have arrived after the first full window.
class IncrementalPipeline {
 public:
  IncrementalPipeline(const TrainedModel& model, VoteConfig vote);

  /// `sample[c]` is channel c (0-based) of the recording.
  std::optional<Decision> push(std::span<const double> sample);

  std::size_t samples_seen() const { return seen_; }

 private:
  const TrainedModel& model_;
  MajorityVoter voter_;
  std::vector<int> channels_;                 // 0-based indices of masked channels
  std::vector<std::vector<double>> ring_;     // per masked channel, win_size slots
  std::vector<std::vector<double>> scratch_;  // linearized windows
  std::vector<double> row_;
  std::size_t seen_ = 0;
  std::size_t win_size_;
  std::size_t win_inc_;
};

/// Segment + extract + predict + vote over a whole recording.
struct BatchDecisions {
  std::vector<GestureLabel> raw;
  std::vector<GestureLabel> smoothed;
};
BatchDecisions batch_decisions(const TrainedModel& model, const SemgRecording& rec,
                               const VoteConfig& vote);

// ---- streaming run ----------------------------------------------------------

struct StreamConfig {
  VoteConfig vote;
  /// Seconds of wall time per second of signal; 0 runs as fast as possible.
  double realtime_factor = 0.0;
  double latency_limit_ms = 300.0;
  /// Emit a frame for every decision instead of only on label changes.
  bool emit_every_decision = false;
  /// Report this processing time instead of the measured one.
  std::optional<double> fixed_tau_ms;
  /// FIFO capacity in samples; 0 means 2 * win_size.
  std::size_t queue_capacity = 0;

  void validate() const;
};

struct DecisionRecord {
  std::size_t window_index = 0;
  GestureLabel raw;
  GestureLabel smoothed;
  double tau_ms = 0.0;
  double decision_ms = 0.0;
  bool emitted = false;
  double wall_ms = 0.0;  ///< time since the run started; not part of the trace file
};

struct PredictionTrace {
  std::vector<DecisionRecord> decisions;
  std::vector<std::uint8_t> sink;  ///< every command frame, concatenated
  std::size_t latency_violations = 0;
  std::size_t backpressure_events = 0;
  double max_tau_ms = 0.0;
  double max_decision_ms = 0.0;
  double wall_time_s = 0.0;
};

/// Replays `source` through the model. Compatibility is checked before any
/// sample is produced.
PredictionTrace run_stream(const TrainedModel& model, const SemgRecording& source,
                           const StreamConfig& cfg);

/// One line per decision: window_index,raw_label,smoothed_label,tau_ms,decision_ms,emitted
void write_trace(const PredictionTrace& trace, std::ostream& out);

}  // namespace emg
