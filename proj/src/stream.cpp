#include "emg/stream.hpp"

#include <chrono>
#include <ostream>
#include <string>
#include <thread>

#include "emg/dataset.hpp"
#include "emg/pipeline.hpp"

namespace emg {

FrameError::FrameError(std::size_t offset, const std::string& what)
    : Error("bad command frame at byte offset " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

CommandFrame encode_command(GestureLabel g) {
  return {kFrameStart, static_cast<std::uint8_t>('0' + g.id()), kFrameEnd};
}

RobotCommand make_command(GestureLabel g) { return {g, encode_command(g)}; }

namespace {

GestureLabel decode_at(std::span<const std::uint8_t> bytes, std::size_t base) {
  if (bytes.size() < 3) throw FrameError(base + bytes.size(), "truncated frame");
  if (bytes[0] != kFrameStart) throw FrameError(base, "expected 'G'");
  const int digit = static_cast<int>(bytes[1]) - '0';
  if (digit < 0 || digit >= kNumGestures) throw FrameError(base + 1, "gesture digit out of range");
  if (bytes[2] != kFrameEnd) throw FrameError(base + 2, "expected line feed");
  return GestureLabel(digit);
}

}  // namespace

GestureLabel decode_command(std::span<const std::uint8_t> frame) {
  if (frame.size() > 3) throw FrameError(3, "trailing bytes after frame");
  return decode_at(frame, 0);
}

std::vector<GestureLabel> decode_commands(std::span<const std::uint8_t> bytes) {
  std::vector<GestureLabel> out;
  out.reserve(bytes.size() / 3);
  for (std::size_t off = 0; off < bytes.size(); off += 3) {
    out.push_back(decode_at(bytes.subspan(off, std::min<std::size_t>(3, bytes.size() - off)), off));
  }
  return out;
}

IncrementalPipeline::IncrementalPipeline(const TrainedModel& model, VoteConfig vote)
    : model_(model),
      voter_(vote),
      win_size_(static_cast<std::size_t>(model.window_spec.win_size)),
      win_inc_(static_cast<std::size_t>(model.window_spec.win_inc)) {
  model.window_spec.validate();
  for (int id : model.channel_mask.ids()) channels_.push_back(id - 1);
  ring_.assign(channels_.size(), std::vector<double>(win_size_, 0.0));
  scratch_.assign(channels_.size(), std::vector<double>(win_size_, 0.0));
  row_.assign(model.col_meta.size(), 0.0);
}

std::optional<Decision> IncrementalPipeline::push(std::span<const double> sample) {
  const std::size_t slot = seen_ % win_size_;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const auto c = static_cast<std::size_t>(channels_[i]);
    if (c >= sample.size()) throw IndexError("sample is missing channel " + std::to_string(c + 1));
    ring_[i][slot] = sample[c];
  }
  ++seen_;
  if (seen_ < win_size_ || (seen_ - win_size_) % win_inc_ != 0) return std::nullopt;

  const auto t0 = std::chrono::steady_clock::now();
  // Oldest sample sits at the slot after the newest one.
  const std::size_t oldest = seen_ % win_size_;
  std::vector<std::span<const double>> slices;
  slices.reserve(channels_.size());
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    for (std::size_t k = 0; k < win_size_; ++k) scratch_[i][k] = ring_[i][(oldest + k) % win_size_];
    slices.emplace_back(scratch_[i]);
  }
  extract_window(slices, model_.feature_spec, row_);
  Decision d;
  d.window_index = (seen_ - win_size_) / win_inc_;
  d.raw = predict_row(model_, row_);
  d.smoothed = voter_.push(d.raw);
  d.tau_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return d;
}

BatchDecisions batch_decisions(const TrainedModel& model, const SemgRecording& rec,
                               const VoteConfig& vote) {
  BatchDecisions out;
  out.raw = predict_recording(model, rec).predicted;
  out.smoothed = majority_vote(out.raw, vote);
  return out;
}

void StreamConfig::validate() const {
  vote.validate();
  if (!(realtime_factor >= 0.0)) throw Error("realtime factor must be non-negative");
  if (!(latency_limit_ms > 0.0)) throw Error("latency limit must be positive");
  if (fixed_tau_ms && !(*fixed_tau_ms >= 0.0)) throw Error("fixed tau must be non-negative");
}

namespace {

class StreamRun {
 public:
  StreamRun(const TrainedModel& model, const StreamConfig& cfg)
      : model_(model), cfg_(cfg), pipeline_(model, cfg.vote),
        last_sent_(cfg.vote.initial), start_(std::chrono::steady_clock::now()) {}

  void consume(std::span<const double> sample) {
    const auto d = pipeline_.push(sample);
    if (!d) return;
    DecisionRecord rec;
    rec.window_index = d->window_index;
    rec.raw = d->raw;
    rec.smoothed = d->smoothed;
    rec.tau_ms = cfg_.fixed_tau_ms.value_or(d->tau_ms);
    rec.decision_ms = decision_latency(model_.window_spec.win_size, model_.window_spec.win_inc,
                                       model_.sample_rate_hz, rec.tau_ms)
                          .decision_ms;
    if (cfg_.emit_every_decision || rec.smoothed != last_sent_) {
      const CommandFrame frame = encode_command(rec.smoothed);
      trace_.sink.insert(trace_.sink.end(), frame.begin(), frame.end());
      last_sent_ = rec.smoothed;
      rec.emitted = true;
    }
    if (rec.decision_ms > cfg_.latency_limit_ms) ++trace_.latency_violations;
    trace_.max_tau_ms = std::max(trace_.max_tau_ms, rec.tau_ms);
    trace_.max_decision_ms = std::max(trace_.max_decision_ms, rec.decision_ms);
    rec.wall_ms = elapsed_ms();
    trace_.decisions.push_back(rec);
  }

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  PredictionTrace& trace() { return trace_; }
  auto start() const { return start_; }

 private:
  const TrainedModel& model_;
  const StreamConfig& cfg_;
  IncrementalPipeline pipeline_;
  GestureLabel last_sent_;
  PredictionTrace trace_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<double> sample_at(const SemgRecording& rec, std::size_t k) {
  std::vector<double> s(static_cast<std::size_t>(rec.n_channels()));
  for (int c = 0; c < rec.n_channels(); ++c) s[static_cast<std::size_t>(c)] = rec.channel(c)[k];
  return s;
}

}  // namespace

PredictionTrace run_stream(const TrainedModel& model, const SemgRecording& source,
                           const StreamConfig& cfg) {
  cfg.validate();
  check_compatible(model, source);
  if (source.n_samples() < static_cast<std::size_t>(model.window_spec.win_size)) {
    throw InsufficientSamples("stream source shorter than one window");
  }

  StreamRun run(model, cfg);
  const std::size_t n = source.n_samples();

  if (cfg.realtime_factor == 0.0) {
    for (std::size_t k = 0; k < n; ++k) run.consume(sample_at(source, k));
  } else {
    const std::size_t capacity = cfg.queue_capacity
                                     ? cfg.queue_capacity
                                     : 2 * static_cast<std::size_t>(model.window_spec.win_size);
    BoundedQueue<std::vector<double>> queue(capacity);
    std::size_t overflow = 0;
    const auto period = std::chrono::duration<double>(cfg.realtime_factor / source.sample_rate_hz());
    const auto t0 = run.start();

    std::thread producer([&] {
      for (std::size_t k = 0; k < n; ++k) {
        std::this_thread::sleep_until(
            t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     period * static_cast<double>(k + 1)));
        auto s = sample_at(source, k);
        if (!queue.try_push(s)) {
          // Consumer fell behind: record it, then wait rather than drop.
          ++overflow;
          if (!queue.push(std::move(s))) break;
        }
      }
      queue.close();
    });
    try {
      while (auto s = queue.pop()) run.consume(*s);
    } catch (...) {
      queue.close();
      producer.join();
      throw;
    }
    producer.join();
    run.trace().backpressure_events = overflow;
  }
  run.trace().wall_time_s = run.elapsed_ms() / 1000.0;
  return std::move(run.trace());
}

void write_trace(const PredictionTrace& trace, std::ostream& out) {
  for (const DecisionRecord& d : trace.decisions) {
    out << d.window_index << ',' << d.raw.name() << ',' << d.smoothed.name() << ','
        << format_double(d.tau_ms) << ',' << format_double(d.decision_ms) << ','
        << (d.emitted ? 1 : 0) << '\n';
  }
}

}  // namespace emg
