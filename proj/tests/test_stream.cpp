#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <thread>

#include "emg/dataset.hpp"
#include "emg/pipeline.hpp"
#include "emg/stream.hpp"

using namespace emg;

namespace {

TrainedModel model_of(ClassifierKind kind, std::uint64_t seed = 100) {
  PipelineConfig cfg = PipelineConfig::final_model();
  cfg.kind = kind;
  return train_pipeline(synth_recording(SessionProtocol{}, SynthConfig::separable(seed)), cfg);
}

const TrainedModel& svm_model() {
  static const auto m = model_of(ClassifierKind::SVM);
  return m;
}

SessionProtocol short_protocol(double hold_s = 1.0) {
  SessionProtocol p;
  p.reps = 1;
  p.hold_s = hold_s;
  p.rest_start_s = 0.5;
  p.rest_end_s = 0.5;
  return p;
}

std::vector<double> sample_at(const SemgRecording& rec, std::size_t k) {
  std::vector<double> s;
  for (int c = 0; c < rec.n_channels(); ++c) s.push_back(rec.channel(c)[k]);
  return s;
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("command frame examples") {
  const auto rest = encode_command(GestureLabel::rest());
  CHECK(rest == CommandFrame{'G', '0', '\n'});
  CHECK(make_command(GestureLabel(4)).bytes == CommandFrame{0x47, '4', 0x0A});
  CHECK(decode_command(std::vector<std::uint8_t>{'G', '4', '\n'}) == GestureLabel(4));
  try {
    decode_command(std::vector<std::uint8_t>{'X', '4', '\n'});
    FAIL("expected an error");
  } catch (const FrameError& e) {
    CHECK(e.offset() == 0);
  }
}

TEST_CASE("frame round-trip over every gesture and 500 random streams") {
  for (int id = 0; id < kNumGestures; ++id) {
    const auto f = encode_command(GestureLabel(id));
    CHECK(decode_command(f) == GestureLabel(id));
  }
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<GestureLabel> seq(std::uniform_int_distribution<std::size_t>(0, 40)(rng));
    std::vector<std::uint8_t> bytes;
    for (auto& g : seq) {
      g = GestureLabel(std::uniform_int_distribution<int>(0, 6)(rng));
      const auto f = encode_command(g);
      bytes.insert(bytes.end(), f.begin(), f.end());
    }
    CHECK(decode_commands(bytes) == seq);
    // Every frame ends in the delimiter and contains it nowhere else.
    for (std::size_t i = 0; i < bytes.size(); ++i) CHECK((bytes[i] == kFrameEnd) == (i % 3 == 2));
  }
}

TEST_CASE("malformed frames report the offending offset") {
  const auto offset_of = [](std::vector<std::uint8_t> bytes) -> long {
    try {
      decode_commands(bytes);
    } catch (const FrameError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of({'G', '1', '\n', 'G', '9', '\n'}) == 4);
  CHECK(offset_of({'G', '1', '\n', 'G', '2', 'x'}) == 5);
  CHECK(offset_of({'G', '1', '\n', 'H', '2', '\n'}) == 3);
  CHECK(offset_of({'G', '1', '\n', 'G'}) == 4);
  CHECK(offset_of({'G', '/', '\n'}) == 1);
  CHECK_THROWS_AS(decode_command(std::vector<std::uint8_t>{'G', '1', '\n', '\n'}), FrameError);
  CHECK_THROWS_AS(decode_command(std::vector<std::uint8_t>{'G', '1'}), FrameError);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint8_t> bytes(3);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    const bool valid = bytes[0] == 'G' && bytes[1] >= '0' && bytes[1] <= '6' && bytes[2] == '\n';
    if (valid) {
      CHECK(decode_command(bytes).id() == bytes[1] - '0');
    } else {
      CHECK_THROWS_AS(decode_command(bytes), FrameError);
    }
  }
}

TEST_CASE("bounded queue keeps FIFO order across threads") {
  BoundedQueue<int> q(4);
  CHECK_THROWS_AS(BoundedQueue<int>(0), Error);
  std::vector<int> got;
  std::thread consumer([&] {
    while (auto v = q.pop()) got.push_back(*v);
  });
  for (int i = 0; i < 1000; ++i) REQUIRE(q.push(i));
  q.close();
  consumer.join();
  REQUIRE(got.size() == 1000);
  for (int i = 0; i < 1000; ++i) CHECK(got[static_cast<std::size_t>(i)] == i);

  BoundedQueue<int> full(2);
  CHECK(full.try_push(1));
  CHECK(full.try_push(2));
  CHECK_FALSE(full.try_push(3));
  full.close();
  CHECK_FALSE(full.push(4));
  CHECK(full.pop() == 1);
  CHECK(full.pop() == 2);
  CHECK_FALSE(full.pop().has_value());
}

TEST_CASE("incremental pipeline decides on the 51st sample and every 25 after") {
  const auto rec = synth_recording(short_protocol(), SynthConfig::separable(9));
  IncrementalPipeline inc(svm_model(), VoteConfig{});
  for (std::size_t k = 0; k < 50; ++k) CHECK_FALSE(inc.push(sample_at(rec, k)).has_value());
  const auto first = inc.push(sample_at(rec, 50));
  REQUIRE(first.has_value());
  CHECK(first->window_index == 0);
  for (std::size_t k = 51; k < 200; ++k) {
    const auto d = inc.push(sample_at(rec, k));
    CHECK(d.has_value() == ((k + 1 - 51) % 25 == 0));
    if (d) CHECK(d->window_index == (k + 1 - 51) / 25);
  }
  CHECK(inc.samples_seen() == 200);
  CHECK_THROWS_AS(inc.push(std::vector<double>{1.0, 2.0}), IndexError);
}

TEST_CASE("streaming decisions equal batch decisions") {
  for (ClassifierKind kind : {ClassifierKind::LDA, ClassifierKind::KNN, ClassifierKind::SVM}) {
    const auto model = model_of(kind);
    for (std::uint64_t seed = 200; seed < 205; ++seed) {
      SynthConfig cfg = SynthConfig::separable(seed);
      cfg.noise_std *= 2.0;  // more raw errors so the vote has work to do
      const auto rec = synth_recording(SessionProtocol{}, cfg);
      const VoteConfig vote{3, GestureLabel::rest()};
      const auto batch = batch_decisions(model, rec, vote);
      IncrementalPipeline inc(model, vote);
      std::vector<GestureLabel> raw, smooth;
      for (std::size_t k = 0; k < rec.n_samples(); ++k) {
        if (auto d = inc.push(sample_at(rec, k))) {
          raw.push_back(d->raw);
          smooth.push_back(d->smoothed);
        }
      }
      CHECK(raw == batch.raw);
      CHECK(smooth == batch.smoothed);
    }
  }
}

TEST_CASE("stream run: counts, frames and latency bookkeeping") {
  const auto rec = synth_recording(SessionProtocol{}, SynthConfig::separable(31));
  StreamConfig cfg;
  const auto t = run_stream(svm_model(), rec, cfg);
  REQUIRE(t.decisions.size() == 1158);
  CHECK(t.backpressure_events == 0);
  const auto batch = batch_decisions(svm_model(), rec, cfg.vote);
  GestureLabel last = cfg.vote.initial;
  std::vector<GestureLabel> emitted;
  for (std::size_t i = 0; i < t.decisions.size(); ++i) {
    const auto& d = t.decisions[i];
    CHECK(d.window_index == i);
    CHECK(d.smoothed == batch.smoothed[i]);
    CHECK(d.decision_ms == doctest::Approx(190.0 + d.tau_ms));
    CHECK(d.emitted == (d.smoothed != last));
    if (d.emitted) emitted.push_back(d.smoothed);
    last = d.smoothed;
  }
  CHECK(decode_commands(t.sink) == emitted);
  CHECK(t.max_decision_ms < 300.0);
  CHECK(t.latency_violations == 0);

  cfg.emit_every_decision = true;
  CHECK(run_stream(svm_model(), rec, cfg).sink.size() == 3 * 1158);
}

TEST_CASE("constant rest source emits no frames") {
  SessionProtocol p;
  p.gestures = {GestureLabel::rest()};
  const auto rec = synth_recording(p, SynthConfig::separable(3));
  const auto t = run_stream(svm_model(), rec, StreamConfig{});
  CHECK(t.sink.empty());
  for (const auto& d : t.decisions) CHECK(d.smoothed == GestureLabel::rest());
}

TEST_CASE("latency limit violations are flagged, run completes") {
  const auto rec = synth_recording(short_protocol(), SynthConfig::separable(4));
  StreamConfig cfg;
  cfg.latency_limit_ms = 195.0;
  cfg.fixed_tau_ms = 10.0;
  const auto t = run_stream(svm_model(), rec, cfg);
  CHECK(t.latency_violations == t.decisions.size());
  CHECK(t.max_decision_ms == doctest::Approx(200.0));
}

TEST_CASE("stream config and compatibility are checked before streaming") {
  const auto rec = synth_recording(short_protocol(), SynthConfig::separable(4));
  StreamConfig bad;
  bad.realtime_factor = -1;
  CHECK_THROWS_AS(run_stream(svm_model(), rec, bad), Error);
  bad = StreamConfig{};
  bad.latency_limit_ms = 0;
  CHECK_THROWS_AS(run_stream(svm_model(), rec, bad), Error);

  SessionProtocol p = short_protocol();
  p.rate_hz = 1000;
  CHECK_THROWS_AS(run_stream(svm_model(), synth_recording(p, SynthConfig::separable(1)), StreamConfig{}), Error);
  const SemgRecording narrow(200, {std::vector<double>(500, 0.0)}, std::vector<GestureLabel>(500));
  CHECK_THROWS_AS(run_stream(svm_model(), narrow, StreamConfig{}), Error);
}

TEST_CASE("threaded replay equals the single-threaded run") {
  const auto rec = synth_recording(short_protocol(0.5), SynthConfig::separable(12));
  StreamConfig cfg;
  cfg.fixed_tau_ms = 3.0;
  const auto solo = run_stream(svm_model(), rec, cfg);
  cfg.realtime_factor = 0.02;  // 100 us per sample
  const auto paced = run_stream(svm_model(), rec, cfg);
  CHECK(paced.sink == solo.sink);
  REQUIRE(paced.decisions.size() == solo.decisions.size());
  for (std::size_t i = 0; i < solo.decisions.size(); ++i) {
    CHECK(paced.decisions[i].smoothed == solo.decisions[i].smoothed);
    CHECK(paced.decisions[i].raw == solo.decisions[i].raw);
  }
}

TEST_CASE("wall-clock pacing spaces decisions by the window increment") {
  const auto rec = synth_recording(short_protocol(0.3), SynthConfig::separable(13));  // 3.1 s
  StreamConfig cfg;
  cfg.realtime_factor = 1.0;
  const auto t = run_stream(svm_model(), rec, cfg);
  REQUIRE(t.decisions.size() >= 10);
  int within = 0, total = 0;
  for (std::size_t i = 1; i < t.decisions.size(); ++i) {
    const double gap = t.decisions[i].wall_ms - t.decisions[i - 1].wall_ms;
    ++total;
    if (gap > 100.0 && gap < 150.0) ++within;
    CHECK(t.decisions[i].tau_ms < 110.0);  // processing only, no sleep
  }
  CHECK(within == total);
  CHECK(t.wall_time_s == doctest::Approx(rec.duration_s()).epsilon(0.05));
}

TEST_CASE("trace file lines") {
  const auto rec = synth_recording(short_protocol(), SynthConfig::separable(4));
  StreamConfig cfg;
  cfg.fixed_tau_ms = 0.5;
  const auto t = run_stream(svm_model(), rec, cfg);
  std::ostringstream os;
  write_trace(t, os);
  std::istringstream in(os.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto& d = t.decisions[n];
    const std::string want = std::to_string(d.window_index) + "," + std::string(d.raw.name()) + "," +
                             std::string(d.smoothed.name()) + ",0.5,190.5," + (d.emitted ? "1" : "0");
    CHECK(line == want);
    ++n;
  }
  CHECK(n == t.decisions.size());
}

}  // TEST_SUITE
