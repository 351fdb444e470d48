#include <doctest.h>

#include <random>

#include "emg/dataset.hpp"
#include "emg/signal.hpp"
#include "oracles.hpp"

using namespace emg;

namespace {

SemgRecording ramp_recording(std::size_t n, int channels = 2) {
  std::vector<std::vector<double>> ch(static_cast<std::size_t>(channels), std::vector<double>(n));
  for (int c = 0; c < channels; ++c)
    for (std::size_t k = 0; k < n; ++k) ch[static_cast<std::size_t>(c)][k] = 1000.0 * c + static_cast<double>(k);
  return SemgRecording(200, std::move(ch), std::vector<GestureLabel>(n));
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("gesture labels form a bijection with rest at id 0") {
  CHECK(GestureLabel::rest().id() == 0);
  CHECK(GestureLabel::rest().name() == "rest");
  for (int id = 0; id < kNumGestures; ++id) {
    const GestureLabel g(id);
    CHECK(GestureLabel::from_name(g.name()) == g);
    for (int other = 0; other < id; ++other) CHECK(GestureLabel(other).name() != g.name());
  }
  CHECK_THROWS_AS(GestureLabel(7), Error);
  CHECK_THROWS_AS(GestureLabel(-1), Error);
  CHECK_THROWS_AS(GestureLabel::from_name("wave"), Error);
}

TEST_CASE("recording invariants are enforced") {
  CHECK_THROWS_AS(SemgRecording(0, {{1.0}}, {GestureLabel()}), Error);
  CHECK_THROWS_AS(SemgRecording(200, {{1.0, 2.0}, {1.0}}, {GestureLabel(), GestureLabel()}), Error);
  CHECK_THROWS_AS(SemgRecording(200, {{1.0, 2.0}}, {GestureLabel()}), Error);
  CHECK_THROWS_AS(SemgRecording(200, {}, {}), Error);
  const auto rec = ramp_recording(400);
  CHECK(rec.duration_s() == doctest::Approx(2.0));
  CHECK_THROWS_AS(rec.channel(2), IndexError);
}

TEST_CASE("window spec validation") {
  CHECK_NOTHROW(WindowSpec{51, 25}.validate());
  CHECK_NOTHROW(WindowSpec{10, 10}.validate());
  CHECK_THROWS_AS((WindowSpec{0, 0}.validate()), Error);
  CHECK_THROWS_AS((WindowSpec{10, 0}.validate()), Error);
  CHECK_THROWS_AS((WindowSpec{10, 11}.validate()), Error);
}

TEST_CASE("segment: documented examples") {
  CHECK(segment(ramp_recording(29000), {51, 25}).size() == (29000 - 51) / 25 + 1);
  CHECK(segment(ramp_recording(29000), {51, 25}).size() == 1158);

  const auto one = segment(ramp_recording(51), {51, 25});
  REQUIRE(one.size() == 1);
  CHECK(one.starts[0] == 0);

  try {
    segment(ramp_recording(50), {51, 25});
    FAIL("expected an error");
  } catch (const InsufficientSamples& e) {
    CHECK(std::string(e.what()).find("insufficient samples") != std::string::npos);
  }
}

TEST_CASE("window count matches a sliding cursor on random triples") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto win = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    const auto inc = std::uniform_int_distribution<std::size_t>(1, win)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(0, 5000)(rng);
    const WindowSpec spec{static_cast<int>(win), static_cast<int>(inc)};
    CHECK(window_count(n, spec) == oracle::slide_count(n, win, inc));
  }
}

TEST_CASE("windows: stride, overlap, bounds and center labels") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int win = std::uniform_int_distribution<int>(2, 80)(rng);
    const int inc = std::uniform_int_distribution<int>(1, win)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(static_cast<std::size_t>(win), 1500)(rng);
    std::vector<GestureLabel> labels(n);
    for (auto& l : labels) l = GestureLabel(std::uniform_int_distribution<int>(0, 6)(rng));
    const SemgRecording rec(200, {std::vector<double>(n, 0.0)}, labels);
    const auto idx = segment(rec, {win, inc});
    REQUIRE(idx.size() == oracle::slide_count(n, static_cast<std::size_t>(win), static_cast<std::size_t>(inc)));
    for (std::size_t w = 0; w < idx.size(); ++w) {
      CHECK(idx.starts[w] == w * static_cast<std::size_t>(inc));
      CHECK(idx.starts[w] + static_cast<std::size_t>(win) <= n);
      CHECK(idx.labels[w] == labels[idx.starts[w] + static_cast<std::size_t>(win / 2)]);
      if (w > 0) {
        // Shared samples between consecutive windows.
        const auto prev_end = idx.starts[w - 1] + static_cast<std::size_t>(win);
        CHECK(prev_end - idx.starts[w] == static_cast<std::size_t>(win - inc));
      }
    }
  }
}

TEST_CASE("segmentation loses and duplicates no samples") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int win = std::uniform_int_distribution<int>(1, 60)(rng);
    const int inc = std::uniform_int_distribution<int>(1, win)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(static_cast<std::size_t>(win), 800)(rng);
    const auto rec = ramp_recording(n, 1);
    const auto idx = segment(rec, {win, inc});
    std::vector<double> rebuilt;
    for (std::size_t w = 0; w < idx.size(); ++w) {
      const auto s = window_slice(rec, idx, w, 0);
      const std::size_t take = w + 1 < idx.size() ? static_cast<std::size_t>(inc) : s.size();
      rebuilt.insert(rebuilt.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(take));
    }
    const auto covered = idx.starts.back() + static_cast<std::size_t>(win);
    const auto orig = rec.channel(0);
    CHECK(std::vector<double>(orig.begin(), orig.begin() + static_cast<std::ptrdiff_t>(covered)) == rebuilt);
  }
}

TEST_CASE("transition guard drops mixed windows only when enabled") {
  std::vector<GestureLabel> labels(100, GestureLabel(0));
  std::fill(labels.begin() + 50, labels.end(), GestureLabel(1));
  const SemgRecording rec(200, {std::vector<double>(100, 0.0)}, labels);
  const auto all = segment(rec, {20, 10});
  const auto clean = segment(rec, {20, 10}, {.drop_transitions = true});
  CHECK(all.size() == 9);
  CHECK(clean.size() == 8);  // only [40, 60) mixes labels
  for (std::size_t s : clean.starts) CHECK(s != 40);
}

TEST_CASE("window_slice examples") {
  const auto rec = ramp_recording(200);
  const auto idx = segment(rec, {51, 25});
  const auto first = window_slice(rec, idx, 0, 1);
  REQUIRE(first.size() == 51);
  CHECK(first[0] == 1000.0);
  CHECK(first[50] == 1050.0);
  const auto second = window_slice(rec, idx, 1, 0);
  CHECK(second[0] == 25.0);
  CHECK(second[50] == 75.0);

  const SemgRecording zeros(200, {std::vector<double>(100, 0.0)}, std::vector<GestureLabel>(100));
  const auto zidx = segment(zeros, {51, 25});
  for (double v : window_slice(zeros, zidx, 1, 0)) CHECK(v == 0.0);

  CHECK_THROWS_AS(window_slice(rec, idx, idx.size(), 0), IndexError);
  CHECK_THROWS_AS(window_slice(rec, idx, 0, 2), IndexError);
  CHECK_THROWS_AS(window_slice(rec, idx, 0, -1), IndexError);
}

TEST_CASE("decision latency examples") {
  const auto d20 = decision_latency(51, 25, 200, 20.0);
  CHECK(d20.t_analysis_ms == doctest::Approx(255.0));
  CHECK(d20.t_new_ms == doctest::Approx(125.0));
  CHECK(d20.decision_ms == doctest::Approx(210.0));
  CHECK(decision_latency(51, 25, 200, 0.0).decision_ms == doctest::Approx(190.0));
  CHECK_THROWS_AS(decision_latency(51, 25, 0, 0.0), Error);
  CHECK_THROWS_AS(WindowSpec({0, 25}).validate(), Error);
}

TEST_CASE("decision latency is monotone in each argument") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int win = std::uniform_int_distribution<int>(1, 300)(rng);
    const int inc = std::uniform_int_distribution<int>(1, win)(rng);
    const double tau = std::uniform_real_distribution<double>(0.0, 50.0)(rng);
    const double base = decision_latency(win, inc, 200, tau).decision_ms;
    CHECK(decision_latency(win + 1, inc, 200, tau).decision_ms > base);
    if (inc < win) CHECK(decision_latency(win, inc + 1, 200, tau).decision_ms > base);
    CHECK(decision_latency(win, inc, 200, tau + 0.5).decision_ms > base);
    const auto b = decision_latency(win, inc, 200, tau);
    CHECK(b.decision_ms == doctest::Approx(0.5 * b.t_analysis_ms + 0.5 * b.t_new_ms + tau));
  }
}

}  // TEST_SUITE
