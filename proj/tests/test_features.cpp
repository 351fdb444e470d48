#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "emg/dataset.hpp"
#include "emg/features.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace emg;

using gen::ar2_series;
using gen::random_segment;

TEST_SUITE("features") {

TEST_CASE("rms examples") {
  CHECK(rms(std::vector<double>{0, 0, 0, 0}) == 0.0);
  CHECK(rms(std::vector<double>{-2.5, -2.5, -2.5}) == doctest::Approx(2.5));
  CHECK(rms(std::vector<double>{3, 4}) == doctest::Approx(3.535534).epsilon(1e-6));
  CHECK(rms(std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)));
  CHECK_THROWS_AS(rms(std::vector<double>{}), Error);
}

TEST_CASE("mav examples") {
  CHECK(mav(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(mav(std::vector<double>{1, -1, 2, -2}) == doctest::Approx(1.5));
  CHECK(mav(std::vector<double>{0.7, 0.7, 0.7}) == doctest::Approx(0.7));
  CHECK_THROWS_AS(mav(std::vector<double>{}), Error);
}

TEST_CASE("wl examples") {
  CHECK(wl(std::vector<double>{2, 2, 2}) == 0.0);
  CHECK(wl(std::vector<double>{0, 1, 2, 3, 4, 5, 6}) == 6.0);
  CHECK(wl(std::vector<double>{0, 1, 3, 2}) == 4.0);
  CHECK_THROWS_AS(wl(std::vector<double>{1}), Error);
}

TEST_CASE("zc examples") {
  CHECK(zc(std::vector<double>{1, 2, 3, 0.5}, 0.0) == 0);
  CHECK(zc(std::vector<double>{1, -1, 1, -1}, 0.0) == 3);
  CHECK(zc(std::vector<double>{1, -1}, 3.0) == 0);
  CHECK(zc(std::vector<double>{1, -1}, 2.0) == 1);
  CHECK_THROWS_AS(zc(std::vector<double>{1}, 0.0), Error);
}

TEST_CASE("ssc examples") {
  CHECK(ssc(std::vector<double>{1, 2, 3, 4}, 0.0) == 0);
  CHECK(ssc(std::vector<double>{5, 5, 5, 5}, 0.0) == 0);
  CHECK(ssc(std::vector<double>{0, 1, 0, 1, 0}, 0.0) == 3);
  CHECK(ssc(std::vector<double>{0, 1, 0, 1, 0}, 1.0) == 3);
  CHECK(ssc(std::vector<double>{0, 1, 0, 1, 0}, 1.5) == 0);
  CHECK_THROWS_AS(ssc(std::vector<double>{1, 2}, 0.0), Error);
}

TEST_CASE("ar examples") {
  CHECK(ar_coeffs(std::vector<double>(20, 0.0), 2) == std::vector<double>{0.0, 0.0});
  CHECK(ar_coeffs(std::vector<double>(20, 3.0), 3) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(ar_coeffs(std::vector<double>(4, 1.0), 2), Error);
  CHECK_THROWS_AS(ar_coeffs(std::vector<double>(40, 1.0), 0), Error);

  const auto ar1 = ar_coeffs(ar2_series(0.5, 0.0, 4000, 21, 1.0), 2);
  CHECK(ar1[0] == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::fabs(ar1[0] - 0.5) < 0.05);
  CHECK(std::fabs(ar1[1]) < 0.05);

  const auto x = ar2_series(1.2, -0.36, 2000, 22, 1.0);
  const auto est = ar_coeffs(x, 2);
  const auto ls = oracle::ar_least_squares(x, 2);
  CHECK(std::fabs(est[0] - 1.2) < 0.05);
  CHECK(std::fabs(est[1] + 0.36) < 0.05);
  CHECK(std::fabs(ls[0] - 1.2) < 0.05);
  CHECK(std::fabs(ls[1] + 0.36) < 0.05);
}

TEST_CASE("all extractors match brute-force transliterations on 1000 random segments") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_segment(rng);
    const double alpha = trial % 3 == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    INFO("trial " << trial << " n=" << x.size());
    CHECK(oracle::close_rel(rms(x), oracle::rms(x)));
    CHECK(oracle::close_rel(mav(x), oracle::mav(x)));
    CHECK(oracle::close_rel(wl(x), oracle::wl(x)));
    CHECK(zc(x, alpha) == oracle::zc(x, alpha));
    CHECK(ssc(x, alpha) == oracle::ssc(x, alpha));
    const int p = std::uniform_int_distribution<int>(1, std::min<int>(4, static_cast<int>((x.size() - 1) / 2)))(rng);
    const auto a = ar_coeffs(x, p);
    const auto b = oracle::ar_yule_walker(x, p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(oracle::close_rel(a[i], b[i]));
  }
}

TEST_CASE("scale and shift behaviour") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = random_segment(rng);
    double c = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
    if (trial % 2) c = -c;
    const double offset = std::uniform_real_distribution<double>(-100.0, 100.0)(rng);
    std::vector<double> scaled(x), shifted(x);
    for (auto& v : scaled) v *= c;
    for (auto& v : shifted) v += offset;

    CHECK(oracle::close_rel(rms(scaled), std::fabs(c) * rms(x)));
    CHECK(oracle::close_rel(mav(scaled), std::fabs(c) * mav(x)));
    CHECK(oracle::close_rel(wl(scaled), std::fabs(c) * wl(x)));
    CHECK(zc(scaled, 0.0) == zc(x, 0.0));
    const auto a = ar_coeffs(x, 2), as = ar_coeffs(scaled, 2), ash = ar_coeffs(shifted, 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(oracle::close_rel(as[i], a[i], 1e-9, 1e-9));
      // Mean removal absorbs the offset up to rounding of the shifted samples.
      CHECK(std::fabs(ash[i] - a[i]) <= 1e-6 * (1.0 + std::fabs(a[i])));
    }
    // Offsets are exact in binary when they are small integers.
    std::vector<double> int_shift(x);
    for (auto& v : int_shift) v += 4.0;
    CHECK(oracle::close_rel(wl(int_shift), wl(x), 1e-9, 1e-9));
    CHECK(ssc(shifted, 0.0) == oracle::ssc(shifted, 0.0));
  }
}

TEST_CASE("feature spec canonicalization and validation") {
  const auto f = FeatureSpec::make({Feature::AR, Feature::RMS, Feature::ZC});
  CHECK(f.enabled == std::vector<Feature>{Feature::RMS, Feature::ZC, Feature::AR});
  CHECK(f.values_per_channel() == 4);
  CHECK_THROWS_AS(FeatureSpec::make({}), Error);
  CHECK_THROWS_AS(FeatureSpec::make({Feature::RMS, Feature::RMS}), Error);
  CHECK_THROWS_AS(FeatureSpec::make({Feature::AR}, 0), Error);
  CHECK_THROWS_AS(FeatureSpec::make({Feature::ZC}, 2, -1.0), Error);
  CHECK(feature_from_name("ssc") == Feature::SSC);
  CHECK(feature_from_name("WL") == Feature::WL);
  CHECK_THROWS_AS(feature_from_name("psd"), Error);
}

TEST_CASE("channel mask") {
  const ChannelMask m({8, 1, 3});
  CHECK(std::vector<int>(m.ids().begin(), m.ids().end()) == std::vector<int>{1, 3, 8});
  CHECK(m.contains(3));
  CHECK_FALSE(m.contains(2));
  CHECK_THROWS_AS(ChannelMask({}), Error);
  CHECK_THROWS_AS(ChannelMask({1, 1}), Error);
  CHECK_THROWS_AS(ChannelMask({0, 1}), Error);
  CHECK_THROWS_AS(m.check_within(7), Error);
}

TEST_CASE("column counts") {
  const auto rec = synth_recording(SessionProtocol{}, SynthConfig::separable(1));
  const auto idx = segment(rec, {51, 25});
  const FeatureSpec all;
  const auto no_ssc = FeatureSpec::make({Feature::RMS, Feature::MAV, Feature::WL, Feature::ZC, Feature::AR});
  const ChannelMask six({1, 3, 4, 6, 7, 8});

  const auto full = extract_matrix(rec, idx, all, ChannelMask::all(8));
  CHECK(full.cols == 56);
  CHECK(full.rows == 1158);
  CHECK(extract_matrix(rec, idx, no_ssc, six).cols == 6 * (4 + 2));
  CHECK(extract_matrix(rec, idx, all, six).cols == 42);

  const auto one = extract_matrix(rec, idx, FeatureSpec::make({Feature::RMS}), ChannelMask({4}));
  REQUIRE(one.cols == 1);
  for (std::size_t w = 0; w < idx.size(); w += 97) {
    const auto s = window_slice(rec, idx, w, 3);
    CHECK(one.at(w, 0) == rms(s));
  }
}

TEST_CASE("column layout is channel-major in canonical feature order and unique") {
  const auto layout = column_layout(FeatureSpec::make({Feature::AR, Feature::RMS}, 3), ChannelMask({2, 5}));
  REQUIRE(layout.size() == 8);
  CHECK(layout[0] == ColumnMeta{2, Feature::RMS, 0});
  CHECK(layout[1] == ColumnMeta{2, Feature::AR, 1});
  CHECK(layout[3] == ColumnMeta{2, Feature::AR, 3});
  CHECK(layout[4] == ColumnMeta{5, Feature::RMS, 0});
  for (std::size_t i = 0; i < layout.size(); ++i)
    for (std::size_t j = i + 1; j < layout.size(); ++j) CHECK_FALSE(layout[i] == layout[j]);
}

TEST_CASE("matrix rows equal single-window extraction and parallel equals serial") {
  SynthConfig cfg = SynthConfig::separable(4);
  cfg.burst_freq_hz = 1.5;
  const auto rec = synth_recording(SessionProtocol{}, cfg);
  const auto idx = segment(rec, {64, 20});
  const FeatureSpec spec = FeatureSpec::make({kAllFeatures.begin(), kAllFeatures.end()}, 3, 0.01);
  const ChannelMask mask({1, 2, 7});
  const auto par = extract_matrix(rec, idx, spec, mask);
  const auto ser = extract_matrix_serial(rec, idx, spec, mask);
  CHECK(par == ser);
  CHECK(std::memcmp(par.values.data(), ser.values.data(), par.values.size() * sizeof(double)) == 0);
  CHECK(par.row_labels == idx.labels);

  std::vector<double> row(par.cols);
  for (std::size_t w = 0; w < idx.size(); w += 13) {
    std::vector<std::span<const double>> slices;
    for (int id : mask.ids()) slices.push_back(window_slice(rec, idx, w, id - 1));
    extract_window(slices, spec, row);
    for (std::size_t c = 0; c < par.cols; ++c) CHECK(row[c] == par.at(w, c));
  }
}

TEST_CASE("non-finite input is reported with window, channel and feature") {
  std::vector<double> ch(100, 1.0);
  ch[70] = std::numeric_limits<double>::infinity();
  const SemgRecording rec(200, {ch}, std::vector<GestureLabel>(100));
  const auto idx = segment(rec, {20, 10});
  for (auto fn : {&extract_matrix, &extract_matrix_serial}) {
    try {
      fn(rec, idx, FeatureSpec::make({Feature::RMS}), ChannelMask({1}));
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("window 6") != std::string::npos);  // first window containing sample 70
      CHECK(msg.find("channel 1") != std::string::npos);
      CHECK(msg.find("RMS") != std::string::npos);
    }
  }
}

}  // TEST_SUITE
