#include "emg/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace emg {

std::vector<GestureLabel> SessionProtocol::all_gestures() {
  std::vector<GestureLabel> g;
  for (int id = 0; id < kNumGestures; ++id) g.emplace_back(id);
  return g;
}

void SessionProtocol::validate() const {
  if (gestures.empty()) throw Error("protocol needs at least one gesture");
  if (reps < 1) throw Error("protocol needs at least one repetition");
  if (!(hold_s > 0.0)) throw Error("hold time must be positive");
  if (rate_hz <= 0) throw Error("sample rate must be positive");
  if (bookend_rest && (rest_start_s < 0.0 || rest_end_s < 0.0)) {
    throw Error("rest bookends must be non-negative");
  }
}

double SessionProtocol::duration_s() const {
  double d = reps * hold_s * static_cast<double>(gestures.size());
  if (bookend_rest) d += rest_start_s + rest_end_s;
  return d;
}

namespace {

std::size_t seconds_to_samples(double s, int rate_hz) {
  return static_cast<std::size_t>(std::llround(s * rate_hz));
}

}  // namespace

std::vector<GestureLabel> build_protocol_labels(const SessionProtocol& p) {
  p.validate();
  std::vector<GestureLabel> labels;
  labels.reserve(seconds_to_samples(p.duration_s(), p.rate_hz));
  const auto hold = seconds_to_samples(p.hold_s, p.rate_hz);
  const auto append = [&](GestureLabel g, std::size_t n) { labels.insert(labels.end(), n, g); };

  if (p.bookend_rest) append(GestureLabel::rest(), seconds_to_samples(p.rest_start_s, p.rate_hz));
  if (p.order == BlockOrder::RoundRobin) {
    for (int r = 0; r < p.reps; ++r) {
      for (GestureLabel g : p.gestures) append(g, hold);
    }
  } else {
    for (GestureLabel g : p.gestures) {
      for (int r = 0; r < p.reps; ++r) append(g, hold);
    }
  }
  if (p.bookend_rest) append(GestureLabel::rest(), seconds_to_samples(p.rest_end_s, p.rate_hz));
  return labels;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

AmplitudeProfile SynthConfig::default_profile() {
  return {
      {0.10, 0.5, 0.10, 0.10, 0.5, 0.10, 0.10, 0.10},  // rest
      {1.00, 0.5, 1.00, 1.00, 0.5, 1.00, 1.00, 1.00},  // fist
      {0.20, 0.5, 1.00, 0.20, 0.5, 1.00, 0.20, 1.00},  // open
      {1.00, 0.5, 0.20, 1.00, 0.5, 0.20, 1.00, 0.20},  // wrist-up
      {1.00, 0.5, 1.00, 0.20, 0.5, 0.20, 0.20, 0.60},  // wrist-down
      {0.20, 0.5, 0.20, 1.00, 0.5, 1.00, 0.60, 0.20},  // wrist-left
      {0.60, 0.5, 0.20, 0.20, 0.5, 0.60, 1.00, 1.00},  // wrist-right
  };
}

SynthConfig SynthConfig::separable(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.noise_std = 0.25 * min_profile_gap(cfg.profile);
  return cfg;
}

SynthConfig SynthConfig::low_contrast(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  for (auto& row : cfg.profile) {
    for (double& v : row) v = 1.0 + 0.3 * (v - 0.5);
  }
  cfg.noise_std = 0.25 * min_profile_gap(cfg.profile);
  return cfg;
}

int SynthConfig::n_channels() const {
  return profile.empty() ? 0 : static_cast<int>(profile.front().size());
}

void SynthConfig::validate() const {
  if (profile.size() != static_cast<std::size_t>(kNumGestures)) {
    throw Error("amplitude profile needs one row per gesture");
  }
  const auto channels = profile.front().size();
  if (channels == 0) throw Error("amplitude profile needs at least one channel");
  for (const auto& row : profile) {
    if (row.size() != channels) throw Error("amplitude profile rows differ in length");
    for (double a : row) {
      if (!(a >= 0.0)) throw Error("amplitudes must be non-negative");
    }
  }
  if (!(noise_std >= 0.0)) throw Error("noise_std must be non-negative");
  if (!(burst_freq_hz >= 0.0)) throw Error("burst frequency must be non-negative");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw Error("smoothing must be in [0, 1)");
}

double min_profile_gap(const AmplitudeProfile& profile) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    for (std::size_t j = i + 1; j < profile.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < profile[i].size(); ++c) {
        const double d = profile[i][c] - profile[j][c];
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
  }
  return best;
}

SemgRecording synth_recording(const SessionProtocol& p, const SynthConfig& cfg) {
  cfg.validate();
  auto labels = build_protocol_labels(p);
  const auto n_ch = static_cast<std::size_t>(cfg.n_channels());
  const std::size_t n = labels.size();
  std::vector<std::vector<double>> channels(n_ch, std::vector<double>(n));

  SplitMix64 rng(cfg.seed);
  const double a = cfg.smoothing;
  const double gain = std::sqrt(1.0 - a * a);
  std::vector<double> state(n_ch, 0.0);
  for (std::size_t c = 0; c < n_ch; ++c) state[c] = rng.normal();

  for (std::size_t k = 0; k < n; ++k) {
    const auto& amp = cfg.profile[static_cast<std::size_t>(labels[k].id())];
    double envelope = 1.0;
    if (cfg.burst_freq_hz > 0.0) {
      const double t = static_cast<double>(k) / p.rate_hz;
      envelope += 0.25 * std::sin(2.0 * std::numbers::pi * cfg.burst_freq_hz * t);
    }
    for (std::size_t c = 0; c < n_ch; ++c) {
      state[c] = a * state[c] + gain * rng.normal();
      const double white = rng.normal();
      channels[c][k] = envelope * amp[c] * state[c] + cfg.noise_std * white;
    }
  }
  return SemgRecording(p.rate_hz, std::move(channels), std::move(labels));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_recording(const SemgRecording& rec, std::ostream& out) {
  out << "emgrec,v1,rate_hz=" << rec.sample_rate_hz() << ",channels=" << rec.n_channels() << '\n';
  std::vector<std::span<const double>> ch;
  for (int c = 0; c < rec.n_channels(); ++c) ch.push_back(rec.channel(c));
  const auto labels = rec.labels();
  std::string line;
  for (std::size_t k = 0; k < rec.n_samples(); ++k) {
    line.clear();
    for (const auto& data : ch) {
      line += format_double(data[k]);
      line += ',';
    }
    line += labels[k].name();
    line += '\n';
    out << line;
  }
  if (!out) throw Error("failed to write recording");
}

void write_recording(const SemgRecording& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_recording(rec, out);
}

namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error("emgrec line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

int parse_header_int(std::string_view field, std::string_view key, std::size_t line_no) {
  if (field.substr(0, key.size()) != key) {
    parse_error(line_no, "expected '" + std::string(key) + "<int>', got '" + std::string(field) + "'");
  }
  const auto digits = field.substr(key.size());
  int value = 0;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || value <= 0) {
    parse_error(line_no, "bad value in '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

SemgRecording read_recording(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) parse_error(line_no, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() != 4 || header[0] != "emgrec") {
    parse_error(line_no, "malformed header, expected 'emgrec,v1,rate_hz=<int>,channels=<int>'");
  }
  if (header[1] != "v1") {
    parse_error(line_no, "unsupported emgrec version '" + std::string(header[1]) +
                             "' (this reader handles v1)");
  }
  const int rate = parse_header_int(header[2], "rate_hz=", line_no);
  const int n_ch = parse_header_int(header[3], "channels=", line_no);

  std::vector<std::vector<double>> channels(static_cast<std::size_t>(n_ch));
  std::vector<GestureLabel> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_commas(line);
    if (fields.size() != static_cast<std::size_t>(n_ch) + 1) {
      parse_error(line_no, "expected " + std::to_string(n_ch + 1) + " columns, got " +
                               std::to_string(fields.size()));
    }
    for (int c = 0; c < n_ch; ++c) {
      const auto f = fields[static_cast<std::size_t>(c)];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || f.empty()) {
        parse_error(line_no, "bad sample value '" + std::string(f) + "' in column " +
                                 std::to_string(c + 1));
      }
      channels[static_cast<std::size_t>(c)].push_back(v);
    }
    try {
      labels.push_back(GestureLabel::from_name(fields.back()));
    } catch (const Error&) {
      parse_error(line_no, "unknown label name '" + std::string(fields.back()) + "'");
    }
  }
  return SemgRecording(rate, std::move(channels), std::move(labels));
}

SemgRecording read_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open recording '" + path.string() + "'");
  return read_recording(in);
}

}  // namespace emg
