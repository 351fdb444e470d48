#pragma once

// Session protocol, synthetic sEMG generator and the emgrec v1 text format.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "emg/signal.hpp"

namespace emg {

enum class BlockOrder {
  RoundRobin,  ///< g1..gK, repeated reps times
  Blocked,     ///< g1 reps times, then g2 reps times, ...
};

struct SessionProtocol {
  std::vector<GestureLabel> gestures = all_gestures();
  int reps = 4;
  double hold_s = 5.0;
  bool bookend_rest = true;
  double rest_start_s = 2.5;
  double rest_end_s = 2.5;
  int rate_hz = 200;
  BlockOrder order = BlockOrder::RoundRobin;

  static std::vector<GestureLabel> all_gestures();
  void validate() const;
  double duration_s() const;
};

/// Per-sample labels for the protocol: rest bookend, gesture blocks, rest bookend.
std::vector<GestureLabel> build_protocol_labels(const SessionProtocol& p);

/// SplitMix64: 64-bit state advanced by the constant 0x9E3779B97F4A7C15 and
/// finalized with the MurmurHash3-style mixer (0xBF58476D1CE4E5B9, 0x94D049BB133111EB).
/// Output is identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform();
  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Per-gesture, per-channel standard deviation of the synthetic signal.
using AmplitudeProfile = std::vector<std::vector<double>>;

struct SynthConfig {
  std::uint64_t seed = 1;
  AmplitudeProfile profile = default_profile();
  double noise_std = 0.05;
  /// Envelope modulation 1 + 0.25 sin(2 pi f t); 0 disables it.
  double burst_freq_hz = 0.0;
  /// First-order smoothing coefficient of the band-limited source.
  double smoothing = 0.5;

  /// Eight channels; electrodes 2 and 5 carry the same amplitude for every gesture.
  static AmplitudeProfile default_profile();
  /// Default profile with noise_std at 25% of the smallest profile gap.
  static SynthConfig separable(std::uint64_t seed);
  /// Profile compressed to 1 + 0.3 * (default - 0.5); classes overlap within
  /// short windows. Noise at 25% of the smallest gap.
  static SynthConfig low_contrast(std::uint64_t seed);

  int n_channels() const;
  void validate() const;
};

/// Smallest Euclidean distance between two gesture rows of the profile.
double min_profile_gap(const AmplitudeProfile& profile);

/// Channel c during gesture g: profile[g][c] * u_c[n] + noise_std * e[n], where
/// u_c is unit-variance first-order smoothed Gaussian noise and e is white.
SemgRecording synth_recording(const SessionProtocol& p, const SynthConfig& cfg);

void write_recording(const SemgRecording& rec, std::ostream& out);
void write_recording(const SemgRecording& rec, const std::filesystem::path& path);
SemgRecording read_recording(std::istream& in);
SemgRecording read_recording(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace emg
