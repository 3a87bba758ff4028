#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/scene.hpp"

namespace foresight {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Linear FMCW sweep parameters. Defaults: 24 GHz K-band, 2 GHz sweep over
/// 1 ms sampled at 1 MHz (1000 samples, 7.5 cm bins).
struct ChirpConfig {
  double center_freq_hz = 24e9;
  double bandwidth_hz = 2e9;
  double sweep_time_s = 1e-3;
  double sample_rate_hz = 1e6;
  // Additive range bias applied at synthesis; models an uncalibrated sensor.
  double range_bias_m = 0.0;

  std::size_t n_samples() const {
    return static_cast<std::size_t>(std::llround(sweep_time_s * sample_rate_hz));
  }

  double max_unambiguous_range_m() const {
    return kSpeedOfLight * sample_rate_hz * sweep_time_s / (4.0 * bandwidth_hz);
  }

  /// Throws ValidationError naming the bad field.
  void validate() const {
    if (!(bandwidth_hz > 0.0)) throw ValidationError("chirp.bandwidth_hz: must be > 0");
    if (!(sweep_time_s > 0.0)) throw ValidationError("chirp.sweep_time_s: must be > 0");
    if (!(sample_rate_hz > 0.0)) throw ValidationError("chirp.sample_rate_hz: must be > 0");
    if (!std::isfinite(range_bias_m)) throw ValidationError("chirp.range_bias_m: must be finite");
    if (n_samples() < 16)
      throw ValidationError("chirp: n_samples = round(sweep_time_s * sample_rate_hz) must be >= 16");
  }

  bool operator==(const ChirpConfig&) const = default;
};

struct BeatSignal {
  std::vector<double> samples;
  ChirpConfig chirp;
};

inline double beat_frequency(double range_m, const ChirpConfig& chirp) {
  if (range_m < 0.0) throw ValidationError("range_m: negative range");
  return 2.0 * chirp.bandwidth_hz * range_m / (kSpeedOfLight * chirp.sweep_time_s);
}

inline double range_resolution(const ChirpConfig& chirp) {
  return kSpeedOfLight / (2.0 * chirp.bandwidth_hz);
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

/// Deterministic phase in [0, 2π) for a reflector.
inline double reflector_phase(std::uint64_t seed, std::string_view reflector_id) {
  const std::uint64_t h = detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a(reflector_id)));
  // Top 53 bits -> [0, 1).
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return 2.0 * std::numbers::pi * u;
}

namespace detail {
inline void add_tone(std::vector<double>& out, double amplitude, double range_m, double phase,
                     const ChirpConfig& chirp) {
  const double fb = beat_frequency(range_m, chirp);
  const double w = 2.0 * std::numbers::pi * fb / chirp.sample_rate_hz;
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] += amplitude * std::cos(w * static_cast<double>(n) + phase);
}
}  // namespace detail

/// Dechirped real-valued beat signal for the scene. Walls are rendered first
/// (in order), then scatterers (in order), then additive Gaussian noise.
inline BeatSignal synthesize_beat(const Scene& scene, const ChirpConfig& chirp) {
  chirp.validate();
  const auto report = validate_scene(scene);
  if (!report.ok()) throw ValidationError(report.to_string());
  const double max_r = chirp.max_unambiguous_range_m();
  if (scene.max_range_m + chirp.range_bias_m > max_r)
    throw ValidationError("chirp: maximum unambiguous range " + detail::fmt_num(max_r) +
                          " m is below scene max_range_m " + detail::fmt_num(scene.max_range_m));

  BeatSignal beat{std::vector<double>(chirp.n_samples(), 0.0), chirp};
  auto render = [&](std::string_view id, double reflectivity, double range_m) {
    const double amp = effective_amplitude(scene, reflectivity, range_m);
    if (amp == 0.0) return;
    const double apparent = std::max(0.0, range_m + chirp.range_bias_m);
    detail::add_tone(beat.samples, amp, apparent, reflector_phase(scene.rng_seed, id), chirp);
  };
  for (const auto& w : scene.walls) render(w.id, w.material.reflectivity, w.range_m);
  for (const auto& s : scene.scatterers) render(s.id, s.material.reflectivity, s.range_m);

  if (scene.noise_amplitude > 0.0) {
    std::mt19937_64 gen(scene.effective_noise_seed());
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& x : beat.samples) x += scene.noise_amplitude * gauss(gen);
  }
  return beat;
}

}  // namespace foresight
