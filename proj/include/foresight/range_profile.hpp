#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/fmcw.hpp"

namespace foresight {

enum class Window { Rect, Hann };

inline std::string_view to_string(Window w) { return w == Window::Hann ? "hann" : "rect"; }

/// Return signal amplitude against down-range distance. Bin k sits at
/// k * bin_spacing_m; rsa is scaled so an on-bin tone of amplitude A reads A.
struct RangeProfile {
  std::vector<double> range_m;
  std::vector<double> rsa;
  ChirpConfig chirp;

  std::size_t size() const { return rsa.size(); }
  bool empty() const { return rsa.empty(); }
  double bin_spacing_m() const { return range_m.size() > 1 ? range_m[1] - range_m[0] : 0.0; }
  double max_rsa() const { return rsa.empty() ? 0.0 : *std::max_element(rsa.begin(), rsa.end()); }

  /// Nearest bin to range r (clamped).
  std::size_t bin_of(double r) const {
    if (range_m.size() < 2) return 0;
    const double k = std::round(r / bin_spacing_m());
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(range_m.size() - 1)));
  }
};

struct Peak {
  double range_m = 0.0;
  double rsa = 0.0;
  double prominence = 0.0;
  std::size_t bin = 0;
};

inline std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::Hann)
    // Periodic (DFT-even) Hann: sidelobe nulls land on integer bin offsets.
    for (std::size_t i = 0; i < n; ++i)
      out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return out;
}

/// Meters per bin: (fs / N) Hz mapped through R = f c T / (2B).
inline double profile_bin_spacing(const ChirpConfig& chirp) {
  const double df = chirp.sample_rate_hz / static_cast<double>(chirp.n_samples());
  return df * kSpeedOfLight * chirp.sweep_time_s / (2.0 * chirp.bandwidth_hz);
}

namespace detail {

inline void check_beat(const BeatSignal& beat) {
  if (beat.samples.size() != beat.chirp.n_samples())
    throw ValidationError("beat.samples: length does not match chirp n_samples");
  for (double x : beat.samples)
    if (!std::isfinite(x)) throw ValidationError("beat.samples: non-finite value");
}

inline RangeProfile empty_profile(const ChirpConfig& chirp, std::size_t n) {
  RangeProfile p;
  p.chirp = chirp;
  const std::size_t bins = n / 2;
  const double spacing = profile_bin_spacing(chirp);
  p.range_m.resize(bins);
  p.rsa.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) p.range_m[k] = static_cast<double>(k) * spacing;
  return p;
}

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

/// |DFT| for k in [0, n/2) of a real sequence.
inline std::vector<double> real_dft_magnitude(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan);
  std::vector<double> mag(x.size() / 2);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(out.get()[k][0], out.get()[k][1]);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return mag;
}

}  // namespace detail

/// Windowed magnitude spectrum mapped to range.
inline RangeProfile range_profile(const BeatSignal& beat, Window window = Window::Hann) {
  detail::check_beat(beat);
  const std::size_t n = beat.samples.size();
  const auto w = make_window(window, n);
  double gain = 0.0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = beat.samples[i] * w[i];
    gain += w[i];
  }
  const auto mag = detail::real_dft_magnitude(x);
  auto p = detail::empty_profile(beat.chirp, n);
  for (std::size_t k = 0; k < p.size(); ++k) p.rsa[k] = 2.0 * mag[k] / gain;
  return p;
}

/// Direct O(n^2) Fourier sum with the Rect window. Test oracle for
/// range_profile; shares none of its transform code.
inline RangeProfile naive_spectrum(const BeatSignal& beat) {
  detail::check_beat(beat);
  const std::size_t n = beat.samples.size();
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    cos_table[i] = std::cos(a);
    sin_table[i] = std::sin(a);
  }
  auto p = detail::empty_profile(beat.chirp, n);
  for (std::size_t k = 0; k < p.size(); ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;  // (k * i) mod n, kept exact
    for (std::size_t i = 0; i < n; ++i) {
      re += beat.samples[i] * cos_table[idx];
      im -= beat.samples[i] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    p.rsa[k] = 2.0 * std::hypot(re, im) / static_cast<double>(n);
  }
  return p;
}

/// Index and topographic prominence of a local maximum in a sampled sequence.
struct PeakIndex {
  std::size_t index = 0;
  double prominence = 0.0;
};

/// Local maxima strictly above both neighbours; a flat top counts once at its
/// lowest index. Prominence is the height above the higher of the two
/// flanking minima, each taken up to the nearest strictly higher sample (or
/// the end of the sequence).
inline std::vector<PeakIndex> find_local_maxima(std::span<const double> v) {
  std::vector<PeakIndex> out;
  const std::size_t n = v.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(v[i] > v[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 < n && v[j + 1] < v[i]) {
      const double h = v[i];
      double left_min = h;
      for (std::size_t k = i; k-- > 0;) {
        if (v[k] > h) break;
        left_min = std::min(left_min, v[k]);
      }
      double right_min = h;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (v[k] > h) break;
        right_min = std::min(right_min, v[k]);
      }
      out.push_back({i, h - std::max(left_min, right_min)});
    }
    i = j + 1;
  }
  return out;
}

/// Peaks with rsa >= min_rsa and prominence >= min_prominence, ascending range.
inline std::vector<Peak> detect_peaks(const RangeProfile& profile, double min_prominence, double min_rsa) {
  if (min_prominence < 0.0) throw ValidationError("min_prominence: must be >= 0");
  if (min_rsa < 0.0) throw ValidationError("min_rsa: must be >= 0");
  std::vector<Peak> peaks;
  for (const auto& m : find_local_maxima(profile.rsa)) {
    const double rsa = profile.rsa[m.index];
    if (rsa <= 0.0 || rsa < min_rsa || m.prominence < min_prominence) continue;
    peaks.push_back({profile.range_m[m.index], rsa, m.prominence, m.index});
  }
  return peaks;
}

/// Bins with range <= max_range_m.
inline RangeProfile crop(const RangeProfile& profile, double max_range_m) {
  RangeProfile out;
  out.chirp = profile.chirp;
  for (std::size_t k = 0; k < profile.size() && profile.range_m[k] <= max_range_m; ++k) {
    out.range_m.push_back(profile.range_m[k]);
    out.rsa.push_back(profile.rsa[k]);
  }
  return out;
}

/// Undo free-space spreading: rsa * (R / r0)^2. This is the receiver's
/// range-gain stage; relative reflection magnitudes are taken on its output.
inline RangeProfile compensate_spreading(const RangeProfile& profile) {
  RangeProfile out = profile;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double g = out.range_m[k] / kReferenceRangeM;
    out.rsa[k] *= g * g;
  }
  return out;
}

/// RMS of the profile magnitude at a bin for white Gaussian noise of
/// standard deviation sigma per sample: 2 sigma sqrt(sum w^2) / sum w.
inline double noise_rsa_rms(double sigma, std::size_t n_samples, Window window) {
  const auto w = make_window(window, n_samples);
  double s1 = 0.0, s2 = 0.0;
  for (double x : w) {
    s1 += x;
    s2 += x * x;
  }
  return 2.0 * sigma * std::sqrt(s2) / s1;
}

struct DetectionThresholds {
  double min_rsa = 1e-4;
  double min_prominence = 5e-5;
};

/// Fixed floors raised to six noise-rms when the scene is noisy. For
/// spreading-compensated profiles pass the largest range gain in use.
inline DetectionThresholds calibrated_thresholds(double noise_amplitude, const ChirpConfig& chirp,
                                                 Window window, DetectionThresholds floor = {},
                                                 double range_gain = 1.0) {
  const double rms = noise_rsa_rms(noise_amplitude, chirp.n_samples(), window) * range_gain;
  return {std::max(floor.min_rsa, 6.0 * rms), std::max(floor.min_prominence, 6.0 * rms)};
}

}  // namespace foresight
