#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/range_profile.hpp"

namespace foresight {

/// Ordered by severity: Infrastructure < Human < Metallic.
enum class TargetClass { Infrastructure = 0, Human = 1, Metallic = 2 };

inline std::string_view to_string(TargetClass c) {
  switch (c) {
    case TargetClass::Infrastructure: return "Infrastructure";
    case TargetClass::Human: return "Human";
    case TargetClass::Metallic: return "Metallic";
  }
  return "Infrastructure";
}

inline std::optional<TargetClass> target_class_from_string(std::string_view s) {
  std::string lower(s);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "infrastructure" || lower == "reference" || lower == "wall") return TargetClass::Infrastructure;
  if (lower == "human") return TargetClass::Human;
  if (lower == "metallic" || lower == "metal" || lower == "aluminium" || lower == "aluminum")
    return TargetClass::Metallic;
  return std::nullopt;
}

/// Empty-reference scan and the feature all magnitudes are expressed against.
struct Baseline {
  RangeProfile profile;
  Peak reference_feature;
  std::string label;
};

struct RrmReading {
  Peak target_peak;
  double rrm = 0.0;
  std::string baseline_label;
};

struct ClassBands {
  double infrastructure_max = 0.0;
  double human_max = 0.0;

  void validate() const {
    if (!(infrastructure_max >= 1.0 && infrastructure_max < human_max))
      throw ValidationError("classifier.bands: require 1 <= infrastructure_max < human_max");
  }
};

/// Bin-wise mean of the profiles; the reference feature is the highest local
/// maximum whose bin lies within +-3 bins of the hint.
inline Baseline capture_baseline(const std::vector<RangeProfile>& profiles, double feature_range_hint,
                                 std::string label = "baseline") {
  constexpr std::size_t kHintWindowBins = 3;
  if (profiles.empty()) throw ValidationError("baseline: need at least one profile");
  const auto& first = profiles.front();
  for (const auto& p : profiles)
    if (!(p.chirp == first.chirp) || p.size() != first.size())
      throw ValidationError("baseline: profiles do not share a chirp configuration");

  RangeProfile mean = first;
  if (profiles.size() > 1) {
    std::fill(mean.rsa.begin(), mean.rsa.end(), 0.0);
    for (const auto& p : profiles)
      for (std::size_t k = 0; k < mean.size(); ++k) mean.rsa[k] += p.rsa[k];
    for (auto& v : mean.rsa) v /= static_cast<double>(profiles.size());
  }

  const std::size_t hint_bin = mean.bin_of(feature_range_hint);
  std::optional<Peak> best;
  for (const auto& m : find_local_maxima(mean.rsa)) {
    const std::size_t dist = m.index > hint_bin ? m.index - hint_bin : hint_bin - m.index;
    if (dist > kHintWindowBins || mean.rsa[m.index] <= 0.0) continue;
    if (!best || mean.rsa[m.index] > best->rsa)
      best = Peak{mean.range_m[m.index], mean.rsa[m.index], m.prominence, m.index};
  }
  if (!best)
    throw ValidationError("baseline.feature_range_hint: reference feature not found near " +
                          detail::fmt_num(feature_range_hint) + " m");
  return Baseline{std::move(mean), *best, std::move(label)};
}

inline RrmReading rrm(const Peak& target_peak, const Baseline& baseline) {
  if (!(target_peak.rsa > 0.0)) throw ValidationError("target_peak.rsa: must be > 0");
  if (!(baseline.reference_feature.rsa > 0.0))
    throw ValidationError("baseline.reference_feature.rsa: must be > 0");
  return {target_peak, target_peak.rsa / baseline.reference_feature.rsa, baseline.label};
}

inline TargetClass classify(double rrm_value, const ClassBands& bands) {
  if (rrm_value <= bands.infrastructure_max) return TargetClass::Infrastructure;
  if (rrm_value <= bands.human_max) return TargetClass::Human;
  return TargetClass::Metallic;
}

inline TargetClass classify(const RrmReading& reading, const ClassBands& bands) {
  return classify(reading.rrm, bands);
}

struct LabeledRrm {
  double rrm = 0.0;
  TargetClass label = TargetClass::Infrastructure;
};

/// Cutpoints at the geometric mean of the adjacent class extremes.
inline ClassBands calibrate_bands(const std::vector<LabeledRrm>& labeled) {
  std::array<double, 3> lo{}, hi{};
  std::array<bool, 3> seen{};
  for (const auto& s : labeled) {
    if (!(s.rrm > 0.0) || !std::isfinite(s.rrm)) throw ValidationError("rrm: must be a positive number");
    const auto c = static_cast<std::size_t>(s.label);
    lo[c] = seen[c] ? std::min(lo[c], s.rrm) : s.rrm;
    hi[c] = seen[c] ? std::max(hi[c], s.rrm) : s.rrm;
    seen[c] = true;
  }
  const auto n_classes = std::count(seen.begin(), seen.end(), true);
  if (n_classes < 2) throw ValidationError("label: need >= 2 classes");
  for (std::size_t c = 0; c < 3; ++c)
    if (!seen[c])
      throw ValidationError(std::string("label: missing class ") +
                            std::string(to_string(static_cast<TargetClass>(c))));
  for (std::size_t c = 0; c + 1 < 3; ++c)
    if (!(hi[c] < lo[c + 1]))
      throw ValidationError(std::string("rrm: not separable (") +
                            std::string(to_string(static_cast<TargetClass>(c))) + " max " +
                            detail::fmt_num(hi[c]) + " >= " +
                            std::string(to_string(static_cast<TargetClass>(c + 1))) + " min " +
                            detail::fmt_num(lo[c + 1]) + ")");
  return {std::sqrt(hi[0] * lo[1]), std::sqrt(hi[1] * lo[2])};
}

/// Measured relative reflection magnitudes for a human and a 700 x 500 mm
/// aluminium sheet at 1-4 m, normalised to the empty-room lab wall at 6 m.
struct ReferenceMeasurement {
  std::string_view target;
  double distance_m;
  double rrm;
  TargetClass label;
};

inline constexpr std::array<ReferenceMeasurement, 9> kMeasuredRrm{{
    {"No Target reference (lab wall)", 6.0, 1.0, TargetClass::Infrastructure},
    {"Human", 1.0, 1.55, TargetClass::Human},
    {"Human", 2.0, 1.88, TargetClass::Human},
    {"Human", 3.0, 1.51, TargetClass::Human},
    {"Human", 4.0, 1.32, TargetClass::Human},
    {"Aluminium sheet", 1.0, 14.93, TargetClass::Metallic},
    {"Aluminium sheet", 2.0, 10.79, TargetClass::Metallic},
    {"Aluminium sheet", 3.0, 7.51, TargetClass::Metallic},
    {"Aluminium sheet", 4.0, 13.52, TargetClass::Metallic},
}};

inline std::vector<LabeledRrm> measured_rrm_samples() {
  std::vector<LabeledRrm> out;
  for (const auto& m : kMeasuredRrm) out.push_back({m.rrm, m.label});
  return out;
}

/// Bands calibrated on the measured table (about 1.149 and 3.758).
inline ClassBands default_bands() { return calibrate_bands(measured_rrm_samples()); }

}  // namespace foresight
