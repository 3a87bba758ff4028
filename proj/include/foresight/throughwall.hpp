#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/range_profile.hpp"
#include "foresight/rrm.hpp"

namespace foresight {

/// Corridor between the near wall (wall 1) and the far wall (wall 2).
struct MonitorZone {
  double near_m = 0.10;
  double far_m = 2.60;
  double excess_threshold = 0.01;
  std::size_t guard_bins = 2;

  void validate() const {
    if (!(near_m > 0.0)) throw ValidationError("monitor.near_m: must be > 0");
    if (!(far_m > near_m)) throw ValidationError("monitor.far_m: must exceed near_m");
    if (!(excess_threshold > 0.0)) throw ValidationError("monitor.excess_threshold: must be > 0");
  }

  /// Open interval (near + guard, far - guard) for a given bin spacing.
  std::pair<double, double> interval(double bin_spacing_m) const {
    const double guard = static_cast<double>(guard_bins) * bin_spacing_m;
    return {near_m + guard, far_m - guard};
  }
};

struct OccupancyReport {
  bool occupied = false;
  std::vector<Peak> detections;  // rsa holds the excess over baseline
  std::size_t scan_index = 0;
  double bin_spacing_m = 0.0;

  const Peak* strongest() const {
    const Peak* best = nullptr;
    for (const auto& p : detections)
      if (!best || p.rsa > best->rsa) best = &p;
    return best;
  }
};

enum class ApproachStatus { Empty, Static, Approaching, Receding };

inline std::string_view to_string(ApproachStatus s) {
  switch (s) {
    case ApproachStatus::Empty: return "Empty";
    case ApproachStatus::Static: return "Static";
    case ApproachStatus::Approaching: return "Approaching";
    case ApproachStatus::Receding: return "Receding";
  }
  return "Empty";
}

struct ApproachTrack {
  std::vector<double> ranges_m;
  ApproachStatus status = ApproachStatus::Empty;
};

/// Raises the excess threshold to six rms of the difference between two
/// independently noisy scans.
inline MonitorZone calibrated_zone(MonitorZone zone, double noise_amplitude, const ChirpConfig& chirp, Window window) {
  const double rms = std::sqrt(2.0) * noise_rsa_rms(noise_amplitude, chirp.n_samples(), window);
  zone.excess_threshold = std::max(zone.excess_threshold, 6.0 * rms);
  return zone;
}

/// Linear excess of the scan over the empty-reference profile inside the
/// zone; every local maximum of the excess at or above the threshold is a
/// detection.
inline OccupancyReport detect_occupancy(const Baseline& baseline, const RangeProfile& scan,
                                        const MonitorZone& zone, std::size_t scan_index = 0) {
  zone.validate();
  const auto& ref = baseline.profile;
  if (!(ref.chirp == scan.chirp) || ref.size() != scan.size())
    throw ValidationError("scan: chirp configuration does not match the baseline");

  OccupancyReport report;
  report.scan_index = scan_index;
  report.bin_spacing_m = scan.bin_spacing_m();
  const auto [lo, hi] = zone.interval(report.bin_spacing_m);

  std::vector<std::size_t> bins;
  std::vector<double> excess;
  for (std::size_t k = 0; k < scan.size(); ++k) {
    if (scan.range_m[k] <= lo || scan.range_m[k] >= hi) continue;
    bins.push_back(k);
    excess.push_back(scan.rsa[k] - ref.rsa[k]);
  }
  for (const auto& m : find_local_maxima(excess)) {
    if (excess[m.index] < zone.excess_threshold) continue;
    const std::size_t k = bins[m.index];
    report.detections.push_back({scan.range_m[k], excess[m.index], m.prominence, k});
  }
  report.occupied = !report.detections.empty();
  return report;
}

/// Approach/recede verdict over the strongest detection of each occupied
/// report. Needs the last three occupied ranges to move monotonically by more
/// than one bin per step.
inline ApproachTrack track_approach(const std::vector<OccupancyReport>& reports, [[maybe_unused]] const MonitorZone& zone) {
  constexpr std::size_t kTrendLength = 3;
  ApproachTrack track;
  double spacing = 0.0;
  std::optional<std::size_t> prev_index;
  for (const auto& r : reports) {
    if (prev_index && r.scan_index < *prev_index)
      throw ValidationError("reports: not ordered by scan_index");
    prev_index = r.scan_index;
    if (const Peak* p = r.occupied ? r.strongest() : nullptr) {
      track.ranges_m.push_back(p->range_m);
      spacing = r.bin_spacing_m;
    }
  }
  if (track.ranges_m.empty()) return track;
  track.status = ApproachStatus::Static;
  if (track.ranges_m.size() < kTrendLength) return track;

  const auto tail = std::span(track.ranges_m).last(kTrendLength);
  bool down = true, up = true;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    const double step = tail[i] - tail[i - 1];
    down = down && step < -spacing;
    up = up && step > spacing;
  }
  if (down) track.status = ApproachStatus::Approaching;
  else if (up) track.status = ApproachStatus::Receding;
  return track;
}

}  // namespace foresight
