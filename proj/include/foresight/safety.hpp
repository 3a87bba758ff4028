#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/range_profile.hpp"
#include "foresight/rrm.hpp"
#include "foresight/throughwall.hpp"

namespace foresight {

enum class Tier { Normal = 0, Slow = 1, Stop = 2 };

inline std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::Normal: return "Normal";
    case Tier::Slow: return "Slow";
    case Tier::Stop: return "Stop";
  }
  return "Normal";
}

struct TierConfig {
  double stop_range_m = 1.0;
  double slow_range_m = 3.0;
  double slow_speed_cap = 0.25;
  double hysteresis_m = 0.2;
  // Count peaks without a class as human.
  bool unknown_as_human = false;

  void validate() const {
    if (!(stop_range_m > 0.0 && stop_range_m < slow_range_m))
      throw ValidationError("safety: require 0 < stop_range_m < slow_range_m");
    if (!(slow_speed_cap > 0.0 && slow_speed_cap < 1.0))
      throw ValidationError("safety.slow_speed_cap: must be in (0, 1)");
    if (!(hysteresis_m >= 0.0)) throw ValidationError("safety.hysteresis_m: must be >= 0");
  }

  double speed_cap(Tier t) const {
    switch (t) {
      case Tier::Normal: return 1.0;
      case Tier::Slow: return slow_speed_cap;
      case Tier::Stop: return 0.0;
    }
    return 0.0;
  }
};

/// Snapshot of the robot's safety posture. Tier and door flag are updated
/// independently; cause() joins whatever each last reported.
struct SafetyState {
  Tier tier = Tier::Normal;
  double speed_cap = 1.0;
  bool door_entry_allowed = true;
  std::string tier_cause = "clear";
  std::string door_cause;

  std::string cause() const { return door_cause.empty() ? tier_cause : tier_cause + "; " + door_cause; }
};

struct ClassifiedPeak {
  Peak peak;
  std::optional<TargetClass> label;  // nullopt: unclassified
};

namespace detail {
inline Tier tier_for_distance(double d, double stop_m, double slow_m) {
  if (d < stop_m) return Tier::Stop;
  if (d < slow_m) return Tier::Slow;
  return Tier::Normal;
}

// Same boundaries pushed out by the hysteresis margin, inclusive: leaving a
// tier requires d > boundary + margin.
inline Tier tier_with_margin(double d, double stop_m, double slow_m, double margin) {
  if (d <= stop_m + margin) return Tier::Stop;
  if (d <= slow_m + margin) return Tier::Slow;
  return Tier::Normal;
}

inline std::string fmt_range(double r) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f m", r);
  return buf;
}
}  // namespace detail

/// Escalates immediately to the tier of the nearest human; steps down only
/// once that distance clears the boundary plus the hysteresis margin.
inline SafetyState update_tier(const SafetyState& state, const std::vector<ClassifiedPeak>& peaks,
                               const TierConfig& cfg) {
  cfg.validate();
  double nearest = std::numeric_limits<double>::infinity();
  std::size_t unclassified = 0;
  for (const auto& cp : peaks) {
    const bool human = cp.label ? *cp.label == TargetClass::Human : cfg.unknown_as_human;
    if (!cp.label) ++unclassified;
    if (human) nearest = std::min(nearest, cp.peak.range_m);
  }

  const Tier raw = detail::tier_for_distance(nearest, cfg.stop_range_m, cfg.slow_range_m);
  const Tier held = detail::tier_with_margin(nearest, cfg.stop_range_m, cfg.slow_range_m, cfg.hysteresis_m);
  const Tier next = std::max(raw, std::min(state.tier, held));

  SafetyState out = state;
  out.tier = next;
  out.speed_cap = cfg.speed_cap(next);
  if (std::isinf(nearest)) out.tier_cause = "clear";
  else out.tier_cause = "human at " + detail::fmt_range(nearest);
  if (next > raw) out.tier_cause += " (holding " + std::string(to_string(next)) + ")";
  if (unclassified > 0) out.tier_cause += " [" + std::to_string(unclassified) + " unclassified]";
  return out;
}

inline SafetyState update_door_policy(const SafetyState& state, const OccupancyReport& occupancy) {
  SafetyState out = state;
  out.door_entry_allowed = !occupancy.occupied;
  out.door_cause.clear();
  if (occupancy.occupied) {
    const Peak* p = occupancy.strongest();
    out.door_cause = "door blocked at " + detail::fmt_range(p->range_m);
  }
  return out;
}

/// `t=<scan_index> tier=<tier> cap=<speed_cap> door=<bool> cause=<text>`
inline std::string safety_log_line(std::size_t scan_index, const SafetyState& s) {
  char cap[32];
  std::snprintf(cap, sizeof cap, "%.2f", s.speed_cap);
  return "t=" + std::to_string(scan_index) + " tier=" + std::string(to_string(s.tier)) + " cap=" + cap +
         " door=" + (s.door_entry_allowed ? "true" : "false") + " cause=" + s.cause();
}

}  // namespace foresight
