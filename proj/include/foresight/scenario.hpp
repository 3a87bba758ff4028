#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/fmcw.hpp"
#include "foresight/range_profile.hpp"
#include "foresight/rrm.hpp"
#include "foresight/safety.hpp"
#include "foresight/scene.hpp"
#include "foresight/throughwall.hpp"

namespace foresight {

enum class Stage { Profile, Rrm, Classify, Throughwall, Safety };

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Profile: return "profile";
    case Stage::Rrm: return "rrm";
    case Stage::Classify: return "classify";
    case Stage::Throughwall: return "throughwall";
    case Stage::Safety: return "safety";
  }
  return "profile";
}

inline std::optional<Stage> stage_from_string(std::string_view s) {
  for (auto st : {Stage::Profile, Stage::Rrm, Stage::Classify, Stage::Throughwall, Stage::Safety})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

/// Knobs shared by every step of a run.
struct PipelineConfig {
  Window window = Window::Hann;
  ClassBands bands = default_bands();
  // Defaults to the farthest wall of the base scene.
  std::optional<double> feature_range_hint;
  // Floors for peak picking on spreading-compensated profiles.
  DetectionThresholds detection{5e-3, 2.5e-3};
  MonitorZone zone;
  TierConfig tiers;
};

struct Mutation {
  enum class Op { Move, Add, Remove };
  Op op = Op::Move;
  std::string id;
  double range_m = 0.0;          // Move
  std::optional<Scatterer> add;  // Add
};

struct ScenarioStep {
  std::string name;
  std::vector<Mutation> mutations;
  std::optional<std::uint64_t> noise_seed;
  // Scatterer the summary reports on; defaults to the last one touched.
  std::optional<std::string> target_id;

  std::optional<std::string> tracked_id() const {
    if (target_id) return target_id;
    for (auto it = mutations.rbegin(); it != mutations.rend(); ++it)
      if (it->op != Mutation::Op::Remove) return it->id;
    return std::nullopt;
  }
};

struct Scenario {
  std::string name;
  ChirpConfig chirp;
  Scene base_scene;
  std::vector<ScenarioStep> steps;
  std::vector<Stage> pipeline{Stage::Profile};
  PipelineConfig config;

  bool runs(Stage s) const { return std::find(pipeline.begin(), pipeline.end(), s) != pipeline.end(); }
};

/// Base scene plus exactly this step's mutations.
inline Scene apply_step(const Scene& base, const ScenarioStep& step, std::size_t step_index) {
  Scene s = base;
  s.noise_seed = step.noise_seed.value_or(base.rng_seed + step_index + 1);
  for (const auto& m : step.mutations) {
    auto it = std::find_if(s.scatterers.begin(), s.scatterers.end(),
                           [&](const Scatterer& x) { return x.id == m.id; });
    switch (m.op) {
      case Mutation::Op::Move:
        if (it == s.scatterers.end()) throw ValidationError("move: unknown scatterer \"" + m.id + "\"");
        it->range_m = m.range_m;
        break;
      case Mutation::Op::Remove:
        if (it == s.scatterers.end()) throw ValidationError("remove: unknown scatterer \"" + m.id + "\"");
        s.scatterers.erase(it);
        break;
      case Mutation::Op::Add:
        if (!m.add) throw ValidationError("add: missing scatterer");
        if (it != s.scatterers.end()) throw ValidationError("add: scatterer \"" + m.id + "\" already present");
        s.scatterers.push_back(*m.add);
        break;
    }
  }
  const auto report = validate_scene(s);
  if (!report.ok()) throw ValidationError(report.to_string());
  return s;
}

struct StepResult {
  std::string name;
  std::optional<std::string> target_id;
  std::optional<double> true_range_m;
  RangeProfile profile;                 // raw, full extent
  std::vector<Peak> peaks;              // spreading-compensated, cropped to max range
  std::vector<RrmReading> readings;
  std::vector<TargetClass> classes;     // parallel to readings
  std::optional<OccupancyReport> occupancy;
  std::optional<SafetyState> safety;
};

struct RunResult {
  std::string scenario_name;
  std::vector<Stage> pipeline;
  std::vector<StepResult> steps;
  std::optional<Baseline> rrm_baseline;
  std::optional<ApproachTrack> approach;

  bool ran(Stage s) const { return std::find(pipeline.begin(), pipeline.end(), s) != pipeline.end(); }
};

namespace detail {

inline double default_hint(const Scene& base) {
  if (base.walls.empty()) throw ValidationError("baseline.feature_range_hint: no walls to default to");
  return base.walls.back().range_m;
}

// Run `fn`, tagging any failure with where it happened.
template <class Fn>
auto at_stage(std::size_t step, std::string_view step_name, Stage stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("step " + std::to_string(step) + " (" + std::string(step_name) + ") stage " +
                          std::string(to_string(stage)) + ": " + e.what());
  }
}

}  // namespace detail

/// Profile used for peak picking and relative magnitudes: compensated for
/// spreading and cropped to the scene extent.
inline RangeProfile classification_profile(const RangeProfile& raw, const Scene& scene) {
  return compensate_spreading(crop(raw, scene.max_range_m));
}

inline RunResult run_scenario(const Scenario& sc) {
  RunResult result;
  result.scenario_name = sc.name;
  result.pipeline = sc.pipeline;
  if (sc.steps.empty()) return result;

  const auto& cfg = sc.config;
  const bool want_rrm = sc.runs(Stage::Rrm) || sc.runs(Stage::Classify);
  const bool want_wall = sc.runs(Stage::Throughwall);
  if (sc.runs(Stage::Classify) && !sc.runs(Stage::Rrm))
    throw ValidationError("scenario.pipeline: classify requires rrm");
  if (want_rrm) cfg.bands.validate();

  const Scene reference = sc.base_scene.empty_reference();
  std::optional<Baseline> monitor_baseline;
  if (want_rrm || want_wall) {
    const double hint = cfg.feature_range_hint ? *cfg.feature_range_hint : detail::default_hint(reference);
    const auto raw = range_profile(synthesize_beat(reference, sc.chirp), cfg.window);
    if (want_rrm)
      result.rrm_baseline = capture_baseline({classification_profile(raw, reference)}, hint, "empty reference");
    if (want_wall) monitor_baseline = capture_baseline({raw}, hint, "empty reference");
  }

  const double gain = std::pow(sc.base_scene.max_range_m / kReferenceRangeM, 2);
  const auto thresholds =
      calibrated_thresholds(sc.base_scene.noise_amplitude, sc.chirp, cfg.window, cfg.detection, gain);
  const auto zone = calibrated_zone(cfg.zone, sc.base_scene.noise_amplitude, sc.chirp, cfg.window);

  SafetyState safety;
  std::vector<OccupancyReport> reports;
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const auto& step = sc.steps[i];
    StepResult r;
    r.name = step.name;
    const Scene scene = detail::at_stage(i, step.name, Stage::Profile, [&] { return apply_step(sc.base_scene, step, i); });
    r.target_id = step.tracked_id();
    if (r.target_id)
      if (const auto* s = scene.find_scatterer(*r.target_id)) r.true_range_m = s->range_m;

    r.profile = detail::at_stage(i, step.name, Stage::Profile,
                                 [&] { return range_profile(synthesize_beat(scene, sc.chirp), cfg.window); });

    if (sc.runs(Stage::Rrm)) {
      detail::at_stage(i, step.name, Stage::Rrm, [&] {
        const auto prof = classification_profile(r.profile, scene);
        r.peaks = detect_peaks(prof, thresholds.min_prominence, thresholds.min_rsa);
        for (const auto& p : r.peaks) r.readings.push_back(rrm(p, *result.rrm_baseline));
        return 0;
      });
    }
    if (sc.runs(Stage::Classify))
      for (const auto& rd : r.readings) r.classes.push_back(classify(rd, cfg.bands));

    if (want_wall) {
      r.occupancy = detail::at_stage(i, step.name, Stage::Throughwall,
                                     [&] { return detect_occupancy(*monitor_baseline, r.profile, zone, i); });
      reports.push_back(*r.occupancy);
    }

    if (sc.runs(Stage::Safety)) {
      detail::at_stage(i, step.name, Stage::Safety, [&] {
        if (sc.runs(Stage::Classify)) {
          std::vector<ClassifiedPeak> cps;
          for (std::size_t k = 0; k < r.readings.size(); ++k) cps.push_back({r.readings[k].target_peak, r.classes[k]});
          safety = update_tier(safety, cps, cfg.tiers);
        }
        if (r.occupancy) safety = update_door_policy(safety, *r.occupancy);
        return 0;
      });
      r.safety = safety;
    }
    result.steps.push_back(std::move(r));
  }
  if (want_wall) result.approach = track_approach(reports, zone);
  return result;
}

struct SummaryRow {
  std::string step;
  std::string target;
  std::optional<double> true_range_m;
  std::optional<double> detected_range_m;
  std::optional<double> rrm;
  std::optional<TargetClass> label;
};

/// One row per step: the detected peak nearest the tracked scatterer's true
/// range (within three bins), its RRM and class.
inline std::vector<SummaryRow> summarize(const RunResult& result) {
  std::vector<SummaryRow> rows;
  if (result.steps.empty()) return rows;
  if (!result.ran(Stage::Rrm)) throw ValidationError("summary: result has no rrm stage output");
  for (const auto& s : result.steps) {
    SummaryRow row;
    row.step = s.name;
    row.target = s.target_id.value_or("");
    row.true_range_m = s.true_range_m;
    if (s.true_range_m) {
      const double window = 3.0 * s.profile.bin_spacing_m();
      double best = window;
      for (std::size_t k = 0; k < s.readings.size(); ++k) {
        const double d = std::abs(s.readings[k].target_peak.range_m - *s.true_range_m);
        if (d <= best) {
          best = d;
          row.detected_range_m = s.readings[k].target_peak.range_m;
          row.rrm = s.readings[k].rrm;
          row.label = k < s.classes.size() ? std::optional(s.classes[k]) : std::nullopt;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace builtin {

inline Scatterer human_at(double r) {
  return {"human", r, materials::human(), ScattererKind::Human, {0.5, 1.8}};
}

inline Scatterer aluminium_sheet_at(double r) {
  return {"aluminium_sheet", r, materials::aluminum(), ScattererKind::MetalSheet, {0.7, 0.5}};
}

inline Scatterer copper_sheet_at(double r) {
  return {"copper_sheet", r, materials::copper(), ScattererKind::MetalSheet, {0.3, 0.3}};
}

inline Scenario lab_sweep(std::string name, Scatterer (*make)(double), std::string_view prefix) {
  Scenario sc;
  sc.name = std::move(name);
  sc.base_scene.max_range_m = 8.0;
  sc.base_scene.rng_seed = 2021;
  sc.base_scene.walls.push_back({"lab_wall", 6.0, materials::lab_wall()});
  for (int cm : {100, 200, 300, 400}) {
    const Scatterer s = make(cm / 100.0);
    sc.steps.push_back({std::string(prefix) + "_" + std::to_string(cm) + "cm",
                        {{Mutation::Op::Add, s.id, s.range_m, s}}, std::nullopt, std::nullopt});
  }
  sc.pipeline = {Stage::Profile, Stage::Rrm, Stage::Classify, Stage::Safety};
  sc.config.feature_range_hint = 6.0;
  return sc;
}

/// Person stepping away from the radar in 1 m increments, lab wall at 6 m.
inline Scenario human_sweep() { return lab_sweep("human_sweep", human_at, "human"); }

/// Same protocol with a 700 x 500 mm aluminium sheet.
inline Scenario aluminium_sweep() { return lab_sweep("aluminium_sweep", aluminium_sheet_at, "aluminium"); }

/// Copper sheet carried from the far wall (position A) to the partition wall
/// (position D); radar 0.10 m in front of the partition.
inline Scenario copper_traverse() {
  Scenario sc;
  sc.name = "copper_traverse";
  sc.base_scene.max_range_m = 4.0;
  sc.base_scene.rng_seed = 2021;
  sc.base_scene.walls.push_back({"wall_1", 0.10, materials::plasterboard()});
  sc.base_scene.walls.push_back({"wall_2", 2.60, materials::plasterboard()});
  const std::pair<const char*, double> positions[] = {{"A", 2.2}, {"B", 1.6}, {"C", 1.0}, {"D", 0.4}};
  for (const auto& [label, r] : positions) {
    const Scatterer s = copper_sheet_at(r);
    sc.steps.push_back({std::string("position_") + label, {{Mutation::Op::Add, s.id, r, s}}, std::nullopt,
                        std::nullopt});
  }
  sc.pipeline = {Stage::Profile, Stage::Throughwall, Stage::Safety};
  sc.config.zone = MonitorZone{0.10, 2.60, 0.01, 2};
  sc.config.feature_range_hint = 2.60;
  return sc;
}

inline std::vector<std::string_view> names() { return {"human_sweep", "aluminium_sweep", "copper_traverse"}; }

inline std::optional<Scenario> by_name(std::string_view name) {
  if (name == "human_sweep") return human_sweep();
  if (name == "aluminium_sweep") return aluminium_sweep();
  if (name == "copper_traverse") return copper_traverse();
  return std::nullopt;
}

}  // namespace builtin

}  // namespace foresight
