#pragma once

// JSON scene/scenario files and the CSV/log artifacts written by the CLI.
//
// Scene file:
//   {
//     "chirp": {"center_freq_hz", "bandwidth_hz", "sweep_time_s", "sample_rate_hz", "range_bias_m"},
//     "scene": {
//       "max_range_m", "noise_amplitude", "rng_seed", "noise_seed"?,
//       "scatterers": [{"id", "range_m", "kind", "material", "extent_m": [w, h]}],
//       "walls":      [{"id", "range_m", "material"}]
//     },
//     "classifier": {"bands": {"infrastructure_max", "human_max"}},
//     "baseline":   {"feature_range_hint"},
//     "detection":  {"min_rsa", "min_prominence"},
//     "monitor":    {"near_m", "far_m", "excess_threshold", "guard_bins"},
//     "safety":     {"stop_range_m", "slow_range_m", "slow_speed_cap", "hysteresis_m", "unknown_as_human"},
//     "window": "hann" | "rect"
//   }
// "material" is a preset name (plasterboard, lab_wall, human, aluminum, copper)
// or {"name", "reflectivity", "transmissivity"}. Every section except
// "scene" is optional.
//
// Scenario file: a scene file plus
//   "scenario": {"name", "pipeline": ["profile", "rrm", ...],
//                "steps": [{"name", "noise_seed"?, "target"?,
//                           "mutations": [{"op": "move", "id", "range_m"},
//                                         {"op": "add", "scatterer": {...}},
//                                         {"op": "remove", "id"}]}]}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foresight/error.hpp"
#include "foresight/scenario.hpp"

namespace foresight::io {

using nlohmann::json;

namespace detail {

template <class T>
T get(const json& j, const char* key, const std::string& path) {
  const std::string field = path.empty() ? key : path + "." + key;
  if (!j.contains(key)) throw ValidationError(field + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(field + ": wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, const std::string& path, T fallback) {
  return j.contains(key) ? get<T>(j, key, path) : fallback;
}

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string opt9(const std::optional<double>& v) { return v ? fmt9(*v) : std::string(); }

}  // namespace detail

inline Material parse_material(const json& j, const std::string& path) {
  if (j.is_string()) {
    auto m = materials::by_name(j.get<std::string>());
    if (!m) throw ValidationError(path + ": unknown material preset \"" + j.get<std::string>() + "\"");
    return *m;
  }
  if (!j.is_object()) throw ValidationError(path + ": expected preset name or object");
  return {detail::get_or<std::string>(j, "name", path, "custom"), detail::get<double>(j, "reflectivity", path),
          detail::get_or<double>(j, "transmissivity", path, 1.0)};
}

inline json material_json(const Material& m) {
  return {{"name", m.name}, {"reflectivity", m.reflectivity}, {"transmissivity", m.transmissivity}};
}

inline Scatterer parse_scatterer(const json& j, const std::string& path) {
  Scatterer s;
  s.id = detail::get<std::string>(j, "id", path);
  s.range_m = detail::get<double>(j, "range_m", path);
  if (!j.contains("material")) throw ValidationError(path + ".material: missing");
  s.material = parse_material(j.at("material"), path + ".material");
  const auto kind = detail::get_or<std::string>(j, "kind", path, "generic");
  const auto k = scatterer_kind_from_string(kind);
  if (!k) throw ValidationError(path + ".kind: unknown kind \"" + kind + "\"");
  s.kind = *k;
  if (j.contains("extent_m")) {
    const auto e = detail::get<std::vector<double>>(j, "extent_m", path);
    if (e.size() != 2) throw ValidationError(path + ".extent_m: expected [width, height]");
    s.extent_m = {e[0], e[1]};
  }
  return s;
}

inline json scatterer_json(const Scatterer& s) {
  return {{"id", s.id},
          {"range_m", s.range_m},
          {"kind", std::string(to_string(s.kind))},
          {"material", material_json(s.material)},
          {"extent_m", {s.extent_m[0], s.extent_m[1]}}};
}

inline ChirpConfig parse_chirp(const json& doc) {
  ChirpConfig c;
  if (!doc.contains("chirp")) return c;
  const auto& j = doc.at("chirp");
  c.center_freq_hz = detail::get_or(j, "center_freq_hz", "chirp", c.center_freq_hz);
  c.bandwidth_hz = detail::get_or(j, "bandwidth_hz", "chirp", c.bandwidth_hz);
  c.sweep_time_s = detail::get_or(j, "sweep_time_s", "chirp", c.sweep_time_s);
  c.sample_rate_hz = detail::get_or(j, "sample_rate_hz", "chirp", c.sample_rate_hz);
  c.range_bias_m = detail::get_or(j, "range_bias_m", "chirp", c.range_bias_m);
  c.validate();
  return c;
}

inline json chirp_json(const ChirpConfig& c) {
  return {{"center_freq_hz", c.center_freq_hz},
          {"bandwidth_hz", c.bandwidth_hz},
          {"sweep_time_s", c.sweep_time_s},
          {"sample_rate_hz", c.sample_rate_hz},
          {"range_bias_m", c.range_bias_m}};
}

/// Parses the "scene" section without validating invariants; call
/// validate_scene for that.
inline Scene parse_scene(const json& doc) {
  if (!doc.contains("scene")) throw ValidationError("scene: missing");
  const auto& j = doc.at("scene");
  Scene s;
  s.max_range_m = detail::get_or(j, "max_range_m", "scene", s.max_range_m);
  s.noise_amplitude = detail::get_or(j, "noise_amplitude", "scene", s.noise_amplitude);
  s.rng_seed = detail::get_or<std::uint64_t>(j, "rng_seed", "scene", 0);
  if (j.contains("noise_seed")) s.noise_seed = detail::get<std::uint64_t>(j, "noise_seed", "scene");
  if (j.contains("scatterers")) {
    const auto& arr = j.at("scatterers");
    if (!arr.is_array()) throw ValidationError("scene.scatterers: expected array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      s.scatterers.push_back(parse_scatterer(arr[i], "scene.scatterers[" + std::to_string(i) + "]"));
  }
  if (j.contains("walls")) {
    const auto& arr = j.at("walls");
    if (!arr.is_array()) throw ValidationError("scene.walls: expected array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "scene.walls[" + std::to_string(i) + "]";
      Wall w;
      w.id = detail::get<std::string>(arr[i], "id", path);
      w.range_m = detail::get<double>(arr[i], "range_m", path);
      if (!arr[i].contains("material")) throw ValidationError(path + ".material: missing");
      w.material = parse_material(arr[i].at("material"), path + ".material");
      s.walls.push_back(std::move(w));
    }
  }
  return s;
}

inline json scene_json(const Scene& s) {
  json j{{"max_range_m", s.max_range_m}, {"noise_amplitude", s.noise_amplitude}, {"rng_seed", s.rng_seed}};
  if (s.noise_seed) j["noise_seed"] = *s.noise_seed;
  j["scatterers"] = json::array();
  for (const auto& x : s.scatterers) j["scatterers"].push_back(scatterer_json(x));
  j["walls"] = json::array();
  for (const auto& w : s.walls)
    j["walls"].push_back({{"id", w.id}, {"range_m", w.range_m}, {"material", material_json(w.material)}});
  return j;
}

inline ClassBands parse_bands(const json& j, const std::string& path) {
  ClassBands b{detail::get<double>(j, "infrastructure_max", path), detail::get<double>(j, "human_max", path)};
  b.validate();
  return b;
}

inline json bands_json(const ClassBands& b) {
  return {{"classifier", {{"bands", {{"infrastructure_max", b.infrastructure_max}, {"human_max", b.human_max}}}}}};
}

inline PipelineConfig parse_config(const json& doc) {
  PipelineConfig c;
  if (doc.contains("window")) {
    const auto w = detail::get<std::string>(doc, "window", "");
    if (w == "hann") c.window = Window::Hann;
    else if (w == "rect") c.window = Window::Rect;
    else throw ValidationError("window: expected \"hann\" or \"rect\"");
  }
  if (doc.contains("classifier") && doc.at("classifier").contains("bands"))
    c.bands = parse_bands(doc.at("classifier").at("bands"), "classifier.bands");
  if (doc.contains("baseline") && doc.at("baseline").contains("feature_range_hint"))
    c.feature_range_hint = detail::get<double>(doc.at("baseline"), "feature_range_hint", "baseline");
  if (doc.contains("detection")) {
    const auto& j = doc.at("detection");
    c.detection.min_rsa = detail::get_or(j, "min_rsa", "detection", c.detection.min_rsa);
    c.detection.min_prominence = detail::get_or(j, "min_prominence", "detection", c.detection.min_prominence);
  }
  if (doc.contains("monitor")) {
    const auto& j = doc.at("monitor");
    c.zone.near_m = detail::get_or(j, "near_m", "monitor", c.zone.near_m);
    c.zone.far_m = detail::get_or(j, "far_m", "monitor", c.zone.far_m);
    c.zone.excess_threshold = detail::get_or(j, "excess_threshold", "monitor", c.zone.excess_threshold);
    c.zone.guard_bins = detail::get_or<std::size_t>(j, "guard_bins", "monitor", c.zone.guard_bins);
    c.zone.validate();
  }
  if (doc.contains("safety")) {
    const auto& j = doc.at("safety");
    c.tiers.stop_range_m = detail::get_or(j, "stop_range_m", "safety", c.tiers.stop_range_m);
    c.tiers.slow_range_m = detail::get_or(j, "slow_range_m", "safety", c.tiers.slow_range_m);
    c.tiers.slow_speed_cap = detail::get_or(j, "slow_speed_cap", "safety", c.tiers.slow_speed_cap);
    c.tiers.hysteresis_m = detail::get_or(j, "hysteresis_m", "safety", c.tiers.hysteresis_m);
    c.tiers.unknown_as_human = detail::get_or(j, "unknown_as_human", "safety", c.tiers.unknown_as_human);
    c.tiers.validate();
  }
  return c;
}

inline json config_json(const PipelineConfig& c) {
  json j;
  j["window"] = std::string(to_string(c.window));
  j["classifier"] = bands_json(c.bands)["classifier"];
  if (c.feature_range_hint) j["baseline"] = {{"feature_range_hint", *c.feature_range_hint}};
  j["detection"] = {{"min_rsa", c.detection.min_rsa}, {"min_prominence", c.detection.min_prominence}};
  j["monitor"] = {{"near_m", c.zone.near_m},
                  {"far_m", c.zone.far_m},
                  {"excess_threshold", c.zone.excess_threshold},
                  {"guard_bins", c.zone.guard_bins}};
  j["safety"] = {{"stop_range_m", c.tiers.stop_range_m},
                 {"slow_range_m", c.tiers.slow_range_m},
                 {"slow_speed_cap", c.tiers.slow_speed_cap},
                 {"hysteresis_m", c.tiers.hysteresis_m},
                 {"unknown_as_human", c.tiers.unknown_as_human}};
  return j;
}

inline Scenario parse_scenario(const json& doc) {
  if (!doc.contains("scenario")) throw ValidationError("scenario: missing");
  const auto& j = doc.at("scenario");
  Scenario sc;
  sc.name = detail::get<std::string>(j, "name", "scenario");
  sc.chirp = parse_chirp(doc);
  sc.base_scene = parse_scene(doc);
  sc.config = parse_config(doc);
  if (j.contains("pipeline")) {
    sc.pipeline.clear();
    for (const auto& s : detail::get<std::vector<std::string>>(j, "pipeline", "scenario")) {
      const auto st = stage_from_string(s);
      if (!st) throw ValidationError("scenario.pipeline: unknown stage \"" + s + "\"");
      sc.pipeline.push_back(*st);
    }
  }
  if (j.contains("steps")) {
    const auto& steps = j.at("steps");
    if (!steps.is_array()) throw ValidationError("scenario.steps: expected array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string path = "scenario.steps[" + std::to_string(i) + "]";
      const auto& sj = steps[i];
      ScenarioStep st;
      st.name = detail::get_or<std::string>(sj, "name", path, "step_" + std::to_string(i));
      if (sj.contains("noise_seed")) st.noise_seed = detail::get<std::uint64_t>(sj, "noise_seed", path);
      if (sj.contains("target")) st.target_id = detail::get<std::string>(sj, "target", path);
      const auto muts = sj.contains("mutations") ? sj.at("mutations") : json::array();
      for (std::size_t k = 0; k < muts.size(); ++k) {
        const std::string mp = path + ".mutations[" + std::to_string(k) + "]";
        const auto op = detail::get<std::string>(muts[k], "op", mp);
        Mutation m;
        if (op == "move") {
          m.op = Mutation::Op::Move;
          m.id = detail::get<std::string>(muts[k], "id", mp);
          m.range_m = detail::get<double>(muts[k], "range_m", mp);
        } else if (op == "remove") {
          m.op = Mutation::Op::Remove;
          m.id = detail::get<std::string>(muts[k], "id", mp);
        } else if (op == "add") {
          m.op = Mutation::Op::Add;
          if (!muts[k].contains("scatterer")) throw ValidationError(mp + ".scatterer: missing");
          m.add = parse_scatterer(muts[k].at("scatterer"), mp + ".scatterer");
          m.id = m.add->id;
          m.range_m = m.add->range_m;
        } else {
          throw ValidationError(mp + ".op: unknown op \"" + op + "\"");
        }
        st.mutations.push_back(std::move(m));
      }
      sc.steps.push_back(std::move(st));
    }
  }
  return sc;
}

inline json scenario_json(const Scenario& sc) {
  json doc = config_json(sc.config);
  doc["chirp"] = chirp_json(sc.chirp);
  doc["scene"] = scene_json(sc.base_scene);
  json j{{"name", sc.name}, {"pipeline", json::array()}, {"steps", json::array()}};
  for (auto s : sc.pipeline) j["pipeline"].push_back(std::string(to_string(s)));
  for (const auto& st : sc.steps) {
    json sj{{"name", st.name}, {"mutations", json::array()}};
    if (st.noise_seed) sj["noise_seed"] = *st.noise_seed;
    if (st.target_id) sj["target"] = *st.target_id;
    for (const auto& m : st.mutations) {
      switch (m.op) {
        case Mutation::Op::Move: sj["mutations"].push_back({{"op", "move"}, {"id", m.id}, {"range_m", m.range_m}}); break;
        case Mutation::Op::Remove: sj["mutations"].push_back({{"op", "remove"}, {"id", m.id}}); break;
        case Mutation::Op::Add: sj["mutations"].push_back({{"op", "add"}, {"scatterer", scatterer_json(*m.add)}}); break;
      }
    }
    j["steps"].push_back(std::move(sj));
  }
  doc["scenario"] = std::move(j);
  return doc;
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// CSV renderers. Floating-point fields use 9 significant digits.

inline std::string profile_csv(const RangeProfile& p) {
  std::string out = "range_m,rsa\n";
  for (std::size_t k = 0; k < p.size(); ++k) out += detail::fmt9(p.range_m[k]) + "," + detail::fmt9(p.rsa[k]) + "\n";
  return out;
}

inline std::string classification_csv(const std::vector<RrmReading>& readings, const std::vector<TargetClass>& classes) {
  std::string out = "peak_range_m,rsa,rrm,class\n";
  for (std::size_t k = 0; k < readings.size(); ++k) {
    const auto& r = readings[k];
    out += detail::fmt9(r.target_peak.range_m) + "," + detail::fmt9(r.target_peak.rsa) + "," + detail::fmt9(r.rrm) +
           "," + (k < classes.size() ? std::string(to_string(classes[k])) : std::string()) + "\n";
  }
  return out;
}

/// One row per report; status is the approach verdict over reports so far.
inline std::string monitor_csv(const std::vector<OccupancyReport>& reports, const MonitorZone& zone) {
  std::string out = "scan_index,occupied,range_m,excess_rsa,status\n";
  std::vector<OccupancyReport> seen;
  for (const auto& r : reports) {
    seen.push_back(r);
    const auto track = track_approach(seen, zone);
    const Peak* p = r.strongest();
    out += std::to_string(r.scan_index) + "," + (r.occupied ? "true" : "false") + "," +
           (p ? detail::fmt9(p->range_m) : std::string()) + "," + (p ? detail::fmt9(p->rsa) : std::string()) + "," +
           std::string(to_string(track.status)) + "\n";
  }
  return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "step,target,true_range_m,detected_range_m,rrm,class\n";
  for (const auto& r : rows)
    out += r.step + "," + r.target + "," + detail::opt9(r.true_range_m) + "," + detail::opt9(r.detected_range_m) + "," +
           detail::opt9(r.rrm) + "," + (r.label ? std::string(to_string(*r.label)) : std::string()) + "\n";
  return out;
}

inline std::string safety_log(const RunResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.steps.size(); ++i)
    if (result.steps[i].safety) out += safety_log_line(i, *result.steps[i].safety) + "\n";
  return out;
}

/// Labeled RRM CSV with header `rrm,label`.
inline std::vector<LabeledRrm> parse_labeled_csv(std::istream& in, const std::string& source) {
  std::vector<LabeledRrm> out;
  std::string line;
  std::size_t lineno = 0;
  int rrm_col = -1, label_col = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (rrm_col < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "rrm") rrm_col = static_cast<int>(i);
        if (cells[i] == "label") label_col = static_cast<int>(i);
      }
      if (rrm_col < 0 || label_col < 0) throw ValidationError(source + ": header must contain rrm,label");
      continue;
    }
    const std::string where = source + ":" + std::to_string(lineno);
    if (static_cast<int>(cells.size()) <= std::max(rrm_col, label_col)) throw ValidationError(where + ": missing column");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(cells[rrm_col], &used);
      if (used != cells[rrm_col].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError(where + ".rrm: not a number");
    }
    const auto cls = target_class_from_string(cells[label_col]);
    if (!cls) throw ValidationError(where + ".label: unknown class \"" + cells[label_col] + "\"");
    out.push_back({v, *cls});
  }
  if (rrm_col < 0) throw ValidationError(source + ": empty file");
  return out;
}

inline std::string measured_rrm_csv() {
  std::string out = "rrm,label\n";
  for (const auto& m : kMeasuredRrm) out += detail::fmt9(m.rrm) + "," + std::string(to_string(m.label)) + "\n";
  return out;
}

}  // namespace foresight::io
