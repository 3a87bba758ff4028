// foresight: command-line front end for the FMCW foresight-sensing pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "foresight/foresight.hpp"

namespace fs = std::filesystem;
using namespace foresight;

namespace {

struct Common {
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

struct Loaded {
  ChirpConfig chirp;
  Scene scene;
  PipelineConfig config;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError("--set " + key + ": not a number (\"" + v + "\")");
}

/// key=value overrides, restricted to a fixed whitelist.
void apply_overrides(const std::vector<std::string>& overrides, Scene& scene, PipelineConfig& cfg) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set: expected key=value, got \"" + kv + "\"");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "seed") scene.rng_seed = static_cast<std::uint64_t>(parse_double(key, val));
    else if (key == "noise_amplitude") scene.noise_amplitude = parse_double(key, val);
    else if (key == "infrastructure_max") cfg.bands.infrastructure_max = parse_double(key, val);
    else if (key == "human_max") cfg.bands.human_max = parse_double(key, val);
    else if (key == "min_rsa") cfg.detection.min_rsa = parse_double(key, val);
    else if (key == "min_prominence") cfg.detection.min_prominence = parse_double(key, val);
    else if (key == "excess_threshold") cfg.zone.excess_threshold = parse_double(key, val);
    else if (key == "guard_bins") cfg.zone.guard_bins = static_cast<std::size_t>(parse_double(key, val));
    else if (key == "hysteresis_m") cfg.tiers.hysteresis_m = parse_double(key, val);
    else if (key == "window") {
      if (val == "hann") cfg.window = Window::Hann;
      else if (val == "rect") cfg.window = Window::Rect;
      else throw ValidationError("--set window: expected hann or rect");
    } else {
      throw ValidationError("--set: unknown key \"" + key +
                            "\" (allowed: seed, noise_amplitude, infrastructure_max, human_max, min_rsa, "
                            "min_prominence, excess_threshold, guard_bins, hysteresis_m, window)");
    }
  }
  cfg.bands.validate();
  cfg.zone.validate();
  cfg.tiers.validate();
}

Loaded load_scene_file(const std::string& path, const Common& common) {
  const auto doc = io::read_json(path);
  Loaded l{io::parse_chirp(doc), io::parse_scene(doc), io::parse_config(doc)};
  if (common.seed) l.scene.rng_seed = *common.seed;
  apply_overrides(common.overrides, l.scene, l.config);
  const auto report = validate_scene(l.scene);
  if (!report.ok()) throw ValidationError(report.to_string());
  return l;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

ClassBands load_bands(const std::string& path) {
  const auto doc = io::read_json(path);
  if (!doc.contains("classifier") || !doc.at("classifier").contains("bands"))
    throw ValidationError(path + ": classifier.bands: missing");
  return io::parse_bands(doc.at("classifier").at("bands"), "classifier.bands");
}

/// Empty reference: an explicit baseline scene file, else the input scene's walls.
Scene baseline_scene(const std::string& baseline_path, const Loaded& l, const Common& common) {
  if (baseline_path.empty()) return l.scene.empty_reference();
  auto b = load_scene_file(baseline_path, common);
  return b.scene;
}

double hint_for(const PipelineConfig& cfg, const Scene& reference) {
  if (cfg.feature_range_hint) return *cfg.feature_range_hint;
  if (reference.walls.empty())
    throw ValidationError("baseline.feature_range_hint: missing and the empty reference has no walls");
  return reference.walls.back().range_m;
}

int cmd_simulate(const std::string& scene_path, const Common& common) {
  const auto l = load_scene_file(scene_path, common);
  const auto out = prepare_out(common.out);
  const auto profile = range_profile(synthesize_beat(l.scene, l.chirp), l.config.window);
  io::write_text(out / "profile.csv", io::profile_csv(profile));

  const auto th = calibrated_thresholds(l.scene.noise_amplitude, l.chirp, l.config.window);
  std::string peaks = "range_m,rsa,prominence\n";
  for (const auto& p : detect_peaks(crop(profile, l.scene.max_range_m), th.min_prominence, th.min_rsa))
    peaks += io::detail::fmt9(p.range_m) + "," + io::detail::fmt9(p.rsa) + "," + io::detail::fmt9(p.prominence) + "\n";
  io::write_text(out / "peaks.csv", peaks);
  return 0;
}

int cmd_classify(const std::string& scene_path, const std::string& baseline_path, const std::string& bands_path,
                 const Common& common) {
  auto l = load_scene_file(scene_path, common);
  if (!bands_path.empty()) l.config.bands = load_bands(bands_path);
  const auto out = prepare_out(common.out);

  const Scene ref_scene = baseline_scene(baseline_path, l, common);
  const auto ref_raw = range_profile(synthesize_beat(ref_scene, l.chirp), l.config.window);
  const auto baseline =
      capture_baseline({classification_profile(ref_raw, ref_scene)}, hint_for(l.config, ref_scene), "empty reference");

  const auto raw = range_profile(synthesize_beat(l.scene, l.chirp), l.config.window);
  const double gain = std::pow(l.scene.max_range_m / kReferenceRangeM, 2);
  const auto th = calibrated_thresholds(l.scene.noise_amplitude, l.chirp, l.config.window, l.config.detection, gain);
  std::vector<RrmReading> readings;
  std::vector<TargetClass> classes;
  for (const auto& p : detect_peaks(classification_profile(raw, l.scene), th.min_prominence, th.min_rsa)) {
    readings.push_back(rrm(p, baseline));
    classes.push_back(classify(readings.back(), l.config.bands));
  }
  io::write_text(out / "profile.csv", io::profile_csv(raw));
  io::write_text(out / "classification.csv", io::classification_csv(readings, classes));
  return 0;
}

int cmd_monitor(const std::string& scene_path, const std::string& baseline_path, const std::string& zone_arg,
                const Common& common) {
  auto l = load_scene_file(scene_path, common);
  if (!zone_arg.empty()) {
    const auto comma = zone_arg.find(',');
    if (comma == std::string::npos) throw ValidationError("--zone: expected near,far");
    l.config.zone.near_m = parse_double("zone", zone_arg.substr(0, comma));
    l.config.zone.far_m = parse_double("zone", zone_arg.substr(comma + 1));
    l.config.zone.validate();
  }
  const auto out = prepare_out(common.out);

  Scene ref_scene = baseline_scene(baseline_path, l, common);
  if (baseline_path.empty()) ref_scene.noise_seed = ref_scene.rng_seed + 1;
  const auto ref_raw = range_profile(synthesize_beat(ref_scene, l.chirp), l.config.window);
  const auto baseline = capture_baseline({ref_raw}, hint_for(l.config, ref_scene), "empty reference");
  const auto scan = range_profile(synthesize_beat(l.scene, l.chirp), l.config.window);
  const auto report = detect_occupancy(baseline, scan, l.config.zone, 0);

  io::write_text(out / "profile.csv", io::profile_csv(scan));
  io::write_text(out / "monitor.csv", io::monitor_csv({report}, l.config.zone));
  io::write_text(out / "safety.log", safety_log_line(0, update_door_policy(SafetyState{}, report)) + "\n");
  return 0;
}

int cmd_scenario(const std::string& name, const std::string& scene_path, const Common& common) {
  Scenario sc;
  if (!scene_path.empty()) {
    sc = io::parse_scenario(io::read_json(scene_path));
  } else {
    auto b = builtin::by_name(name);
    if (!b) {
      std::string known;
      for (auto n : builtin::names()) known += (known.empty() ? "" : ", ") + std::string(n);
      throw ValidationError("--name: unknown scenario \"" + name + "\" (built-ins: " + known + ")");
    }
    sc = *b;
  }
  if (common.seed) sc.base_scene.rng_seed = *common.seed;
  apply_overrides(common.overrides, sc.base_scene, sc.config);

  const auto result = run_scenario(sc);
  const auto out = prepare_out(common.out);
  io::write_text(out / "scenario.json", io::scenario_json(sc).dump(2) + "\n");

  std::error_code ec;
  fs::create_directories(out / "profiles", ec);
  if (ec) throw IoError("cannot create " + (out / "profiles").string());
  for (const auto& s : result.steps) io::write_text(out / "profiles" / (s.name + ".csv"), io::profile_csv(s.profile));

  if (result.ran(Stage::Rrm)) {
    fs::create_directories(out / "classification", ec);
    if (ec) throw IoError("cannot create " + (out / "classification").string());
    for (const auto& s : result.steps)
      io::write_text(out / "classification" / (s.name + ".csv"), io::classification_csv(s.readings, s.classes));
    const auto rows = summarize(result);
    io::write_text(out / "summary.csv", io::summary_csv(rows));
    for (const auto& r : rows)
      std::printf("%-20s true=%-6s detected=%-10s rrm=%-10s %s\n", r.step.c_str(),
                  io::detail::opt9(r.true_range_m).c_str(), io::detail::opt9(r.detected_range_m).c_str(),
                  io::detail::opt9(r.rrm).c_str(), r.label ? std::string(to_string(*r.label)).c_str() : "-");
  }
  if (result.ran(Stage::Throughwall)) {
    std::vector<OccupancyReport> reports;
    for (const auto& s : result.steps) reports.push_back(*s.occupancy);
    io::write_text(out / "monitor.csv", io::monitor_csv(reports, sc.config.zone));
    if (result.approach) std::printf("approach: %s\n", std::string(to_string(result.approach->status)).c_str());
  }
  if (result.ran(Stage::Safety)) io::write_text(out / "safety.log", io::safety_log(result));
  return 0;
}

int cmd_calibrate(const std::string& input, const Common& common) {
  std::vector<LabeledRrm> samples;
  if (input.empty()) {
    std::istringstream in(io::measured_rrm_csv());
    samples = io::parse_labeled_csv(in, "<built-in>");
  } else {
    std::ifstream in(input);
    if (!in) throw IoError("cannot open " + input);
    samples = io::parse_labeled_csv(in, input);
  }
  const auto bands = calibrate_bands(samples);
  const auto out = prepare_out(common.out);
  io::write_text(out / "bands.json", io::bands_json(bands).dump(2) + "\n");
  std::printf("infrastructure_max=%.9g\nhuman_max=%.9g\n", bands.infrastructure_max, bands.human_max);
  return 0;
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--out", common.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", common.seed, "Override scene rng_seed");
  cmd->add_option("--set", common.overrides, "key=value override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FMCW radar foresight-sensing simulator and detector"};
  app.set_version_flag("--version", std::string("foresight ") + kVersion);
  app.require_subcommand(1);

  Common common;
  std::string scene, baseline, bands, zone, name, input;

  auto* simulate = app.add_subcommand("simulate", "Synthesize a scene and write its range profile");
  simulate->add_option("--scene", scene, "Scene JSON")->required();
  add_common(simulate, common);

  auto* classify_cmd = app.add_subcommand("classify", "Classify peaks by relative reflection magnitude");
  classify_cmd->add_option("--scene", scene, "Scene JSON")->required();
  classify_cmd->add_option("--baseline", baseline, "Empty-reference scene JSON (default: the scene's walls)");
  classify_cmd->add_option("--bands", bands, "Bands JSON from `calibrate`");
  add_common(classify_cmd, common);

  auto* monitor = app.add_subcommand("monitor", "Through-wall occupancy against an empty reference");
  monitor->add_option("--scene", scene, "Scene JSON")->required();
  monitor->add_option("--baseline", baseline, "Empty-reference scene JSON (default: the scene's walls)");
  monitor->add_option("--zone", zone, "Monitored corridor as near,far in meters");
  add_common(monitor, common);

  auto* scenario = app.add_subcommand("scenario", "Run a built-in or file-defined scenario");
  auto* name_opt = scenario->add_option("--name", name, "Built-in: human_sweep, aluminium_sweep, copper_traverse");
  auto* file_opt = scenario->add_option("--scene", scene, "Scenario JSON");
  name_opt->excludes(file_opt);
  add_common(scenario, common);

  auto* calibrate = app.add_subcommand("calibrate", "Derive class bands from labeled RRM samples");
  calibrate->add_option("--input", input, "CSV with columns rrm,label (default: built-in measured table)");
  add_common(calibrate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*simulate) return cmd_simulate(scene, common);
    if (*classify_cmd) return cmd_classify(scene, baseline, bands, common);
    if (*monitor) return cmd_monitor(scene, baseline, zone, common);
    if (*scenario) {
      if (name.empty() && scene.empty()) throw ValidationError("scenario: need --name or --scene");
      return cmd_scenario(name, scene, common);
    }
    if (*calibrate) return cmd_calibrate(input, common);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
