#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foresight/error.hpp"

namespace foresight {

/// Reference range for the free-space spreading law, in meters.
inline constexpr double kReferenceRangeM = 1.0;

struct Material {
  std::string name;
  double reflectivity = 0.0;   // amplitude coefficient, >= 0
  double transmissivity = 1.0; // amplitude coefficient, [0, 1]
};

// Default coefficients. These are free parameters chosen so that
// spreading-compensated amplitude ratios fall into the human / metallic
// bands derived from the measured relative reflection magnitudes.
namespace materials {
inline Material plasterboard() { return {"plasterboard", 0.05, 0.7}; }
inline Material lab_wall() { return {"lab_wall", 0.05, 0.7}; }
inline Material human() { return {"human", 0.08, 0.3}; }
inline Material aluminum() { return {"aluminum", 0.9, 0.0}; }
inline Material copper() { return {"copper", 0.9, 0.0}; }

inline std::optional<Material> by_name(std::string_view name) {
  if (name == "plasterboard") return plasterboard();
  if (name == "lab_wall") return lab_wall();
  if (name == "human") return human();
  if (name == "aluminum" || name == "aluminium") return aluminum();
  if (name == "copper") return copper();
  return std::nullopt;
}
}  // namespace materials

/// Ground-truth label. Only tests and reports look at it; the detection
/// pipeline never does.
enum class ScattererKind { Human, MetalSheet, Infrastructure, Generic };

inline std::string_view to_string(ScattererKind k) {
  switch (k) {
    case ScattererKind::Human: return "human";
    case ScattererKind::MetalSheet: return "metal_sheet";
    case ScattererKind::Infrastructure: return "infrastructure";
    case ScattererKind::Generic: return "generic";
  }
  return "generic";
}

inline std::optional<ScattererKind> scatterer_kind_from_string(std::string_view s) {
  if (s == "human") return ScattererKind::Human;
  if (s == "metal_sheet" || s == "metal") return ScattererKind::MetalSheet;
  if (s == "infrastructure") return ScattererKind::Infrastructure;
  if (s == "generic") return ScattererKind::Generic;
  return std::nullopt;
}

struct Scatterer {
  std::string id;
  double range_m = 1.0;
  Material material;
  ScattererKind kind = ScattererKind::Generic;
  std::array<double, 2> extent_m{0.0, 0.0};
};

struct Wall {
  std::string id;
  double range_m = 1.0;
  Material material;
};

/// One-dimensional (boresight) world model.
struct Scene {
  std::vector<Scatterer> scatterers;
  std::vector<Wall> walls;  // ascending range
  double max_range_m = 8.0;
  double noise_amplitude = 0.0;
  std::uint64_t rng_seed = 0;
  // Noise stream seed; reflector phases always derive from rng_seed so the
  // static part of a scene renders identically across scans.
  std::optional<std::uint64_t> noise_seed;

  std::uint64_t effective_noise_seed() const { return noise_seed.value_or(rng_seed); }

  const Scatterer* find_scatterer(std::string_view id) const {
    auto it = std::find_if(scatterers.begin(), scatterers.end(),
                           [&](const Scatterer& s) { return s.id == id; });
    return it == scatterers.end() ? nullptr : &*it;
  }
  const Wall* find_wall(std::string_view id) const {
    auto it = std::find_if(walls.begin(), walls.end(), [&](const Wall& w) { return w.id == id; });
    return it == walls.end() ? nullptr : &*it;
  }

  /// Same walls and bounds, no scatterers: the empty reference.
  Scene empty_reference() const {
    Scene s = *this;
    s.scatterers.clear();
    return s;
  }
};

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.field + ": " + v.message;
    }
    return out;
  }
};

namespace detail {
inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline void check_material(const Material& m, const std::string& field,
                           std::vector<Violation>& out) {
  if (!(m.reflectivity >= 0.0) || !std::isfinite(m.reflectivity))
    out.push_back({field + ".reflectivity", "negative coefficient (" + fmt_num(m.reflectivity) + ")"});
  if (!(m.transmissivity >= 0.0 && m.transmissivity <= 1.0))
    out.push_back({field + ".transmissivity",
                   "coefficient outside [0, 1] (" + fmt_num(m.transmissivity) + ")"});
}

inline void check_range(double r, double max_range, const std::string& field,
                        std::vector<Violation>& out) {
  if (!(r > 0.0) || !std::isfinite(r))
    out.push_back({field, "range must be > 0 (" + fmt_num(r) + ")"});
  else if (!(r < max_range))
    out.push_back({field, "out of bounds (" + fmt_num(r) + " >= max_range_m " + fmt_num(max_range) + ")"});
}
}  // namespace detail

inline ValidationReport validate_scene(const Scene& scene) {
  ValidationReport report;
  auto& out = report.violations;
  if (!(scene.max_range_m > 0.0) || !std::isfinite(scene.max_range_m))
    out.push_back({"scene.max_range_m", "must be > 0"});
  if (!(scene.noise_amplitude >= 0.0) || !std::isfinite(scene.noise_amplitude))
    out.push_back({"scene.noise_amplitude", "negative coefficient"});

  for (std::size_t i = 0; i < scene.scatterers.size(); ++i) {
    const auto& s = scene.scatterers[i];
    const std::string field = "scene.scatterers[" + std::to_string(i) + "]";
    detail::check_range(s.range_m, scene.max_range_m, field + ".range_m", out);
    detail::check_material(s.material, field + ".material", out);
    if (s.id.empty()) out.push_back({field + ".id", "empty id"});
  }
  for (std::size_t i = 0; i < scene.walls.size(); ++i) {
    const auto& w = scene.walls[i];
    const std::string field = "scene.walls[" + std::to_string(i) + "]";
    detail::check_range(w.range_m, scene.max_range_m, field + ".range_m", out);
    detail::check_material(w.material, field + ".material", out);
    if (w.id.empty()) out.push_back({field + ".id", "empty id"});
    if (i > 0) {
      const double prev = scene.walls[i - 1].range_m;
      if (w.range_m == prev)
        out.push_back({field + ".range_m", "duplicate wall range (" + detail::fmt_num(w.range_m) + ")"});
      else if (w.range_m < prev)
        out.push_back({field + ".range_m", "walls not sorted by ascending range"});
    }
  }

  // Reflector ids key the phase hash and scenario mutations.
  std::vector<std::string> ids;
  for (const auto& s : scene.scatterers) ids.push_back(s.id);
  for (const auto& w : scene.walls) ids.push_back(w.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (!ids[i].empty() && ids[i] == ids[i - 1])
      out.push_back({"scene", "duplicate reflector id \"" + ids[i] + "\""});
  return report;
}

/// Product of two-way wall transmission for everything strictly nearer than
/// range_m.
inline double wall_transmission(const Scene& scene, double range_m) {
  double t = 1.0;
  for (const auto& w : scene.walls)
    if (w.range_m < range_m) t *= w.material.transmissivity * w.material.transmissivity;
  return t;
}

inline double effective_amplitude(const Scene& scene, double reflectivity, double range_m) {
  const double spread = kReferenceRangeM / range_m;
  return reflectivity * wall_transmission(scene, range_m) * spread * spread;
}

/// Received amplitude of a scene reflector (wall or scatterer), looked up by id.
inline double effective_amplitude(const Scene& scene, std::string_view reflector_id) {
  if (const auto* s = scene.find_scatterer(reflector_id))
    return effective_amplitude(scene, s->material.reflectivity, s->range_m);
  if (const auto* w = scene.find_wall(reflector_id))
    return effective_amplitude(scene, w->material.reflectivity, w->range_m);
  throw ValidationError("reflector \"" + std::string(reflector_id) + "\" is not in the scene");
}

}  // namespace foresight
