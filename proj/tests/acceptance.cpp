// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "foresight/foresight.hpp"

using namespace foresight;

namespace {

// Tolerances and budgets.
constexpr double kRrmRelTol = 1e-12;
constexpr double kSpectralRelTol = 1e-9;
constexpr int kSpectralCases = 60;
constexpr std::size_t kMaxSpectralN = 4096;
constexpr double kLocalizationTolM = 0.075;
constexpr int kNoiseSeeds = 100;
constexpr int kMinRecovered = 95;
constexpr double kSnrDb = 20.0;
constexpr int kMaxSeqLen = 6;
constexpr double kGridStepM = 0.25;
constexpr double kGridMaxM = 4.0;

constexpr double kBudgetTable = 1.0;
constexpr double kBudgetSpectral = 30.0;
constexpr double kBudgetNoise = 120.0;
constexpr double kBudgetSafety = 60.0;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && dt >= budget_s) {
    o.pass = false;
    o.detail += " (over budget)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1
Outcome table_reproduction() {
  const auto bands = calibrate_bands(measured_rrm_samples());
  int ok = 0;
  for (const auto& m : kMeasuredRrm) ok += classify(m.rrm, bands) == m.label;
  return {ok == static_cast<int>(kMeasuredRrm.size()), fmt("%d/%zu labels", ok, kMeasuredRrm.size())};
}

// 2
Outcome rrm_arithmetic() {
  // Reference RSA of an arbitrary but fixed wall peak; the target RSA is
  // built so target/reference equals the tabulated value.
  const double refs[] = {0.0375, 1.0, 3.2e-5};
  double worst = 0.0;
  for (double ref : refs) {
    Baseline base;
    base.reference_feature = Peak{6.0, ref, ref, 80};
    for (const auto& m : kMeasuredRrm) {
      const auto reading = rrm(Peak{m.distance_m, m.rrm * ref, 0.0, 0}, base);
      worst = std::max(worst, std::abs(reading.rrm - m.rrm) / m.rrm);
    }
  }
  return {worst <= kRrmRelTol, fmt("worst relative error %.3g", worst)};
}

// 3
Outcome spectral_equivalence() {
  std::mt19937_64 rng(20210607);
  std::uniform_int_distribution<std::size_t> len(16, kMaxSpectralN);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int c = 0; c < kSpectralCases; ++c) {
    ChirpConfig chirp;
    // Powers of two, primes and odd lengths all appear at some point.
    std::size_t n = c < 4 ? std::size_t{16} << (c * 2) : len(rng);
    n = std::min(n, kMaxSpectralN);
    chirp.sample_rate_hz = static_cast<double>(n) / chirp.sweep_time_s;
    BeatSignal beat{std::vector<double>(n), chirp};
    for (auto& x : beat.samples) x = gauss(rng);
    if (c % 3 == 0) {
      // Scene-like signal with a tone on top of the noise.
      const double f = beat_frequency(1.0 + c * 0.05, chirp);
      for (std::size_t i = 0; i < n; ++i) beat.samples[i] += 5.0 * std::cos(2 * M_PI * f * i / chirp.sample_rate_hz);
    }
    const auto fast = range_profile(beat, Window::Rect);
    const auto slow = naive_spectrum(beat);
    if (fast.size() != slow.size()) return {false, fmt("size mismatch at n=%zu", n)};
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < fast.size(); ++k) {
      scale = std::max(scale, slow.rsa[k]);
      err = std::max(err, std::abs(fast.rsa[k] - slow.rsa[k]));
    }
    worst = std::max(worst, err / scale);
  }
  return {worst <= kSpectralRelTol, fmt("%d signals, worst relative max error %.3g", kSpectralCases, worst)};
}

// 4
Outcome localization() {
  int ok = 0;
  std::string detail;
  for (double r : {1.0, 2.0, 3.0, 4.0}) {
    Scene s;
    s.scatterers.push_back({"target", r, materials::human(), ScattererKind::Human, {}});
    const auto p = range_profile(synthesize_beat(s, ChirpConfig{}));
    const auto peaks = detect_peaks(p, 0.0, 0.0);
    if (peaks.empty()) continue;
    const auto best = std::max_element(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.rsa < b.rsa; });
    const double e = std::abs(best->range_m - r);
    ok += e <= kLocalizationTolM;
    detail += fmt(" %.1f->%.4f", r, best->range_m);
  }
  return {ok == 4, fmt("%d/4 within %.3f m;", ok, kLocalizationTolM) + detail};
}

// 5
Outcome throughwall_reconstruction() {
  const auto sc = builtin::copper_traverse();
  const auto result = run_scenario(sc);
  int ok = 0;
  std::string detail;
  for (const auto& s : result.steps) {
    if (!s.occupancy || !s.occupancy->occupied || !s.true_range_m) continue;
    const double e = std::abs(s.occupancy->strongest()->range_m - *s.true_range_m);
    ok += e <= s.occupancy->bin_spacing_m;
    detail += fmt(" %.2f->%.3f", *s.true_range_m, s.occupancy->strongest()->range_m);
  }
  const bool approaching = result.approach && result.approach->status == ApproachStatus::Approaching;

  const Scene empty = sc.base_scene.empty_reference();
  const auto raw = range_profile(synthesize_beat(empty, sc.chirp), sc.config.window);
  const auto base = capture_baseline({raw}, empty.walls.back().range_m);
  const bool self_clear = !detect_occupancy(base, raw, sc.config.zone).occupied;

  return {ok == 4 && result.steps.size() == 4 && approaching && self_clear,
          fmt("%d/4 located;", ok) + detail + fmt("; approach=%s; empty self-check %s",
                                                 result.approach ? std::string(to_string(result.approach->status)).c_str() : "none",
                                                 self_clear ? "clear" : "occupied")};
}

// 6
double sigma_for_snr(double amplitude, double snr_db) {
  // SNR = (A^2/2) / sigma^2 for a real tone against white noise.
  return amplitude / std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0));
}

double weakest_amplitude(const Scene& s) {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& x : s.scatterers) w = std::min(w, effective_amplitude(s, x.material.reflectivity, x.range_m));
  for (const auto& x : s.walls) w = std::min(w, effective_amplitude(s, x.material.reflectivity, x.range_m));
  return w;
}

Outcome noise_robustness() {
  const ChirpConfig chirp;
  const Window window = Window::Hann;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> lab_pos(1.0, 4.0), step(0.2, 0.6);

  int recovered = 0, false_pos = 0, approach_ok = 0, recede_ok = 0;
  for (int seed = 0; seed < kNoiseSeeds; ++seed) {
    // Lab scan: a person in front of the reference wall.
    Scene lab;
    lab.rng_seed = 1000 + seed;
    lab.walls.push_back({"lab_wall", 6.0, materials::lab_wall()});
    lab.scatterers.push_back({"person", lab_pos(rng), materials::human(), ScattererKind::Human, {}});
    lab.noise_amplitude = sigma_for_snr(weakest_amplitude(lab), kSnrDb);
    const auto th = calibrated_thresholds(lab.noise_amplitude, chirp, window);
    const auto profile = range_profile(synthesize_beat(lab, chirp), window);
    const auto peaks = detect_peaks(profile, th.min_prominence, th.min_rsa);
    auto found = [&](double r) {
      for (const auto& p : peaks)
        if (std::abs(p.range_m - r) <= profile.bin_spacing_m()) return true;
      return false;
    };
    recovered += found(lab.scatterers[0].range_m) && found(6.0);

    // Empty corridor against a baseline captured with a different noise draw.
    Scene corridor;
    corridor.max_range_m = 4.0;
    corridor.rng_seed = 5000 + seed;
    corridor.walls.push_back({"wall_1", 0.10, materials::plasterboard()});
    corridor.walls.push_back({"wall_2", 2.60, materials::plasterboard()});
    corridor.noise_amplitude = sigma_for_snr(weakest_amplitude(corridor), kSnrDb);
    corridor.noise_seed = 2 * seed + 1;
    const auto base = capture_baseline({range_profile(synthesize_beat(corridor, chirp), window)}, 2.6);
    const auto zone = calibrated_zone(MonitorZone{}, corridor.noise_amplitude, chirp, window);
    Scene again = corridor;
    again.noise_seed = 2 * seed + 2;
    false_pos += detect_occupancy(base, range_profile(synthesize_beat(again, chirp), window), zone).occupied;

    // Approach soundness: a sheet walking toward the radar reads Approaching,
    // the reverse walk never does.
    std::vector<double> path{2.3};
    while (path.size() < 4) path.push_back(path.back() - step(rng));
    std::vector<OccupancyReport> fwd, back;
    for (std::size_t i = 0; i < path.size(); ++i) {
      for (auto* reports : {&fwd, &back}) {
        Scene live = corridor;
        const double r = reports == &fwd ? path[i] : path[path.size() - 1 - i];
        live.scatterers.push_back({"sheet", r, materials::copper(), ScattererKind::MetalSheet, {0.3, 0.3}});
        live.noise_seed = 10000 + 10 * seed + i + (reports == &back ? 5 : 0);
        reports->push_back(detect_occupancy(base, range_profile(synthesize_beat(live, chirp), window), zone, i));
      }
    }
    approach_ok += track_approach(fwd, zone).status == ApproachStatus::Approaching;
    recede_ok += track_approach(back, zone).status != ApproachStatus::Approaching;
  }
  const bool pass = recovered >= kMinRecovered && false_pos == 0 && approach_ok == kNoiseSeeds &&
                    recede_ok == kNoiseSeeds;
  return {pass, fmt("SNR %.0f dB: recovered %d/%d, false positives %d/%d, approach %d/%d, recede %d/%d", kSnrDb,
                    recovered, kNoiseSeeds, false_pos, kNoiseSeeds, approach_ok, kNoiseSeeds, recede_ok, kNoiseSeeds)};
}

// 7
// Every sequence of up to kMaxSeqLen observations is covered. update_tier and
// update_door_policy are pure, so prefixes that reach an identical state
// (causes included) share their whole subtree; those prefixes are merged
// level by level and counted with their multiplicity.
struct SafetyChecker {
  TierConfig cfg;
  std::vector<double> grid;
  long transitions = 0;
  double sequences = 0;
  long violations = 0;
  std::string first;

  static int severity(Tier t) { return static_cast<int>(t); }

  // Instantaneous tier from distance alone, written out independently.
  Tier instant(double d) const {
    if (d < cfg.stop_range_m) return Tier::Stop;
    if (d < cfg.slow_range_m) return Tier::Slow;
    return Tier::Normal;
  }

  static std::string key(const SafetyState& s) {
    return fmt("%d|%.17g|%d|", static_cast<int>(s.tier), s.speed_cap, s.door_entry_allowed ? 1 : 0) + s.tier_cause +
           "|" + s.door_cause;
  }

  void fail(const std::string& what) {
    if (violations++ == 0) first = what;
  }

  // choice 0: nothing seen; choice k: a human and an occupied zone at grid[k-1].
  std::vector<SafetyState> expand(const SafetyState& state) {
    std::vector<SafetyState> next(grid.size() + 1);
    for (std::size_t k = 0; k <= grid.size(); ++k) {
      std::vector<ClassifiedPeak> seen;
      OccupancyReport occ;
      const double d = k == 0 ? std::numeric_limits<double>::infinity() : grid[k - 1];
      if (k > 0) {
        seen.push_back({Peak{d, 1.0, 1.0, 0}, TargetClass::Human});
        occ = {true, {Peak{d, 0.1, 0.1, 0}}, 0, 0.075};
      }
      auto s = update_door_policy(update_tier(state, seen, cfg), occ);
      ++transitions;
      const Tier raw = instant(d);
      if (severity(s.tier) < severity(raw)) fail("escalation delayed");
      if (severity(s.tier) > std::max(severity(raw), severity(state.tier))) fail("tier raised beyond prior and raw");
      // Holding above raw is allowed only within the margin of the held tier's boundary.
      if (s.tier != raw) {
        const double edge = s.tier == Tier::Stop ? cfg.stop_range_m : cfg.slow_range_m;
        if (!(d <= edge + cfg.hysteresis_m)) fail("held outside hysteresis margin");
      }
      const double cap = s.tier == Tier::Normal ? 1.0 : s.tier == Tier::Slow ? cfg.slow_speed_cap : 0.0;
      if (s.speed_cap != cap) fail("speed cap inconsistent with tier");
      if (s.door_entry_allowed != !occ.occupied) fail("door flag differs from occupancy");
      next[k] = std::move(s);
    }
    // Monotone severity: from the same state, a nearer human is never less severe.
    for (std::size_t k = 1; k <= grid.size(); ++k) {
      const std::size_t farther = k == grid.size() ? 0 : k + 1;
      if (severity(next[k].tier) < severity(next[farther].tier)) fail("nearer human less severe");
    }
    return next;
  }

  void run() {
    std::map<std::string, std::pair<SafetyState, double>> frontier{{key(SafetyState{}), {SafetyState{}, 1.0}}};
    for (int depth = 0; depth < kMaxSeqLen; ++depth) {
      std::map<std::string, std::pair<SafetyState, double>> next;
      for (const auto& [_, entry] : frontier) {
        for (auto& s : expand(entry.first)) {
          sequences += entry.second;
          auto [it, fresh] = next.try_emplace(key(s), s, 0.0);
          it->second.second += entry.second;
        }
      }
      frontier = std::move(next);
    }
  }
};

Outcome safety_model_check() {
  std::vector<double> grid;
  for (double r = kGridStepM; r <= kGridMaxM + 1e-9; r += kGridStepM) grid.push_back(r);
  long transitions = 0, violations = 0;
  double sequences = 0;
  int configs = 0;
  std::string first;
  for (double stop : {0.5, 1.0})
    for (double slow : {2.0, 3.0})
      for (double margin : {0.0, 0.2, 0.25})
        for (double cap : {0.1, 0.25, 0.5}) {
          SafetyChecker c;
          c.cfg = TierConfig{stop, slow, cap, margin, false};
          c.grid = grid;
          c.run();
          transitions += c.transitions;
          sequences += c.sequences;
          violations += c.violations;
          if (first.empty() && !c.first.empty())
            first = fmt("stop=%.2f slow=%.2f margin=%.2f: ", stop, slow, margin) + c.first;
          ++configs;
        }
  // Sequences of length 1..kMaxSeqLen over grid.size()+1 choices per step.
  double expected = 0, level = 1;
  for (int d = 1; d <= kMaxSeqLen; ++d) expected += (level *= grid.size() + 1);
  expected *= configs;
  return {violations == 0 && sequences == expected,
          fmt("%d configs, %.0f sequences (%ld distinct transitions), %ld violations", configs, sequences, transitions,
              violations) +
              (first.empty() ? "" : "; " + first)};
}

// 8
std::string render(const RunResult& r) {
  std::string out;
  for (const auto& s : r.steps) {
    out += io::profile_csv(s.profile);
    out += io::classification_csv(s.readings, s.classes);
  }
  if (r.ran(Stage::Rrm)) out += io::summary_csv(summarize(r));
  if (r.ran(Stage::Throughwall)) {
    std::vector<OccupancyReport> reports;
    for (const auto& s : r.steps) reports.push_back(*s.occupancy);
    out += io::monitor_csv(reports, MonitorZone{});
  }
  out += io::safety_log(r);
  return out;
}

Outcome determinism() {
  int ok = 0;
  for (auto make : {builtin::human_sweep, builtin::copper_traverse}) {
    auto sc = make();
    sc.base_scene.rng_seed = 4242;
    const auto a = render(run_scenario(sc)) + io::scenario_json(sc).dump(2);
    const auto b = render(run_scenario(sc)) + io::scenario_json(sc).dump(2);
    ok += a == b;
  }
  return {ok == 2, fmt("%d/2 built-ins byte-identical", ok)};
}

}  // namespace

int main() {
  report(1, "measured table reproduction", kBudgetTable, table_reproduction);
  report(2, "rrm arithmetic", 0, rrm_arithmetic);
  report(3, "spectral oracle equivalence", kBudgetSpectral, spectral_equivalence);
  report(4, "single scatterer localization", 0, localization);
  report(5, "through-wall reconstruction", 0, throughwall_reconstruction);
  report(6, "noise robustness", kBudgetNoise, noise_robustness);
  report(7, "safety model check", kBudgetSafety, safety_model_check);
  report(8, "determinism", 0, determinism);
  std::printf("%s: %d failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
