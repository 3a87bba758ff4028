#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "foresight/throughwall.hpp"

using namespace foresight;

namespace {

Scene corridor() {
  Scene s;
  s.max_range_m = 4.0;
  s.rng_seed = 5;
  s.walls.push_back({"wall_1", 0.10, materials::plasterboard()});
  s.walls.push_back({"wall_2", 2.60, materials::plasterboard()});
  return s;
}

Scene with_sheet(Scene s, double r) {
  s.scatterers.push_back({"copper_sheet", r, materials::copper(), ScattererKind::MetalSheet, {0.3, 0.3}});
  return s;
}

RangeProfile scan(const Scene& s) { return range_profile(synthesize_beat(s, ChirpConfig{})); }

Baseline corridor_baseline(const Scene& s) { return capture_baseline({scan(s)}, 2.6, "empty corridor"); }

OccupancyReport occupied_at(std::size_t idx, double r, double spacing = 0.075) {
  return {true, {Peak{r, 0.1, 0.1, 0}}, idx, spacing};
}

}  // namespace

TEST_CASE("identical scan is unoccupied", "[throughwall]") {
  const auto s = corridor();
  const auto report = detect_occupancy(corridor_baseline(s), scan(s), MonitorZone{});
  CHECK_FALSE(report.occupied);
  CHECK(report.detections.empty());
}

TEST_CASE("sheet inside the corridor is detected within one bin", "[throughwall]") {
  const auto empty = corridor();
  const auto base = corridor_baseline(empty);
  for (double r : {2.2, 1.6, 1.0, 0.4}) {
    const auto report = detect_occupancy(base, scan(with_sheet(empty, r)), MonitorZone{}, 3);
    REQUIRE(report.occupied);
    CHECK(report.scan_index == 3);
    CHECK(std::abs(report.strongest()->range_m - r) <= report.bin_spacing_m);
  }
}

TEST_CASE("sheet beyond the far wall is outside the zone", "[throughwall]") {
  const auto empty = corridor();
  const auto report = detect_occupancy(corridor_baseline(empty), scan(with_sheet(empty, 3.2)), MonitorZone{});
  CHECK_FALSE(report.occupied);
}

TEST_CASE("mismatched chirp is rejected", "[throughwall]") {
  const auto empty = corridor();
  ChirpConfig other;
  other.bandwidth_hz = 1e9;
  const auto other_scan = range_profile(synthesize_beat(empty, other));
  CHECK_THROWS_AS(detect_occupancy(corridor_baseline(empty), other_scan, MonitorZone{}), ValidationError);
}

TEST_CASE("zone validation", "[throughwall]") {
  CHECK_THROWS_AS((MonitorZone{2.0, 1.0, 0.01, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((MonitorZone{0.1, 1.0, 0.0, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((MonitorZone{0.0, 1.0, 0.1, 2}.validate()), ValidationError);
}

TEST_CASE("occupancy properties", "[throughwall][property]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> pos(0.15, 3.9), thr(0.001, 0.3);
  for (int trial = 0; trial < 60; ++trial) {
    Scene empty = corridor();
    empty.rng_seed = rng();
    empty.noise_amplitude = (trial % 2) ? 1e-4 : 0.0;
    const auto base = corridor_baseline(empty);

    // Self-comparison at zero noise never fires.
    if (empty.noise_amplitude == 0.0) CHECK_FALSE(detect_occupancy(base, scan(empty), MonitorZone{}).occupied);

    Scene live = with_sheet(empty, pos(rng));
    live.noise_seed = rng();
    const auto s = scan(live);
    MonitorZone lo, hi;
    lo.excess_threshold = thr(rng);
    hi.excess_threshold = lo.excess_threshold + thr(rng);
    const auto r_lo = detect_occupancy(base, s, lo);
    const auto r_hi = detect_occupancy(base, s, hi);
    // Raising the threshold never adds occupancy.
    if (!r_lo.occupied) CHECK_FALSE(r_hi.occupied);
    CHECK(r_hi.detections.size() <= r_lo.detections.size());

    const auto [a, b] = lo.interval(r_lo.bin_spacing_m);
    for (const auto& d : r_lo.detections) {
      CHECK(d.range_m > a);
      CHECK(d.range_m < b);
    }
    CHECK(r_lo.occupied == !r_lo.detections.empty());
  }
}

TEST_CASE("track_approach", "[throughwall]") {
  const MonitorZone zone;
  SECTION("strictly decreasing ranges") {
    const auto t = track_approach(
        {occupied_at(0, 2.2), occupied_at(1, 1.6), occupied_at(2, 1.0), occupied_at(3, 0.4)}, zone);
    CHECK(t.status == ApproachStatus::Approaching);
    CHECK(t.ranges_m == std::vector<double>{2.2, 1.6, 1.0, 0.4});
  }
  SECTION("increasing ranges") {
    const auto t = track_approach({occupied_at(0, 0.4), occupied_at(1, 1.0), occupied_at(2, 1.6)}, zone);
    CHECK(t.status == ApproachStatus::Receding);
  }
  SECTION("all empty") {
    CHECK(track_approach({OccupancyReport{}, OccupancyReport{}}, zone).status == ApproachStatus::Empty);
    CHECK(track_approach({}, zone).status == ApproachStatus::Empty);
  }
  SECTION("constant within a bin") {
    const auto t = track_approach({occupied_at(0, 1.0), occupied_at(1, 1.05), occupied_at(2, 1.0)}, zone);
    CHECK(t.status == ApproachStatus::Static);
  }
  SECTION("steps no larger than a bin are not motion") {
    const auto t = track_approach({occupied_at(0, 1.15), occupied_at(1, 1.075), occupied_at(2, 1.0)}, zone);
    CHECK(t.status == ApproachStatus::Static);
  }
  SECTION("only the last three occupied ranges count") {
    const auto t = track_approach({occupied_at(0, 0.5), occupied_at(1, 2.0), OccupancyReport{false, {}, 2, 0.075},
                                   occupied_at(3, 1.5), occupied_at(4, 1.0)},
                                  zone);
    CHECK(t.status == ApproachStatus::Approaching);
  }
  SECTION("fewer than three occupied scans are static") {
    CHECK(track_approach({occupied_at(0, 2.0), occupied_at(1, 1.0)}, zone).status == ApproachStatus::Static);
  }
  SECTION("out of order reports are rejected") {
    CHECK_THROWS_AS(track_approach({occupied_at(2, 2.0), occupied_at(1, 1.0)}, zone), ValidationError);
  }
}
