#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "../support/scenarios.hpp"
#include "ospat/cphd.hpp"
#include "ospat/tracker.hpp"

using namespace ospat;

namespace {

std::size_t mode_of(const std::vector<double>& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

TEST_CASE("cardinality update matches brute-force Bayes on a two-cell space") {
  // Two cells; a target in cell s produces measurement z with probability like[s][z].
  const std::vector<double> state_prob{0.7, 0.3};
  const std::vector<double> prior{0.2, 0.35, 0.3, 0.15};
  const double pd = 0.6, lambda = 0.8;

  for (std::size_t m = 0; m <= 3; ++m) {
    CAPTURE(m);
    std::vector<std::vector<double>> like(2, std::vector<double>(m));
    std::vector<double> clutter(m);
    for (std::size_t z = 0; z < m; ++z) {
      like[0][z] = 0.1 + 0.2 * z;
      like[1][z] = 0.5 - 0.1 * z;
      clutter[z] = 0.25 + 0.1 * z;
    }
    const auto ref = ospat::testing::brute_force_cardinality(prior, state_prob, like, pd, clutter, lambda);

    // Library input: intensity w = mass * state_prob, xi(z) = pd <w, g_z> / c(z).
    const double mass = std::inner_product(prior.begin(), prior.end(), std::vector<double>{0, 1, 2, 3}.begin(), 0.0);
    std::vector<double> xi(m);
    for (std::size_t z = 0; z < m; ++z)
      xi[z] = pd * mass * (state_prob[0] * like[0][z] + state_prob[1] * like[1][z]) / clutter[z];
    const auto upd = cphd_cardinality_update(prior, pd, mass, xi, lambda);
    REQUIRE(upd.posterior.size() == ref.size());
    for (std::size_t n = 0; n < ref.size(); ++n) CHECK(upd.posterior[n] == doctest::Approx(ref[n]).epsilon(1e-12));
    CHECK(std::accumulate(upd.posterior.begin(), upd.posterior.end(), 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("cardinality helpers") {
  std::vector<double> one{0.0, 1.0};
  auto p = predict_cardinality(one, 0.9);
  CHECK(p[0] == doctest::Approx(0.1));
  CHECK(p[1] == doctest::Approx(0.9));

  std::vector<double> two{0, 0, 1};
  auto q = predict_cardinality(two, 0.5);
  CHECK(q[0] == doctest::Approx(0.25));
  CHECK(q[1] == doctest::Approx(0.5));
  CHECK(q[2] == doctest::Approx(0.25));

  auto c = convolve_cardinality(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, 5);
  CHECK(c[0] == doctest::Approx(0.25));
  CHECK(c[1] == doctest::Approx(0.5));
  CHECK(c[2] == doctest::Approx(0.25));

  auto pb = poisson_binomial(std::vector<double>{0.5, 0.5}, 5);
  CHECK(pb[1] == doctest::Approx(0.5));
  auto pb3 = poisson_binomial(std::vector<double>{0.2, 0.7, 1.0}, 5);
  CHECK(pb3[0] == doctest::Approx(0.0));
  CHECK(pb3[1] == doctest::Approx(0.8 * 0.3));
  CHECK(pb3[3] == doctest::Approx(0.2 * 0.7));
}

namespace {

SensorModel quiet(double pd) {
  SensorModel s = SensorModel::head();
  s.pd = pd;
  s.clutter_rate = 0.0;
  s.size_jitter = 0.0;
  s.center_jitter = 0.0;
  return s;
}

TrackSet walkers(int frames, std::vector<std::array<double, 4>> specs) {
  std::vector<Track> tracks;
  int label = 1;
  for (auto [x, y, vx, vy] : specs) {
    Track t{label++, {}};
    for (int k = 1; k <= frames; ++k) t.states[k] = {x + vx * (k - 1) / 25.0, vx, y + vy * (k - 1) / 25.0, vy};
    tracks.push_back(t);
  }
  return TrackSet(frames, tracks);
}

}  // namespace

TEST_CASE("CPHD single target concentrates at one") {
  auto truth = walkers(20, {{600, 400, 30, 0}});
  auto det = convert_body_detections(simulate_detections(truth, quiet(1.0), quiet(1.0), 3, 1));
  CphdTracker tracker(quiet(1.0), quiet(1.0), MotionModel{}, CphdConfig{});
  for (int k = 1; k <= 20; ++k) {
    auto reports = tracker.step(det[k - 1]);
    if (k >= 5) {
      CHECK(mode_of(scene_cardinality(tracker.clusters(), 20)) == 1);
      CHECK(reports.size() == 1);
    }
  }
}

TEST_CASE("CPHD with no measurements reports nothing") {
  CphdTracker tracker(SensorModel::head(), SensorModel::body(), MotionModel{}, CphdConfig{});
  for (int k = 0; k < 50; ++k) CHECK(tracker.step(FrameDetections{}).empty());
  CHECK(mode_of(scene_cardinality(tracker.clusters(), 20)) == 0);
}

TEST_CASE("CPHD two crossing targets in clutter") {
  auto truth = walkers(100, {{400, 400, 50, 20}, {400, 480, 50, -20}});
  SensorModel h = SensorModel::head(), b = SensorModel::body();
  h.pd = 0.9;
  b.pd = 0.85;
  auto det = convert_body_detections(simulate_detections(truth, h, b, 31, 1));
  CphdTracker tracker(h, b, MotionModel{}, CphdConfig{});
  int exact = 0, mode_two = 0;
  for (int k = 1; k <= 100; ++k) {
    auto reports = tracker.step(det[k - 1]);
    if (k > 10) {
      exact += reports.size() == 2;
      mode_two += mode_of(scene_cardinality(tracker.clusters(), 20)) == 2;
    }
  }
  CHECK(exact >= 85);
  CHECK(mode_two >= 85);
}

TEST_CASE("CPHD tracker is deterministic") {
  auto sc = generate_scenario(ospat::testing::three_walkers(), 9);
  auto det = convert_body_detections(sc.detections);
  TrackerConfig cfg;
  cfg.algorithm = Algorithm::kCphd;
  auto a = run_tracker(det, SensorModel::head(), SensorModel::body(), cfg);
  auto b = run_tracker(det, SensorModel::head(), SensorModel::body(), cfg);
  CHECK(a == b);
  CHECK(a.size() >= 3);
  CHECK(ospat::testing::min_coverage(sc.truth, a) >= 0.7);
}
