#include "doctest.h"

#include <cmath>

#include "../support/scenarios.hpp"
#include "ospat/bernoulli.hpp"
#include "ospat/errors.hpp"
#include "ospat/tracker.hpp"

using namespace ospat;

namespace {

BernoulliTrack gaussian_track(double e, double x, double y, double var = 25.0) {
  Gaussian g;
  g.mean << x, 0, y, 0;
  g.cov = StateMatrix::Identity() * var;
  return {1, e, g};
}

SensorModel quiet(double pd) {
  SensorModel s = SensorModel::head();
  s.pd = pd;
  s.clutter_rate = 0.0;
  s.size_jitter = 0.0;
  s.center_jitter = 0.0;
  return s;
}

}  // namespace

TEST_CASE("predict_bernoulli") {
  Rng rng(1);
  MotionModel mm;
  mm.process_noise_intensity = 0.0;
  Gaussian g;
  g.mean << 0, 10, 0, 0;
  BernoulliTrack t{1, 1.0, g};
  auto p = predict_bernoulli(t, mm, 0.99, rng);
  CHECK(p.existence == doctest::Approx(0.99));
  auto m = p.moments().mean;
  CHECK(m(0) == doctest::Approx(0.4));
  CHECK(m(1) == doctest::Approx(10.0));
  CHECK(m(2) == 0.0);

  ParticleCloud pc;
  for (int i = 0; i < 10; ++i) pc.particles.emplace_back(i, 10, 0, 0);
  pc.weights.assign(10, 0.1);
  auto q = predict_bernoulli({2, 0.5, pc}, mm, 0.9, rng);
  CHECK(q.existence == doctest::Approx(0.45));
  CHECK(q.moments().mean(0) == doctest::Approx(4.5 + 0.4));
  CHECK_THROWS_AS(predict_bernoulli(t, mm, 1.5, rng), InvalidInput);
}

TEST_CASE("missed-detection existence update") {
  Rng rng(1);
  BernoulliConfig cfg;
  for (double e : {0.05, 0.3, 0.5, 0.9, 1.0}) {
    for (auto mode : {LikelihoodMode::kGaussian, LikelihoodMode::kImprecise}) {
      auto u = update_bernoulli(gaussian_track(e, 100, 100), {}, SensorModel::head(), mode, cfg, rng);
      // two hypotheses: target present and missed, or target absent
      const double present = e * (1.0 - 0.58);
      const double absent = 1.0 - e;
      CHECK(u.existence == doctest::Approx(present / (present + absent)).epsilon(1e-12));
      CHECK(u.existence == doctest::Approx(e * (1 - 0.58) / (1 - e * 0.58)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gaussian update with one detection") {
  Rng rng(1);
  BernoulliConfig cfg;
  auto t = gaussian_track(0.5, 100, 100, 100.0);
  Rect r{100 + 3 - 3, 100 + 2 - 3, 6, 6};  // centre (103, 102), R = I
  auto u = update_bernoulli(t, std::span<const Rect>(&r, 1), SensorModel::head(), LikelihoodMode::kGaussian, cfg, rng);
  const auto before = t.moments(), after = u.moments();
  CHECK(after.mean(0) > 100.0);
  CHECK(after.mean(0) < 103.0);
  CHECK(after.mean(2) > 100.0);
  CHECK(after.cov.trace() < before.cov.trace());
  CHECK(u.existence > t.existence);
}

TEST_CASE("imprecise update at the indicator limit leaves weights unchanged") {
  Rng rng(1);
  BernoulliConfig cfg;
  SensorModel sm = SensorModel::head();
  sm.sigma_x = sm.sigma_y = 0.0;
  ParticleCloud pc;
  std::vector<double> w{0.1, 0.2, 0.3, 0.15, 0.25};
  for (int i = 0; i < 5; ++i) pc.particles.emplace_back(10 + i, 0, 12 + i, 0);
  pc.weights = w;
  BernoulliTrack t{1, 0.5, pc};
  Rect r{0, 0, 30, 36};
  auto u = update_bernoulli(t, std::span<const Rect>(&r, 1), sm, LikelihoodMode::kImprecise, cfg, rng);
  const auto& out = std::get<ParticleCloud>(u.posterior);
  for (int i = 0; i < 5; ++i) CHECK(out.weights[i] == doctest::Approx(w[i]).epsilon(1e-12));
  CHECK(u.existence > 0.5);
}

TEST_CASE("detection_likelihood is in density units") {
  // A particle cloud at one point inside a sharp rectangle: L = 1 / area.
  SensorModel sm = SensorModel::head();
  sm.sigma_x = sm.sigma_y = 0.0;
  ParticleCloud pc;
  pc.particles.emplace_back(5, 0, 5, 0);
  pc.weights = {1.0};
  BernoulliTrack t{1, 1.0, pc};
  CHECK(detection_likelihood(t, {0, 0, 10, 20}, sm, LikelihoodMode::kImprecise) == doctest::Approx(1.0 / 200.0));
  CHECK(detection_likelihood(t, {50, 0, 10, 20}, sm, LikelihoodMode::kImprecise) == 0.0);
}

TEST_CASE("birth_bernoulli") {
  Rng rng(3);
  BernoulliConfig cfg;
  Rect r{100, 200, 30, 36};
  auto g = birth_bernoulli(7, r, SensorModel::head(), LikelihoodMode::kGaussian, cfg, rng);
  CHECK(g.label == 7);
  CHECK(g.existence == cfg.birth_existence);
  CHECK(g.moments().mean(0) == doctest::Approx(115.0));
  CHECK(g.moments().mean(2) == doctest::Approx(218.0));
  auto p = birth_bernoulli(8, r, SensorModel::head(), LikelihoodMode::kImprecise, cfg, rng);
  const auto& pc = std::get<ParticleCloud>(p.posterior);
  CHECK(pc.particles.size() == static_cast<std::size_t>(cfg.particles));
  CHECK(p.moments().mean(0) == doctest::Approx(115.0).epsilon(0.02));
  CHECK(p.moments().mean(2) == doctest::Approx(218.0).epsilon(0.02));
}

namespace {

TrackSet straight(int frames, std::vector<std::pair<double, double>> starts, double vx, double vy) {
  std::vector<Track> tracks;
  int label = 1;
  for (auto [x, y] : starts) {
    Track t{label++, {}};
    for (int k = 1; k <= frames; ++k) t.states[k] = {x + vx * (k - 1) / 25.0, vx, y + vy * (k - 1) / 25.0, vy};
    tracks.push_back(t);
  }
  return TrackSet(frames, tracks);
}

double rmse(const Track& truth, const Track& est) {
  double s = 0.0;
  int n = 0;
  for (const auto& [k, e] : est.states) {
    const auto& x = truth.states.at(k);
    s += (e.x - x.x) * (e.x - x.x) + (e.y - x.y) * (e.y - x.y);
    ++n;
  }
  return std::sqrt(s / n);
}

}  // namespace

TEST_CASE("multi-Bernoulli trackers on small scenes") {
  for (auto alg : {Algorithm::kImpreciseBernoulli, Algorithm::kGaussianBernoulli}) {
    TrackerConfig cfg;
    cfg.algorithm = alg;
    CAPTURE(to_string(alg));

    SUBCASE("empty scene") {
      DetectionSeries empty(30);
      CHECK(run_tracker(empty, SensorModel::head(), SensorModel::body(), cfg).empty());
    }
    SUBCASE("one target, perfect detection") {
      auto truth = straight(20, {{400, 300}}, 40, 10);
      auto det = convert_body_detections(simulate_detections(truth, quiet(1.0), quiet(1.0), 12, 1));
      auto est = run_tracker(det, quiet(1.0), quiet(1.0), cfg);
      REQUIRE(est.size() == 1);
      CHECK(rmse(truth.tracks()[0], est.tracks()[0]) < 5.0);
    }
    SUBCASE("two separated targets keep their labels") {
      auto truth = straight(50, {{300, 300}, {1200, 700}}, 30, -20);
      SensorModel h = quiet(0.9), b = quiet(0.9);
      h.center_jitter = 2.0;
      b.center_jitter = 5.0;
      auto det = convert_body_detections(simulate_detections(truth, h, b, 21, 1));
      auto est = run_tracker(det, h, b, cfg);
      REQUIRE(est.size() == 2);
      CHECK(ospat::testing::coverage(truth.tracks()[0], TrackSet(50, {est.tracks()[0]})) > 0.9);
      CHECK(ospat::testing::coverage(truth.tracks()[1], TrackSet(50, {est.tracks()[1]})) > 0.9);
    }
  }
}

TEST_CASE("tracker is deterministic for a seed") {
  auto sc = generate_scenario(ospat::testing::three_walkers(), 4);
  auto det = convert_body_detections(sc.detections);
  TrackerConfig cfg;
  cfg.algorithm = Algorithm::kImpreciseBernoulli;
  cfg.seed = 77;
  auto a = run_tracker_reports(det, SensorModel::head(), SensorModel::body(), cfg);
  auto b = run_tracker_reports(det, SensorModel::head(), SensorModel::body(), cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].frame == b[i].frame);
    CHECK(a[i].estimate == b[i].estimate);
  }
}

TEST_CASE("skipped frames are not missed detections") {
  // A confirmed track coasts through unsensed frames with only survival decay.
  auto truth = straight(12, {{500, 500}}, 20, 0);
  auto det = convert_body_detections(simulate_detections(truth, quiet(1.0), quiet(1.0), 5, 1));
  for (int k = 7; k <= 12; ++k) det[k - 1] = FrameDetections{{}, {}, false};
  TrackerConfig cfg;
  cfg.algorithm = Algorithm::kGaussianBernoulli;
  auto est = run_tracker(det, quiet(0.9), quiet(0.9), cfg);
  REQUIRE(est.size() == 1);
  CHECK(est.tracks()[0].states.count(12) == 1);
}
