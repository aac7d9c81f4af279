#include "ospat/detection.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "ospat/errors.hpp"

namespace ospat {

double SensorModel::clutter_intensity(double x, double y) const {
  if (clutter_density) return clutter_rate * clutter_density(x, y);
  return clutter_region.contains(x, y) ? clutter_rate / clutter_region.area() : 0.0;
}

void SensorModel::validate() const {
  if (!(pd >= 0.0 && pd <= 1.0)) throw InvalidInput("pd must lie in [0, 1]");
  if (!(sigma_x >= 0.0) || !(sigma_y >= 0.0)) throw InvalidInput("sigma must be >= 0");
  if (!(clutter_rate >= 0.0)) throw InvalidInput("clutter_rate must be >= 0");
  if (!(clutter_region.area() > 0.0)) throw InvalidInput("clutter_region must have positive area");
  if (!(rect_w > 0.0) || !(rect_h > 0.0)) throw InvalidInput("nominal rectangle size must be positive");
  if (!(size_jitter >= 0.0 && size_jitter < 1.0) || !(center_jitter >= 0.0))
    throw InvalidInput("jitter must be non-negative (size jitter < 1)");
}

SensorModel SensorModel::head() {
  SensorModel sm;
  sm.pd = 0.58;
  sm.sigma_x = sm.sigma_y = 1.0;
  sm.clutter_rate = 2.0;
  sm.center_jitter = 2.0;
  return sm;
}

SensorModel SensorModel::body() {
  SensorModel sm;
  sm.pd = 0.52;
  sm.sigma_x = sm.sigma_y = 25.0;
  sm.clutter_rate = 1.0;
  sm.center_jitter = 5.0;
  return sm;
}

Rect body_to_head(const Rect& body) {
  if (!(body.w > 0.0) || !(body.h > 0.0)) throw InvalidInput("rectangle width and height must be positive");
  if (body.sensor != kBodySensor) throw InvalidInput("body_to_head expects a body (sensor 2) rectangle");
  return {body.chi + 0.325 * body.w, body.eta + 0.09 * body.h, 0.35 * body.w, 0.19 * body.h, kBodySensor};
}

Rect head_to_body(const Rect& head) {
  if (!(head.w > 0.0) || !(head.h > 0.0)) throw InvalidInput("rectangle width and height must be positive");
  const double w = head.w / 0.35;
  const double h = head.h / 0.19;
  return {head.chi - 0.325 * w, head.eta - 0.09 * h, w, h, kBodySensor};
}

PointMeasurement rect_to_point(const Rect& r) {
  PointMeasurement m;
  m.z = {r.chi + r.w / 2.0, r.eta + r.h / 2.0};
  m.R = Eigen::Vector2d(std::pow(r.w / 6.0, 2), std::pow(r.h / 6.0, 2)).asDiagonal();
  return m;
}

namespace {

// Phi(a) - Phi(b) for a >= b, evaluated on the tail that keeps precision.
double normal_cdf_difference(double a, double b) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  if (b >= 0.0) return 0.5 * (std::erfc(b * kInvSqrt2) - std::erfc(a * kInvSqrt2));
  if (a <= 0.0) return 0.5 * (std::erfc(-a * kInvSqrt2) - std::erfc(-b * kInvSqrt2));
  return 1.0 - 0.5 * (std::erfc(a * kInvSqrt2) + std::erfc(-b * kInvSqrt2));
}

double interval_factor(double pos, double lower, double upper, double sigma) {
  if (sigma == 0.0) return (pos >= lower && pos <= upper) ? 1.0 : 0.0;
  return normal_cdf_difference((pos - lower) / sigma, (pos - upper) / sigma);
}

}  // namespace

double likelihood_imprecise(const Rect& r, const KinematicState& x, const SensorModel& sm) {
  return interval_factor(x.x, r.chi, r.chi + r.w, sm.sigma_x) * interval_factor(x.y, r.eta, r.eta + r.h, sm.sigma_y);
}

double likelihood_gaussian(const PointMeasurement& m, const KinematicState& x) {
  const Eigen::Vector2d d = m.z - Eigen::Vector2d(x.x, x.y);
  const double det = m.R.determinant();
  const double maha = d.dot(m.R.inverse() * d);
  return std::exp(-0.5 * maha) / (2.0 * std::numbers::pi * std::sqrt(det));
}

void apply_detection_frequency(DetectionSeries& series, int every_nth) {
  if (every_nth < 1) throw InvalidInput("every_nth must be >= 1");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i % static_cast<std::size_t>(every_nth) == 0) continue;
    series[i] = FrameDetections{{}, {}, false};
  }
}

namespace {

class RectSynth {
 public:
  explicit RectSynth(std::uint64_t seed) : rng_(seed) {}

  bool bernoulli(double p) { return std::bernoulli_distribution(p)(rng_); }
  int poisson(double rate) { return rate > 0.0 ? std::poisson_distribution<int>(rate)(rng_) : 0; }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double normal(double sigma) { return sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(rng_) : 0.0; }

  // Rectangle in the sensor's native frame whose head-like centre is (cx, cy).
  Rect make(double cx, double cy, const SensorModel& sm, int sensor) {
    const double j = sm.size_jitter;
    const double w = sm.rect_w * (j > 0.0 ? uniform(1.0 - j, 1.0 + j) : 1.0);
    const double h = sm.rect_h * (j > 0.0 ? uniform(1.0 - j, 1.0 + j) : 1.0);
    const Rect head{cx - w / 2.0, cy - h / 2.0, w, h, sensor};
    return sensor == kBodySensor ? head_to_body(head) : head;
  }

 private:
  std::mt19937_64 rng_;
};

void emit_sensor(RectSynth& synth, const std::vector<LabeledState>& alive, const SensorModel& sm, int sensor,
                 std::vector<Rect>& out) {
  for (const LabeledState& t : alive) {
    if (!synth.bernoulli(sm.pd)) continue;
    const double cx = t.state.x + synth.normal(sm.center_jitter);
    const double cy = t.state.y + synth.normal(sm.center_jitter);
    out.push_back(synth.make(cx, cy, sm, sensor));
  }
  const int clutter = synth.poisson(sm.clutter_rate);
  const Region& g = sm.clutter_region;
  for (int i = 0; i < clutter; ++i) {
    const double cx = synth.uniform(g.x0, g.x1);
    const double cy = synth.uniform(g.y0, g.y1);
    out.push_back(synth.make(cx, cy, sm, sensor));
  }
}

}  // namespace

DetectionSeries simulate_detections(const TrackSet& truth, const SensorModel& head, const SensorModel& body,
                                    std::uint64_t seed, int every_nth) {
  if (every_nth < 1) throw InvalidInput("every_nth must be >= 1");
  head.validate();
  body.validate();
  RectSynth synth(seed);
  DetectionSeries series(static_cast<std::size_t>(truth.frame_count()));
  for (int k = 1; k <= truth.frame_count(); ++k) {
    FrameDetections& f = series[static_cast<std::size_t>(k - 1)];
    f.sensed = (k - 1) % every_nth == 0;
    if (!f.sensed) continue;
    const auto alive = labeled_set_at_frame(truth, k);
    emit_sensor(synth, alive, head, kHeadSensor, f.head);
    emit_sensor(synth, alive, body, kBodySensor, f.body);
  }
  return series;
}

}  // namespace ospat
