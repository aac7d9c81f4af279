#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ospat/track_model.hpp"

namespace ospat {

inline constexpr int kHeadSensor = 1;
inline constexpr int kBodySensor = 2;

// Axis-aligned detection rectangle: upper-left corner (chi, eta), width and
// height in pixels. `sensor` is 1 for head detections, 2 for body detections
// (or head-like rectangles derived from them).
struct Rect {
  double chi = 0.0;
  double eta = 0.0;
  double w = 1.0;
  double h = 1.0;
  int sensor = kHeadSensor;

  double center_x() const { return chi + 0.5 * w; }
  double center_y() const { return eta + 0.5 * h; }
  bool operator==(const Rect&) const = default;
};

struct Region {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1920.0;
  double y1 = 1080.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

struct PointMeasurement {
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
};

// Detection statistics of one sensor, plus the knobs the detection simulator
// uses to synthesise rectangles.
struct SensorModel {
  double pd = 0.58;
  double sigma_x = 1.0;  // interval-softening std dev of the imprecise likelihood
  double sigma_y = 1.0;
  double clutter_rate = 2.0;  // expected false alarms per frame
  Region clutter_region;
  // Optional spatial clutter density over the image (must integrate to 1 over
  // clutter_region). Uniform when empty. A learned clutter map plugs in here.
  std::function<double(double x, double y)> clutter_density;

  // Simulator: nominal head-rectangle size, relative uniform size jitter and
  // Gaussian centre jitter (pixels).
  double rect_w = 30.0;
  double rect_h = 36.0;
  double size_jitter = 0.1;
  double center_jitter = 0.0;

  // Clutter intensity (false alarms per frame per pixel^2) at (x, y).
  double clutter_intensity(double x, double y) const;

  // Throws InvalidInput on pd outside [0, 1], negative sigma or clutter rate,
  // or an empty clutter region.
  void validate() const;

  static SensorModel head();  // pd 0.58, sigma 1
  static SensorModel body();  // pd 0.52, sigma 25
};

// Head-like rectangle from a body rectangle:
//   chi' = chi + 0.325 w, eta' = eta + 0.09 h, w' = 0.35 w, h' = 0.19 h.
// The sensor index stays 2. Throws InvalidInput on a non-positive size or a
// rectangle that is not a body detection.
Rect body_to_head(const Rect& body);

// Inverse of body_to_head; the simulator uses it to emit body rectangles.
Rect head_to_body(const Rect& head);

// Centre of the rectangle with covariance diag((w/6)^2, (h/6)^2).
PointMeasurement rect_to_point(const Rect& r);

// Probability that the rectangle bounds the position of `x`, with the bounds
// softened per axis by N(0, sigma^2):
//   prod_axis [Phi((pos - lower) / sigma) - Phi((pos - upper) / sigma)]
// At sigma = 0 an axis contributes the indicator lower <= pos <= upper.
double likelihood_imprecise(const Rect& r, const KinematicState& x, const SensorModel& sm);

// Bivariate normal density N(z; Hx, R), H selecting (x, y).
double likelihood_gaussian(const PointMeasurement& m, const KinematicState& x);

// Detections of one frame. `sensed` is false on frames the detectors did not
// run, which trackers must not treat as missed detections.
struct FrameDetections {
  std::vector<Rect> head;
  std::vector<Rect> body;
  bool sensed = true;

  bool operator==(const FrameDetections&) const = default;
};

// Index k-1 holds frame k.
using DetectionSeries = std::vector<FrameDetections>;

// Marks frames 1, 1 + n, 1 + 2n, ... as sensed and clears every other frame.
void apply_detection_frequency(DetectionSeries& series, int every_nth);

// Synthetic detections for `truth`. On sensed frames (k = 1 mod every_nth)
// each alive target is detected by sensor i with probability pd_i, with a
// jittered rectangle centred on its position (body detections are emitted
// as body rectangles whose head-like conversion is centred on the target),
// and Poisson(clutter_rate) uniform clutter rectangles are added per sensor.
// Deterministic for a given seed. Throws InvalidInput if every_nth < 1.
DetectionSeries simulate_detections(const TrackSet& truth, const SensorModel& head, const SensorModel& body,
                                    std::uint64_t seed, int every_nth);

}  // namespace ospat
