#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ospat/bernoulli.hpp"
#include "ospat/cphd.hpp"
#include "ospat/detection.hpp"
#include "ospat/motion.hpp"
#include "ospat/track_model.hpp"

namespace ospat {

enum class Algorithm : int {
  kImpreciseBernoulli = 1,  // multi-Bernoulli, rectangle likelihood, particles
  kGaussianBernoulli = 2,   // multi-Bernoulli, point likelihood, Gaussian
  kCphd = 3,                // clustered CPHD with assignment-based labeling
};

// Throws ConfigError unless n is 1, 2 or 3.
Algorithm algorithm_from_int(int n);
std::string to_string(Algorithm a);

struct TrackerConfig {
  Algorithm algorithm = Algorithm::kCphd;
  MotionModel motion;
  BernoulliConfig bernoulli;
  CphdConfig cphd;
  std::uint64_t seed = 1;
};

// One labeled estimate emitted at one frame.
struct TrackReport {
  int frame = 1;
  LabeledState estimate;
};

// Groups reports by label into tracks over frames 1..frame_count.
// Throws InvalidReport on a repeated (label, frame) pair and RangeError on a
// frame outside [1, frame_count].
TrackSet extract_tracks(const std::vector<TrackReport>& reports, int frame_count);

// Replaces every sensor-2 rectangle by its head-like conversion.
DetectionSeries convert_body_detections(const DetectionSeries& series);

// Runs the selected tracker over the series (body rectangles already
// head-like) and returns the reports of every frame.
std::vector<TrackReport> run_tracker_reports(const DetectionSeries& series, const SensorModel& head,
                                             const SensorModel& body, const TrackerConfig& cfg);

// run_tracker_reports followed by extract_tracks.
TrackSet run_tracker(const DetectionSeries& series, const SensorModel& head, const SensorModel& body,
                     const TrackerConfig& cfg);

}  // namespace ospat
