#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "ospat/detection.hpp"
#include "ospat/motion.hpp"

namespace ospat {

enum class LikelihoodMode {
  kImprecise,  // rectangle as an imprecise measurement, particle posterior
  kGaussian,   // rectangle centre as a point measurement, Gaussian posterior
};

struct ParticleCloud {
  std::vector<StateVector> particles;
  std::vector<double> weights;  // sums to 1

  Gaussian moments() const;
};

using SingleTargetDensity = std::variant<Gaussian, ParticleCloud>;

// Single-target Bernoulli filter: existence probability plus state density.
struct BernoulliTrack {
  int label = 0;
  double existence = 0.0;
  SingleTargetDensity posterior;

  Gaussian moments() const;
  KinematicState estimate() const { return to_state(moments().mean); }
};

struct BernoulliConfig {
  double survival_prob = 0.99;
  double birth_existence = 0.1;
  double prune_threshold = 0.01;
  double report_threshold = 0.5;
  int particles = 500;
  double gate = 13.8;                // chi-square (2 dof) gate on the squared Mahalanobis distance
  double birth_velocity_sigma = 60.0;  // px/s
  double merge_distance = 1.0;       // squared Mahalanobis distance below which duplicates are merged
  double min_clutter_intensity = 1e-15;
};

using Rng = std::mt19937_64;

// Existence <- survival_prob * existence; the density is propagated through
// the motion model (particles sample the process noise from `rng`).
BernoulliTrack predict_bernoulli(BernoulliTrack t, const MotionModel& mm, double survival_prob, Rng& rng);

// Predicted likelihood of a detection for the track, in density units
// (per px^2). Imprecise likelihoods are divided by the rectangle area so that
// they compare against the clutter intensity like a point density.
double detection_likelihood(const BernoulliTrack& t, const Rect& r, const SensorModel& sm, LikelihoodMode mode);

// True if the rectangle centre falls inside the track's validation gate.
bool gates(const BernoulliTrack& t, const Rect& r, const SensorModel& sm, LikelihoodMode mode, double gate);

// Bernoulli update with the detections of one sensor:
//   delta = pd (1 - sum_z L(z) / kappa(z))
//   existence' = (1 - delta) e / (1 - delta e)
//   density' ~ [(1 - pd) + pd sum_z g(z|x) / kappa(z)] density
// Only gated detections with a positive likelihood take part. `extra_clutter`
// (one entry per detection, or empty) is added to the sensor's clutter
// intensity; multi_bernoulli_step fills it with the predicted detection
// intensity of the other tracks. Particle clouds are resampled from `rng`
// when the effective sample size drops below half, then regularised with a
// Gaussian kernel so duplicates do not collapse under low process noise.
BernoulliTrack update_bernoulli(BernoulliTrack t, std::span<const Rect> detections, const SensorModel& sm,
                                LikelihoodMode mode, const BernoulliConfig& cfg, Rng& rng,
                                std::span<const double> extra_clutter = {});

// New track for a detection that no existing track explains: zero velocity
// with birth_velocity_sigma spread, position from the rectangle.
BernoulliTrack birth_bernoulli(int label, const Rect& r, const SensorModel& sm, LikelihoodMode mode,
                               const BernoulliConfig& cfg, Rng& rng);

// Bank of independent Bernoulli filters with sequential head-then-body
// updates, measurement-driven birth and existence-based pruning.
class MultiBernoulliTracker {
 public:
  MultiBernoulliTracker(LikelihoodMode mode, SensorModel head, SensorModel body, MotionModel motion,
                        BernoulliConfig config, std::uint64_t seed);

  // Processes frame `frame`. Body rectangles must already be head-like.
  // Returns the labeled estimates of tracks whose existence exceeds the
  // report threshold.
  std::vector<LabeledState> step(const FrameDetections& detections);

  const std::vector<BernoulliTrack>& tracks() const noexcept { return tracks_; }

 private:
  LikelihoodMode mode_;
  SensorModel head_;
  SensorModel body_;
  MotionModel motion_;
  BernoulliConfig config_;
  Rng rng_;
  std::vector<BernoulliTrack> tracks_;
  int next_label_ = 1;
};

// One tracker step on an explicit track list.
std::vector<BernoulliTrack> multi_bernoulli_step(std::vector<BernoulliTrack> tracks, const FrameDetections& detections,
                                                 const SensorModel& head, const SensorModel& body,
                                                 const MotionModel& mm, const BernoulliConfig& cfg,
                                                 LikelihoodMode mode, int& next_label, Rng& rng);

}  // namespace ospat
