#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ospat/detection.hpp"
#include "ospat/motion.hpp"

namespace ospat {

struct GaussianComponent {
  int label = 0;
  double weight = 0.0;
  Gaussian density;
  bool confirmed = false;  // weight has exceeded the confirmation threshold
};

// A group of components that interact through shared measurements, with its
// own cardinality distribution over 0..n_max.
struct CphdCluster {
  std::vector<GaussianComponent> components;
  std::vector<double> cardinality;

  double mass() const;
};

struct CphdConfig {
  double survival_prob = 0.99;
  double birth_weight = 0.1;
  double prune_threshold = 1e-3;
  double merge_threshold = 4.0;  // squared Mahalanobis distance
  double confirm_threshold = 0.5;  // once a component's weight exceeds this, it is never merged away
  double gate = 13.8;
  double cluster_radius = 60.0;  // px; components of one cluster this close stay together
  double birth_velocity_sigma = 60.0;
  int n_max = 20;
  double min_clutter_intensity = 1e-15;
};

// Cardinality part of the CPHD update with Poisson clutter.
//
// Inputs: predicted cardinality p(n), detection probability, predicted mass
// <1, w>, clutter rate of the region, and per measurement
//   xi(z) = (clutter_rate / kappa(z)) * pd * <w, g_z>.
// With e_j the elementary symmetric functions of xi and P^n_j = n!/(n-j)!,
//   Y^u[Z](n) = sum_j lambda^(|Z|-j) P^n_(j+u) (1-pd)^(n-j-u) / mass^(j+u) e_j(xi(Z))
// (the common factor exp(-lambda) is dropped). Returns the posterior
// cardinality Y^0 p / <Y^0, p> and the intensity scale factors
//   missed = <Y^1[Z], p> / <Y^0[Z], p>,  detected[z] = <Y^1[Z \ z], p> / <Y^0[Z], p>.
struct CardinalityUpdate {
  std::vector<double> posterior;
  double missed_scale = 0.0;
  std::vector<double> detected_scale;
};

CardinalityUpdate cphd_cardinality_update(std::span<const double> predicted, double pd, double mass,
                                          std::span<const double> xi, double clutter_rate);

// Survival thinning of a cardinality distribution (binomial, probability ps).
std::vector<double> predict_cardinality(std::span<const double> card, double survival_prob);

// Distribution of the sum of independent counts, truncated to n_max and
// renormalised.
std::vector<double> convolve_cardinality(std::span<const double> a, std::span<const double> b, int n_max);

// Distribution of the number of successes of independent Bernoulli trials.
std::vector<double> poisson_binomial(std::span<const double> probs, int n_max);

// Point estimate reported by the CPHD tracker.
struct CphdReport {
  LabeledState state;
  double weight = 0.0;
};

// One frame of the clustered CPHD tracker:
//  predict components and cardinalities; then for the head and body sensor in
//  turn: gate, re-cluster (components sharing a gated measurement join one
//  cluster), run the CPHD update per cluster, associate each component with
//  at most one measurement via solve_assignment on negative-log association
//  weights, update components with their assigned measurement, and create
//  births from measurements no component gates; finally prune, merge
//  unconfirmed duplicates into heavier neighbours and cap
//  at n_max components per cluster.
// Body rectangles must already be head-like.
std::vector<CphdCluster> cphd_step(std::vector<CphdCluster> clusters, const FrameDetections& detections,
                                   const SensorModel& head, const SensorModel& body, const MotionModel& mm,
                                   const CphdConfig& cfg, int& next_label);

// Per cluster, the n heaviest components with n the mode of the cluster's
// cardinality distribution. Ascending label.
std::vector<CphdReport> cphd_reports(const std::vector<CphdCluster>& clusters);

// Cardinality distribution of the whole scene (clusters are independent).
std::vector<double> scene_cardinality(const std::vector<CphdCluster>& clusters, int n_max);

class CphdTracker {
 public:
  CphdTracker(SensorModel head, SensorModel body, MotionModel motion, CphdConfig config);

  std::vector<LabeledState> step(const FrameDetections& detections);

  const std::vector<CphdCluster>& clusters() const noexcept { return clusters_; }

 private:
  SensorModel head_;
  SensorModel body_;
  MotionModel motion_;
  CphdConfig config_;
  std::vector<CphdCluster> clusters_;
  int next_label_ = 1;
};

}  // namespace ospat
