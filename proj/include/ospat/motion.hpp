#pragma once

#include <Eigen/Core>

#include "ospat/track_model.hpp"

namespace ospat {

using StateVector = Eigen::Vector4d;  // [x, vx, y, vy]
using StateMatrix = Eigen::Matrix4d;

// Near-constant-velocity dynamics with white-noise acceleration, applied
// independently on x and y. The default intensity lets a walking pedestrian
// change velocity by about 50 px/s within one second.
struct MotionModel {
  double dt = 1.0 / 25.0;
  double process_noise_intensity = 2500.0;  // px^2 / s^3

  StateMatrix transition() const;
  StateMatrix process_noise() const;

  // Throws InvalidInput unless dt > 0 and the intensity is >= 0.
  void validate() const;
};

inline StateVector to_vector(const KinematicState& s) { return {s.x, s.vx, s.y, s.vy}; }
inline KinematicState to_state(const StateVector& v) { return {v(0), v(1), v(2), v(3)}; }

// Position rows of the state: H = [1 0 0 0; 0 0 1 0].
Eigen::Matrix<double, 2, 4> position_selector();

struct Gaussian {
  StateVector mean = StateVector::Zero();
  StateMatrix cov = StateMatrix::Identity();
};

Gaussian kalman_predict(const Gaussian& g, const MotionModel& mm);

struct KalmanUpdate {
  Gaussian posterior;
  Eigen::Vector2d innovation;
  Eigen::Matrix2d innovation_cov;
};

KalmanUpdate kalman_update(const Gaussian& g, const Eigen::Vector2d& z, const Eigen::Matrix2d& R);

// Squared Mahalanobis distance of z from the predicted measurement of g.
double mahalanobis2(const Gaussian& g, const Eigen::Vector2d& z, const Eigen::Matrix2d& R);

}  // namespace ospat
