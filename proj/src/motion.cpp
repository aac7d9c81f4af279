#include "ospat/motion.hpp"

#include <Eigen/Dense>

#include "ospat/errors.hpp"

namespace ospat {

StateMatrix MotionModel::transition() const {
  StateMatrix f = StateMatrix::Identity();
  f(0, 1) = dt;
  f(2, 3) = dt;
  return f;
}

StateMatrix MotionModel::process_noise() const {
  const double q = process_noise_intensity;
  Eigen::Matrix2d block;
  block << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  StateMatrix out = StateMatrix::Zero();
  out.block<2, 2>(0, 0) = q * block;
  out.block<2, 2>(2, 2) = q * block;
  return out;
}

void MotionModel::validate() const {
  if (!(dt > 0.0)) throw InvalidInput("dt must be > 0");
  if (!(process_noise_intensity >= 0.0)) throw InvalidInput("process noise intensity must be >= 0");
}

Eigen::Matrix<double, 2, 4> position_selector() {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  return h;
}

Gaussian kalman_predict(const Gaussian& g, const MotionModel& mm) {
  const StateMatrix f = mm.transition();
  return {f * g.mean, f * g.cov * f.transpose() + mm.process_noise()};
}

KalmanUpdate kalman_update(const Gaussian& g, const Eigen::Vector2d& z, const Eigen::Matrix2d& R) {
  const auto h = position_selector();
  KalmanUpdate out;
  out.innovation = z - h * g.mean;
  out.innovation_cov = h * g.cov * h.transpose() + R;
  const Eigen::Matrix<double, 4, 2> gain = g.cov * h.transpose() * out.innovation_cov.inverse();
  out.posterior.mean = g.mean + gain * out.innovation;
  // Joseph form keeps the covariance symmetric positive semi-definite.
  const StateMatrix ikh = StateMatrix::Identity() - gain * h;
  out.posterior.cov = ikh * g.cov * ikh.transpose() + gain * R * gain.transpose();
  return out;
}

double mahalanobis2(const Gaussian& g, const Eigen::Vector2d& z, const Eigen::Matrix2d& R) {
  const auto h = position_selector();
  const Eigen::Vector2d d = z - h * g.mean;
  const Eigen::Matrix2d s = h * g.cov * h.transpose() + R;
  return d.dot(s.ldlt().solve(d));
}

}  // namespace ospat
