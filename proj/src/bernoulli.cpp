#include "ospat/bernoulli.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ospat/errors.hpp"

namespace ospat {

Gaussian ParticleCloud::moments() const {
  Gaussian g;
  g.mean.setZero();
  for (std::size_t i = 0; i < particles.size(); ++i) g.mean += weights[i] * particles[i];
  g.cov.setZero();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const StateVector d = particles[i] - g.mean;
    g.cov += weights[i] * d * d.transpose();
  }
  return g;
}

Gaussian BernoulliTrack::moments() const {
  return std::visit(
      [](const auto& d) -> Gaussian {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Gaussian>)
          return d;
        else
          return d.moments();
      },
      posterior);
}

namespace {

// Point-measurement covariance used by the Gaussian machinery. In imprecise
// mode the rectangle is treated as a uniform region softened by sigma.
Eigen::Matrix2d measurement_cov(const Rect& r, const SensorModel& sm, LikelihoodMode mode) {
  if (mode == LikelihoodMode::kGaussian) return rect_to_point(r).R;
  return Eigen::Vector2d(r.w * r.w / 12.0 + sm.sigma_x * sm.sigma_x, r.h * r.h / 12.0 + sm.sigma_y * sm.sigma_y)
      .asDiagonal();
}

Eigen::Vector2d center(const Rect& r) { return {r.center_x(), r.center_y()}; }

// Single-target likelihood in density units.
double point_likelihood(const Rect& r, const KinematicState& x, const SensorModel& sm, LikelihoodMode mode) {
  if (mode == LikelihoodMode::kGaussian) return likelihood_gaussian(rect_to_point(r), x);
  return likelihood_imprecise(r, x, sm) / (r.w * r.h);
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double clutter_at(const Rect& r, const SensorModel& sm, const BernoulliConfig& cfg, double extra) {
  return std::max(cfg.min_clutter_intensity, sm.clutter_intensity(r.center_x(), r.center_y()) + extra);
}

void systematic_resample(ParticleCloud& pc, Rng& rng) {
  const std::size_t n = pc.particles.size();
  std::vector<StateVector> out;
  out.reserve(n);
  const double step = 1.0 / static_cast<double>(n);
  double u = std::uniform_real_distribution<double>(0.0, step)(rng);
  double cum = pc.weights[0];
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (u > cum && i + 1 < n) cum += pc.weights[++i];
    out.push_back(pc.particles[i]);
    u += step;
  }
  pc.particles = std::move(out);
  pc.weights.assign(n, step);
}

// Regularisation after resampling with a shrinkage kernel (Liu and West):
// particles move towards the mean by sqrt(1 - h^2) and receive Gaussian jitter
// of covariance h^2 cov, which keeps the cloud's mean and covariance. h is the
// optimal Gaussian-kernel bandwidth in 4 dimensions.
void regularise(ParticleCloud& pc, const Gaussian& before, Rng& rng) {
  const double n = static_cast<double>(pc.particles.size());
  const double h = std::pow(4.0 / (n * 6.0), 1.0 / 8.0);
  const double a = std::sqrt(1.0 - h * h);
  Eigen::LLT<StateMatrix> llt(before.cov + 1e-9 * StateMatrix::Identity());
  if (llt.info() != Eigen::Success) return;
  const StateMatrix l = h * llt.matrixL().toDenseMatrix();
  std::normal_distribution<double> n01;
  for (auto& p : pc.particles)
    p = a * p + (1.0 - a) * before.mean + l * StateVector(n01(rng), n01(rng), n01(rng), n01(rng));
}

}  // namespace

BernoulliTrack predict_bernoulli(BernoulliTrack t, const MotionModel& mm, double survival_prob, Rng& rng) {
  if (!(survival_prob >= 0.0 && survival_prob <= 1.0)) throw InvalidInput("survival_prob must lie in [0, 1]");
  t.existence *= survival_prob;
  if (auto* g = std::get_if<Gaussian>(&t.posterior)) {
    *g = kalman_predict(*g, mm);
    return t;
  }
  auto& pc = std::get<ParticleCloud>(t.posterior);
  const StateMatrix f = mm.transition();
  const StateMatrix q = mm.process_noise();
  const bool noisy = mm.process_noise_intensity > 0.0;
  const StateMatrix chol = noisy ? StateMatrix(q.llt().matrixL()) : StateMatrix::Zero();
  std::normal_distribution<double> n01;
  for (StateVector& p : pc.particles) {
    p = f * p;
    if (noisy) p += chol * StateVector(n01(rng), n01(rng), n01(rng), n01(rng));
  }
  return t;
}

double detection_likelihood(const BernoulliTrack& t, const Rect& r, const SensorModel& sm, LikelihoodMode mode) {
  if (const auto* pc = std::get_if<ParticleCloud>(&t.posterior)) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pc->particles.size(); ++i)
      sum += pc->weights[i] * point_likelihood(r, to_state(pc->particles[i]), sm, mode);
    return sum;
  }
  const auto& g = std::get<Gaussian>(t.posterior);
  if (mode == LikelihoodMode::kGaussian) {
    const auto h = position_selector();
    PointMeasurement m = rect_to_point(r);
    m.R += h * g.cov * h.transpose();
    return likelihood_gaussian(m, to_state(g.mean));
  }
  // Box probability under the Gaussian, sigma widened by the state spread.
  const double sx = std::sqrt(sm.sigma_x * sm.sigma_x + g.cov(0, 0));
  const double sy = std::sqrt(sm.sigma_y * sm.sigma_y + g.cov(2, 2));
  auto axis = [](double pos, double lo, double hi, double s) {
    if (s == 0.0) return (pos >= lo && pos <= hi) ? 1.0 : 0.0;
    return normal_cdf((pos - lo) / s) - normal_cdf((pos - hi) / s);
  };
  return axis(g.mean(0), r.chi, r.chi + r.w, sx) * axis(g.mean(2), r.eta, r.eta + r.h, sy) / (r.w * r.h);
}

bool gates(const BernoulliTrack& t, const Rect& r, const SensorModel& sm, LikelihoodMode mode, double gate) {
  return mahalanobis2(t.moments(), center(r), measurement_cov(r, sm, mode)) <= gate;
}

BernoulliTrack update_bernoulli(BernoulliTrack t, std::span<const Rect> detections, const SensorModel& sm,
                                LikelihoodMode mode, const BernoulliConfig& cfg, Rng& rng,
                                std::span<const double> extra_clutter) {
  if (!extra_clutter.empty() && extra_clutter.size() != detections.size())
    throw InvalidInput("extra_clutter must have one entry per detection");

  // Gated detections with their likelihood ratio L(z) / kappa(z).
  std::vector<std::size_t> used;
  std::vector<double> kappa;
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Rect& r = detections[i];
    if (!gates(t, r, sm, mode, cfg.gate)) continue;
    const double l = detection_likelihood(t, r, sm, mode);
    if (!(l > 0.0)) continue;
    const double k = clutter_at(r, sm, cfg, extra_clutter.empty() ? 0.0 : extra_clutter[i]);
    used.push_back(i);
    kappa.push_back(k);
    ratio_sum += l / k;
  }

  const double pd = sm.pd;
  const double delta = pd * (1.0 - ratio_sum);
  const double denom = 1.0 - delta * t.existence;
  t.existence = denom > 0.0 ? std::clamp((1.0 - delta) * t.existence / denom, 0.0, 1.0) : 0.0;

  if (auto* g = std::get_if<Gaussian>(&t.posterior)) {
    // Mixture of the missed-detection hypothesis and one Kalman update per
    // detection, collapsed to a single Gaussian.
    std::vector<double> weights{1.0 - pd};
    std::vector<Gaussian> comps{*g};
    for (std::size_t j = 0; j < used.size(); ++j) {
      const Rect& r = detections[used[j]];
      const KalmanUpdate ku = kalman_update(*g, center(r), measurement_cov(r, sm, mode));
      weights.push_back(pd * detection_likelihood(t, r, sm, mode) / kappa[j]);
      comps.push_back(ku.posterior);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return t;
    Gaussian merged;
    merged.mean.setZero();
    for (std::size_t j = 0; j < comps.size(); ++j) merged.mean += (weights[j] / total) * comps[j].mean;
    merged.cov.setZero();
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const StateVector d = comps[j].mean - merged.mean;
      merged.cov += (weights[j] / total) * (comps[j].cov + d * d.transpose());
    }
    *g = merged;
    return t;
  }

  auto& pc = std::get<ParticleCloud>(t.posterior);
  std::vector<double> w(pc.weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pc.particles.size(); ++i) {
    const KinematicState x = to_state(pc.particles[i]);
    double factor = 1.0 - pd;
    for (std::size_t j = 0; j < used.size(); ++j)
      factor += pd * point_likelihood(detections[used[j]], x, sm, mode) / kappa[j];
    w[i] = pc.weights[i] * factor;
    total += w[i];
  }
  if (!(total > 0.0)) return t;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    pc.weights[i] = w[i] / total;
    sum_sq += pc.weights[i] * pc.weights[i];
  }
  if (1.0 / sum_sq < 0.5 * static_cast<double>(pc.particles.size())) {
    const Gaussian before = pc.moments();
    systematic_resample(pc, rng);
    regularise(pc, before, rng);
  }
  return t;
}

BernoulliTrack birth_bernoulli(int label, const Rect& r, const SensorModel& sm, LikelihoodMode mode,
                               const BernoulliConfig& cfg, Rng& rng) {
  BernoulliTrack t;
  t.label = label;
  t.existence = cfg.birth_existence;
  const double sv = cfg.birth_velocity_sigma;
  if (mode == LikelihoodMode::kGaussian) {
    const Eigen::Matrix2d R = measurement_cov(r, sm, mode);
    Gaussian g;
    g.mean = StateVector(r.center_x(), 0.0, r.center_y(), 0.0);
    g.cov = StateVector(R(0, 0), sv * sv, R(1, 1), sv * sv).asDiagonal();
    t.posterior = g;
    return t;
  }
  ParticleCloud pc;
  const auto n = static_cast<std::size_t>(std::max(1, cfg.particles));
  std::uniform_real_distribution<double> ux(r.chi, r.chi + r.w), uy(r.eta, r.eta + r.h);
  std::normal_distribution<double> n01;
  pc.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng) + sm.sigma_x * n01(rng);
    const double y = uy(rng) + sm.sigma_y * n01(rng);
    pc.particles.emplace_back(x, sv * n01(rng), y, sv * n01(rng));
  }
  pc.weights.assign(n, 1.0 / static_cast<double>(n));
  t.posterior = std::move(pc);
  return t;
}

namespace {

void update_bank(std::vector<BernoulliTrack>& tracks, std::span<const Rect> dets, const SensorModel& sm,
                 LikelihoodMode mode, const BernoulliConfig& cfg, int& next_label, Rng& rng) {
  const std::size_t nt = tracks.size();
  const std::size_t nz = dets.size();

  // likelihood[t][z], zero outside the gate.
  std::vector<std::vector<double>> like(nt, std::vector<double>(nz, 0.0));
  std::vector<char> explained(nz, 0);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t z = 0; z < nz; ++z)
      if (gates(tracks[t], dets[z], sm, mode, cfg.gate)) {
        like[t][z] = detection_likelihood(tracks[t], dets[z], sm, mode);
        explained[z] = 1;
      }

  // Interactions: each track sees the other tracks' predicted detection
  // intensity e_j * pd * L_j(z) as additional clutter.
  std::vector<double> total(nz, 0.0);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t z = 0; z < nz; ++z) total[z] += tracks[t].existence * sm.pd * like[t][z];

  std::vector<BernoulliTrack> updated;
  updated.reserve(nt);
  std::vector<double> extra(nz);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t z = 0; z < nz; ++z)
      extra[z] = std::max(0.0, total[z] - tracks[t].existence * sm.pd * like[t][z]);
    updated.push_back(update_bernoulli(tracks[t], dets, sm, mode, cfg, rng, extra));
  }

  // Birth from detections no track explains, skipping those explained by a
  // birth made earlier in this pass.
  for (std::size_t z = 0; z < nz; ++z) {
    if (explained[z]) continue;
    bool duplicate = false;
    for (std::size_t b = nt; b < updated.size() && !duplicate; ++b)
      duplicate = gates(updated[b], dets[z], sm, mode, cfg.gate);
    if (!duplicate) updated.push_back(birth_bernoulli(next_label++, dets[z], sm, mode, cfg, rng));
  }
  tracks = std::move(updated);
}

void prune_and_merge(std::vector<BernoulliTrack>& tracks, const BernoulliConfig& cfg) {
  std::erase_if(tracks, [&](const BernoulliTrack& t) { return t.existence < cfg.prune_threshold; });
  const auto h = position_selector();
  std::vector<Gaussian> m;
  m.reserve(tracks.size());
  for (const auto& t : tracks) m.push_back(t.moments());
  std::vector<char> dead(tracks.size(), 0);
  for (std::size_t i = 0; i < tracks.size(); ++i)
    for (std::size_t j = i + 1; j < tracks.size(); ++j) {
      if (dead[i] || dead[j]) continue;
      const Eigen::Vector2d d = h * (m[i].mean - m[j].mean);
      const Eigen::Matrix2d s = h * (m[i].cov + m[j].cov) * h.transpose();
      if (d.dot(s.ldlt().solve(d)) >= cfg.merge_distance) continue;
      // Keep the more certain track; older label wins ties.
      if (tracks[j].existence > tracks[i].existence)
        dead[i] = 1;
      else
        dead[j] = 1;
    }
  std::vector<BernoulliTrack> kept;
  for (std::size_t i = 0; i < tracks.size(); ++i)
    if (!dead[i]) kept.push_back(std::move(tracks[i]));
  tracks = std::move(kept);
}

}  // namespace

std::vector<BernoulliTrack> multi_bernoulli_step(std::vector<BernoulliTrack> tracks, const FrameDetections& detections,
                                                 const SensorModel& head, const SensorModel& body,
                                                 const MotionModel& mm, const BernoulliConfig& cfg,
                                                 LikelihoodMode mode, int& next_label, Rng& rng) {
  for (auto& t : tracks) t = predict_bernoulli(std::move(t), mm, cfg.survival_prob, rng);
  if (detections.sensed) {
    update_bank(tracks, detections.head, head, mode, cfg, next_label, rng);
    update_bank(tracks, detections.body, body, mode, cfg, next_label, rng);
  }
  prune_and_merge(tracks, cfg);
  return tracks;
}

MultiBernoulliTracker::MultiBernoulliTracker(LikelihoodMode mode, SensorModel head, SensorModel body,
                                             MotionModel motion, BernoulliConfig config, std::uint64_t seed)
    : mode_(mode),
      head_(std::move(head)),
      body_(std::move(body)),
      motion_(motion),
      config_(config),
      rng_(seed) {
  head_.validate();
  body_.validate();
  motion_.validate();
}

std::vector<LabeledState> MultiBernoulliTracker::step(const FrameDetections& detections) {
  tracks_ = multi_bernoulli_step(std::move(tracks_), detections, head_, body_, motion_, config_, mode_, next_label_, rng_);
  std::vector<LabeledState> out;
  for (const auto& t : tracks_)
    if (t.existence > config_.report_threshold) out.push_back({t.label, t.estimate()});
  return out;
}

}  // namespace ospat
