#include "ospat/cphd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "ospat/assignment.hpp"
#include "ospat/errors.hpp"

namespace ospat {

double CphdCluster::mass() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight;
  return m;
}

namespace {

// Elementary symmetric functions e_0..e_m of `xs`, optionally skipping one index.
std::vector<double> elementary_symmetric(std::span<const double> xs, std::size_t skip = static_cast<std::size_t>(-1)) {
  std::vector<double> e{1.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i == skip) continue;
    e.push_back(0.0);
    for (std::size_t j = e.size() - 1; j > 0; --j) e[j] += xs[i] * e[j - 1];
  }
  return e;
}

double falling_factorial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out *= static_cast<double>(n - i);
  return out;
}

// Y^u(n) for n = 0..n_max, given the ESF of a measurement set of size m.
std::vector<double> upsilon(std::size_t u, const std::vector<double>& esf, std::size_t n_max, double pd, double mass,
                            double clutter_rate) {
  const std::size_t m = esf.size() - 1;
  std::vector<double> out(n_max + 1, 0.0);
  for (std::size_t n = 0; n <= n_max; ++n) {
    double sum = 0.0;
    for (std::size_t j = 0; j <= std::min(m, n); ++j) {
      if (j + u > n) break;
      sum += std::pow(clutter_rate, static_cast<double>(m - j)) * falling_factorial(n, j + u) *
             std::pow(1.0 - pd, static_cast<double>(n - j - u)) / std::pow(mass, static_cast<double>(j + u)) * esf[j];
    }
    out[n] = sum;
  }
  return out;
}

double inner(const std::vector<double>& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalise(std::vector<double>& p) {
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  if (s > 0.0)
    for (double& x : p) x /= s;
}

}  // namespace

CardinalityUpdate cphd_cardinality_update(std::span<const double> predicted, double pd, double mass,
                                          std::span<const double> xi, double clutter_rate) {
  if (predicted.empty()) throw InvalidInput("cardinality distribution must not be empty");
  if (!(mass > 0.0)) throw InvalidInput("predicted mass must be positive");
  const std::size_t n_max = predicted.size() - 1;

  const std::vector<double> esf = elementary_symmetric(xi);
  const std::vector<double> y0 = upsilon(0, esf, n_max, pd, mass, clutter_rate);
  const std::vector<double> y1 = upsilon(1, esf, n_max, pd, mass, clutter_rate);
  const double norm = inner(y0, predicted);

  CardinalityUpdate out;
  out.detected_scale.assign(xi.size(), 0.0);
  if (!(norm > 0.0)) {
    out.posterior.assign(predicted.begin(), predicted.end());
    return out;
  }
  out.posterior.resize(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) out.posterior[n] = y0[n] * predicted[n] / norm;
  normalise(out.posterior);
  out.missed_scale = inner(y1, predicted) / norm;
  for (std::size_t z = 0; z < xi.size(); ++z) {
    const std::vector<double> y1z = upsilon(1, elementary_symmetric(xi, z), n_max, pd, mass, clutter_rate);
    out.detected_scale[z] = inner(y1z, predicted) / norm;
  }
  return out;
}

std::vector<double> predict_cardinality(std::span<const double> card, double survival_prob) {
  const std::size_t n_max = card.empty() ? 0 : card.size() - 1;
  std::vector<double> out(card.size(), 0.0);
  for (std::size_t j = 0; j <= n_max && !card.empty(); ++j) {
    double binom = 1.0;  // C(j, n)
    for (std::size_t n = 0; n <= j; ++n) {
      out[n] += binom * std::pow(survival_prob, static_cast<double>(n)) *
                std::pow(1.0 - survival_prob, static_cast<double>(j - n)) * card[j];
      binom = binom * static_cast<double>(j - n) / static_cast<double>(n + 1);
    }
  }
  normalise(out);
  return out;
}

std::vector<double> convolve_cardinality(std::span<const double> a, std::span<const double> b, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size() && i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
  normalise(out);
  return out;
}

std::vector<double> poisson_binomial(std::span<const double> probs, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  out[0] = 1.0;
  for (double p : probs) {
    p = std::clamp(p, 0.0, 1.0);
    for (std::size_t n = out.size() - 1; n > 0; --n) out[n] = out[n] * (1.0 - p) + out[n - 1] * p;
    out[0] *= 1.0 - p;
  }
  normalise(out);
  return out;
}

std::vector<double> scene_cardinality(const std::vector<CphdCluster>& clusters, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  out[0] = 1.0;
  for (const auto& c : clusters) out = convolve_cardinality(out, c.cardinality, n_max);
  return out;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

struct Measurement {
  Eigen::Vector2d z;
  Eigen::Matrix2d R;
  double kappa = 0.0;
};

CphdCluster birth_cluster(int label, const Measurement& m, const CphdConfig& cfg) {
  GaussianComponent c;
  c.label = label;
  c.weight = cfg.birth_weight;
  const double sv = cfg.birth_velocity_sigma;
  c.density.mean = StateVector(m.z(0), 0.0, m.z(1), 0.0);
  c.density.cov = StateVector(m.R(0, 0), sv * sv, m.R(1, 1), sv * sv).asDiagonal();
  CphdCluster out;
  out.components.push_back(c);
  out.cardinality.assign(static_cast<std::size_t>(cfg.n_max) + 1, 0.0);
  out.cardinality[0] = 1.0 - cfg.birth_weight;
  out.cardinality[1] = cfg.birth_weight;
  return out;
}

// Regroups components: components sharing a gated measurement, or belonging
// to one old cluster and lying within cluster_radius of each other, end up
// together. A cluster that is a union of whole old clusters keeps the
// convolution of their cardinalities; a cluster holding only part of an old
// one gets the Poisson-binomial of its component weights.
std::vector<CphdCluster> recluster(const std::vector<CphdCluster>& clusters,
                                   const std::vector<std::vector<char>>& gated, const CphdConfig& cfg) {
  std::vector<std::pair<std::size_t, std::size_t>> where;  // (cluster, component)
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t k = 0; k < clusters[c].components.size(); ++k) where.emplace_back(c, k);
  const std::size_t n = where.size();
  DisjointSets sets(n);
  const std::size_t nz = n == 0 ? 0 : gated.front().size();
  for (std::size_t z = 0; z < nz; ++z) {
    std::size_t first = n;
    for (std::size_t i = 0; i < n; ++i)
      if (gated[i][z]) {
        if (first == n)
          first = i;
        else
          sets.unite(first, i);
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (where[i].first != where[j].first) continue;
      const auto& a = clusters[where[i].first].components[where[i].second].density.mean;
      const auto& b = clusters[where[j].first].components[where[j].second].density.mean;
      if (std::hypot(a(0) - b(0), a(2) - b(2)) <= cfg.cluster_radius) sets.unite(i, j);
    }

  std::map<std::size_t, std::vector<std::size_t>> groups;  // root -> members, ordered by first member
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);

  std::vector<CphdCluster> out;
  for (const auto& [root, members] : groups) {
    CphdCluster c;
    std::map<std::size_t, std::size_t> per_old;  // old cluster -> member count
    for (std::size_t i : members) {
      c.components.push_back(clusters[where[i].first].components[where[i].second]);
      ++per_old[where[i].first];
    }
    bool whole = true;
    for (const auto& [old, count] : per_old) whole &= count == clusters[old].components.size();
    if (whole) {
      c.cardinality = clusters[per_old.begin()->first].cardinality;
      for (auto it = std::next(per_old.begin()); it != per_old.end(); ++it)
        c.cardinality = convolve_cardinality(c.cardinality, clusters[it->first].cardinality, cfg.n_max);
    } else {
      std::vector<double> w;
      for (const auto& comp : c.components) w.push_back(comp.weight);
      c.cardinality = poisson_binomial(w, cfg.n_max);
    }
    out.push_back(std::move(c));
  }
  return out;
}

double gaussian_density(const Eigen::Vector2d& d, const Eigen::Matrix2d& s) {
  return std::exp(-0.5 * d.dot(s.ldlt().solve(d))) / (2.0 * std::numbers::pi * std::sqrt(s.determinant()));
}

void update_cluster(CphdCluster& cluster, const std::vector<Measurement>& meas, const std::vector<std::size_t>& zs,
                    const SensorModel& sm, const CphdConfig& cfg, std::vector<char>& assigned) {
  const auto h = position_selector();
  const std::size_t nj = cluster.components.size();
  const std::size_t nz = zs.size();
  const double pd = sm.pd;

  // q[j][z]: predicted measurement density, zero outside the gate.
  std::vector<std::vector<double>> q(nj, std::vector<double>(nz, 0.0));
  double gate_area = 0.0;
  double kappa_bar = 0.0;
  const Eigen::Matrix2d nominal_R =
      Eigen::Vector2d(std::pow(sm.rect_w / 6.0, 2), std::pow(sm.rect_h / 6.0, 2)).asDiagonal();
  for (std::size_t j = 0; j < nj; ++j) {
    const Gaussian& g = cluster.components[j].density;
    const Eigen::Matrix2d hp = h * g.cov * h.transpose();
    gate_area += std::numbers::pi * cfg.gate * std::sqrt((hp + nominal_R).determinant());
    kappa_bar += std::max(cfg.min_clutter_intensity, sm.clutter_intensity(g.mean(0), g.mean(2)));
    for (std::size_t k = 0; k < nz; ++k) {
      const Measurement& m = meas[zs[k]];
      const Eigen::Vector2d d = m.z - h * g.mean;
      const Eigen::Matrix2d s = hp + m.R;
      if (d.dot(s.ldlt().solve(d)) <= cfg.gate) q[j][k] = gaussian_density(d, s);
    }
  }
  kappa_bar /= static_cast<double>(nj);
  const double region_area = sm.clutter_region.area();
  const double clutter_rate = kappa_bar * std::min(gate_area, region_area);

  std::vector<double> xi(nz, 0.0);
  for (std::size_t k = 0; k < nz; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < nj; ++j) s += cluster.components[j].weight * q[j][k];
    xi[k] = clutter_rate / meas[zs[k]].kappa * pd * s;
  }
  const CardinalityUpdate upd = cphd_cardinality_update(cluster.cardinality, pd, cluster.mass(), xi, clutter_rate);

  // Association weights: columns 0..nz-1 are measurements, nz + j is the
  // missed-detection option of component j.
  std::vector<double> missed(nj);
  std::vector<std::vector<double>> detected(nj, std::vector<double>(nz, 0.0));
  CostMatrix cost(nj, nz + nj, CostMatrix::kForbidden);
  for (std::size_t j = 0; j < nj; ++j) {
    const double w = cluster.components[j].weight;
    missed[j] = w * (1.0 - pd) * upd.missed_scale;
    if (missed[j] > 0.0) cost(j, nz + j) = -std::log(missed[j]);
    for (std::size_t k = 0; k < nz; ++k) {
      detected[j][k] = w * pd * q[j][k] * (clutter_rate / meas[zs[k]].kappa) * upd.detected_scale[k];
      if (detected[j][k] > 0.0) cost(j, k) = -std::log(detected[j][k]);
    }
  }
  std::vector<std::size_t> choice(nj, nz + nj);
  for (const auto& [j, col] : solve_assignment(cost).pairs) choice[j] = col;

  for (std::size_t j = 0; j < nj; ++j) {
    GaussianComponent& comp = cluster.components[j];
    double total = missed[j];
    for (std::size_t k = 0; k < nz; ++k) total += detected[j][k];
    if (choice[j] < nz) {
      const Measurement& m = meas[zs[choice[j]]];
      comp.density = kalman_update(comp.density, m.z, m.R).posterior;
      assigned[zs[choice[j]]] = 1;
    }
    comp.weight = std::clamp(total, 0.0, 1.0);
    comp.confirmed = comp.confirmed || comp.weight > cfg.confirm_threshold;
  }
  cluster.cardinality = upd.posterior;
}

void sensor_pass(std::vector<CphdCluster>& clusters, std::span<const Rect> rects, const SensorModel& sm,
                 const CphdConfig& cfg, int& next_label) {
  std::vector<Measurement> meas;
  meas.reserve(rects.size());
  for (const Rect& r : rects) {
    const PointMeasurement pm = rect_to_point(r);
    meas.push_back({pm.z, pm.R, std::max(cfg.min_clutter_intensity, sm.clutter_intensity(pm.z(0), pm.z(1)))});
  }

  std::vector<std::vector<char>> gated;
  std::vector<char> explained(meas.size(), 0);
  for (const auto& c : clusters)
    for (const auto& comp : c.components) {
      std::vector<char> row(meas.size(), 0);
      for (std::size_t z = 0; z < meas.size(); ++z)
        if (mahalanobis2(comp.density, meas[z].z, meas[z].R) <= cfg.gate) row[z] = explained[z] = 1;
      gated.push_back(std::move(row));
    }

  clusters = recluster(clusters, gated, cfg);

  std::vector<char> assigned(meas.size(), 0);
  for (auto& c : clusters) {
    std::vector<std::size_t> zs;
    for (std::size_t z = 0; z < meas.size(); ++z)
      for (const auto& comp : c.components)
        if (mahalanobis2(comp.density, meas[z].z, meas[z].R) <= cfg.gate) {
          zs.push_back(z);
          break;
        }
    update_cluster(c, meas, zs, sm, cfg, assigned);
  }

  const std::size_t existing = clusters.size();
  for (std::size_t z = 0; z < meas.size(); ++z) {
    if (explained[z] || assigned[z]) continue;
    bool duplicate = false;
    for (std::size_t b = existing; b < clusters.size() && !duplicate; ++b)
      duplicate = mahalanobis2(clusters[b].components.front().density, meas[z].z, meas[z].R) <= cfg.gate;
    if (!duplicate) clusters.push_back(birth_cluster(next_label++, meas[z], cfg));
  }
}

void prune_merge_cap(std::vector<CphdCluster>& clusters, const CphdConfig& cfg) {
  const auto h = position_selector();
  for (auto& c : clusters) {
    std::erase_if(c.components, [&](const GaussianComponent& g) { return g.weight < cfg.prune_threshold; });
    // Heaviest first; older label on ties.
    std::stable_sort(c.components.begin(), c.components.end(), [](const auto& a, const auto& b) {
      return a.weight != b.weight ? a.weight > b.weight : a.label < b.label;
    });
    // Labels are unique per component, so merging only removes duplicates:
    // a confirmed component is never absorbed.
    std::vector<GaussianComponent> merged;
    for (const auto& comp : c.components) {
      bool absorbed = false;
      for (auto& keep : merged) {
        if (comp.confirmed) break;
        const Eigen::Vector2d d = h * (comp.density.mean - keep.density.mean);
        const Eigen::Matrix2d s = h * (comp.density.cov + keep.density.cov) * h.transpose();
        if (d.dot(s.ldlt().solve(d)) >= cfg.merge_threshold) continue;
        const double w = keep.weight + comp.weight;
        const double a = keep.weight / w;
        const double b = comp.weight / w;
        const StateVector mean = a * keep.density.mean + b * comp.density.mean;
        const StateVector da = keep.density.mean - mean;
        const StateVector db = comp.density.mean - mean;
        keep.density.cov = a * (keep.density.cov + da * da.transpose()) + b * (comp.density.cov + db * db.transpose());
        keep.density.mean = mean;
        keep.weight = std::min(1.0, w);
        keep.confirmed = keep.confirmed || keep.weight > cfg.confirm_threshold;
        absorbed = true;
        break;
      }
      if (!absorbed) merged.push_back(comp);
    }
    if (merged.size() > static_cast<std::size_t>(cfg.n_max)) merged.resize(static_cast<std::size_t>(cfg.n_max));
    std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    c.components = std::move(merged);
  }
  std::erase_if(clusters, [](const CphdCluster& c) { return c.components.empty(); });
}

}  // namespace

std::vector<CphdCluster> cphd_step(std::vector<CphdCluster> clusters, const FrameDetections& detections,
                                   const SensorModel& head, const SensorModel& body, const MotionModel& mm,
                                   const CphdConfig& cfg, int& next_label) {
  for (auto& c : clusters) {
    for (auto& comp : c.components) {
      comp.density = kalman_predict(comp.density, mm);
      comp.weight *= cfg.survival_prob;
    }
    c.cardinality = predict_cardinality(c.cardinality, cfg.survival_prob);
  }
  if (detections.sensed) {
    sensor_pass(clusters, detections.head, head, cfg, next_label);
    sensor_pass(clusters, detections.body, body, cfg, next_label);
  }
  prune_merge_cap(clusters, cfg);
  return clusters;
}

std::vector<CphdReport> cphd_reports(const std::vector<CphdCluster>& clusters) {
  std::vector<CphdReport> out;
  for (const auto& c : clusters) {
    const auto n_hat = static_cast<std::size_t>(
        std::max_element(c.cardinality.begin(), c.cardinality.end()) - c.cardinality.begin());
    std::vector<const GaussianComponent*> order;
    for (const auto& comp : c.components) order.push_back(&comp);
    std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
      return a->weight != b->weight ? a->weight > b->weight : a->label < b->label;
    });
    for (std::size_t i = 0; i < std::min(n_hat, order.size()); ++i)
      out.push_back({{order[i]->label, to_state(order[i]->density.mean)}, order[i]->weight});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.state.label < b.state.label; });
  return out;
}

CphdTracker::CphdTracker(SensorModel head, SensorModel body, MotionModel motion, CphdConfig config)
    : head_(std::move(head)), body_(std::move(body)), motion_(motion), config_(config) {
  head_.validate();
  body_.validate();
  motion_.validate();
  if (config_.n_max < 1) throw InvalidInput("n_max must be >= 1");
}

std::vector<LabeledState> CphdTracker::step(const FrameDetections& detections) {
  clusters_ = cphd_step(std::move(clusters_), detections, head_, body_, motion_, config_, next_label_);
  std::vector<LabeledState> out;
  for (const auto& r : cphd_reports(clusters_)) out.push_back(r.state);
  return out;
}

}  // namespace ospat
