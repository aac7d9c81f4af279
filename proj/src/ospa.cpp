#include "ospat/ospa.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ospat/assignment.hpp"
#include "ospat/errors.hpp"

namespace ospat {

void MetricParams::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("p must be a finite value >= 1");
  if (!(p_prime >= 1.0) || !std::isfinite(p_prime)) throw InvalidInput("p_prime must be a finite value >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("c must be finite and > 0");
  if (!(alpha >= 0.0 && alpha <= c)) throw InvalidInput("alpha must lie in [0, c]");
}

double localisation_distance(const KinematicState& a, const KinematicState& b, double p_prime) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  if (p_prime == 1.0) return dx + dy;
  if (p_prime == 2.0) return std::hypot(dx, dy);
  return std::pow(std::pow(dx, p_prime) + std::pow(dy, p_prime), 1.0 / p_prime);
}

double base_distance(const LabeledState& a, const LabeledState& b, const MetricParams& params) {
  const double loc = localisation_distance(a.state, b.state, params.p_prime);
  const double label = a.label == b.label ? 0.0 : params.alpha;
  if (label == 0.0) return loc;
  if (params.p_prime == 1.0) return loc + label;
  return std::pow(std::pow(loc, params.p_prime) + std::pow(label, params.p_prime), 1.0 / params.p_prime);
}

double cutoff_base_distance(const LabeledState& a, const LabeledState& b, const MetricParams& params) {
  return std::min(params.c, base_distance(a, b, params));
}

namespace {

void require_distinct_labels(const std::vector<LabeledState>& s) {
  std::set<int> seen;
  for (const LabeledState& e : s)
    if (!seen.insert(e.label).second) throw InvalidInput("labeled set repeats a label");
}

}  // namespace

double ospa_labeled_sets(const std::vector<LabeledState>& x, const std::vector<LabeledState>& y,
                         const MetricParams& params) {
  params.validate();
  require_distinct_labels(x);
  require_distinct_labels(y);

  const auto& small = x.size() <= y.size() ? x : y;
  const auto& large = x.size() <= y.size() ? y : x;
  const std::size_t m = small.size();
  const std::size_t n = large.size();
  if (n == 0) return 0.0;

  const double cp = std::pow(params.c, params.p);
  double matched = 0.0;
  if (m > 0) {
    CostMatrix cost(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        cost(i, j) = std::pow(cutoff_base_distance(small[i], large[j], params), params.p);
    matched = solve_assignment(cost).total_cost;
  }
  const double value = std::pow((matched + static_cast<double>(n - m) * cp) / static_cast<double>(n), 1.0 / params.p);
  return std::clamp(value, 0.0, params.c);
}

}  // namespace ospat
