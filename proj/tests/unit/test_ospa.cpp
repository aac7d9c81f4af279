#include "doctest.h"

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "ospat/errors.hpp"
#include "ospat/ospa.hpp"

using namespace ospat;
using ospat::testing::brute_force_min_injection;
using ospat::testing::random_labeled_set;

namespace {

LabeledState at(int label, double x, double y) { return {label, {x, 0.0, y, 0.0}}; }

// Direct evaluation of the labeled OSPA definition by enumeration.
double reference_ospa(const std::vector<LabeledState>& a, const std::vector<LabeledState>& b, const MetricParams& mp) {
  const auto& x = a.size() <= b.size() ? a : b;
  const auto& y = a.size() <= b.size() ? b : a;
  if (y.empty()) return 0.0;
  auto cost = [&](const LabeledState& u, const LabeledState& v) {
    const double dl = std::pow(std::pow(std::abs(u.state.x - v.state.x), mp.p_prime) +
                                   std::pow(std::abs(u.state.y - v.state.y), mp.p_prime),
                               1.0 / mp.p_prime);
    const double lab = u.label == v.label ? 0.0 : mp.alpha;
    const double d = std::pow(std::pow(dl, mp.p_prime) + std::pow(lab, mp.p_prime), 1.0 / mp.p_prime);
    return std::pow(std::min(mp.c, d), mp.p);
  };
  const double s = brute_force_min_injection(x, y, cost);
  return std::pow((s + static_cast<double>(y.size() - x.size()) * std::pow(mp.c, mp.p)) / static_cast<double>(y.size()),
                  1.0 / mp.p);
}

}  // namespace

TEST_CASE("localisation distance") {
  KinematicState a{0, 5, 0, 7}, b{3, -1, 4, 2};
  CHECK(localisation_distance(a, b, 1.0) == 7.0);
  CHECK(localisation_distance(a, b, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(localisation_distance(a, a, 2.0) == 0.0);
}

TEST_CASE("base and cut-off distance") {
  MetricParams mp;
  CHECK(base_distance(at(1, 0, 0), at(1, 30, 0), mp) == 30.0);
  CHECK(base_distance(at(1, 5, 5), at(2, 5, 5), mp) == 75.0);
  CHECK(cutoff_base_distance(at(1, 0, 0), at(2, 55, 0), mp) == 100.0);  // 130 clamped
  CHECK(cutoff_base_distance(at(1, 0, 0), at(1, 30, 0), mp) == 30.0);
  CHECK(cutoff_base_distance(at(3, 1, 2), at(3, 1, 2), mp) == 0.0);
}

TEST_CASE("power-form counterexample") {
  MetricParams mp{2.0, 2.0, 100.0, 75.0};
  auto x = at(1, 1, 0), y = at(1, 1, 5), z = at(1, 1, 4.99);
  const double dxy = base_distance(x, y, mp), dxz = base_distance(x, z, mp), dzy = base_distance(z, y, mp);
  CHECK(dxy * dxy == doctest::Approx(25.0).epsilon(1e-15));
  // 4.99^2 + 0.01^2
  CHECK(dxz * dxz + dzy * dzy == doctest::Approx(24.9002).epsilon(1e-12));
  CHECK(dxy * dxy > dxz * dxz + dzy * dzy);
  CHECK(dxy <= dxz + dzy + 1e-12);
}

TEST_CASE("base-distance triangle inequality") {
  std::mt19937_64 rng(99);
  const double pps[] = {1.0, 1.5, 2.0, 3.0};
  const double alphas[] = {0.0, 37.5, 75.0};
  std::uniform_real_distribution<double> pos(0.0, 100.0);
  std::uniform_int_distribution<int> lab(1, 3);
  int violations = 0;
  for (int i = 0; i < 2000; ++i) {
    MetricParams mp{1.0, pps[i % 4], 100.0, alphas[(i / 4) % 3]};
    LabeledState a = at(lab(rng), pos(rng), pos(rng)), b = at(lab(rng), pos(rng), pos(rng)),
                 c = at(lab(rng), pos(rng), pos(rng));
    if (base_distance(a, b, mp) > base_distance(a, c, mp) + base_distance(c, b, mp) + 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("ospa_labeled_sets known values") {
  MetricParams mp;
  CHECK(ospa_labeled_sets({}, {}, mp) == 0.0);
  CHECK(ospa_labeled_sets({}, {at(1, 0, 0), at(2, 5, 5)}, mp) == 100.0);
  CHECK(ospa_labeled_sets({at(1, 10, 20)}, {at(1, 13, 24)}, mp) == 7.0);
  CHECK(ospa_labeled_sets({at(1, 40, 40)}, {at(2, 40, 40)}, mp) == 75.0);
  for (double p : {1.0, 2.0, 3.5}) {
    MetricParams q{p, 1.0, 100.0, 75.0};
    std::vector<LabeledState> x{at(1, 0, 0), at(2, 500, 0), at(3, 1000, 0)};
    std::vector<LabeledState> y{at(1, 0, 300), at(2, 500, 300), at(3, 1000, 300)};
    CHECK(ospa_labeled_sets(x, y, q) == doctest::Approx(100.0).epsilon(1e-14));
  }
}

TEST_CASE("ospa_labeled_sets rejects duplicate labels") {
  MetricParams mp;
  CHECK_THROWS_AS(ospa_labeled_sets({at(1, 0, 0), at(1, 3, 3)}, {}, mp), InvalidInput);
  CHECK_THROWS_AS(ospa_labeled_sets({}, {at(2, 0, 0), at(2, 3, 3)}, mp), InvalidInput);
}

TEST_CASE("MetricParams validation") {
  CHECK_NOTHROW(MetricParams{}.validate());
  CHECK_THROWS_AS((MetricParams{0.5, 1, 100, 75}.validate()), InvalidInput);
  CHECK_THROWS_AS((MetricParams{1, 0.5, 100, 75}.validate()), InvalidInput);
  CHECK_THROWS_AS((MetricParams{1, 1, 0, 0}.validate()), InvalidInput);
  CHECK_THROWS_AS((MetricParams{1, 1, 100, 150}.validate()), InvalidInput);
  CHECK_THROWS_AS((MetricParams{1, 1, 100, -1}.validate()), InvalidInput);
}

TEST_CASE("ospa_labeled_sets matches enumeration") {
  std::mt19937_64 rng(7);
  const MetricParams variants[] = {{1, 1, 100, 75}, {2, 2, 40, 20}, {3, 1.5, 60, 0}, {1, 3, 100, 100}};
  for (int t = 0; t < 400; ++t) {
    const auto& mp = variants[t % 4];
    auto x = random_labeled_set(rng, rng() % 6, 8);
    auto y = random_labeled_set(rng, rng() % 6, 8);
    CHECK(ospa_labeled_sets(x, y, mp) == doctest::Approx(reference_ospa(x, y, mp)).epsilon(1e-10));
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 rng(1234);
  MetricParams mp;
  for (int t = 0; t < 300; ++t) {
    auto x = random_labeled_set(rng, rng() % 9, 12);
    auto y = random_labeled_set(rng, rng() % 9, 12);
    const double d = ospa_labeled_sets(x, y, mp);
    CHECK(d >= 0.0);
    CHECK(d <= mp.c);
    CHECK(ospa_labeled_sets(x, x, mp) == 0.0);

    MetricParams lo = mp, hi = mp;
    lo.alpha = 0.0;
    hi.c = 150.0;
    hi.alpha = 75.0;
    CHECK(ospa_labeled_sets(x, y, lo) <= d + 1e-12);
    CHECK(ospa_labeled_sets(x, y, hi) >= d - 1e-12);
  }
}
