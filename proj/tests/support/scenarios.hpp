#pragma once

// Shared synthetic scenes for the unit and acceptance tests.

#include <algorithm>
#include <cmath>

#include "ospat/scenario.hpp"
#include "ospat/track_model.hpp"

namespace ospat::testing {

// Three pedestrians over 200 frames, default head/body sensors (pd 0.58 and
// 0.52, about 2 and 1 false alarms per frame).
inline ScenarioDescriptor three_walkers() {
  ScenarioDescriptor d;
  d.frames = 200;
  d.targets = {
      {1, 200, 300.0, 300.0, 40.0, 10.0},
      {1, 200, 900.0, 700.0, 35.0, 190.0},
      {20, 200, 1500.0, 400.0, 45.0, 100.0},
  };
  return d;
}

// Fraction of the truth track's frames on which some estimate lies within
// `radius` px.
inline double coverage(const Track& truth, const TrackSet& est, double radius = 25.0) {
  int hit = 0;
  for (const auto& [k, s] : truth.states) {
    for (const auto& t : est.tracks()) {
      auto it = t.states.find(k);
      if (it != t.states.end() && std::hypot(it->second.x - s.x, it->second.y - s.y) <= radius) {
        ++hit;
        break;
      }
    }
  }
  return truth.states.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.states.size());
}

inline double min_coverage(const TrackSet& truth, const TrackSet& est, double radius = 25.0) {
  double m = 1.0;
  for (const auto& t : truth.tracks()) m = std::min(m, coverage(t, est, radius));
  return m;
}

}  // namespace ospat::testing
