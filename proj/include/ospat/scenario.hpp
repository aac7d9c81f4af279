#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ospat/detection.hpp"
#include "ospat/track_model.hpp"

namespace ospat {

// Explicit target path start. Frames are 1-based and inclusive.
struct TargetSpec {
  int birth_frame = 1;
  int death_frame = 1;
  double x = 0.0;
  double y = 0.0;
  double speed = 40.0;        // px/s
  double heading_deg = 0.0;   // 0 = +x, 90 = +y (image down)
};

// Synthetic pedestrian scene. Targets walk piecewise-constant-velocity paths:
// every `leg_seconds` the heading changes by N(0, turn_sigma_deg^2), and paths
// reflect off the arena walls. With `targets` empty, `random_targets` targets
// are drawn: birth in the first quarter, death in the last quarter, start
// position at least `margin` px inside the arena, speed uniform in
// [speed_min, speed_max], uniform heading.
struct ScenarioDescriptor {
  int frames = 200;
  double fps = 25.0;
  Region arena;
  std::vector<TargetSpec> targets;
  int random_targets = 0;
  double speed_min = 20.0;
  double speed_max = 60.0;
  double margin = 50.0;
  double leg_seconds = 2.0;
  double turn_sigma_deg = 30.0;
  SensorModel head = SensorModel::head();
  SensorModel body = SensorModel::body();
  int every_nth = 1;

  // Throws DescriptorError on an infeasible description.
  void validate() const;
};

struct Scenario {
  TrackSet truth;
  DetectionSeries detections;  // body rectangles in native (body) form
};

// Deterministic for a given (descriptor, seed).
Scenario generate_scenario(const ScenarioDescriptor& descriptor, std::uint64_t seed);

}  // namespace ospat
