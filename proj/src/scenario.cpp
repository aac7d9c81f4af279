#include "ospat/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ospat/errors.hpp"

namespace ospat {

void ScenarioDescriptor::validate() const {
  if (frames < 1) throw DescriptorError("frames must be >= 1");
  if (!(fps > 0.0)) throw DescriptorError("fps must be > 0");
  if (!(arena.area() > 0.0)) throw DescriptorError("arena must have positive area");
  if (random_targets < 0) throw DescriptorError("random_targets must be >= 0");
  if (!(speed_min >= 0.0 && speed_max >= speed_min)) throw DescriptorError("speed range must satisfy 0 <= min <= max");
  if (!(leg_seconds > 0.0) || !(turn_sigma_deg >= 0.0)) throw DescriptorError("leg_seconds must be > 0, turn sigma >= 0");
  if (every_nth < 1) throw DescriptorError("every_nth must be >= 1");
  if (targets.empty() && random_targets > 0 &&
      !(arena.x1 - arena.x0 > 2.0 * margin && arena.y1 - arena.y0 > 2.0 * margin))
    throw DescriptorError("arena too small for the margin");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const TargetSpec& t = targets[i];
    const std::string name = "target " + std::to_string(i);
    if (t.birth_frame < 1 || t.death_frame < t.birth_frame || t.death_frame > frames)
      throw DescriptorError(name + ": lifetime must satisfy 1 <= birth <= death <= frames");
    if (!arena.contains(t.x, t.y)) throw DescriptorError(name + ": start position outside the arena");
    if (!(t.speed >= 0.0)) throw DescriptorError(name + ": speed must be >= 0");
  }
  try {
    head.validate();
    body.validate();
  } catch (const InvalidInput& e) {
    throw DescriptorError(e.what());
  }
}

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

Track walk(int label, const TargetSpec& spec, const ScenarioDescriptor& d, std::mt19937_64& rng) {
  const double dt = 1.0 / d.fps;
  const int leg = std::max(1, static_cast<int>(std::lround(d.leg_seconds * d.fps)));
  std::normal_distribution<double> turn(0.0, d.turn_sigma_deg * kDegree);
  double heading = spec.heading_deg * kDegree;
  double x = spec.x;
  double y = spec.y;
  double vx = spec.speed * std::cos(heading);
  double vy = spec.speed * std::sin(heading);
  Track t{label, {}};
  for (int k = spec.birth_frame; k <= spec.death_frame; ++k) {
    t.states.emplace(k, KinematicState{x, vx, y, vy});
    if ((k - spec.birth_frame + 1) % leg == 0 && d.turn_sigma_deg > 0.0) {
      heading = std::atan2(vy, vx) + turn(rng);
      vx = spec.speed * std::cos(heading);
      vy = spec.speed * std::sin(heading);
    }
    x += vx * dt;
    y += vy * dt;
    if (x < d.arena.x0 || x > d.arena.x1) {
      vx = -vx;
      x = std::clamp(x, d.arena.x0, d.arena.x1);
    }
    if (y < d.arena.y0 || y > d.arena.y1) {
      vy = -vy;
      y = std::clamp(y, d.arena.y0, d.arena.y1);
    }
  }
  return t;
}

}  // namespace

Scenario generate_scenario(const ScenarioDescriptor& descriptor, std::uint64_t seed) {
  descriptor.validate();
  std::mt19937_64 rng(seed);
  std::vector<TargetSpec> specs = descriptor.targets;
  if (specs.empty()) {
    const int n = descriptor.frames;
    std::uniform_int_distribution<int> birth(1, std::max(1, n / 4));
    std::uniform_int_distribution<int> death(std::min(n, 3 * n / 4 + 1), n);
    const Region& a = descriptor.arena;
    std::uniform_real_distribution<double> ux(a.x0 + descriptor.margin, a.x1 - descriptor.margin);
    std::uniform_real_distribution<double> uy(a.y0 + descriptor.margin, a.y1 - descriptor.margin);
    std::uniform_real_distribution<double> speed(descriptor.speed_min, descriptor.speed_max);
    std::uniform_real_distribution<double> heading(0.0, 360.0);
    for (int i = 0; i < descriptor.random_targets; ++i) {
      TargetSpec t;
      t.birth_frame = birth(rng);
      t.death_frame = std::max(t.birth_frame, death(rng));
      t.x = ux(rng);
      t.y = uy(rng);
      t.speed = speed(rng);
      t.heading_deg = heading(rng);
      specs.push_back(t);
    }
  }
  std::vector<Track> tracks;
  for (std::size_t i = 0; i < specs.size(); ++i) tracks.push_back(walk(static_cast<int>(i + 1), specs[i], descriptor, rng));

  Scenario out;
  out.truth = TrackSet(descriptor.frames, std::move(tracks));
  // Detections draw from an independent stream so the truth does not shift
  // when only the sensor settings change.
  out.detections = simulate_detections(out.truth, descriptor.head, descriptor.body, seed ^ 0x9E3779B97F4A7C15ULL,
                                       descriptor.every_nth);
  return out;
}

}  // namespace ospat
