#include "ospat/tracker.hpp"

#include <map>
#include <set>

#include "ospat/errors.hpp"

namespace ospat {

Algorithm algorithm_from_int(int n) {
  if (n < 1 || n > 3) throw ConfigError("algorithm must be 1, 2 or 3, got " + std::to_string(n));
  return static_cast<Algorithm>(n);
}

std::string to_string(Algorithm a) { return "alg" + std::to_string(static_cast<int>(a)); }

TrackSet extract_tracks(const std::vector<TrackReport>& reports, int frame_count) {
  std::map<int, Track> by_label;
  for (const TrackReport& r : reports) {
    if (r.frame < 1 || r.frame > frame_count)
      throw RangeError("report frame " + std::to_string(r.frame) + " outside [1, " + std::to_string(frame_count) + "]");
    Track& t = by_label.try_emplace(r.estimate.label, Track{r.estimate.label, {}}).first->second;
    if (!t.states.emplace(r.frame, r.estimate.state).second)
      throw InvalidReport("label " + std::to_string(r.estimate.label) + " reported twice at frame " +
                          std::to_string(r.frame));
  }
  std::vector<Track> tracks;
  for (auto& [label, t] : by_label) tracks.push_back(std::move(t));
  return TrackSet(frame_count, std::move(tracks));
}

DetectionSeries convert_body_detections(const DetectionSeries& series) {
  DetectionSeries out = series;
  for (auto& f : out)
    for (Rect& r : f.body) r = body_to_head(r);
  return out;
}

std::vector<TrackReport> run_tracker_reports(const DetectionSeries& series, const SensorModel& head,
                                             const SensorModel& body, const TrackerConfig& cfg) {
  std::vector<TrackReport> out;
  auto collect = [&](int frame, const std::vector<LabeledState>& states) {
    for (const auto& s : states) out.push_back({frame, s});
  };
  if (cfg.algorithm == Algorithm::kCphd) {
    CphdTracker tracker(head, body, cfg.motion, cfg.cphd);
    for (std::size_t i = 0; i < series.size(); ++i) collect(static_cast<int>(i + 1), tracker.step(series[i]));
  } else {
    const auto mode =
        cfg.algorithm == Algorithm::kImpreciseBernoulli ? LikelihoodMode::kImprecise : LikelihoodMode::kGaussian;
    MultiBernoulliTracker tracker(mode, head, body, cfg.motion, cfg.bernoulli, cfg.seed);
    for (std::size_t i = 0; i < series.size(); ++i) collect(static_cast<int>(i + 1), tracker.step(series[i]));
  }
  return out;
}

TrackSet run_tracker(const DetectionSeries& series, const SensorModel& head, const SensorModel& body,
                     const TrackerConfig& cfg) {
  return extract_tracks(run_tracker_reports(series, head, body, cfg), static_cast<int>(series.size()));
}

}  // namespace ospat
