#include "ospat/ospat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ospat/assignment.hpp"
#include "ospat/errors.hpp"

namespace ospat {

double track_assignment_cost(const Track& truth, const Track& est, const MetricParams& params) {
  const double cp = std::pow(params.c, params.p);
  double total = 0.0;
  auto a = truth.states.begin();
  auto b = est.states.begin();
  while (a != truth.states.end() || b != est.states.end()) {
    if (b == est.states.end() || (a != truth.states.end() && a->first < b->first)) {
      total += cp;
      ++a;
    } else if (a == truth.states.end() || b->first < a->first) {
      total += cp;
      ++b;
    } else {
      const double d = std::min(params.c, localisation_distance(a->second, b->second, params.p_prime));
      total += std::pow(d, params.p);
      ++a;
      ++b;
    }
  }
  return total;
}

TrackSet label_estimated_tracks(const TrackSet& truth, const TrackSet& est, const MetricParams& params) {
  params.validate();
  const auto& tt = truth.tracks();
  const auto& et = est.tracks();
  std::map<int, int> mapping;
  if (!tt.empty() && !et.empty()) {
    CostMatrix cost(tt.size(), et.size());
    for (std::size_t i = 0; i < tt.size(); ++i)
      for (std::size_t j = 0; j < et.size(); ++j) cost(i, j) = track_assignment_cost(tt[i], et[j], params);
    for (const auto& [i, j] : solve_assignment(cost).pairs) mapping[et[j].label] = tt[i].label;
  }
  int next = truth.max_label() + 1;
  for (const Track& t : et)  // ascending original label
    if (!mapping.contains(t.label)) mapping[t.label] = next++;

  std::vector<Track> out = et;
  for (Track& t : out) t.label = mapping.at(t.label);
  return TrackSet(est.frame_count(), std::move(out));
}

namespace {

void require_same_range(const TrackSet& truth, const TrackSet& est) {
  if (truth.frame_count() != est.frame_count())
    throw InvalidInput("truth and estimate must cover the same frame range");
}

// Per-frame OSPA of already-labeled sets.
std::vector<double> per_frame_scores(const TrackSet& truth, const TrackSet& labeled, const MetricParams& params) {
  std::vector<double> out(static_cast<std::size_t>(truth.frame_count()));
  for (int k = 1; k <= truth.frame_count(); ++k)
    out[static_cast<std::size_t>(k - 1)] =
        ospa_labeled_sets(labeled_set_at_frame(truth, k), labeled_set_at_frame(labeled, k), params);
  return out;
}

double mean(const std::vector<double>& v, std::size_t first, std::size_t last) {
  if (last <= first) return 0.0;
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(last), 0.0) /
         static_cast<double>(last - first);
}

}  // namespace

ScoreSeries evaluate_sequence(const TrackSet& truth, const TrackSet& est, const MetricParams& params) {
  return evaluate_segments(truth, est, params, std::max(1, truth.frame_count()));
}

ScoreSeries evaluate_segments(const TrackSet& truth, const TrackSet& est, const MetricParams& params,
                              int segment_length, SegmentLabeling labeling) {
  params.validate();
  require_same_range(truth, est);
  if (segment_length < 1) throw InvalidInput("segment_length must be >= 1");

  const int frames = truth.frame_count();
  ScoreSeries out;
  out.per_frame.reserve(static_cast<std::size_t>(frames));

  const TrackSet globally_labeled =
      labeling == SegmentLabeling::kGlobal ? label_estimated_tracks(truth, est, params) : TrackSet();

  for (int first = 1; first <= frames; first += segment_length) {
    const int last = std::min(frames, first + segment_length - 1);
    const TrackSet truth_block = truth.window(first, last);
    const TrackSet est_block = labeling == SegmentLabeling::kGlobal
                                   ? globally_labeled.window(first, last)
                                   : label_estimated_tracks(truth_block, est.window(first, last), params);
    const std::vector<double> block = per_frame_scores(truth_block, est_block, params);
    out.segments.push_back({first, last, mean(block, 0, block.size())});
    out.per_frame.insert(out.per_frame.end(), block.begin(), block.end());
  }
  out.time_average = mean(out.per_frame, 0, out.per_frame.size());
  return out;
}

}  // namespace ospat
