#pragma once

#include <vector>

#include "ospat/ospa.hpp"
#include "ospat/track_model.hpp"

namespace ospat {

inline constexpr int kDefaultSegmentLength = 100;  // 4 s at 25 fps

struct SegmentScore {
  int first_frame = 1;
  int last_frame = 0;
  double mean = 0.0;
};

// Per-frame OSPA-T values (index k-1 holds frame k), per-segment means and the
// mean over all frames. Frames where both sets are empty count as 0.
struct ScoreSeries {
  std::vector<double> per_frame;
  std::vector<SegmentScore> segments;
  double time_average = 0.0;

  double at_frame(int k) const { return per_frame.at(static_cast<std::size_t>(k - 1)); }
};

enum class SegmentLabeling {
  kPerSegment,  // re-run the track assignment inside every segment
  kGlobal,      // assign once over the whole sequence, segment only the averaging
};

// Cost of pairing a truth track with an estimated track when labeling:
// sum over frames where both exist of min(c, |dpos|_p')^p, plus c^p for every
// frame where exactly one of them exists. Labels are ignored.
//
// This cost is a convention: it matches the per-frame metric the labeling
// feeds, but other choices are possible.
double track_assignment_cost(const Track& truth, const Track& est, const MetricParams& params);

// Relabels `est` by the globally best truth-to-estimate track assignment.
// Matched estimates take their truth partner's label; the rest receive
// max(truth label) + 1, + 2, ... in ascending original-label order.
TrackSet label_estimated_tracks(const TrackSet& truth, const TrackSet& est, const MetricParams& params);

// Labels once, then computes the per-frame OSPA over frames 1..K.
// Throws InvalidInput if the two sets have different frame counts.
ScoreSeries evaluate_sequence(const TrackSet& truth, const TrackSet& est, const MetricParams& params);

// Splits frames into consecutive blocks of `segment_length` (the last may be
// shorter) and evaluates each block. Throws InvalidInput if segment_length < 1.
ScoreSeries evaluate_segments(const TrackSet& truth, const TrackSet& est, const MetricParams& params,
                              int segment_length, SegmentLabeling labeling = SegmentLabeling::kPerSegment);

}  // namespace ospat
