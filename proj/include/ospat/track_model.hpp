#pragma once

#include <map>
#include <vector>

namespace ospat {

// Head-centroid position (pixels) and velocity (pixels/s).
struct KinematicState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  bool operator==(const KinematicState&) const = default;
};

struct LabeledState {
  int label = 1;
  KinematicState state;

  bool operator==(const LabeledState&) const = default;
};

// A labeled temporal sequence of states. Frames are 1-based and may have gaps.
struct Track {
  int label = 1;
  std::map<int, KinematicState> states;

  bool operator==(const Track&) const = default;
};

// A collection of tracks over frames 1..frame_count, kept sorted by label.
//
// Construction validates: labels >= 1 and distinct, every track non-empty,
// every frame in [1, frame_count], all state components finite.
class TrackSet {
 public:
  TrackSet() = default;
  TrackSet(int frame_count, std::vector<Track> tracks);

  int frame_count() const noexcept { return frame_count_; }
  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  std::size_t size() const noexcept { return tracks_.size(); }
  bool empty() const noexcept { return tracks_.empty(); }

  // Largest label in the set, 0 when empty.
  int max_label() const noexcept;

  // Tracks restricted to frames [first, last], renumbered so `first` becomes
  // frame 1. Tracks with no states in the window are dropped.
  TrackSet window(int first, int last) const;

  bool operator==(const TrackSet&) const = default;

 private:
  int frame_count_ = 0;
  std::vector<Track> tracks_;
};

// States of all tracks alive at frame k, in ascending label order.
// Throws RangeError unless 1 <= k <= ts.frame_count().
std::vector<LabeledState> labeled_set_at_frame(const TrackSet& ts, int k);

// Renames labels per `mapping`; labels the mapping does not cover are kept.
// Throws InvalidMapping if two tracks would end up with the same label or a
// target label is < 1.
TrackSet relabel(const TrackSet& ts, const std::map<int, int>& mapping);

}  // namespace ospat
