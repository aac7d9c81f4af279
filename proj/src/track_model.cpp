#include "ospat/track_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ospat/errors.hpp"

namespace ospat {

namespace {

bool finite(const KinematicState& s) {
  return std::isfinite(s.x) && std::isfinite(s.vx) && std::isfinite(s.y) && std::isfinite(s.vy);
}

}  // namespace

TrackSet::TrackSet(int frame_count, std::vector<Track> tracks)
    : frame_count_(frame_count), tracks_(std::move(tracks)) {
  if (frame_count_ < 0) throw InvalidInput("frame_count must be non-negative");
  std::sort(tracks_.begin(), tracks_.end(),
            [](const Track& a, const Track& b) { return a.label < b.label; });
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    const Track& t = tracks_[i];
    if (t.label < 1) throw InvalidInput("track label must be >= 1, got " + std::to_string(t.label));
    if (i > 0 && tracks_[i - 1].label == t.label)
      throw InvalidInput("duplicate track label " + std::to_string(t.label));
    if (t.states.empty()) throw InvalidInput("track " + std::to_string(t.label) + " has no states");
    if (t.states.begin()->first < 1 || t.states.rbegin()->first > frame_count_)
      throw InvalidInput("track " + std::to_string(t.label) + " has a frame outside [1, " +
                         std::to_string(frame_count_) + "]");
    for (const auto& [frame, s] : t.states)
      if (!finite(s))
        throw InvalidInput("track " + std::to_string(t.label) + " has a non-finite state at frame " +
                           std::to_string(frame));
  }
}

int TrackSet::max_label() const noexcept { return tracks_.empty() ? 0 : tracks_.back().label; }

TrackSet TrackSet::window(int first, int last) const {
  std::vector<Track> out;
  for (const Track& t : tracks_) {
    Track w{t.label, {}};
    for (auto it = t.states.lower_bound(first); it != t.states.end() && it->first <= last; ++it)
      w.states.emplace(it->first - first + 1, it->second);
    if (!w.states.empty()) out.push_back(std::move(w));
  }
  return TrackSet(std::max(0, last - first + 1), std::move(out));
}

std::vector<LabeledState> labeled_set_at_frame(const TrackSet& ts, int k) {
  if (k < 1 || k > ts.frame_count())
    throw RangeError("frame " + std::to_string(k) + " outside [1, " + std::to_string(ts.frame_count()) + "]");
  std::vector<LabeledState> out;
  for (const Track& t : ts.tracks()) {
    auto it = t.states.find(k);
    if (it != t.states.end()) out.push_back({t.label, it->second});
  }
  return out;
}

TrackSet relabel(const TrackSet& ts, const std::map<int, int>& mapping) {
  std::vector<Track> out = ts.tracks();
  std::set<int> used;
  for (Track& t : out) {
    auto it = mapping.find(t.label);
    if (it != mapping.end()) {
      if (it->second < 1) throw InvalidMapping("mapped label must be >= 1");
      t.label = it->second;
    }
    if (!used.insert(t.label).second)
      throw InvalidMapping("mapping collides on label " + std::to_string(t.label));
  }
  return TrackSet(ts.frame_count(), std::move(out));
}

}  // namespace ospat
