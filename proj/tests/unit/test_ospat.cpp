#include "doctest.h"

#include <cmath>

#include "ospat/errors.hpp"
#include "ospat/ospat.hpp"

using namespace ospat;

namespace {

Track line_track(int label, int first, int last, double x0, double y0, double vx = 0.0, double vy = 0.0) {
  Track t{label, {}};
  for (int k = first; k <= last; ++k) t.states[k] = {x0 + vx * k, vx, y0 + vy * k, vy};
  return t;
}

// Two targets crossing at frame 50; the estimate swaps identities at the crossing.
void crossing_pair(int frames, TrackSet& truth, TrackSet& est) {
  const int mid = frames / 2;
  Track a = line_track(1, 1, frames, 0, 0, 4, 4);
  Track b = line_track(2, 1, frames, 0, 8.0 * mid, 4, -4);
  Track ea{1, {}}, eb{2, {}};
  for (int k = 1; k <= frames; ++k) {
    ea.states[k] = k <= mid ? a.states[k] : b.states[k];
    eb.states[k] = k <= mid ? b.states[k] : a.states[k];
  }
  truth = TrackSet(frames, {a, b});
  est = TrackSet(frames, {ea, eb});
}

}  // namespace

TEST_CASE("track_assignment_cost") {
  MetricParams mp;
  CHECK(track_assignment_cost(line_track(1, 1, 10, 0, 0), line_track(1, 1, 10, 0, 0), mp) == 0.0);
  CHECK(track_assignment_cost(line_track(1, 1, 3, 0, 0), line_track(2, 4, 7, 0, 0), mp) == 700.0);
  CHECK(track_assignment_cost(line_track(1, 1, 10, 0, 0), line_track(9, 1, 10, 5, 0), mp) == 50.0);
  CHECK(track_assignment_cost(line_track(1, 1, 2, 0, 0), line_track(9, 1, 2, 500, 0), mp) == 200.0);
}

TEST_CASE("label_estimated_tracks") {
  MetricParams mp;
  SUBCASE("copy keeps labels") {
    TrackSet truth(10, {line_track(3, 1, 10, 0, 0), line_track(8, 2, 9, 100, 0)});
    CHECK(label_estimated_tracks(truth, truth, mp) == truth);
  }
  SUBCASE("coincident estimate wins the label") {
    TrackSet truth(10, {line_track(4, 1, 10, 0, 0)});
    TrackSet est(10, {line_track(1, 1, 10, 900, 0), line_track(2, 1, 10, 0.5, 0)});
    auto out = label_estimated_tracks(truth, est, mp);
    REQUIRE(out.size() == 2);
    CHECK(out.tracks()[0].label == 4);
    CHECK(out.tracks()[0].states.at(1).x == doctest::Approx(0.5 + 0.0));
    CHECK(out.tracks()[1].label == 5);
  }
  SUBCASE("empty estimate") {
    TrackSet truth(10, {line_track(1, 1, 10, 0, 0)});
    CHECK(label_estimated_tracks(truth, TrackSet(10, {}), mp).empty());
  }
  SUBCASE("fresh labels follow original order") {
    TrackSet truth(10, {line_track(2, 1, 10, 0, 0)});
    TrackSet est(10, {line_track(7, 1, 10, 800, 0), line_track(3, 1, 10, 0, 0), line_track(1, 1, 10, 400, 0)});
    auto out = label_estimated_tracks(truth, est, mp);
    REQUIRE(out.size() == 3);
    CHECK(out.tracks()[0].label == 2);
    CHECK(out.tracks()[0].states.at(1).x == 0.0);
    CHECK(out.tracks()[1].label == 3);
    CHECK(out.tracks()[1].states.at(1).x == 400.0);
    CHECK(out.tracks()[2].label == 4);
    CHECK(out.tracks()[2].states.at(1).x == 800.0);
  }
}

TEST_CASE("evaluate_sequence") {
  MetricParams mp;
  TrackSet truth(20, {line_track(1, 3, 12, 0, 0, 2, 1), line_track(2, 1, 20, 300, 300)});
  SUBCASE("perfect tracker") {
    auto s = evaluate_sequence(truth, truth, mp);
    REQUIRE(s.per_frame.size() == 20);
    for (double v : s.per_frame) CHECK(v == 0.0);
    CHECK(s.time_average == 0.0);
  }
  SUBCASE("pure miss") {
    TrackSet one(20, {line_track(1, 3, 12, 0, 0)});
    auto s = evaluate_sequence(one, TrackSet(20, {}), mp);
    for (int k = 1; k <= 20; ++k) CHECK(s.at_frame(k) == (k >= 3 && k <= 12 ? 100.0 : 0.0));
    CHECK(s.time_average == doctest::Approx(50.0));
  }
  SUBCASE("broken track pays alpha on the unmatched fragment") {
    TrackSet one(20, {line_track(1, 1, 20, 0, 0, 3, 0)});
    Track f1{1, {}}, f2{2, {}};
    for (const auto& [k, s] : one.tracks()[0].states) (k <= 12 ? f1 : f2).states[k] = s;
    auto s = evaluate_sequence(one, TrackSet(20, {f1, f2}), mp);
    for (int k = 1; k <= 12; ++k) CHECK(s.at_frame(k) == 0.0);
    for (int k = 13; k <= 20; ++k) CHECK(s.at_frame(k) == 75.0);
  }
  SUBCASE("frame count mismatch") { CHECK_THROWS_AS(evaluate_sequence(truth, TrackSet(19, {}), mp), InvalidInput); }
}

TEST_CASE("evaluate_segments") {
  MetricParams mp;
  TrackSet truth(30, {line_track(1, 1, 30, 0, 0, 2, 0), line_track(2, 5, 25, 200, 0, 0, 2)});
  TrackSet est(30, {line_track(5, 2, 30, 1, 0, 2, 0), line_track(6, 5, 20, 210, 0, 0, 2)});

  SUBCASE("single block equals evaluate_sequence") {
    auto a = evaluate_segments(truth, est, mp, 30);
    auto b = evaluate_sequence(truth, est, mp);
    CHECK(a.per_frame == b.per_frame);
    CHECK(a.time_average == b.time_average);
    CHECK(evaluate_segments(truth, est, mp, 1000).per_frame == b.per_frame);
  }
  SUBCASE("perfect tracker is zero for every segment length") {
    for (int len : {1, 7, 10, 30}) {
      auto s = evaluate_segments(truth, truth, mp, len);
      CHECK(s.time_average == 0.0);
    }
  }
  SUBCASE("segments cover the sequence") {
    auto s = evaluate_segments(truth, est, mp, 7);
    REQUIRE(s.segments.size() == 5);
    CHECK(s.segments.front().first_frame == 1);
    CHECK(s.segments.back().last_frame == 30);
    CHECK(s.segments.back().first_frame == 29);
    double total = 0.0;
    for (const auto& g : s.segments) total += g.mean * (g.last_frame - g.first_frame + 1);
    CHECK(total / 30.0 == doctest::Approx(s.time_average));
  }
  SUBCASE("bad length") { CHECK_THROWS_AS(evaluate_segments(truth, est, mp, 0), InvalidInput); }
}

TEST_CASE("label swap at a crossing") {
  MetricParams mp;
  TrackSet truth, est;
  crossing_pair(100, truth, est);
  auto per50 = evaluate_segments(truth, est, mp, 50);
  auto per100 = evaluate_segments(truth, est, mp, 100);
  CHECK(per50.time_average == 0.0);
  // One labeling for the whole run: the swapped one is cheaper (49 frames
  // before the crossing vs 50 after), so frames k < 50 cost min(alpha, 8 (50 - k)).
  // (8 * 45 + 40 * 75) / 100
  CHECK(per100.time_average == doctest::Approx(33.6));
  CHECK(per50.time_average <= per100.time_average);

  auto global = evaluate_segments(truth, est, mp, 50, SegmentLabeling::kGlobal);
  CHECK(global.time_average == doctest::Approx(per100.time_average));

  SUBCASE("four-frame miniature") {
    TrackSet t4, e4;
    crossing_pair(4, t4, e4);
    CHECK(evaluate_segments(t4, e4, mp, 2).time_average == 0.0);
    CHECK(evaluate_segments(t4, e4, mp, 4).time_average == doctest::Approx(2.0));
  }
}
