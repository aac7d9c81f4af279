#include "ospat/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ospat/errors.hpp"

namespace ospat {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, const char* header, std::size_t columns)
      : in_(in), source_(std::move(source)), columns_(columns) {
    std::string line;
    if (!std::getline(in_, line)) throw FormatError(source_, 1, "missing header");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw FormatError(source_, line_no_, "expected header '" + std::string(header) + "'");
  }

  // Next non-blank row, split into exactly `columns` fields.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (line_.find_first_not_of(" \t\r") == std::string::npos) continue;
      fields = split(line_);
      if (fields.size() != columns_) fail("expected " + std::to_string(columns_) + " fields");
      return true;
    }
    return false;
  }

  int integer(std::string_view s, const char* what) const {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
  }

  double real(std::string_view s, const char* what) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      fail(std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(source_, line_no_, what); }
  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t columns_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), 0, "cannot open file for writing");
  return out;
}

void check_frame_count(const std::string& source, std::optional<int> frame_count, int max_frame) {
  if (frame_count && *frame_count < max_frame)
    throw FormatError(source, 0, "frame " + std::to_string(max_frame) + " exceeds frame count " +
                                     std::to_string(*frame_count));
}

}  // namespace

TrackSet read_tracks(std::istream& in, const std::string& source, std::optional<int> frame_count) {
  CsvReader csv(in, source, kTrackHeader, 6);
  std::map<int, Track> tracks;
  int max_frame = 0;
  std::vector<std::string_view> f;
  while (csv.next(f)) {
    const int frame = csv.integer(f[0], "frame");
    const int label = csv.integer(f[1], "label");
    if (frame < 1) csv.fail("frame must be >= 1");
    if (label < 1) csv.fail("label must be >= 1");
    const KinematicState s{csv.real(f[2], "x"), csv.real(f[4], "vx"), csv.real(f[3], "y"), csv.real(f[5], "vy")};
    Track& t = tracks.try_emplace(label, Track{label, {}}).first->second;
    if (!t.states.emplace(frame, s).second)
      csv.fail("duplicate row for label " + std::to_string(label) + " at frame " + std::to_string(frame));
    max_frame = std::max(max_frame, frame);
  }
  check_frame_count(source, frame_count, max_frame);
  std::vector<Track> out;
  for (auto& [label, t] : tracks) out.push_back(std::move(t));
  return TrackSet(frame_count.value_or(max_frame), std::move(out));
}

TrackSet load_tracks(const std::filesystem::path& path, std::optional<int> frame_count) {
  auto in = open_in(path);
  return read_tracks(in, path.string(), frame_count);
}

void write_tracks(std::ostream& out, const TrackSet& ts) {
  out << kTrackHeader << '\n';
  // Frame-major order so files read naturally alongside detection files.
  for (int k = 1; k <= ts.frame_count(); ++k)
    for (const Track& t : ts.tracks()) {
      auto it = t.states.find(k);
      if (it == t.states.end()) continue;
      const KinematicState& s = it->second;
      out << k << ',' << t.label << ',' << fixed6(s.x) << ',' << fixed6(s.y) << ',' << fixed6(s.vx) << ','
          << fixed6(s.vy) << '\n';
    }
}

void save_tracks(const std::filesystem::path& path, const TrackSet& ts) {
  auto out = open_out(path);
  write_tracks(out, ts);
}

DetectionSeries read_detections(std::istream& in, const std::string& source, std::optional<int> frame_count) {
  CsvReader csv(in, source, kDetectionHeader, 6);
  std::map<int, FrameDetections> frames;
  int max_frame = 0;
  std::vector<std::string_view> f;
  while (csv.next(f)) {
    const int frame = csv.integer(f[0], "frame");
    const int sensor = csv.integer(f[1], "sensor");
    if (frame < 1) csv.fail("frame must be >= 1");
    if (sensor != kHeadSensor && sensor != kBodySensor) csv.fail("sensor must be 1 or 2");
    const Rect r{csv.real(f[2], "chi"), csv.real(f[3], "eta"), csv.real(f[4], "w"), csv.real(f[5], "h"), sensor};
    if (!(r.w > 0.0) || !(r.h > 0.0)) csv.fail("rectangle width and height must be positive");
    FrameDetections& fd = frames[frame];
    (sensor == kHeadSensor ? fd.head : fd.body).push_back(r);
    max_frame = std::max(max_frame, frame);
  }
  check_frame_count(source, frame_count, max_frame);
  DetectionSeries series(static_cast<std::size_t>(frame_count.value_or(max_frame)));
  for (auto& [frame, fd] : frames) series[static_cast<std::size_t>(frame - 1)] = std::move(fd);
  return series;
}

DetectionSeries load_detections(const std::filesystem::path& path, std::optional<int> frame_count) {
  auto in = open_in(path);
  return read_detections(in, path.string(), frame_count);
}

void write_detections(std::ostream& out, const DetectionSeries& series) {
  out << kDetectionHeader << '\n';
  for (std::size_t i = 0; i < series.size(); ++i)
    for (const auto* list : {&series[i].head, &series[i].body})
      for (const Rect& r : *list)
        out << i + 1 << ',' << r.sensor << ',' << fixed6(r.chi) << ',' << fixed6(r.eta) << ',' << fixed6(r.w) << ','
            << fixed6(r.h) << '\n';
}

void save_detections(const std::filesystem::path& path, const DetectionSeries& series) {
  auto out = open_out(path);
  write_detections(out, series);
}

}  // namespace ospat
