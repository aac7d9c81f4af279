#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ospat/detection.hpp"
#include "ospat/track_model.hpp"

namespace ospat {

inline constexpr const char* kTrackHeader = "frame,label,x,y,vx,vy";
inline constexpr const char* kDetectionHeader = "frame,sensor,chi,eta,w,h";

// Track CSV: header `frame,label,x,y,vx,vy`, one row per (label, frame),
// values written with 6 decimals. The frame count is `frame_count` when
// given (it must cover every row), otherwise the largest frame in the file.
// Throws FormatError (with line number) on malformed rows, a bad header or a
// repeated (label, frame).
TrackSet read_tracks(std::istream& in, const std::string& source, std::optional<int> frame_count = std::nullopt);
TrackSet load_tracks(const std::filesystem::path& path, std::optional<int> frame_count = std::nullopt);
void write_tracks(std::ostream& out, const TrackSet& ts);
void save_tracks(const std::filesystem::path& path, const TrackSet& ts);

// Detection CSV: header `frame,sensor,chi,eta,w,h`. Rows may come in any
// frame order; within a frame, file order is kept. Body rectangles are
// returned as read (no head-like conversion). All frames are marked sensed.
DetectionSeries read_detections(std::istream& in, const std::string& source,
                                std::optional<int> frame_count = std::nullopt);
DetectionSeries load_detections(const std::filesystem::path& path, std::optional<int> frame_count = std::nullopt);
void write_detections(std::ostream& out, const DetectionSeries& series);
void save_detections(const std::filesystem::path& path, const DetectionSeries& series);

}  // namespace ospat
