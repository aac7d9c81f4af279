#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ospat/detection.hpp"
#include "ospat/ospat.hpp"
#include "ospat/scenario.hpp"
#include "ospat/tracker.hpp"

namespace ospat {

struct ExperimentConfig {
  MetricParams metric;
  int segment_length = kDefaultSegmentLength;
  SegmentLabeling labeling = SegmentLabeling::kPerSegment;

  // Sweep axes. run_evaluation uses the first entry of each.
  std::vector<Algorithm> algorithms{Algorithm::kImpreciseBernoulli, Algorithm::kGaussianBernoulli, Algorithm::kCphd};
  std::vector<double> alphas{75.0};
  std::vector<int> every_nth{1};

  SensorModel head = SensorModel::head();
  SensorModel body = SensorModel::body();
  TrackerConfig tracker;

  // Either a scenario to simulate or a pair of input files.
  std::optional<ScenarioDescriptor> scenario;
  std::filesystem::path truth_path;
  std::filesystem::path detections_path;

  std::uint64_t seed = 1;
  std::filesystem::path output_dir;  // empty: write nothing

  // Throws ConfigError on inconsistent settings or missing input files.
  void validate() const;
};

// JSON config. Unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ScenarioDescriptor parse_scenario_descriptor(std::string_view json_text);
ScenarioDescriptor load_scenario_descriptor(const std::filesystem::path& path);

struct ExperimentInputs {
  TrackSet truth;
  DetectionSeries detections;  // every frame sensed, body rectangles in native form
};

// Loads the input files or simulates the configured scenario.
ExperimentInputs prepare_inputs(const ExperimentConfig& cfg);

struct EvaluationResult {
  Algorithm algorithm = Algorithm::kCphd;
  int every_nth = 1;
  double alpha = 75.0;
  TrackSet estimate;
  ScoreSeries scores;
};

struct SummaryRow {
  std::string tracker;
  double alpha = 0.0;
  int segment_length = 0;
  double time_average = 0.0;
  int every_nth = 1;
};

// detections -> thinning to every_nth -> body-to-head -> tracker ->
// extract_tracks. Errors are re-thrown with the failing stage prefixed.
TrackSet track_inputs(const ExperimentInputs& inputs, const ExperimentConfig& cfg, Algorithm algorithm, int every_nth);

// evaluate_segments with the configured metric, alpha replaced.
ScoreSeries score_tracks(const TrackSet& truth, const TrackSet& estimate, const ExperimentConfig& cfg, double alpha);

// Single run with the first algorithm, alpha and every_nth of the config.
// Writes per-frame and summary CSVs when output_dir is set.
EvaluationResult run_evaluation(const ExperimentConfig& cfg);

// Full sweep over algorithms x every_nth x alphas. Tracker runs are
// independent and execute concurrently; rows come back in sweep order.
// Writes `summary.csv` plus one per-frame CSV per row when output_dir is set.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg);

// `frame,ospat`
void write_per_frame_csv(const std::filesystem::path& path, const ScoreSeries& scores);
// `tracker,alpha,segment_length,time_average,every_nth`
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace ospat
