// ospat: OSPA-T evaluation, tracking, scenario simulation and experiment sweeps.
//
// Exit codes: 0 success, 2 input/format error, 3 config error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ospat/errors.hpp"
#include "ospat/experiment.hpp"
#include "ospat/io.hpp"
#include "ospat/ospat.hpp"
#include "ospat/scenario.hpp"
#include "ospat/tracker.hpp"

namespace fs = std::filesystem;
using namespace ospat;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

std::uint64_t default_seed() {
  const char* env = std::getenv("OSPAT_SEED");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 10);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("OSPAT_SEED is not an unsigned integer: ") + env);
  }
}

struct MetricFlags {
  std::optional<double> p, p_prime, c, alpha;
  std::optional<int> segment_length;
  bool global = false;

  void add_to(CLI::App& app) {
    app.add_option("--p", p, "OSPA order p (default 1)");
    app.add_option("--p-prime", p_prime, "base-distance order p' (default 1)");
    app.add_option("--c", c, "cut-off c (default 100)");
    app.add_option("--alpha", alpha, "labeling penalty alpha (default 75)");
    app.add_option("--segment-length", segment_length, "frames per labeling segment (default 100)");
    app.add_flag("--global-labeling", global, "label once over the whole sequence");
  }

  void apply(ExperimentConfig& cfg) const {
    if (p) cfg.metric.p = *p;
    if (p_prime) cfg.metric.p_prime = *p_prime;
    if (c) cfg.metric.c = *c;
    if (alpha) {
      cfg.metric.alpha = *alpha;
      cfg.alphas = {*alpha};
    }
    if (segment_length) cfg.segment_length = *segment_length;
    if (global) cfg.labeling = SegmentLabeling::kGlobal;
  }
};

// Seed precedence: --seed, then the config's "seed", then $OSPAT_SEED, then 1.
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = path.empty() ? ExperimentConfig{} : load_experiment_config(path);
  bool config_seed = false;
  if (!path.empty()) {
    std::ifstream in(path);
    config_seed = nlohmann::json::parse(in, nullptr, false).contains("seed");
  }
  if (seed)
    cfg.seed = *seed;
  else if (!config_seed)
    cfg.seed = default_seed();
  cfg.tracker.seed = cfg.seed;
  return cfg;
}

void print_summary(const std::vector<SummaryRow>& rows) {
  std::printf("tracker,alpha,segment_length,time_average,every_nth\n");
  for (const auto& r : rows)
    std::printf("%s,%g,%d,%.6f,%d\n", r.tracker.c_str(), r.alpha, r.segment_length, r.time_average, r.every_nth);
}

int run_metric(const std::string& truth_path, const std::string& est_path, const std::string& out, int frames,
               const MetricFlags& mf) {
  ExperimentConfig cfg;
  mf.apply(cfg);
  try {
    cfg.metric.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (cfg.segment_length < 1) throw ConfigError("segment_length must be >= 1");
  std::optional<int> k;
  if (frames > 0) k = frames;
  TrackSet truth = load_tracks(truth_path, k);
  TrackSet est = load_tracks(est_path, k);
  const int n = std::max(truth.frame_count(), est.frame_count());
  truth = TrackSet(n, truth.tracks());
  est = TrackSet(n, est.tracks());
  const ScoreSeries s = evaluate_segments(truth, est, cfg.metric, cfg.segment_length, cfg.labeling);
  if (!out.empty()) write_per_frame_csv(out, s);
  std::printf("frames,%d\ntime_average,%.6f\n", n, s.time_average);
  for (const auto& g : s.segments) std::printf("segment,%d,%d,%.6f\n", g.first_frame, g.last_frame, g.mean);
  return 0;
}

int run_track(const std::string& dets_path, const std::string& config, int alg, int every_nth,
              std::optional<std::uint64_t> seed, int frames, const std::string& out) {
  ExperimentConfig cfg = load_config(config, seed);
  cfg.tracker.algorithm = algorithm_from_int(alg);
  if (every_nth < 1) throw ConfigError("every_nth must be >= 1");
  DetectionSeries dets = load_detections(dets_path, frames > 0 ? std::optional<int>(frames) : std::nullopt);
  apply_detection_frequency(dets, every_nth);
  const TrackSet ts = run_tracker(convert_body_detections(dets), cfg.head, cfg.body, cfg.tracker);
  if (out.empty())
    write_tracks(std::cout, ts);
  else
    save_tracks(out, ts);
  return 0;
}

int run_simulate(const std::string& scenario, std::uint64_t seed, const std::string& out_dir,
                 std::optional<int> every_nth) {
  ScenarioDescriptor d = load_scenario_descriptor(scenario);
  if (every_nth) d.every_nth = *every_nth;
  const Scenario sc = generate_scenario(d, seed);
  fs::create_directories(out_dir);
  save_tracks(fs::path(out_dir) / "truth.csv", sc.truth);
  save_detections(fs::path(out_dir) / "detections.csv", sc.detections);
  std::printf("wrote %s and %s (%zu tracks, %d frames)\n", (fs::path(out_dir) / "truth.csv").c_str(),
              (fs::path(out_dir) / "detections.csv").c_str(), sc.truth.size(), sc.truth.frame_count());
  return 0;
}

int run_sweep(const std::string& config, const MetricFlags& mf, const std::vector<int>& algs,
              const std::vector<int>& nths, const std::vector<double>& alphas, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  ExperimentConfig cfg = load_config(config, seed);
  mf.apply(cfg);
  if (!algs.empty()) {
    cfg.algorithms.clear();
    for (int a : algs) cfg.algorithms.push_back(algorithm_from_int(a));
  }
  if (!nths.empty()) cfg.every_nth = nths;
  if (!alphas.empty()) cfg.alphas = alphas;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  print_summary(run_experiment(cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OSPA-T evaluation of labeled multi-target tracks"};
  app.require_subcommand(1);

  MetricFlags metric_flags;
  std::string truth_path, est_path, out_path, config_path, dets_path, scenario_path, out_dir;
  int frames = 0, alg = 3, every_nth = 1;
  std::optional<int> sim_every_nth;
  std::optional<std::uint64_t> seed;
  std::vector<int> algs, nths;
  std::vector<double> alphas;

  auto* metric = app.add_subcommand("ospat", "OSPA-T between a truth and an estimated track file");
  metric->add_option("truth", truth_path, "truth track CSV")->required();
  metric->add_option("estimate", est_path, "estimated track CSV")->required();
  metric->add_option("--out", out_path, "per-frame CSV output");
  metric->add_option("--frames", frames, "frame count (default: largest frame in either file)");
  metric_flags.add_to(*metric);

  auto* track = app.add_subcommand("track", "run a tracker over a detection file");
  track->add_option("detections", dets_path, "detection CSV")->required();
  track->add_option("--alg", alg, "tracker: 1, 2 or 3")->capture_default_str();
  track->add_option("--every-nth", every_nth, "use detections from every n-th frame")->capture_default_str();
  track->add_option("--config", config_path, "JSON config with sensor/tracker parameters");
  track->add_option("--seed", seed, "tracker seed (default: config, then $OSPAT_SEED, then 1)");
  track->add_option("--frames", frames, "frame count (default: largest frame in the file)");
  track->add_option("--out", out_path, "track CSV output (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "generate truth and detections from a scenario");
  simulate->add_option("scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--seed", seed, "seed (default $OSPAT_SEED or 1)");
  simulate->add_option("--every-nth", sim_every_nth, "detector runs on every n-th frame");
  simulate->add_option("--out-dir", out_dir, "output directory")->required();

  auto* experiment = app.add_subcommand("experiment", "full sweep over trackers, alphas and detection frequency");
  experiment->add_option("--config", config_path, "experiment JSON")->required();
  experiment->add_option("--alg", algs, "trackers to run (overrides config)");
  experiment->add_option("--every-nth", nths, "detection frequencies (overrides config)");
  experiment->add_option("--alphas", alphas, "alpha sweep (overrides config and --alpha)");
  experiment->add_option("--seed", seed, "seed (default: config, then $OSPAT_SEED, then 1)");
  experiment->add_option("--out-dir", out_dir, "output directory (overrides config)");
  metric_flags.add_to(*experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*metric) return run_metric(truth_path, est_path, out_path, frames, metric_flags);
    if (*track) return run_track(dets_path, config_path, alg, every_nth, seed, frames, out_path);
    if (*simulate) return run_simulate(scenario_path, seed ? *seed : default_seed(), out_dir, sim_every_nth);
    if (*experiment) return run_sweep(config_path, metric_flags, algs, nths, alphas, seed, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
