#include "ospat/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ospat/errors.hpp"
#include "ospat/io.hpp"

namespace ospat {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Region parse_region(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw ConfigError("region must be [x0, y0, x1, y1]");
  return {v[0], v[1], v[2], v[3]};
}

// Returns true when the clutter region was given explicitly.
bool parse_sensor(const json& j, SensorModel& sm, const std::string& where) {
  check_keys(j, {"pd", "sigma_x", "sigma_y", "sigma", "clutter_rate", "clutter_region", "rect_w", "rect_h",
                 "size_jitter", "center_jitter"},
             where);
  if (j.contains("sigma")) sm.sigma_x = sm.sigma_y = j.at("sigma").get<double>();
  get_opt(j, "pd", sm.pd);
  get_opt(j, "sigma_x", sm.sigma_x);
  get_opt(j, "sigma_y", sm.sigma_y);
  get_opt(j, "clutter_rate", sm.clutter_rate);
  get_opt(j, "rect_w", sm.rect_w);
  get_opt(j, "rect_h", sm.rect_h);
  get_opt(j, "size_jitter", sm.size_jitter);
  get_opt(j, "center_jitter", sm.center_jitter);
  if (j.contains("clutter_region")) {
    sm.clutter_region = parse_region(j.at("clutter_region"));
    return true;
  }
  return false;
}

ScenarioDescriptor parse_descriptor(const json& j) {
  check_keys(j, {"frames", "fps", "arena", "targets", "random_targets", "speed_min", "speed_max", "margin",
                 "leg_seconds", "turn_sigma_deg", "head_sensor", "body_sensor", "every_nth"},
             "scenario");
  ScenarioDescriptor d;
  get_opt(j, "frames", d.frames);
  get_opt(j, "fps", d.fps);
  if (j.contains("arena")) d.arena = parse_region(j.at("arena"));
  get_opt(j, "random_targets", d.random_targets);
  get_opt(j, "speed_min", d.speed_min);
  get_opt(j, "speed_max", d.speed_max);
  get_opt(j, "margin", d.margin);
  get_opt(j, "leg_seconds", d.leg_seconds);
  get_opt(j, "turn_sigma_deg", d.turn_sigma_deg);
  get_opt(j, "every_nth", d.every_nth);
  if (j.contains("targets")) {
    for (const json& t : j.at("targets")) {
      check_keys(t, {"birth", "death", "x", "y", "speed", "heading_deg"}, "scenario.targets[]");
      TargetSpec s;
      s.birth_frame = t.at("birth").get<int>();
      s.death_frame = t.at("death").get<int>();
      s.x = t.at("x").get<double>();
      s.y = t.at("y").get<double>();
      get_opt(t, "speed", s.speed);
      get_opt(t, "heading_deg", s.heading_deg);
      d.targets.push_back(s);
    }
  }
  const bool head_region = j.contains("head_sensor") && parse_sensor(j.at("head_sensor"), d.head, "scenario.head_sensor");
  const bool body_region = j.contains("body_sensor") && parse_sensor(j.at("body_sensor"), d.body, "scenario.body_sensor");
  if (!head_region) d.head.clutter_region = d.arena;
  if (!body_region) d.body.clutter_region = d.arena;
  return d;
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Re-throws an exception with the stage name prefixed, keeping its category.
template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const FormatError& e) {
    throw FormatError(name, 0, e.what());
  } catch (const DescriptorError& e) {
    throw DescriptorError(name + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError(name + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(name + ": " + e.what());
  }
}

std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    metric.validate();
    head.validate();
    body.validate();
    tracker.motion.validate();
    for (double a : alphas) {
      MetricParams m = metric;
      m.alpha = a;
      m.validate();
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (segment_length < 1) throw ConfigError("segment_length must be >= 1");
  if (algorithms.empty() || alphas.empty() || every_nth.empty())
    throw ConfigError("algorithms, alphas and every_nth must be non-empty");
  for (int n : every_nth)
    if (n < 1) throw ConfigError("every_nth must be >= 1");
  if (scenario) {
    scenario->validate();
  } else {
    if (truth_path.empty() || detections_path.empty())
      throw ConfigError("either a scenario or both truth and detections files are required");
    for (const auto& p : {truth_path, detections_path})
      if (!std::filesystem::exists(p)) throw ConfigError("input file does not exist: " + p.string());
  }
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  return guarded([&] {
    const json j = json::parse(json_text);
    check_keys(j, {"metric", "segment_length", "global_labeling", "algorithms", "alphas", "every_nth", "head_sensor",
                   "body_sensor", "motion", "bernoulli", "cphd", "scenario", "truth", "detections", "seed",
                   "output_dir"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("metric")) {
      const json& m = j.at("metric");
      check_keys(m, {"p", "p_prime", "c", "alpha"}, "metric");
      get_opt(m, "p", cfg.metric.p);
      get_opt(m, "p_prime", cfg.metric.p_prime);
      get_opt(m, "c", cfg.metric.c);
      get_opt(m, "alpha", cfg.metric.alpha);
      cfg.alphas = {cfg.metric.alpha};
    }
    get_opt(j, "segment_length", cfg.segment_length);
    if (j.value("global_labeling", false)) cfg.labeling = SegmentLabeling::kGlobal;
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (int a : j.at("algorithms").get<std::vector<int>>()) cfg.algorithms.push_back(algorithm_from_int(a));
    }
    get_opt(j, "alphas", cfg.alphas);
    get_opt(j, "every_nth", cfg.every_nth);
    const bool head_region = j.contains("head_sensor") && parse_sensor(j.at("head_sensor"), cfg.head, "head_sensor");
    const bool body_region = j.contains("body_sensor") && parse_sensor(j.at("body_sensor"), cfg.body, "body_sensor");
    if (j.contains("motion")) {
      const json& m = j.at("motion");
      check_keys(m, {"dt", "process_noise_intensity"}, "motion");
      get_opt(m, "dt", cfg.tracker.motion.dt);
      get_opt(m, "process_noise_intensity", cfg.tracker.motion.process_noise_intensity);
    }
    if (j.contains("bernoulli")) {
      const json& b = j.at("bernoulli");
      auto& bc = cfg.tracker.bernoulli;
      check_keys(b, {"survival_prob", "birth_existence", "prune_threshold", "report_threshold", "particles", "gate",
                     "birth_velocity_sigma", "merge_distance"},
                 "bernoulli");
      get_opt(b, "survival_prob", bc.survival_prob);
      get_opt(b, "birth_existence", bc.birth_existence);
      get_opt(b, "prune_threshold", bc.prune_threshold);
      get_opt(b, "report_threshold", bc.report_threshold);
      get_opt(b, "particles", bc.particles);
      get_opt(b, "gate", bc.gate);
      get_opt(b, "birth_velocity_sigma", bc.birth_velocity_sigma);
      get_opt(b, "merge_distance", bc.merge_distance);
    }
    if (j.contains("cphd")) {
      const json& c = j.at("cphd");
      auto& cc = cfg.tracker.cphd;
      check_keys(c, {"survival_prob", "birth_weight", "prune_threshold", "merge_threshold", "confirm_threshold", "gate",
                     "cluster_radius", "birth_velocity_sigma", "n_max"},
                 "cphd");
      get_opt(c, "survival_prob", cc.survival_prob);
      get_opt(c, "birth_weight", cc.birth_weight);
      get_opt(c, "prune_threshold", cc.prune_threshold);
      get_opt(c, "merge_threshold", cc.merge_threshold);
      get_opt(c, "confirm_threshold", cc.confirm_threshold);
      get_opt(c, "gate", cc.gate);
      get_opt(c, "cluster_radius", cc.cluster_radius);
      get_opt(c, "birth_velocity_sigma", cc.birth_velocity_sigma);
      get_opt(c, "n_max", cc.n_max);
    }
    if (j.contains("scenario")) {
      const json& s = j.at("scenario");
      cfg.scenario = s.is_string() ? load_scenario_descriptor(base_dir / s.get<std::string>()) : parse_descriptor(s);
      if (!head_region) cfg.head.clutter_region = cfg.scenario->arena;
      if (!body_region) cfg.body.clutter_region = cfg.scenario->arena;
    }
    if (j.contains("truth")) cfg.truth_path = base_dir / j.at("truth").get<std::string>();
    if (j.contains("detections")) cfg.detections_path = base_dir / j.at("detections").get<std::string>();
    get_opt(j, "seed", cfg.seed);
    cfg.tracker.seed = cfg.seed;
    if (j.contains("output_dir")) cfg.output_dir = base_dir / j.at("output_dir").get<std::string>();
    return cfg;
  });
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

ScenarioDescriptor parse_scenario_descriptor(std::string_view json_text) {
  return guarded([&] { return parse_descriptor(json::parse(json_text)); });
}

ScenarioDescriptor load_scenario_descriptor(const std::filesystem::path& path) {
  return parse_scenario_descriptor(read_file(path));
}

ExperimentInputs prepare_inputs(const ExperimentConfig& cfg) {
  if (cfg.scenario) {
    return stage("simulate", [&] {
      ScenarioDescriptor d = *cfg.scenario;
      d.every_nth = 1;  // thinning happens per run so all runs share detections
      Scenario s = generate_scenario(d, cfg.seed);
      return ExperimentInputs{std::move(s.truth), std::move(s.detections)};
    });
  }
  return stage("load", [&] {
    DetectionSeries dets = load_detections(cfg.detections_path);
    TrackSet truth = load_tracks(cfg.truth_path);
    const int frames = std::max(truth.frame_count(), static_cast<int>(dets.size()));
    truth = TrackSet(frames, truth.tracks());
    dets.resize(static_cast<std::size_t>(frames));
    return ExperimentInputs{std::move(truth), std::move(dets)};
  });
}

TrackSet track_inputs(const ExperimentInputs& inputs, const ExperimentConfig& cfg, Algorithm algorithm, int every_nth) {
  DetectionSeries dets = inputs.detections;
  stage("thin", [&] { apply_detection_frequency(dets, every_nth); });
  dets = stage("body_to_head", [&] { return convert_body_detections(dets); });
  TrackerConfig tc = cfg.tracker;
  tc.algorithm = algorithm;
  return stage("track", [&] { return run_tracker(dets, cfg.head, cfg.body, tc); });
}

ScoreSeries score_tracks(const TrackSet& truth, const TrackSet& estimate, const ExperimentConfig& cfg, double alpha) {
  MetricParams m = cfg.metric;
  m.alpha = alpha;
  return stage("evaluate", [&] { return evaluate_segments(truth, estimate, m, cfg.segment_length, cfg.labeling); });
}

namespace {

std::string per_frame_name(const std::string& tracker, int every_nth, double alpha) {
  return "perframe_" + tracker + "_n" + std::to_string(every_nth) + "_a" + format_alpha(alpha) + ".csv";
}

}  // namespace

EvaluationResult run_evaluation(const ExperimentConfig& cfg) {
  stage("config", [&] { cfg.validate(); });
  const ExperimentInputs inputs = prepare_inputs(cfg);
  EvaluationResult r;
  r.algorithm = cfg.algorithms.front();
  r.every_nth = cfg.every_nth.front();
  r.alpha = cfg.alphas.front();
  r.estimate = track_inputs(inputs, cfg, r.algorithm, r.every_nth);
  r.scores = score_tracks(inputs.truth, r.estimate, cfg, r.alpha);
  if (!cfg.output_dir.empty()) {
    stage("write", [&] {
      std::filesystem::create_directories(cfg.output_dir);
      const std::string name = to_string(r.algorithm);
      write_per_frame_csv(cfg.output_dir / per_frame_name(name, r.every_nth, r.alpha), r.scores);
      write_summary_csv(cfg.output_dir / "summary.csv",
                        {{name, r.alpha, cfg.segment_length, r.scores.time_average, r.every_nth}});
      save_tracks(cfg.output_dir / ("tracks_" + name + "_n" + std::to_string(r.every_nth) + ".csv"), r.estimate);
    });
  }
  return r;
}

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg) {
  stage("config", [&] { cfg.validate(); });
  const ExperimentInputs inputs = prepare_inputs(cfg);

  struct Job {
    Algorithm algorithm;
    int every_nth;
    std::future<TrackSet> estimate;
  };
  std::vector<Job> jobs;
  for (Algorithm a : cfg.algorithms)
    for (int n : cfg.every_nth)
      jobs.push_back({a, n, std::async(std::launch::async, [&inputs, &cfg, a, n] { return track_inputs(inputs, cfg, a, n); })});

  std::vector<SummaryRow> rows;
  std::vector<std::pair<std::string, ScoreSeries>> per_frame;
  for (Job& job : jobs) {
    const TrackSet estimate = job.estimate.get();
    const std::string name = to_string(job.algorithm);
    for (double alpha : cfg.alphas) {
      ScoreSeries s = score_tracks(inputs.truth, estimate, cfg, alpha);
      rows.push_back({name, alpha, cfg.segment_length, s.time_average, job.every_nth});
      per_frame.emplace_back(per_frame_name(name, job.every_nth, alpha), std::move(s));
    }
  }
  if (!cfg.output_dir.empty()) {
    stage("write", [&] {
      std::filesystem::create_directories(cfg.output_dir);
      for (const auto& [file, s] : per_frame) write_per_frame_csv(cfg.output_dir / file, s);
      write_summary_csv(cfg.output_dir / "summary.csv", rows);
    });
  }
  return rows;
}

void write_per_frame_csv(const std::filesystem::path& path, const ScoreSeries& scores) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), 0, "cannot open file for writing");
  out << "frame,ospat\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.per_frame.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", scores.per_frame[i]);
    out << i + 1 << ',' << buf << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string(), 0, "cannot open file for writing");
  out << "tracker,alpha,segment_length,time_average,every_nth\n";
  char buf[64];
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.time_average);
    out << r.tracker << ',' << format_alpha(r.alpha) << ',' << r.segment_length << ',' << buf << ',' << r.every_nth
        << '\n';
  }
}

}  // namespace ospat
