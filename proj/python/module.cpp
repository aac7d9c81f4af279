#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ospat/assignment.hpp"
#include "ospat/errors.hpp"
#include "ospat/experiment.hpp"
#include "ospat/io.hpp"
#include "ospat/ospa.hpp"
#include "ospat/ospat.hpp"
#include "ospat/scenario.hpp"
#include "ospat/tracker.hpp"

namespace py = pybind11;
using namespace ospat;

namespace {

CostMatrix to_matrix(const std::vector<std::vector<double>>& rows) { return CostMatrix::from_rows(rows); }

py::tuple assignment_tuple(const Assignment& a) { return py::make_tuple(a.pairs, a.total_cost); }

}  // namespace

PYBIND11_MODULE(_ospat, m) {
  m.doc() = "OSPA-T evaluation and multi-target trackers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<KinematicState>(m, "KinematicState")
      .def(py::init<>())
      .def(py::init([](double x, double vx, double y, double vy) { return KinematicState{x, vx, y, vy}; }),
           py::arg("x"), py::arg("vx") = 0.0, py::arg("y") = 0.0, py::arg("vy") = 0.0)
      .def_readwrite("x", &KinematicState::x)
      .def_readwrite("vx", &KinematicState::vx)
      .def_readwrite("y", &KinematicState::y)
      .def_readwrite("vy", &KinematicState::vy)
      .def(py::self == py::self)
      .def("__repr__", [](const KinematicState& s) {
        return "KinematicState(x=" + std::to_string(s.x) + ", vx=" + std::to_string(s.vx) +
               ", y=" + std::to_string(s.y) + ", vy=" + std::to_string(s.vy) + ")";
      });

  py::class_<LabeledState>(m, "LabeledState")
      .def(py::init([](int label, KinematicState s) { return LabeledState{label, s}; }), py::arg("label"),
           py::arg("state"))
      .def_readwrite("label", &LabeledState::label)
      .def_readwrite("state", &LabeledState::state);

  py::class_<Track>(m, "Track")
      .def(py::init([](int label, std::map<int, KinematicState> states) { return Track{label, std::move(states)}; }),
           py::arg("label"), py::arg("states") = std::map<int, KinematicState>{})
      .def_readwrite("label", &Track::label)
      .def_readwrite("states", &Track::states);

  py::class_<TrackSet>(m, "TrackSet")
      .def(py::init<int, std::vector<Track>>(), py::arg("frame_count"), py::arg("tracks"))
      .def_property_readonly("frame_count", &TrackSet::frame_count)
      .def_property_readonly("tracks", &TrackSet::tracks)
      .def_property_readonly("max_label", &TrackSet::max_label)
      .def("window", &TrackSet::window, py::arg("first"), py::arg("last"))
      .def("at_frame", &labeled_set_at_frame, py::arg("k"))
      .def("relabel", &relabel, py::arg("mapping"))
      .def("__len__", &TrackSet::size)
      .def(py::self == py::self);

  m.def(
      "solve_assignment", [](const std::vector<std::vector<double>>& rows) {
        return assignment_tuple(solve_assignment(to_matrix(rows)));
      },
      py::arg("cost"), "Minimum-cost injection of the smaller side; inf marks forbidden pairs. Returns (pairs, total).");
  m.def(
      "brute_force_assignment", [](const std::vector<std::vector<double>>& rows) {
        return assignment_tuple(brute_force_assignment(to_matrix(rows)));
      },
      py::arg("cost"));

  py::class_<MetricParams>(m, "MetricParams")
      .def(py::init([](double p, double p_prime, double c, double alpha) {
             MetricParams mp{p, p_prime, c, alpha};
             mp.validate();
             return mp;
           }),
           py::arg("p") = 1.0, py::arg("p_prime") = 1.0, py::arg("c") = 100.0, py::arg("alpha") = 75.0)
      .def_readwrite("p", &MetricParams::p)
      .def_readwrite("p_prime", &MetricParams::p_prime)
      .def_readwrite("c", &MetricParams::c)
      .def_readwrite("alpha", &MetricParams::alpha);

  m.def("base_distance", &base_distance, py::arg("a"), py::arg("b"), py::arg("params") = MetricParams{});
  m.def("ospa", &ospa_labeled_sets, py::arg("x"), py::arg("y"), py::arg("params") = MetricParams{});

  py::enum_<SegmentLabeling>(m, "SegmentLabeling")
      .value("PER_SEGMENT", SegmentLabeling::kPerSegment)
      .value("GLOBAL", SegmentLabeling::kGlobal);

  py::class_<SegmentScore>(m, "SegmentScore")
      .def_readonly("first_frame", &SegmentScore::first_frame)
      .def_readonly("last_frame", &SegmentScore::last_frame)
      .def_readonly("mean", &SegmentScore::mean);

  py::class_<ScoreSeries>(m, "ScoreSeries")
      .def_readonly("per_frame", &ScoreSeries::per_frame)
      .def_readonly("segments", &ScoreSeries::segments)
      .def_readonly("time_average", &ScoreSeries::time_average)
      .def("at_frame", &ScoreSeries::at_frame, py::arg("k"));

  m.def("track_assignment_cost", &track_assignment_cost, py::arg("truth"), py::arg("est"),
        py::arg("params") = MetricParams{});
  m.def("label_estimated_tracks", &label_estimated_tracks, py::arg("truth"), py::arg("est"),
        py::arg("params") = MetricParams{});
  m.def("evaluate_segments", &evaluate_segments, py::arg("truth"), py::arg("est"), py::arg("params") = MetricParams{},
        py::arg("segment_length") = kDefaultSegmentLength, py::arg("labeling") = SegmentLabeling::kPerSegment);

  py::class_<Rect>(m, "Rect")
      .def(py::init([](double chi, double eta, double w, double h, int sensor) { return Rect{chi, eta, w, h, sensor}; }),
           py::arg("chi"), py::arg("eta"), py::arg("w"), py::arg("h"), py::arg("sensor") = kHeadSensor)
      .def_readwrite("chi", &Rect::chi)
      .def_readwrite("eta", &Rect::eta)
      .def_readwrite("w", &Rect::w)
      .def_readwrite("h", &Rect::h)
      .def_readwrite("sensor", &Rect::sensor);

  py::class_<SensorModel>(m, "SensorModel")
      .def_static("head", &SensorModel::head)
      .def_static("body", &SensorModel::body)
      .def_readwrite("pd", &SensorModel::pd)
      .def_readwrite("sigma_x", &SensorModel::sigma_x)
      .def_readwrite("sigma_y", &SensorModel::sigma_y)
      .def_readwrite("clutter_rate", &SensorModel::clutter_rate)
      .def_readwrite("rect_w", &SensorModel::rect_w)
      .def_readwrite("rect_h", &SensorModel::rect_h)
      .def_readwrite("size_jitter", &SensorModel::size_jitter)
      .def_readwrite("center_jitter", &SensorModel::center_jitter);

  py::class_<FrameDetections>(m, "FrameDetections")
      .def(py::init<>())
      .def_readwrite("head", &FrameDetections::head)
      .def_readwrite("body", &FrameDetections::body)
      .def_readwrite("sensed", &FrameDetections::sensed);

  m.def("body_to_head", &body_to_head, py::arg("body"));
  m.def("head_to_body", &head_to_body, py::arg("head"));
  m.def("likelihood_imprecise", &likelihood_imprecise, py::arg("rect"), py::arg("state"), py::arg("sensor"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("truth", &Scenario::truth)
      .def_readonly("detections", &Scenario::detections);

  m.def(
      "simulate", [](const std::string& descriptor_json, std::uint64_t seed) {
        return generate_scenario(parse_scenario_descriptor(descriptor_json), seed);
      },
      py::arg("descriptor_json"), py::arg("seed") = 1, "Ground truth and detections from a JSON scenario descriptor.");

  m.def(
      "run_tracker",
      [](const DetectionSeries& detections, int algorithm, std::uint64_t seed, int every_nth) {
        DetectionSeries series = detections;
        apply_detection_frequency(series, every_nth);
        TrackerConfig cfg;
        cfg.algorithm = algorithm_from_int(algorithm);
        cfg.seed = seed;
        py::gil_scoped_release release;
        return run_tracker(convert_body_detections(series), SensorModel::head(), SensorModel::body(), cfg);
      },
      py::arg("detections"), py::arg("algorithm") = 3, py::arg("seed") = 1, py::arg("every_nth") = 1,
      "Tracks native detections (body rectangles unconverted) with default sensor models.");

  m.def("load_tracks", [](const std::filesystem::path& p) { return load_tracks(p); }, py::arg("path"));
  m.def("save_tracks", &save_tracks, py::arg("path"), py::arg("tracks"));
  m.def("load_detections", [](const std::filesystem::path& p) { return load_detections(p); }, py::arg("path"));
  m.def("save_detections", &save_detections, py::arg("path"), py::arg("detections"));

  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("tracker", &SummaryRow::tracker)
      .def_readonly("alpha", &SummaryRow::alpha)
      .def_readonly("segment_length", &SummaryRow::segment_length)
      .def_readonly("time_average", &SummaryRow::time_average)
      .def_readonly("every_nth", &SummaryRow::every_nth);

  m.def(
      "run_experiment", [](const std::filesystem::path& config_path) {
        auto cfg = load_experiment_config(config_path);
        py::gil_scoped_release release;
        return run_experiment(cfg);
      },
      py::arg("config_path"));
}
