"""OSPA-T evaluation and multi-target trackers."""

from ._ospat import (
    ConfigError,
    FormatError,
    FrameDetections,
    KinematicState,
    LabeledState,
    MetricParams,
    Rect,
    Scenario,
    ScoreSeries,
    SegmentLabeling,
    SegmentScore,
    SensorModel,
    SummaryRow,
    Track,
    TrackSet,
    base_distance,
    body_to_head,
    brute_force_assignment,
    evaluate_segments,
    head_to_body,
    label_estimated_tracks,
    likelihood_imprecise,
    load_detections,
    load_tracks,
    ospa,
    run_experiment,
    run_tracker,
    save_detections,
    save_tracks,
    simulate,
    solve_assignment,
    track_assignment_cost,
)

__all__ = [name for name in dir() if not name.startswith("_")]
